//! Seeded identity-verification campaigns.
//!
//! Each suite replays one block of the library's defining identities on
//! randomized instances (plus the fixed worked examples) and reports the
//! failures with serialized counterexamples. Campaigns are deterministic in
//! the seed; the rendered report never includes wall-clock time, so repeated
//! runs are byte-identical.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chaos::{from_atoms, riesz, to_atoms, ChaosElement, Polynomial};
use crate::dyadic::{DyadicMask, ScalarSeq};
use crate::matrep::{
    adjoint_p, clifford_verify, hs_inner, word_eigensystem, word_to_matrix, DyadicMatrix,
    GaussianRational,
};
use crate::operators::{
    apply, apply_power, apply_riesz_op, chain_rule, chain_rule_lhs, chain_rule_riesz_closed,
    chain_rule_riesz_operator, compose_table, leibnitz_check, power_on_riesz, riesz_op_expansion,
    LeibnitzFamily, PowerOp, PrimitiveKind, RieszFamily,
};
use crate::rigged::{distance_to_stratum, embed_up, nq_core, project_down, RiggedVector};
use crate::signed::{
    anticommutative_family, embed, is_basic, is_basic_brute_force, verify_embedding, EmbedSpec,
    SignedWord,
};
use crate::{Error, Result, Sign};

/// Names of the available suites, in the order `verify all` runs them.
pub const SUITES: [&str; 10] = [
    "table", "group", "leibnitz", "chain", "riesz-op", "fwht", "matrep", "eigen", "clifford",
    "rigged",
];

/// Default instance count when the caller does not override it.
pub const DEFAULT_COUNT: u64 = 1000;

/// Default seed for all randomized campaigns.
pub const DEFAULT_SEED: u64 = 1729;

/// One failed check with its serialized counterexample.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub case: String,
    pub detail: String,
}

/// Outcome of one suite run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub requested: u64,
    pub instances: u64,
    pub failures: Vec<Failure>,
    /// Wall-clock time; excluded from the serialized renderings so output
    /// stays byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "suite: {}\nseed: {}\nrequested: {}\ninstances: {}\nfailures: {}\n",
            self.suite,
            self.seed,
            self.requested,
            self.instances,
            self.failures.len()
        );
        for (i, f) in self.failures.iter().enumerate() {
            out.push_str(&format!("failure[{i}] {}: {}\n", f.case, f.detail));
        }
        out.push_str(if self.passed() {
            "status: pass\n"
        } else {
            "status: fail\n"
        });
        out
    }

    pub fn render_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value["status"] =
            serde_json::Value::String(if self.passed() { "pass" } else { "fail" }.into());
        serde_json::to_string_pretty(&value).expect("report serializes")
    }
}

/// Run one suite by name.
pub fn run_suite(name: &str, seed: u64, count: u64) -> Result<VerifyReport> {
    let start = Instant::now();
    let mut ctx = Ctx::new(name, seed, count);
    match name {
        "table" => suite_table(&mut ctx),
        "group" => suite_group(&mut ctx),
        "leibnitz" => suite_leibnitz(&mut ctx),
        "chain" => suite_chain(&mut ctx),
        "riesz-op" => suite_riesz_op(&mut ctx),
        "fwht" => suite_fwht(&mut ctx),
        "matrep" => suite_matrep(&mut ctx),
        "eigen" => suite_eigen(&mut ctx),
        "clifford" => suite_clifford(&mut ctx),
        "rigged" => suite_rigged(&mut ctx),
        other => return Err(Error::UnknownSuite(other.into())),
    }
    let mut report = ctx.finish();
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Deterministic generator shared by all suites.
pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn sign(&mut self) -> Sign {
        if self.rng.gen::<bool>() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Small exact rational, numerator in `-9..=9`, denominator in `1..=9`.
    pub fn rational(&mut self) -> BigRational {
        let numer = self.rng.gen_range(-9i64..=9);
        let denom = self.rng.gen_range(1i64..=9);
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    pub fn nonzero_rational(&mut self) -> BigRational {
        loop {
            let q = self.rational();
            if !num_traits::Zero::is_zero(&q) {
                return q;
            }
        }
    }

    pub fn mask(&mut self, depth: u32) -> DyadicMask {
        if depth == 0 {
            return DyadicMask::EMPTY;
        }
        let bound = if depth >= 64 {
            u64::MAX
        } else {
            (1u64 << depth) - 1
        };
        DyadicMask::from_bits(self.rng.gen_range(0..=bound))
    }

    /// Random mask within `depth` with at most `max_weight` bits set.
    pub fn sparse_mask(&mut self, depth: u32, max_weight: u32) -> DyadicMask {
        let weight = self.rng.gen_range(0..=max_weight.min(depth));
        let mut bits = 0u64;
        while bits.count_ones() < weight {
            bits |= 1 << self.rng.gen_range(0..depth);
        }
        DyadicMask::from_bits(bits)
    }

    pub fn submask(&mut self, d: DyadicMask) -> DyadicMask {
        let mut bits = 0u64;
        for pos in d.positions() {
            if self.rng.gen::<bool>() {
                bits |= 1 << (pos - 1);
            }
        }
        DyadicMask::from_bits(bits)
    }

    pub fn chaos(&mut self, depth: u32, max_terms: usize) -> ChaosElement {
        let terms = self.rng.gen_range(1..=max_terms);
        let mut f = ChaosElement::zero();
        for _ in 0..terms {
            f.add_term(self.mask(depth), self.rational());
        }
        f
    }

    pub fn scalar_seq(&mut self, depth: u32, max_terms: usize) -> ScalarSeq {
        let terms = self.rng.gen_range(0..=max_terms);
        let mut x = ScalarSeq::new();
        for _ in 0..terms {
            let pos = self.rng.gen_range(1..=depth);
            x.set(pos, self.rational()).expect("position is valid");
        }
        x
    }

    pub fn word(&mut self, depth: u32) -> SignedWord {
        SignedWord::new(self.sign(), self.mask(depth), self.mask(depth))
    }

    pub fn polynomial(&mut self, max_degree: usize) -> Polynomial {
        let degree = self.rng.gen_range(0..=max_degree);
        Polynomial::new((0..=degree).map(|_| self.rational()).collect())
    }

    /// Dense real rational matrix at depth `n`.
    pub fn matrix(&mut self, n: u32) -> DyadicMatrix {
        let dim = 1usize << n;
        let mut m = DyadicMatrix::zero(n).expect("depth is valid");
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, GaussianRational::from_rational(self.rational()));
            }
        }
        m
    }
}

struct Ctx {
    suite: String,
    seed: u64,
    requested: u64,
    instances: u64,
    failures: Vec<Failure>,
    gen: Gen,
}

impl Ctx {
    fn new(suite: &str, seed: u64, count: u64) -> Ctx {
        Ctx {
            suite: suite.into(),
            seed,
            requested: count,
            instances: 0,
            failures: Vec::new(),
            gen: Gen::new(seed),
        }
    }

    fn check(&mut self, ok: bool, case: impl Fn() -> String, detail: impl Fn() -> String) {
        self.instances += 1;
        if !ok {
            self.failures.push(Failure {
                case: case(),
                detail: detail(),
            });
        }
    }

    fn finish(self) -> VerifyReport {
        VerifyReport {
            suite: self.suite,
            seed: self.seed,
            requested: self.requested,
            instances: self.instances,
            failures: self.failures,
            elapsed: Duration::ZERO,
        }
    }
}

fn suite_table(ctx: &mut Ctx) {
    for &left in &PrimitiveKind::TABLE {
        for &right in &PrimitiveKind::TABLE {
            let expect = match compose_table(left, right) {
                Ok(k) => k,
                Err(e) => {
                    ctx.check(
                        false,
                        || format!("table {left:?} {right:?}"),
                        || e.to_string(),
                    );
                    continue;
                }
            };
            let mut ok = true;
            for j in 1..=4 {
                for p in 0..16u64 {
                    let basis = ChaosElement::walsh(DyadicMask::paley_mask(p));
                    let composed = apply(left, j, &apply(right, j, &basis).unwrap()).unwrap();
                    ok &= composed == apply(expect, j, &basis).unwrap();
                }
            }
            ctx.check(
                ok,
                || format!("{} o {}", left.symbol(), right.symbol()),
                || {
                    format!(
                        "table says {}, basis composition disagrees",
                        expect.symbol()
                    )
                },
            );
        }
    }
}

fn suite_group(ctx: &mut Ctx) {
    // The two worked products, bit-exactly.
    let cases = [
        ("[1101;1011]", "[0011;0001]", "[1110;1010]"),
        ("[0001;0011]", "[1101;0101]", "-[1100;0110]"),
    ];
    for (a, b, want) in cases {
        let got = SignedWord::parse(a)
            .unwrap()
            .mul(&SignedWord::parse(b).unwrap());
        ctx.check(
            got == SignedWord::parse(want).unwrap(),
            || format!("worked product {a} * {b}"),
            || format!("got {}, want {want}", got.render()),
        );
    }
    // The depth-2 commutant of the imaginary unit: exactly the six listed
    // words plus the identity and the unit itself.
    let iu = SignedWord::parse("[01;01]").unwrap();
    let commutant: Vec<String> = (0..16u64)
        .map(|bits| {
            SignedWord::new(
                Sign::Plus,
                DyadicMask::paley_mask(bits % 4),
                DyadicMask::paley_mask(bits / 4),
            )
        })
        .filter(|w| iu.comm(w) == Sign::Plus)
        .map(|w| w.extended(2).unwrap().render())
        .collect();
    // In enumeration order: identity, sigma3, the unit itself, i = [11;01],
    // sigma1, j = [10;10], k = [01;11], and |sigma2| = [11;11].
    let expected = [
        "[00;00]", "[10;00]", "[01;01]", "[11;01]", "[00;10]", "[10;10]", "[01;11]", "[11;11]",
    ];
    ctx.check(
        commutant == expected,
        || "imaginary-unit commutant at depth 2".into(),
        || format!("got {commutant:?}"),
    );

    for _ in 0..ctx.requested {
        let a = ctx.gen.word(6);
        let b = ctx.gen.word(6);
        let c = ctx.gen.word(6);

        let assoc = a.mul(&b).mul(&c) == a.mul(&b.mul(&c));
        ctx.check(
            assoc,
            || "associativity".into(),
            || format!("({}) ({}) ({})", a.render(), b.render(), c.render()),
        );

        let e = SignedWord::identity();
        let inv_ok = a.mul(&a.inverse()) == e && a.inverse().mul(&a) == e;
        ctx.check(inv_ok, || "inverses".into(), || a.render());

        // sigma is the square's sign; comm decides the product order swap.
        let sq = a.mul(&a);
        ctx.check(
            sq.is_scalar() && sq.sign() == a.sigma(),
            || "square law".into(),
            || format!("{} squares to {}", a.render(), sq.render()),
        );
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        let comm_ok = match a.comm(&b) {
            Sign::Plus => ab == ba,
            Sign::Minus => ab == ba.negate(),
        };
        ctx.check(
            comm_ok,
            || "commutativity function".into(),
            || format!("{} vs {}", a.render(), b.render()),
        );

        // Action homomorphism on a random element.
        let f = ctx.gen.chaos(6, 4);
        let action_ok = ab.apply(&f) == a.apply(&b.apply(&f));
        ctx.check(
            action_ok,
            || "action homomorphism".into(),
            || format!("{} {} on {}", a.render(), b.render(), f),
        );
    }
}

fn suite_leibnitz(ctx: &mut Ctx) {
    // Single-coordinate product rule, exhaustively on the depth-4 basis.
    for family in [LeibnitzFamily::Number, LeibnitzFamily::Annihilation] {
        for j in 1..=4u32 {
            let d = DyadicMask::singleton(j).unwrap();
            for e_bit in [DyadicMask::EMPTY, d] {
                let mut ok = true;
                for p in 0..16u64 {
                    for q in 0..16u64 {
                        let f = ChaosElement::walsh(DyadicMask::paley_mask(p));
                        let g = ChaosElement::walsh(DyadicMask::paley_mask(q));
                        ok &= leibnitz_check(family, d, e_bit, &f, &g).unwrap().holds();
                    }
                }
                ctx.check(
                    ok,
                    || {
                        format!(
                            "single-coordinate rule {family:?} j={j} e={}",
                            e_bit.render()
                        )
                    },
                    || "basis pair disagreement".into(),
                );
            }
        }
    }
    for i in 0..ctx.requested {
        let d = ctx.gen.sparse_mask(8, 4);
        let e = ctx.gen.submask(d);
        let f = ctx.gen.chaos(8, 5);
        let g = ctx.gen.chaos(8, 5);
        let family = if i % 2 == 0 {
            LeibnitzFamily::Number
        } else {
            LeibnitzFamily::Annihilation
        };
        let report = leibnitz_check(family, d, e, &f, &g).unwrap();
        ctx.check(
            report.holds(),
            || format!("{family:?} d={} e={}", d.render(), e.render()),
            || format!("f={f} g={g} lhs={} rhs={}", report.lhs, report.rhs),
        );
    }
}

fn suite_chain(ctx: &mut Ctx) {
    for i in 0..ctx.requested {
        let depth = 4 + (i % 5) as u32; // working depths 4..=8
        let phi = ctx.gen.polynomial(4);
        let f = ctx.gen.chaos(depth, 4);
        if i % 2 == 0 {
            // Walsh form: ^eN^d phi(f) against the S-average.
            let d = ctx.gen.sparse_mask(depth, 4);
            let e = ctx.gen.submask(d);
            let rhs = chain_rule(e, d, &phi, &f, depth).unwrap();
            let lhs = chain_rule_lhs(e, d, &phi, &f, depth).unwrap();
            ctx.check(
                lhs == rhs,
                || format!("chain Walsh d={} e={}", d.render(), e.render()),
                || format!("phi on {f}: lhs={lhs} rhs={rhs}"),
            );
        } else {
            // Riesz form: operator expansion against the closed S-average.
            let u = ctx.gen.scalar_seq(depth, 3);
            let e = ctx.gen.submask(u.support_mask().unwrap());
            let lhs = chain_rule_riesz_operator(&u, e, &phi, &f, depth).unwrap();
            let rhs = chain_rule_riesz_closed(&u, e, &phi, &f, depth).unwrap();
            ctx.check(
                lhs == rhs,
                || format!("chain Riesz e={}", e.render()),
                || format!("phi on {f}: lhs={lhs} rhs={rhs}"),
            );
        }
    }
}

fn suite_riesz_op(ctx: &mut Ctx) {
    for i in 0..ctx.requested {
        // Closed-form coordinate powers against iterated application.
        let d = ctx.gen.sparse_mask(8, 5);
        let c = ctx.gen.submask(d);
        let f = ctx.gen.chaos(8, 4);
        let ops = [
            PowerOp::number(c, d).unwrap(),
            PowerOp::annihilation(c, d).unwrap(),
            PowerOp::replacement(d),
            PowerOp::symmetry(d),
        ];
        for op in ops {
            let closed = apply_power(op, &f);
            let mut iterated = f.clone();
            for j in d.positions() {
                let kind = match (op.family(), c.get(j)) {
                    (crate::operators::PowerFamily::Number, false) => PrimitiveKind::Number,
                    (crate::operators::PowerFamily::Number, true) => PrimitiveKind::AntiNumber,
                    (crate::operators::PowerFamily::Annihilation, false) => {
                        PrimitiveKind::Annihilation
                    }
                    (crate::operators::PowerFamily::Annihilation, true) => PrimitiveKind::Creation,
                    (crate::operators::PowerFamily::Replacement, _) => PrimitiveKind::Replacement,
                    (crate::operators::PowerFamily::Symmetry, _) => PrimitiveKind::Symmetry,
                    (crate::operators::PowerFamily::Asymmetry, _) => PrimitiveKind::Asymmetry,
                };
                iterated = apply(kind, j, &iterated).unwrap();
            }
            ctx.check(
                closed == iterated,
                || format!("power {op:?}"),
                || format!("on {f}"),
            );
        }

        // Operator Riesz products: closed form vs submask expansion, and the
        // power actions on Riesz products.
        let u = ctx.gen.scalar_seq(8, 4);
        let x = ctx.gen.scalar_seq(8, 4);
        let family = RieszFamily::ALL[(i % 6) as usize];
        let closed = apply_riesz_op(family, &u, &x).unwrap();
        let expanded = riesz_op_expansion(family, &u, &x).unwrap();
        ctx.check(
            closed == expanded,
            || format!("riesz op {}", family.symbol()),
            || {
                format!(
                    "u, x with supports {:?} {:?}",
                    u.support_mask(),
                    x.support_mask()
                )
            },
        );

        let rop = ops[(i % 4) as usize];
        let via_closed = power_on_riesz(rop, &x).unwrap();
        let via_apply = apply_power(rop, &riesz(&x));
        ctx.check(
            via_closed == via_apply,
            || format!("power on riesz {rop:?}"),
            || format!("x support {:?}", x.support_mask()),
        );

        // Riesz multiplication identity on parameters avoiding x_j y_j = -1.
        let y = ctx.gen.scalar_seq(8, 4);
        let degenerate = (1..=8).any(|j| {
            let prod = x.get(j) * y.get(j);
            prod == -BigRational::one()
        });
        if !degenerate {
            let lhs = &riesz(&x) * &riesz(&y);
            let mut bracket = BigRational::one();
            let mut dia = ScalarSeq::new();
            for j in 1..=8 {
                bracket *= BigRational::one() + x.get(j) * y.get(j);
                dia.set(j, crate::chaos::diamond(&x.get(j), &y.get(j)))
                    .unwrap();
            }
            let rhs = riesz(&dia).scale(&bracket);
            ctx.check(
                lhs == rhs,
                || "riesz multiplication identity".into(),
                || {
                    format!(
                        "x, y supports {:?} {:?}",
                        x.support_mask(),
                        y.support_mask()
                    )
                },
            );
        }
    }
}

fn suite_fwht(ctx: &mut Ctx) {
    // Exhaustive roundtrip + duality on the depth-6 basis.
    let n = 6u32;
    let mut ok_round = true;
    let mut ok_dual = true;
    for a in 0..1u64 << n {
        let fa = ChaosElement::walsh(DyadicMask::paley_mask(a));
        ok_round &= from_atoms(&to_atoms(&fa, n).unwrap()) == fa;
        for b in (0..1u64 << n).step_by(7) {
            let fb = ChaosElement::walsh(DyadicMask::paley_mask(b));
            let pointwise = to_atoms(&fa, n)
                .unwrap()
                .pointwise_mul(&to_atoms(&fb, n).unwrap())
                .unwrap();
            ok_dual &= from_atoms(&pointwise) == &fa * &fb;
        }
    }
    ctx.check(ok_round, || "roundtrip basis depth 6".into(), String::new);
    ctx.check(ok_dual, || "duality basis depth 6".into(), String::new);

    // Randomized roundtrip and duality at depth 10.
    let deep = 10u32;
    let rounds = (ctx.requested / 20).clamp(5, 50);
    for _ in 0..rounds {
        let f = ctx.gen.chaos(deep, 12);
        let g = ctx.gen.chaos(deep, 12);
        let round_ok = from_atoms(&to_atoms(&f, deep).unwrap()) == f;
        ctx.check(round_ok, || "roundtrip depth 10".into(), || format!("{f}"));
        let pointwise = to_atoms(&f, deep)
            .unwrap()
            .pointwise_mul(&to_atoms(&g, deep).unwrap())
            .unwrap();
        let dual_ok = from_atoms(&pointwise) == &f * &g;
        ctx.check(
            dual_ok,
            || "duality depth 10".into(),
            || format!("{f} | {g}"),
        );
    }

    // Performance pin: forward + inverse at depth 16 under one second.
    let f = ctx.gen.chaos(16, 64);
    let start = Instant::now();
    let atoms = to_atoms(&f, 16).unwrap();
    let back = from_atoms(&atoms);
    let elapsed = start.elapsed();
    ctx.check(
        back == f && elapsed < Duration::from_secs(1),
        || "depth-16 transform under 1s".into(),
        || format!("roundtrip ok: {}, took {elapsed:?}", back == f),
    );
}

fn suite_matrep(ctx: &mut Ctx) {
    // Transpose, trace, and orthonormality over all index pairs, n <= 4.
    for n in 1..=4u32 {
        let words: Vec<SignedWord> = (0..1u64 << (2 * n))
            .map(|bits| {
                SignedWord::new(
                    Sign::Plus,
                    DyadicMask::from_bits(bits & ((1 << n) - 1)),
                    DyadicMask::from_bits(bits >> n),
                )
            })
            .collect();
        let matrices: Vec<DyadicMatrix> = words
            .iter()
            .map(|w| word_to_matrix(w, n).unwrap())
            .collect();

        let mut transpose_ok = true;
        let mut trace_ok = true;
        for (w, m) in words.iter().zip(&matrices) {
            transpose_ok &= crate::matrep::transpose_law(w, n).is_ok();
            let tr = m.trace();
            trace_ok &= if w.is_scalar() {
                tr == GaussianRational::from_int(1 << n)
            } else {
                tr.is_zero()
            };
        }
        ctx.check(transpose_ok, || format!("transpose law n={n}"), String::new);
        ctx.check(trace_ok, || format!("trace law n={n}"), String::new);

        let mut ortho_ok = true;
        for (i, a) in matrices.iter().enumerate() {
            for (j, b) in matrices.iter().enumerate() {
                let inner = hs_inner(a, b).unwrap();
                let want = if i == j {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                };
                ortho_ok &= inner == want;
            }
        }
        ctx.check(
            ortho_ok,
            || format!("orthonormality of {} index pairs, n={n}", 1u64 << (2 * n)),
            String::new,
        );
    }

    // Pauli sigma and quaternion relations at depth 2.
    {
        let id = DyadicMatrix::identity(2).unwrap();
        let neg = id.scale(&GaussianRational::from_int(-1));
        let m = |t: &str| word_to_matrix(&SignedWord::parse(t).unwrap(), 2).unwrap();
        let (s1, s2, s3) = (m("[00;10]"), m("-[11;11]"), m("[10;00]"));
        let sigma_ok =
            s1.mul(&s1).unwrap() == id && s2.mul(&s2).unwrap() == id && s3.mul(&s3).unwrap() == id;
        ctx.check(sigma_ok, || "sigma squares".into(), String::new);
        let (qi, qj, qk) = (m("[11;01]"), m("[10;10]"), m("[01;11]"));
        let quat_ok = qi.mul(&qi).unwrap() == neg
            && qj.mul(&qj).unwrap() == neg
            && qk.mul(&qk).unwrap() == neg
            && qi.mul(&qj).unwrap() == qk
            && qj.mul(&qk).unwrap() == qi
            && qk.mul(&qi).unwrap() == qj;
        ctx.check(quat_ok, || "quaternion relations".into(), String::new);
    }

    // Randomized homomorphism, action consistency, and P-adjointness.
    for _ in 0..ctx.requested {
        let n = ctx.gen.rng.gen_range(1..=5u32);
        let a = ctx.gen.word(n);
        let b = ctx.gen.word(n);
        let hom_ok = word_to_matrix(&a.mul(&b), n).unwrap()
            == word_to_matrix(&a, n)
                .unwrap()
                .mul(&word_to_matrix(&b, n).unwrap())
                .unwrap();
        ctx.check(
            hom_ok,
            || "representation homomorphism".into(),
            || format!("{} * {} at n={n}", a.render(), b.render()),
        );

        let m = word_to_matrix(&a, n).unwrap();
        let mut action_ok = true;
        for t in 0..1u64 << n {
            let image = a.apply(&ChaosElement::walsh(DyadicMask::paley_mask(t)));
            for r in 0..1u64 << n {
                let want = GaussianRational::from_rational(image.coeff(DyadicMask::paley_mask(r)));
                action_ok &= m.get(r as usize, t as usize) == &want;
            }
        }
        ctx.check(
            action_ok,
            || "matrix matches Walsh action".into(),
            || format!("{} at n={n}", a.render()),
        );

        // <Q^s_p B, A> = <B, P A> with a depth-1 quadrupling word.
        let s = ctx.gen.mask(1);
        let p = ctx.gen.mask(1);
        let inner_depth = ctx.gen.rng.gen_range(0..=2u32);
        let b_small = ctx.gen.matrix(inner_depth);
        let a_big = ctx.gen.matrix(inner_depth + 1);
        let pattern = word_to_matrix(&SignedWord::new(Sign::Plus, s, p), 1).unwrap();
        let mut qb = DyadicMatrix::zero(inner_depth + 1).unwrap();
        let size = 1usize << inner_depth;
        for br in 0..2 {
            for bc in 0..2 {
                let factor = pattern.get(br, bc);
                if factor.is_zero() {
                    continue;
                }
                for r in 0..size {
                    for c in 0..size {
                        qb.set(br * size + r, bc * size + c, factor * b_small.get(r, c));
                    }
                }
            }
        }
        let lhs = hs_inner(&qb, &a_big).unwrap();
        let rhs = hs_inner(&b_small, &adjoint_p(&a_big, s, p, 1).unwrap()).unwrap();
        ctx.check(
            lhs == rhs,
            || "P adjointness".into(),
            || {
                format!(
                    "s={} p={} inner depth {inner_depth}",
                    s.render(),
                    p.render()
                )
            },
        );
    }

    // Embedding campaign: random (signs, comm) specs plus basicness oracle.
    let embeds = (ctx.requested / 5).clamp(20, 200);
    for _ in 0..embeds {
        let m = ctx.gen.rng.gen_range(1..=10usize);
        let signs: Vec<i8> = (0..m).map(|_| ctx.gen.sign().value()).collect();
        let mut comm = vec![vec![1i8; m]; m];
        for i in 0..m {
            for j in 0..i {
                let v = ctx.gen.sign().value();
                comm[i][j] = v;
                comm[j][i] = v;
            }
        }
        let spec = EmbedSpec { signs, comm };
        match embed(&spec) {
            Ok(words) => {
                let check = verify_embedding(&words, &spec).unwrap();
                ctx.check(
                    check.ok(),
                    || "embedding contract".into(),
                    || format!("spec {:?}", serde_json::to_string(&spec).unwrap()),
                );
            }
            Err(e) => ctx.check(false, || "embedding construction".into(), || e.to_string()),
        }
        // GF(2) basicness against brute force on small random sets.
        let k = ctx.gen.rng.gen_range(1..=8usize);
        let words: Vec<SignedWord> = (0..k).map(|_| ctx.gen.word(5)).collect();
        ctx.check(
            is_basic(&words) == is_basic_brute_force(&words),
            || "is_basic vs brute force".into(),
            || format!("{words:?}"),
        );
    }
}

fn suite_eigen(ctx: &mut Ctx) {
    for n in 1..=5u32 {
        let mut ok = true;
        let mut class_ok = true;
        for bits in 0..1u64 << (2 * n) {
            let w = SignedWord::new(
                Sign::Plus,
                DyadicMask::from_bits(bits & ((1 << n) - 1)),
                DyadicMask::from_bits(bits >> n),
            );
            let m = word_to_matrix(&w, n).unwrap();
            let pairs = word_eigensystem(&w, n).unwrap();
            let c11_even = w.s_mask().and(w.p_mask()).weight().is_multiple_of(2);
            for pair in &pairs {
                let mx = m.mat_vec(&pair.vector).unwrap();
                let lx: Vec<GaussianRational> =
                    pair.vector.iter().map(|v| &pair.value * v).collect();
                ok &= mx == lx;
                class_ok &= if c11_even {
                    pair.value == GaussianRational::one()
                        || pair.value == GaussianRational::from_int(-1)
                } else {
                    pair.value == GaussianRational::i() || pair.value == -&GaussianRational::i()
                };
            }
        }
        ctx.check(ok, || format!("eigenpairs exact at n={n}"), String::new);
        ctx.check(
            class_ok,
            || format!("eigenvalue classes at n={n}"),
            String::new,
        );
    }
}

fn suite_clifford(ctx: &mut Ctx) {
    let per_family = (ctx.requested / 12).clamp(10, 100);
    for m in 1..=6usize {
        for sign in [Sign::Plus, Sign::Minus] {
            let generators = anticommutative_family(m, sign).unwrap();
            for _ in 0..per_family {
                let x: Vec<BigRational> = (0..m).map(|_| ctx.gen.rational()).collect();
                match clifford_verify(&generators, &x) {
                    Ok(report) => ctx.check(
                        report.ok(),
                        || format!("clifford m={m} sign={sign}"),
                        || format!("x={x:?} report={report:?}"),
                    ),
                    Err(e) => ctx.check(
                        false,
                        || format!("clifford m={m} sign={sign}"),
                        || e.to_string(),
                    ),
                }
            }
        }
    }
}

fn suite_rigged(ctx: &mut Ctx) {
    for _ in 0..(ctx.requested / 10).clamp(20, 200) {
        let n = ctx.gen.rng.gen_range(0..=2u32);
        let a = ctx.gen.matrix(n);
        let b = ctx.gen.matrix(n);

        // Isometry and consistency of the injections up to depth 5.
        let base = hs_inner(&a, &b).unwrap();
        let mut iso_ok = true;
        for m in n..=5 {
            iso_ok &=
                hs_inner(&embed_up(&a, m).unwrap(), &embed_up(&b, m).unwrap()).unwrap() == base;
        }
        let stages = embed_up(&embed_up(&a, n + 1).unwrap(), n + 3).unwrap();
        iso_ok &= stages == embed_up(&a, n + 3).unwrap();
        ctx.check(
            iso_ok,
            || "embedding isometry/consistency".into(),
            || format!("n={n}"),
        );

        // P Q = id and the projection is hs-orthogonal.
        let pq_ok = project_down(&embed_up(&a, n + 2).unwrap(), n).unwrap() == a;
        ctx.check(pq_ok, || "P Q = id".into(), || format!("n={n}"));

        // NQ roundtrip on constructed padded matrices.
        let pad = ctx.gen.rng.gen_range(0..=2u32);
        let padded = embed_up(&a, n + pad).unwrap();
        let v = RiggedVector::new(padded).unwrap();
        let (core, depth) = v.nq_representative();
        let roundtrip_ok = embed_up(&core, n + pad).unwrap() == v.level(n + pad).unwrap()
            && depth == v.quadrupling_index()
            && nq_core(&core).1 == 0
            && depth <= n;
        ctx.check(
            roundtrip_ok,
            || "nq core roundtrip".into(),
            || format!("n={n} pad={pad}"),
        );

        // Distance: direct norm of the residual equals the Pythagoras form,
        // and dominates random competitors.
        let deep = ctx.gen.matrix(2);
        let j = ctx.gen.rng.gen_range(0..=1u32);
        let dist = distance_to_stratum(&deep, j).unwrap();
        let projected = project_down(&deep, j).unwrap();
        let residual = embed_up(&projected, 2).unwrap().sub(&deep).unwrap();
        let direct = hs_inner(&residual, &residual)
            .unwrap()
            .to_rational()
            .unwrap();
        ctx.check(
            direct == dist,
            || "distance closed form vs Pythagoras".into(),
            || format!("j={j}"),
        );
        let mut dominated = true;
        for _ in 0..50 {
            let candidate = ctx.gen.matrix(j);
            let diff = embed_up(&candidate, 2).unwrap().sub(&deep).unwrap();
            let value = hs_inner(&diff, &diff).unwrap().to_rational().unwrap();
            dominated &= value >= dist;
        }
        ctx.check(
            dominated,
            || "distance dominates competitors".into(),
            || format!("j={j}"),
        );
    }
}
