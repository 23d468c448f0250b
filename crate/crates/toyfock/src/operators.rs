//! The seven chaos operators and the differential calculus they span.
//!
//! On the Walsh basis the primitives act coordinate-wise:
//!
//! ```text
//! number        N_j  r^p = p_j r^p            anti-number  1N_j r^p = (1-p_j) r^p
//! annihilation  D_j  r^p = p_j r^(p+1_j)      creation     1D_j r^p = (1-p_j) r^(p+1_j)
//! replacement   R_j  r^p = r^(p+1_j)
//! symmetry      S_j  r^p = (1-2p_j) r^p       asymmetry    A_j  r^p = (1-2p_j) r^(p+1_j)
//! ```
//!
//! (exponent addition mod 2). The module provides the closed-form coordinate
//! powers `R^d`, `S^d`, `A^d` and two-superscript powers `^cN^d`, `^cD^d`
//! ([`PowerOp`]), the 5x5 multiplication table over `{N, R, D, 1D, 1N}`,
//! adjoints, operator Riesz products `[1 + u K]` in closed form, an
//! Ornstein-Uhlenbeck semigroup analog with rational time parameter,
//! directional and dyadic derivatives, and the Leibnitz formula / chain rule
//! machinery with both sides computed along independent routes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::chaos::{
    compose_poly, from_atoms, general_riesz, riesz, to_atoms, AtomVector, ChaosElement, Polynomial,
};
use crate::dyadic::{DyadicMask, ScalarSeq};
use crate::{Error, Result, Sign};

pub mod expr;

/// The primitive operators, plus the scalars 0 and 1 that close the
/// multiplication table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimitiveKind {
    Number,
    AntiNumber,
    Annihilation,
    Creation,
    Replacement,
    Symmetry,
    Asymmetry,
    Zero,
    Identity,
}

impl PrimitiveKind {
    /// The seven operator primitives.
    pub const ALL: [PrimitiveKind; 7] = [
        PrimitiveKind::Number,
        PrimitiveKind::Replacement,
        PrimitiveKind::Annihilation,
        PrimitiveKind::Creation,
        PrimitiveKind::AntiNumber,
        PrimitiveKind::Symmetry,
        PrimitiveKind::Asymmetry,
    ];

    /// Row/column kinds of the multiplication table, in table order.
    pub const TABLE: [PrimitiveKind; 5] = [
        PrimitiveKind::Number,
        PrimitiveKind::Replacement,
        PrimitiveKind::Annihilation,
        PrimitiveKind::Creation,
        PrimitiveKind::AntiNumber,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            PrimitiveKind::Number => "N",
            PrimitiveKind::AntiNumber => "N1",
            PrimitiveKind::Annihilation => "D",
            PrimitiveKind::Creation => "D1",
            PrimitiveKind::Replacement => "R",
            PrimitiveKind::Symmetry => "S",
            PrimitiveKind::Asymmetry => "A",
            PrimitiveKind::Zero => "0",
            PrimitiveKind::Identity => "1",
        }
    }

    pub fn parse(token: &str) -> Option<PrimitiveKind> {
        Some(match token {
            "N" => PrimitiveKind::Number,
            "N1" => PrimitiveKind::AntiNumber,
            "D" => PrimitiveKind::Annihilation,
            "D1" => PrimitiveKind::Creation,
            "R" => PrimitiveKind::Replacement,
            "S" => PrimitiveKind::Symmetry,
            "A" => PrimitiveKind::Asymmetry,
            "0" => PrimitiveKind::Zero,
            "1" => PrimitiveKind::Identity,
            _ => return None,
        })
    }
}

/// Apply a primitive at coordinate `j`, extended linearly.
pub fn apply(kind: PrimitiveKind, j: u32, f: &ChaosElement) -> Result<ChaosElement> {
    let unit = DyadicMask::singleton(j)?;
    Ok(f.basis_map(|p, a| {
        let bit = p.get(j);
        match kind {
            PrimitiveKind::Number => bit.then(|| (p, a.clone())),
            PrimitiveKind::AntiNumber => (!bit).then(|| (p, a.clone())),
            PrimitiveKind::Annihilation => bit.then(|| (p.xor(unit), a.clone())),
            PrimitiveKind::Creation => (!bit).then(|| (p.xor(unit), a.clone())),
            PrimitiveKind::Replacement => Some((p.xor(unit), a.clone())),
            PrimitiveKind::Symmetry => Some((p, if bit { -a.clone() } else { a.clone() })),
            PrimitiveKind::Asymmetry => {
                Some((p.xor(unit), if bit { -a.clone() } else { a.clone() }))
            }
            PrimitiveKind::Zero => None,
            PrimitiveKind::Identity => Some((p, a.clone())),
        }
    }))
}

/// The multiplication table over `{N, R, D, 1D, 1N, 0, 1}`:
/// `compose_table(left, right)` is the kind acting as `left(right(f))`.
pub fn compose_table(left: PrimitiveKind, right: PrimitiveKind) -> Result<PrimitiveKind> {
    use PrimitiveKind::*;
    let in_table = |k: PrimitiveKind| {
        matches!(
            k,
            Number | Replacement | Annihilation | Creation | AntiNumber | Zero | Identity
        )
    };
    if !in_table(left) {
        return Err(Error::NotInTable(left.symbol().into()));
    }
    if !in_table(right) {
        return Err(Error::NotInTable(right.symbol().into()));
    }
    Ok(match (left, right) {
        (Zero, _) | (_, Zero) => Zero,
        (Identity, k) => k,
        (k, Identity) => k,
        (Number, Number) => Number,
        (Number, Replacement) => Creation,
        (Number, Annihilation) => Zero,
        (Number, Creation) => Creation,
        (Number, AntiNumber) => Zero,
        (Replacement, Number) => Annihilation,
        (Replacement, Replacement) => Identity,
        (Replacement, Annihilation) => Number,
        (Replacement, Creation) => AntiNumber,
        (Replacement, AntiNumber) => Creation,
        (Annihilation, Number) => Annihilation,
        (Annihilation, Replacement) => AntiNumber,
        (Annihilation, Annihilation) => Zero,
        (Annihilation, Creation) => AntiNumber,
        (Annihilation, AntiNumber) => Zero,
        (Creation, Number) => Zero,
        (Creation, Replacement) => Number,
        (Creation, Annihilation) => Number,
        (Creation, Creation) => Zero,
        (Creation, AntiNumber) => Creation,
        (AntiNumber, Number) => Zero,
        (AntiNumber, Replacement) => Annihilation,
        (AntiNumber, Annihilation) => Annihilation,
        (AntiNumber, Creation) => Zero,
        (AntiNumber, AntiNumber) => AntiNumber,
        _ => unreachable!("all table kinds handled"),
    })
}

/// Adjoint of a primitive on the L2 pairing: `(kind*, sign)` such that
/// `<K f, g> = sign <f, K* g>`.
pub fn adjoint(kind: PrimitiveKind) -> (PrimitiveKind, Sign) {
    match kind {
        PrimitiveKind::Annihilation => (PrimitiveKind::Creation, Sign::Plus),
        PrimitiveKind::Creation => (PrimitiveKind::Annihilation, Sign::Plus),
        PrimitiveKind::Asymmetry => (PrimitiveKind::Asymmetry, Sign::Minus),
        other => (other, Sign::Plus),
    }
}

/// Families that admit coordinate powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PowerFamily {
    /// `^cN^d`: `1N` on coordinates in `c`, `N` on `d - c`.
    Number,
    /// `^cD^d`: `1D` on coordinates in `c`, `D` on `d - c`.
    Annihilation,
    /// `R^d`.
    Replacement,
    /// `S^d`.
    Symmetry,
    /// `A^d = R^d S^d`.
    Asymmetry,
}

/// A coordinate power of a primitive family, with optional left superscript.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PowerOp {
    family: PowerFamily,
    c: DyadicMask,
    d: DyadicMask,
}

impl PowerOp {
    pub fn new(family: PowerFamily, c: DyadicMask, d: DyadicMask) -> Result<PowerOp> {
        if !c.is_subset_of(d) {
            return Err(Error::InvalidArgument(format!(
                "superscript {} is not a submask of {}",
                c.render(),
                d.render()
            )));
        }
        if !matches!(family, PowerFamily::Number | PowerFamily::Annihilation) && !c.is_empty() {
            return Err(Error::InvalidArgument(
                "left superscripts apply to the N and D families only".into(),
            ));
        }
        Ok(PowerOp { family, c, d })
    }

    /// `K^d` for a primitive kind; `1N`/`1D` become full superscripts.
    pub fn from_kind(kind: PrimitiveKind, d: DyadicMask) -> Result<PowerOp> {
        match kind {
            PrimitiveKind::Number => PowerOp::number(DyadicMask::EMPTY, d),
            PrimitiveKind::AntiNumber => PowerOp::number(d, d),
            PrimitiveKind::Annihilation => PowerOp::annihilation(DyadicMask::EMPTY, d),
            PrimitiveKind::Creation => PowerOp::annihilation(d, d),
            PrimitiveKind::Replacement => Ok(PowerOp::replacement(d)),
            PrimitiveKind::Symmetry => Ok(PowerOp::symmetry(d)),
            PrimitiveKind::Asymmetry => PowerOp::new(PowerFamily::Asymmetry, DyadicMask::EMPTY, d),
            other => Err(Error::InvalidArgument(format!(
                "{} has no coordinate power",
                other.symbol()
            ))),
        }
    }

    pub fn number(c: DyadicMask, d: DyadicMask) -> Result<PowerOp> {
        PowerOp::new(PowerFamily::Number, c, d)
    }

    pub fn annihilation(c: DyadicMask, d: DyadicMask) -> Result<PowerOp> {
        PowerOp::new(PowerFamily::Annihilation, c, d)
    }

    pub fn replacement(d: DyadicMask) -> PowerOp {
        PowerOp {
            family: PowerFamily::Replacement,
            c: DyadicMask::EMPTY,
            d,
        }
    }

    pub fn symmetry(d: DyadicMask) -> PowerOp {
        PowerOp {
            family: PowerFamily::Symmetry,
            c: DyadicMask::EMPTY,
            d,
        }
    }

    pub fn family(&self) -> PowerFamily {
        self.family
    }

    pub fn superscript(&self) -> DyadicMask {
        self.c
    }

    pub fn mask(&self) -> DyadicMask {
        self.d
    }
}

/// Closed-form basis action of a coordinate power; no per-coordinate
/// iteration (equality with the iterated composition is a tested property).
pub fn apply_power(op: PowerOp, f: &ChaosElement) -> ChaosElement {
    let PowerOp { family, c, d } = op;
    let plain = d.diff(c);
    f.basis_map(|p, a| match family {
        // ^cN^d r^p survives iff p is 1 on all of d-c and 0 on all of c.
        PowerFamily::Number => (p.and(d) == plain).then(|| (p, a.clone())),
        PowerFamily::Annihilation => (p.and(d) == plain).then(|| (p.xor(d), a.clone())),
        PowerFamily::Replacement => Some((p.xor(d), a.clone())),
        PowerFamily::Symmetry => {
            let sign = Sign::from_parity(p.and(d).weight());
            Some((
                p,
                if sign.is_positive() {
                    a.clone()
                } else {
                    -a.clone()
                },
            ))
        }
        PowerFamily::Asymmetry => {
            let sign = Sign::from_parity(p.and(d).weight());
            Some((
                p.xor(d),
                if sign.is_positive() {
                    a.clone()
                } else {
                    -a.clone()
                },
            ))
        }
    })
}

/// Families of the operator Riesz product `[1 + u K]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RieszFamily {
    Number,
    AntiNumber,
    Replacement,
    Annihilation,
    Creation,
    Symmetry,
}

impl RieszFamily {
    pub const ALL: [RieszFamily; 6] = [
        RieszFamily::Number,
        RieszFamily::AntiNumber,
        RieszFamily::Replacement,
        RieszFamily::Annihilation,
        RieszFamily::Creation,
        RieszFamily::Symmetry,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            RieszFamily::Number => "N",
            RieszFamily::AntiNumber => "N1",
            RieszFamily::Replacement => "R",
            RieszFamily::Annihilation => "D",
            RieszFamily::Creation => "D1",
            RieszFamily::Symmetry => "S",
        }
    }

    /// The power `K^d` this family expands into at submask `d`.
    fn power(self, d: DyadicMask) -> PowerOp {
        match self {
            RieszFamily::Number => PowerOp::number(DyadicMask::EMPTY, d).expect("0 <= d"),
            RieszFamily::AntiNumber => PowerOp::number(d, d).expect("d <= d"),
            RieszFamily::Annihilation => {
                PowerOp::annihilation(DyadicMask::EMPTY, d).expect("0 <= d")
            }
            RieszFamily::Creation => PowerOp::annihilation(d, d).expect("d <= d"),
            RieszFamily::Replacement => PowerOp::replacement(d),
            RieszFamily::Symmetry => PowerOp::symmetry(d),
        }
    }
}

/// `[1 + u K] [1 + x r]` in closed form, as a single product
/// `prod_j (a_j + b_j r_j)` over the union of the supports:
///
/// ```text
/// N:  1 + (u_j + 1) x_j r_j        1N: (1 + u_j) + x_j r_j
/// R:  (1 + u_j x_j) + (u_j + x_j) r_j
/// D:  (1 + u_j x_j) + x_j r_j      1D: 1 + (u_j + x_j) r_j
/// S:  (1 + u_j) + (1 - u_j) x_j r_j
/// ```
///
/// The S line is the per-coordinate reading of the `([1+u] +/- [1-u])/2`
/// weights; summed over submasks it reproduces `sum_d u^d S^d [1+xr]`.
pub fn apply_riesz_op(family: RieszFamily, u: &ScalarSeq, x: &ScalarSeq) -> Result<ChaosElement> {
    let support = u.support_mask()?.or(x.support_mask()?);
    let one = BigRational::one;
    let factors: Vec<(u32, BigRational, BigRational)> = support
        .positions()
        .map(|j| {
            let uj = u.get(j);
            let xj = x.get(j);
            match family {
                RieszFamily::Number => (j, one(), (&uj + one()) * &xj),
                RieszFamily::AntiNumber => (j, one() + &uj, xj),
                RieszFamily::Replacement => (j, one() + &uj * &xj, &uj + &xj),
                RieszFamily::Annihilation => (j, one() + &uj * &xj, xj),
                RieszFamily::Creation => (j, one(), &uj + &xj),
                RieszFamily::Symmetry => (j, one() + &uj, (one() - &uj) * &xj),
            }
        })
        .collect();
    Ok(general_riesz(&factors))
}

/// Expansion route for the same object: `sum_{d <= supp u} u^d K^d [1+xr]`.
pub fn riesz_op_expansion(
    family: RieszFamily,
    u: &ScalarSeq,
    x: &ScalarSeq,
) -> Result<ChaosElement> {
    let base = riesz(x);
    let mut acc = ChaosElement::zero();
    for d in u.support_mask()?.subsets() {
        let term = apply_power(family.power(d), &base).scale(&u.gen_power(d));
        acc = &acc + &term;
    }
    Ok(acc)
}

/// Closed-form action of a power on a Riesz product (the Riesz column of the
/// power table): e.g. `^cN^d [1+xr] = x^(d-c) r^(d-c) (1+xr)^(1-d)`.
pub fn power_on_riesz(op: PowerOp, x: &ScalarSeq) -> Result<ChaosElement> {
    let PowerOp { family, c, d } = op;
    let riesz_off = |exclude: DyadicMask| -> ChaosElement {
        let factors: Vec<(u32, BigRational, BigRational)> = x
            .support()
            .filter(|j| !exclude.get(*j))
            .map(|j| (j, BigRational::one(), x.get(j)))
            .collect();
        general_riesz(&factors)
    };
    let flip_on = |flip: DyadicMask| -> Result<ScalarSeq> {
        let mut flipped = ScalarSeq::new();
        for j in x.support().collect::<Vec<_>>() {
            let xj = x.get(j);
            flipped.set(j, if flip.get(j) { -xj } else { xj })?;
        }
        Ok(flipped)
    };
    Ok(match family {
        PowerFamily::Number => {
            // x^(d-c) r^(d-c) (1+xr)^(1-d)
            let plain = d.diff(c);
            (&ChaosElement::walsh(plain) * &riesz_off(d)).scale(&x.gen_power(plain))
        }
        PowerFamily::Annihilation => {
            // r^d ^cN^d [1+xr] = x^(d-c) r^c (1+xr)^(1-d)
            let plain = d.diff(c);
            (&ChaosElement::walsh(c) * &riesz_off(d)).scale(&x.gen_power(plain))
        }
        PowerFamily::Replacement => &ChaosElement::walsh(d) * &riesz(x),
        PowerFamily::Symmetry => riesz(&flip_on(d)?),
        PowerFamily::Asymmetry => &ChaosElement::walsh(d) * &riesz(&flip_on(d)?),
    })
}

/// Ornstein-Uhlenbeck semigroup analog with `q` standing for `e^(-t)`:
/// `a_p -> q^<p> a_p`. Requires `q > 0`.
pub fn ou_semigroup(q: &BigRational, f: &ChaosElement) -> Result<ChaosElement> {
    if !q.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "semigroup parameter must be positive, got {q}"
        )));
    }
    Ok(f.basis_map(|p, a| Some((p, a * q.pow(p.weight() as i32)))))
}

/// Generator of the semigroup: `a_p -> -<p> a_p`.
pub fn ou_generator(f: &ChaosElement) -> ChaosElement {
    f.basis_map(|p, a| {
        let w = BigRational::from_integer(BigInt::from(p.weight()));
        Some((p, a * -w))
    })
}

/// Directional derivative `D_c = sum_j c_j N_j`: `a_p -> <c p> a_p`.
pub fn directional(c: &ScalarSeq, f: &ChaosElement) -> ChaosElement {
    f.basis_map(|p, a| Some((p, a * c.dot_mask(p))))
}

/// The k-th dyadic derivative under Paley ordering: `a_p -> n^k a_p` with
/// `n` the Paley index of `p`. The weights `c_j = 2^(j-1)` make `D w_n = n w_n`.
pub fn dyadic_derivative(f: &ChaosElement, k: u32) -> ChaosElement {
    f.basis_map(|p, a| {
        let n = BigInt::from(p.paley_index());
        Some((p, a * BigRational::from_integer(n.pow(k))))
    })
}

/// Difference-quotient oracle for the dyadic derivative, computed on the
/// atoms: `D f = sum_j 2^(j-2) (f - f(. xor 2^-j))`, transformed back.
/// Must equal `dyadic_derivative(f, 1)`.
pub fn pointwise_dyadic_derivative(f: &ChaosElement, n: u32) -> Result<ChaosElement> {
    let atoms = to_atoms(f, n)?;
    let size = 1usize << n;
    let mut out = vec![BigRational::zero(); size];
    for j in 1..=n {
        // Flipping binary digit j of a point toggles bit n-j of its atom index.
        let flip = 1usize << (n - j);
        let weight = if j == 1 {
            BigRational::new(BigInt::one(), BigInt::from(2))
        } else {
            BigRational::from_integer(BigInt::one() << (j - 2))
        };
        for t in 0..size {
            let diff = &atoms.values()[t] - &atoms.values()[t ^ flip];
            out[t] += diff * &weight;
        }
    }
    Ok(from_atoms(&AtomVector::new(n, out)?))
}

/// Which Leibnitz family to expand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeibnitzFamily {
    Number,
    Annihilation,
}

/// Both sides of the Leibnitz formula for `^eK^d (fg)`.
#[derive(Clone, Debug)]
pub struct LeibnitzReport {
    pub lhs: ChaosElement,
    pub rhs: ChaosElement,
}

impl LeibnitzReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Expand `^eK^d (f g)` two ways: directly (closed-form power on the
/// product) and through the Leibnitz sum
/// `sum_{c <= d} (^cK^d f) (^(d-e+c)K^d g)`, with the `R^d` prefactor for
/// the annihilation family.
pub fn leibnitz_check(
    family: LeibnitzFamily,
    d: DyadicMask,
    e: DyadicMask,
    f: &ChaosElement,
    g: &ChaosElement,
) -> Result<LeibnitzReport> {
    if !e.is_subset_of(d) {
        return Err(Error::InvalidArgument(format!(
            "superscript {} not within {}",
            e.render(),
            d.render()
        )));
    }
    let power = |c: DyadicMask| -> Result<PowerOp> {
        match family {
            LeibnitzFamily::Number => PowerOp::number(c, d),
            LeibnitzFamily::Annihilation => PowerOp::annihilation(c, d),
        }
    };
    let lhs = apply_power(power(e)?, &(f * g));
    let mut sum = ChaosElement::zero();
    for c in d.subsets() {
        let left = apply_power(power(c)?, f);
        let right = apply_power(power(d.xor(e).xor(c))?, g);
        sum = &sum + &(&left * &right);
    }
    let rhs = match family {
        LeibnitzFamily::Number => sum,
        LeibnitzFamily::Annihilation => apply_power(PowerOp::replacement(d), &sum),
    };
    Ok(LeibnitzReport { lhs, rhs })
}

/// Right-hand side of the chain rule
/// `^eN^d phi(f) = 2^(-<d>) sum_{c <= d} (-1)^(<c(1-e)>) phi(S^c f)`,
/// every `phi(S^c f)` computed through the atom transform.
pub fn chain_rule(
    e: DyadicMask,
    d: DyadicMask,
    phi: &Polynomial,
    f: &ChaosElement,
    n: u32,
) -> Result<ChaosElement> {
    if !e.is_subset_of(d) {
        return Err(Error::InvalidArgument(format!(
            "superscript {} not within {}",
            e.render(),
            d.render()
        )));
    }
    let mut sum = ChaosElement::zero();
    for c in d.subsets() {
        let flipped = apply_power(PowerOp::symmetry(c), f);
        let composed = compose_poly(phi, &flipped, n)?;
        let sign = Sign::from_parity(c.diff(e).weight());
        sum = if sign.is_positive() {
            &sum + &composed
        } else {
            &sum - &composed
        };
    }
    let scale = BigRational::new(BigInt::one(), BigInt::one() << d.weight());
    Ok(sum.scale(&scale))
}

/// Left-hand side matching [`chain_rule`]: `^eN^d` applied to `phi(f)`.
pub fn chain_rule_lhs(
    e: DyadicMask,
    d: DyadicMask,
    phi: &Polynomial,
    f: &ChaosElement,
    n: u32,
) -> Result<ChaosElement> {
    Ok(apply_power(
        PowerOp::number(e, d)?,
        &compose_poly(phi, f, n)?,
    ))
}

/// Operator route for the Riesz form of the chain rule:
/// `[1 + 2u ^eN] phi(f) = sum_{c <= supp u} (2u)^c ^(e&c)N^c phi(f)`.
pub fn chain_rule_riesz_operator(
    u: &ScalarSeq,
    e: DyadicMask,
    phi: &Polynomial,
    f: &ChaosElement,
    n: u32,
) -> Result<ChaosElement> {
    let composed = compose_poly(phi, f, n)?;
    let two = BigRational::from_integer(BigInt::from(2));
    let mut acc = ChaosElement::zero();
    for c in u.support_mask()?.subsets() {
        let coeff = u.gen_power(c) * two.pow(c.weight() as i32);
        let term = apply_power(PowerOp::number(e.and(c), c)?, &composed).scale(&coeff);
        acc = &acc + &term;
    }
    Ok(acc)
}

/// Closed route for the same object:
/// `sum_{c <= supp u} u^c sum_{b <= c} (-1)^(<b(1-e)>) phi(S^b f)`.
pub fn chain_rule_riesz_closed(
    u: &ScalarSeq,
    e: DyadicMask,
    phi: &Polynomial,
    f: &ChaosElement,
    n: u32,
) -> Result<ChaosElement> {
    let mut acc = ChaosElement::zero();
    for c in u.support_mask()?.subsets() {
        let uc = u.gen_power(c);
        let mut inner = ChaosElement::zero();
        for b in c.subsets() {
            let flipped = apply_power(PowerOp::symmetry(b), f);
            let composed = compose_poly(phi, &flipped, n)?;
            let sign = Sign::from_parity(b.diff(e).weight());
            inner = if sign.is_positive() {
                &inner + &composed
            } else {
                &inner - &composed
            };
        }
        acc = &acc + &inner.scale(&uc);
    }
    Ok(acc)
}

/// Per-coordinate asymmetry composition:
/// `A_j phi(f) = R_j phi_e(A_j f) + phi_o(A_j f)`.
///
/// `A_j` multiplies by `r_j` after a sign swap, so even powers of `A_j f`
/// absorb the `r_j` and odd powers keep it; the replacement lands on the
/// even part.
pub fn asymmetry_compose(
    phi: &Polynomial,
    f: &ChaosElement,
    j: u32,
    n: u32,
) -> Result<ChaosElement> {
    let (phi_e, phi_o) = phi.parity_split();
    let af = apply(PrimitiveKind::Asymmetry, j, f)?;
    let even = compose_poly(&phi_e, &af, n)?;
    let odd = compose_poly(&phi_o, &af, n)?;
    Ok(&apply(PrimitiveKind::Replacement, j, &even)? + &odd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::walsh_mul;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn mask(s: &str) -> DyadicMask {
        DyadicMask::parse(s).unwrap()
    }

    fn w(s: &str) -> ChaosElement {
        ChaosElement::walsh(mask(s))
    }

    fn r1r2() -> ChaosElement {
        w("11")
    }

    #[test]
    fn primitive_examples() {
        use PrimitiveKind::*;
        // The twelve displayed one-line actions.
        assert_eq!(apply(Number, 1, &r1r2()).unwrap(), r1r2());
        assert_eq!(apply(Number, 3, &r1r2()).unwrap(), ChaosElement::zero());
        assert_eq!(apply(Annihilation, 1, &r1r2()).unwrap(), w("01"));
        assert_eq!(
            apply(Annihilation, 3, &r1r2()).unwrap(),
            ChaosElement::zero()
        );
        assert_eq!(apply(Creation, 1, &r1r2()).unwrap(), ChaosElement::zero());
        assert_eq!(apply(Creation, 3, &r1r2()).unwrap(), w("111"));
        assert_eq!(apply(Replacement, 1, &r1r2()).unwrap(), w("01"));
        assert_eq!(apply(Replacement, 3, &r1r2()).unwrap(), w("111"));
        assert_eq!(apply(AntiNumber, 1, &r1r2()).unwrap(), ChaosElement::zero());
        assert_eq!(apply(AntiNumber, 3, &r1r2()).unwrap(), r1r2());
        assert_eq!(apply(Symmetry, 1, &r1r2()).unwrap(), -&r1r2());
        assert_eq!(apply(Symmetry, 3, &r1r2()).unwrap(), r1r2());
        assert_eq!(apply(Asymmetry, 1, &r1r2()).unwrap(), -&w("01"));
        assert_eq!(apply(Asymmetry, 3, &r1r2()).unwrap(), w("111"));
    }

    #[test]
    fn table_entries() {
        use PrimitiveKind::*;
        assert_eq!(compose_table(Number, Replacement).unwrap(), Creation);
        assert_eq!(compose_table(Replacement, Replacement).unwrap(), Identity);
        assert_eq!(compose_table(Annihilation, Annihilation).unwrap(), Zero);
        assert!(compose_table(Symmetry, Number).is_err());
    }

    #[test]
    fn table_matches_composition_on_basis() {
        // All 25 entries against basis application at depth 4, every coordinate.
        for &left in &PrimitiveKind::TABLE {
            for &right in &PrimitiveKind::TABLE {
                let expect = compose_table(left, right).unwrap();
                for j in 1..=4 {
                    for p in 0..16u64 {
                        let basis = ChaosElement::walsh(DyadicMask::paley_mask(p));
                        let composed = apply(left, j, &apply(right, j, &basis).unwrap()).unwrap();
                        let direct = apply(expect, j, &basis).unwrap();
                        assert_eq!(composed, direct, "{left:?} o {right:?} at j={j} p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn rsn_compositions() {
        // D = RN, 1D = R 1N = N R, A = RS as operator equalities on the basis.
        for p in 0..16u64 {
            let b = ChaosElement::walsh(DyadicMask::paley_mask(p));
            for j in 1..=4 {
                use PrimitiveKind::*;
                let rn = apply(Replacement, j, &apply(Number, j, &b).unwrap()).unwrap();
                assert_eq!(rn, apply(Annihilation, j, &b).unwrap());
                let r1n = apply(Replacement, j, &apply(AntiNumber, j, &b).unwrap()).unwrap();
                assert_eq!(r1n, apply(Creation, j, &b).unwrap());
                let nr = apply(Number, j, &apply(Replacement, j, &b).unwrap()).unwrap();
                assert_eq!(nr, apply(Creation, j, &b).unwrap());
                let rs = apply(Replacement, j, &apply(Symmetry, j, &b).unwrap()).unwrap();
                assert_eq!(rs, apply(Asymmetry, j, &b).unwrap());
            }
        }
    }

    #[test]
    fn commutation_classification() {
        // Distinct coordinates always commute. At a shared coordinate the
        // diagonal trio {N, 1N, S} commutes pairwise ((1N,S) follows from
        // S = 1 - 2N even though only (N,1N) and (S,N) are usually cited);
        // {R,S}, {R,A}, {D,S}, {1D,S}, {S,A} anticommute; the remaining
        // pairs are neither. (N,1N) multiplies to zero in both orders, so
        // it satisfies both relations.
        use PrimitiveKind::*;
        let commuting = [
            (Number, AntiNumber),
            (Number, Symmetry),
            (AntiNumber, Symmetry),
        ];
        let anticommuting = [
            (Number, AntiNumber),
            (Replacement, Symmetry),
            (Replacement, Asymmetry),
            (Annihilation, Symmetry),
            (Creation, Symmetry),
            (Symmetry, Asymmetry),
        ];
        let classify = |a: PrimitiveKind, b: PrimitiveKind, i: u32, j: u32| {
            let mut comm = true;
            let mut anti = true;
            for p in 0..16u64 {
                let basis = ChaosElement::walsh(DyadicMask::paley_mask(p));
                let ab = apply(a, i, &apply(b, j, &basis).unwrap()).unwrap();
                let ba = apply(b, j, &apply(a, i, &basis).unwrap()).unwrap();
                comm &= ab == ba;
                anti &= ab == -&ba;
            }
            (comm, anti)
        };
        for (ai, &a) in PrimitiveKind::ALL.iter().enumerate() {
            for &b in &PrimitiveKind::ALL[ai + 1..] {
                assert_eq!(classify(a, b, 1, 2), (true, false), "{a:?},{b:?} distinct");
                let (comm, anti) = classify(a, b, 2, 2);
                let listed = |set: &[(PrimitiveKind, PrimitiveKind)]| {
                    set.iter()
                        .any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b))
                };
                assert_eq!(comm, listed(&commuting), "{a:?},{b:?} commute?");
                assert_eq!(anti, listed(&anticommuting), "{a:?},{b:?} anticommute?");
            }
        }
    }

    #[test]
    fn adjoint_examples() {
        use PrimitiveKind::*;
        assert_eq!(adjoint(Annihilation), (Creation, Sign::Plus));
        assert_eq!(adjoint(Symmetry), (Symmetry, Sign::Plus));
        assert_eq!(adjoint(Asymmetry), (Asymmetry, Sign::Minus));
    }

    #[test]
    fn adjoint_pairing() {
        // <K f, g> = sign <f, K* g> on fixed exact elements.
        let mut f = ChaosElement::constant(ratio(1, 2));
        f.add_term(mask("1"), rat(3));
        f.add_term(mask("011"), ratio(-2, 5));
        let mut g = ChaosElement::walsh(mask("01"));
        g.add_term(mask("1"), ratio(7, 3));
        g.add_term(mask("011"), rat(1));
        for &k in &PrimitiveKind::ALL {
            let (kstar, sign) = adjoint(k);
            for j in 1..=3 {
                let lhs = apply(k, j, &f).unwrap().inner(&g);
                let rhs = f.inner(&apply(kstar, j, &g).unwrap());
                let rhs = if sign.is_positive() { rhs } else { -rhs };
                assert_eq!(lhs, rhs, "{k:?} at {j}");
            }
        }
    }

    #[test]
    fn contraction_on_l2() {
        // ||K f||_2 <= ||f||_2 for each primitive, exact rational comparison.
        let mut f = ChaosElement::constant(ratio(2, 3));
        f.add_term(mask("1"), rat(-2));
        f.add_term(mask("101"), ratio(7, 4));
        f.add_term(mask("011"), ratio(-1, 6));
        let bound = f.norm_sq();
        for &k in &PrimitiveKind::ALL {
            for j in 1..=3 {
                assert!(apply(k, j, &f).unwrap().norm_sq() <= bound, "{k:?}@{j}");
            }
        }
    }

    #[test]
    fn power_examples() {
        let op = PowerOp::from_kind(PrimitiveKind::Number, mask("110")).unwrap();
        assert_eq!(apply_power(op, &w("100")), ChaosElement::zero());

        let op = PowerOp::replacement(mask("011"));
        assert_eq!(apply_power(op, &w("110")), w("101"));

        let op = PowerOp::symmetry(mask("100"));
        assert_eq!(apply_power(op, &w("101")), -&w("101"));
    }

    #[test]
    fn powers_equal_iterated_single_coordinates() {
        let check = |op: PowerOp, kind_for: &dyn Fn(u32) -> PrimitiveKind| {
            for p in 0..32u64 {
                let basis = ChaosElement::walsh(DyadicMask::paley_mask(p));
                let mut iterated = basis.clone();
                for j in op.mask().positions() {
                    iterated = apply(kind_for(j), j, &iterated).unwrap();
                }
                assert_eq!(apply_power(op, &basis), iterated, "{op:?} on p={p}");
            }
        };
        for d_bits in 0..32u64 {
            let d = DyadicMask::paley_mask(d_bits);
            for c in d.subsets() {
                let n_op = PowerOp::number(c, d).unwrap();
                check(n_op, &|j| {
                    if c.get(j) {
                        PrimitiveKind::AntiNumber
                    } else {
                        PrimitiveKind::Number
                    }
                });
                let d_op = PowerOp::annihilation(c, d).unwrap();
                check(d_op, &|j| {
                    if c.get(j) {
                        PrimitiveKind::Creation
                    } else {
                        PrimitiveKind::Annihilation
                    }
                });
            }
            check(PowerOp::replacement(d), &|_| PrimitiveKind::Replacement);
            check(PowerOp::symmetry(d), &|_| PrimitiveKind::Symmetry);
            check(
                PowerOp::from_kind(PrimitiveKind::Asymmetry, d).unwrap(),
                &|_| PrimitiveKind::Asymmetry,
            );
        }
    }

    #[test]
    fn riesz_op_examples() {
        // [1+uD][1+xr] with u = (1), x = (1/2): 3/2 + (1/2) r1.
        let u = ScalarSeq::from_pairs([(1, rat(1))]).unwrap();
        let x = ScalarSeq::from_pairs([(1, ratio(1, 2))]).unwrap();
        let out = apply_riesz_op(RieszFamily::Annihilation, &u, &x).unwrap();
        assert_eq!(out.coeff(DyadicMask::EMPTY), ratio(3, 2));
        assert_eq!(out.coeff(mask("1")), ratio(1, 2));
        assert_eq!(out.num_terms(), 2);

        // u = 0 leaves the Riesz product unchanged for the number family.
        let x2 = ScalarSeq::from_pairs([(1, ratio(2, 7)), (3, rat(-1))]).unwrap();
        assert_eq!(
            apply_riesz_op(RieszFamily::Number, &ScalarSeq::new(), &x2).unwrap(),
            riesz(&x2)
        );

        // [1+u 1D] with x = 0: 1 + r2.
        let u2 = ScalarSeq::from_pairs([(2, rat(1))]).unwrap();
        let out = apply_riesz_op(RieszFamily::Creation, &u2, &ScalarSeq::new()).unwrap();
        assert_eq!(out, &ChaosElement::unit() + &w("01"));
    }

    #[test]
    fn riesz_op_matches_expansion() {
        let u = ScalarSeq::from_pairs([(1, ratio(1, 2)), (3, rat(-2)), (4, ratio(3, 7))]).unwrap();
        let x = ScalarSeq::from_pairs([(1, ratio(-1, 3)), (2, rat(5)), (3, ratio(2, 9))]).unwrap();
        for family in RieszFamily::ALL {
            assert_eq!(
                apply_riesz_op(family, &u, &x).unwrap(),
                riesz_op_expansion(family, &u, &x).unwrap(),
                "{family:?}"
            );
        }
    }

    #[test]
    fn power_on_riesz_matches_apply_power() {
        let x = ScalarSeq::from_pairs([(1, ratio(1, 2)), (2, rat(-3)), (4, ratio(5, 7))]).unwrap();
        let base = riesz(&x);
        for d_bits in 0..16u64 {
            let d = DyadicMask::paley_mask(d_bits);
            for c in d.subsets() {
                for op in [
                    PowerOp::number(c, d).unwrap(),
                    PowerOp::annihilation(c, d).unwrap(),
                ] {
                    assert_eq!(power_on_riesz(op, &x).unwrap(), apply_power(op, &base));
                }
            }
            for op in [
                PowerOp::replacement(d),
                PowerOp::symmetry(d),
                PowerOp::from_kind(PrimitiveKind::Asymmetry, d).unwrap(),
            ] {
                assert_eq!(power_on_riesz(op, &x).unwrap(), apply_power(op, &base));
            }
        }
    }

    #[test]
    fn ou_examples() {
        let f = w("101");
        assert_eq!(
            ou_semigroup(&ratio(1, 2), &f).unwrap(),
            f.scale(&ratio(1, 4))
        );
        assert_eq!(
            ou_semigroup(&ratio(3, 7), &ChaosElement::unit()).unwrap(),
            ChaosElement::unit()
        );
        assert_eq!(ou_generator(&f), f.scale(&rat(-2)));
        assert!(ou_semigroup(&rat(0), &f).is_err());
        assert!(ou_semigroup(&rat(-1), &f).is_err());
    }

    #[test]
    fn ou_semigroup_law() {
        let mut f = ChaosElement::constant(rat(2));
        f.add_term(mask("1"), ratio(1, 3));
        f.add_term(mask("111"), rat(-4));
        let (q1, q2) = (ratio(1, 2), ratio(2, 3));
        let lhs = ou_semigroup(&q1, &ou_semigroup(&q2, &f).unwrap()).unwrap();
        let rhs = ou_semigroup(&(q1 * q2), &f).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn ou_generator_on_riesz() {
        // A [1+xr] = -[1+xr] sum_j x_j r_j / (1 + x_j r_j)
        //          = -sum_j x_j r_j prod_{k != j} (1 + x_k r_k).
        let x = ScalarSeq::from_pairs([(1, ratio(1, 2)), (2, rat(-1)), (3, ratio(2, 5))]).unwrap();
        let lhs = ou_generator(&riesz(&x));
        let mut rhs = ChaosElement::zero();
        for j in x.support().collect::<Vec<_>>() {
            let others =
                ScalarSeq::from_pairs(x.support().filter(|k| *k != j).map(|k| (k, x.get(k))))
                    .unwrap();
            let term = (&ChaosElement::walsh(DyadicMask::singleton(j).unwrap()) * &riesz(&others))
                .scale(&-x.get(j));
            rhs = &rhs + &term;
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_examples() {
        // D w_5 = 5 w_5 with w_5 = r^101.
        assert_eq!(dyadic_derivative(&w("101"), 1), w("101").scale(&rat(5)));
        assert_eq!(
            dyadic_derivative(&ChaosElement::unit(), 3),
            ChaosElement::zero()
        );
        // D_1 = sum_j N_j doubles a two-factor product.
        let c = ScalarSeq::ones(4).unwrap();
        assert_eq!(directional(&c, &w("11")), w("11").scale(&rat(2)));
    }

    #[test]
    fn hypercontraction_iterates() {
        // D_1^k r^p = <p>^k r^p.
        let c = ScalarSeq::ones(5).unwrap();
        let f = w("1011");
        let mut iter = f.clone();
        for _ in 0..3 {
            iter = directional(&c, &iter);
        }
        assert_eq!(iter, f.scale(&rat(27)));
    }

    #[test]
    fn pointwise_derivative_matches_spectral() {
        assert_eq!(pointwise_dyadic_derivative(&w("1"), 3).unwrap(), w("1"));
        assert_eq!(
            pointwise_dyadic_derivative(&ChaosElement::unit(), 3).unwrap(),
            ChaosElement::zero()
        );
        assert_eq!(
            pointwise_dyadic_derivative(&w("01"), 3).unwrap(),
            w("01").scale(&rat(2))
        );
        let mut f = ChaosElement::constant(ratio(1, 3));
        f.add_term(mask("101"), rat(2));
        f.add_term(mask("0111"), ratio(-3, 5));
        assert_eq!(
            pointwise_dyadic_derivative(&f, 4).unwrap(),
            dyadic_derivative(&f, 1)
        );
    }

    #[test]
    fn leibnitz_single_coordinate_case() {
        // N(fg) with f = g = 1 + r1: both sides 2 r1.
        let f = &ChaosElement::unit() + &w("1");
        let report =
            leibnitz_check(LeibnitzFamily::Number, mask("1"), DyadicMask::EMPTY, &f, &f).unwrap();
        assert!(report.holds());
        assert_eq!(report.lhs, w("1").scale(&rat(2)));

        // f = g = r1: N(r1 r1) = N(1) = 0.
        let report = leibnitz_check(
            LeibnitzFamily::Number,
            mask("1"),
            DyadicMask::EMPTY,
            &w("1"),
            &w("1"),
        )
        .unwrap();
        assert!(report.holds());
        assert!(report.lhs.is_zero());

        // Annihilation family carries the R prefactor.
        let report = leibnitz_check(
            LeibnitzFamily::Annihilation,
            mask("1"),
            DyadicMask::EMPTY,
            &f,
            &f,
        )
        .unwrap();
        assert!(report.holds());
    }

    #[test]
    fn leibnitz_exhaustive_small() {
        // Both families, all (d, e <= d) at depth 3, on a fixed pair.
        let mut f = ChaosElement::constant(ratio(1, 2));
        f.add_term(mask("1"), rat(2));
        f.add_term(mask("011"), ratio(-1, 3));
        let mut g = ChaosElement::walsh(mask("11"));
        g.add_term(mask("001"), ratio(2, 7));
        g.add_term(DyadicMask::EMPTY, rat(-1));
        for d_bits in 0..8u64 {
            let d = DyadicMask::paley_mask(d_bits);
            for e in d.subsets() {
                for family in [LeibnitzFamily::Number, LeibnitzFamily::Annihilation] {
                    let report = leibnitz_check(family, d, e, &f, &g).unwrap();
                    assert!(report.holds(), "{family:?} d={d} e={e}");
                }
            }
        }
    }

    #[test]
    fn symmetry_is_multiplicative() {
        // S^c (fg) = (S^c f)(S^c g).
        let mut f = ChaosElement::constant(rat(1));
        f.add_term(mask("11"), ratio(3, 4));
        f.add_term(mask("001"), rat(-2));
        let mut g = ChaosElement::walsh(mask("1"));
        g.add_term(mask("011"), ratio(1, 5));
        for c_bits in 0..8u64 {
            let c = DyadicMask::paley_mask(c_bits);
            let op = PowerOp::symmetry(c);
            assert_eq!(
                apply_power(op, &(&f * &g)),
                &apply_power(op, &f) * &apply_power(op, &g)
            );
        }
    }

    #[test]
    fn chain_rule_examples() {
        // N_1 f^2 = (f^2 - (S_1 f)^2)/2 = 2 r1 for f = 1 + r1.
        let f = &ChaosElement::unit() + &w("1");
        let phi = Polynomial::monomial(2);
        let rhs = chain_rule(mask("1"), mask("1"), &phi, &f, 2).unwrap();
        let direct = chain_rule_lhs(mask("1"), mask("1"), &phi, &f, 2).unwrap();
        // e = 0 is the plain number operator; e = d is the anti-number state.
        let n_rhs = chain_rule(DyadicMask::EMPTY, mask("1"), &phi, &f, 2).unwrap();
        let n_lhs = chain_rule_lhs(DyadicMask::EMPTY, mask("1"), &phi, &f, 2).unwrap();
        assert_eq!(rhs, direct);
        assert_eq!(n_rhs, n_lhs);
        assert_eq!(n_rhs, w("1").scale(&rat(2)));

        // Empty power: phi(f) itself.
        assert_eq!(
            chain_rule(
                DyadicMask::EMPTY,
                DyadicMask::EMPTY,
                &Polynomial::identity(),
                &f,
                2
            )
            .unwrap(),
            f
        );

        // f = r2 is untouched by S_1, so N_1 f^2 = 0.
        let rhs = chain_rule(DyadicMask::EMPTY, mask("1"), &phi, &w("01"), 2).unwrap();
        assert!(rhs.is_zero());
    }

    #[test]
    fn chain_rule_riesz_routes_agree() {
        let u = ScalarSeq::from_pairs([(1, ratio(1, 2)), (2, rat(-1)), (3, ratio(2, 3))]).unwrap();
        let e = mask("101");
        let phi = Polynomial::new(vec![rat(1), ratio(-1, 2), rat(0), rat(1)]);
        let mut f = ChaosElement::constant(ratio(1, 4));
        f.add_term(mask("11"), rat(1));
        f.add_term(mask("001"), ratio(-2, 3));
        let n = 4;
        assert_eq!(
            chain_rule_riesz_operator(&u, e, &phi, &f, n).unwrap(),
            chain_rule_riesz_closed(&u, e, &phi, &f, n).unwrap()
        );
    }

    #[test]
    fn asymmetry_compose_identities() {
        let j = 1;
        let n = 3;
        let mut f = ChaosElement::constant(ratio(1, 2));
        f.add_term(mask("1"), rat(2));
        f.add_term(mask("011"), ratio(-1, 3));

        // Odd phi: both sides are A_j f.
        let odd = Polynomial::identity();
        let lhs = apply(PrimitiveKind::Asymmetry, j, &f).unwrap();
        assert_eq!(asymmetry_compose(&odd, &f, j, n).unwrap(), lhs);

        // Constant phi: both sides are c r_j.
        let c = Polynomial::constant(ratio(5, 7));
        let lhs = apply(
            PrimitiveKind::Asymmetry,
            j,
            &compose_poly(&c, &f, n).unwrap(),
        )
        .unwrap();
        assert_eq!(asymmetry_compose(&c, &f, j, n).unwrap(), lhs);
        assert_eq!(lhs, w("1").scale(&ratio(5, 7)));

        // Even phi through both routes.
        let even = Polynomial::monomial(2);
        let lhs = apply(
            PrimitiveKind::Asymmetry,
            j,
            &compose_poly(&even, &f, n).unwrap(),
        )
        .unwrap();
        assert_eq!(asymmetry_compose(&even, &f, j, n).unwrap(), lhs);

        // General phi.
        let phi = Polynomial::new(vec![rat(1), rat(-2), ratio(1, 3), rat(1)]);
        let lhs = apply(
            PrimitiveKind::Asymmetry,
            j,
            &compose_poly(&phi, &f, n).unwrap(),
        )
        .unwrap();
        assert_eq!(asymmetry_compose(&phi, &f, j, n).unwrap(), lhs);
    }

    #[test]
    fn nf2_identity() {
        // N(f^2) = 2 (Nf)(1Nf).
        let mut f = ChaosElement::constant(rat(2));
        f.add_term(mask("1"), ratio(-1, 2));
        f.add_term(mask("11"), rat(3));
        for j in 1..=2 {
            let lhs = apply(PrimitiveKind::Number, j, &walsh_mul(&f, &f)).unwrap();
            let rhs = (&apply(PrimitiveKind::Number, j, &f).unwrap()
                * &apply(PrimitiveKind::AntiNumber, j, &f).unwrap())
                .scale(&rat(2));
            assert_eq!(lhs, rhs);
        }
    }
}
