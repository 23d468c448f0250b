//! Matrix representation of signed words by quadrupling.
//!
//! The four quadrupling operators lift a matrix `e` to double size:
//!
//! ```text
//! Q00(e) = [e  0]   Q01(e) = [0  e]   Q10(e) = [e   0]   Q11(e) = [ 0  e]
//!          [0  e]            [e  0]            [0  -e]            [-e  0]
//! ```
//!
//! (upper index = sign bit, lower = swap bit). Iterating over the columns of
//! a word `[s;p]`, innermost position first, represents the signed group by
//! `2^n x 2^n` signed permutation matrices; the map is a group isomorphism
//! and coincides with the matrix of the word's action on the Walsh basis in
//! Paley order. Entries are [`GaussianRational`] so the `±i` eigenvalues of
//! odd words stay exact.
//!
//! The module also provides the normalized Hilbert-Schmidt pairing
//! `<A,B> = 2^-n tr(A^T B)`, the constructive eigensystem doubling, the
//! block-averaging adjoint `P` of a quadrupling, and Clifford-algebra
//! verification over anticommutative generator families.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::chaos::parse_rational;
use crate::dyadic::DyadicMask;
use crate::signed::SignedWord;
use crate::{Error, Result, Sign};

/// An exact complex rational `re + im*i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> GaussianRational {
        GaussianRational { re, im }
    }

    pub fn zero() -> GaussianRational {
        GaussianRational::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> GaussianRational {
        GaussianRational::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> GaussianRational {
        GaussianRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_rational(re: BigRational) -> GaussianRational {
        GaussianRational::new(re, BigRational::zero())
    }

    pub fn from_int(n: i64) -> GaussianRational {
        GaussianRational::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> GaussianRational {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    /// The real value, or an error if an imaginary part is present.
    pub fn to_rational(&self) -> Result<BigRational> {
        if self.is_real() {
            Ok(self.re.clone())
        } else {
            Err(Error::NonRealMatrix)
        }
    }

    /// Render in lowest terms: `a`, `bi`, or `a+bi` / `a-bi`, with unit
    /// imaginary coefficients shortened to `i`.
    pub fn render(&self) -> String {
        let rat = |q: &BigRational| {
            if q.denom().is_one() {
                format!("{}", q.numer())
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        };
        let imag = |q: &BigRational| {
            if q.is_one() {
                "i".to_string()
            } else if (-q).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", rat(q))
            }
        };
        if self.im.is_zero() {
            rat(&self.re)
        } else if self.re.is_zero() {
            imag(&self.im)
        } else if self.im.is_negative() {
            format!("{}-{}", rat(&self.re), imag(&-self.im.clone()))
        } else {
            format!("{}+{}", rat(&self.re), imag(&self.im))
        }
    }

    /// Parse the [`render`](Self::render) format.
    pub fn parse(token: &str) -> Result<GaussianRational> {
        let bad = |msg: &str| Error::Parse {
            pos: 0,
            msg: format!("{msg}: {token:?}"),
        };
        let tok = token.trim();
        if tok.is_empty() {
            return Err(bad("empty entry"));
        }
        // Split a trailing imaginary part off at a +/- that is not leading.
        if let Some(stripped) = tok.strip_suffix('i') {
            let mut split = None;
            for (idx, ch) in stripped.char_indices().skip(1) {
                if ch == '+' || ch == '-' {
                    split = Some(idx);
                }
            }
            let (re_txt, im_txt) = match split {
                Some(idx) => (&stripped[..idx], &stripped[idx..]),
                None => ("0", stripped),
            };
            let im = match im_txt {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                other => parse_rational(other).map_err(|_| bad("bad imaginary part"))?,
            };
            let re = parse_rational(re_txt).map_err(|_| bad("bad real part"))?;
            return Ok(GaussianRational::new(re, im));
        }
        Ok(GaussianRational::from_rational(
            parse_rational(tok).map_err(|_| bad("bad entry"))?,
        ))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::ops::Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl std::ops::Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl std::ops::Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl std::ops::Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

/// A dense `2^n x 2^n` matrix over Gaussian rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct DyadicMatrix {
    n: u32,
    entries: Vec<GaussianRational>,
}

impl DyadicMatrix {
    /// Supported quadrupling depth: `2^10 = 1024` rows at most.
    pub const MAX_DEPTH: u32 = 10;

    pub fn zero(n: u32) -> Result<DyadicMatrix> {
        if n > Self::MAX_DEPTH {
            return Err(Error::InvalidArgument(format!(
                "matrix depth {n} exceeds the supported maximum {}",
                Self::MAX_DEPTH
            )));
        }
        let dim = 1usize << n;
        Ok(DyadicMatrix {
            n,
            entries: vec![GaussianRational::zero(); dim * dim],
        })
    }

    pub fn identity(n: u32) -> Result<DyadicMatrix> {
        let mut m = DyadicMatrix::zero(n)?;
        for r in 0..m.dim() {
            m.set(r, r, GaussianRational::one());
        }
        Ok(m)
    }

    /// The 1x1 matrix holding a scalar.
    pub fn scalar(value: GaussianRational) -> DyadicMatrix {
        DyadicMatrix {
            n: 0,
            entries: vec![value],
        }
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<DyadicMatrix> {
        let dim = rows.len();
        if !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {dim} is not a power of two"
            )));
        }
        let n = dim.trailing_zeros();
        if n > Self::MAX_DEPTH {
            return Err(Error::InvalidArgument(format!(
                "matrix depth {n} exceeds the supported maximum {}",
                Self::MAX_DEPTH
            )));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row length {} in a {dim}x{dim} matrix",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(DyadicMatrix { n, entries })
    }

    /// Depth `n`; the matrix is `2^n x 2^n`.
    pub fn depth(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &GaussianRational {
        &self.entries[row * self.dim() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: GaussianRational) {
        let dim = self.dim();
        self.entries[row * dim + col] = value;
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.is_real())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> DyadicMatrix {
        let dim = self.dim();
        let mut out = DyadicMatrix::zero(self.n).expect("depth already validated");
        for r in 0..dim {
            for c in 0..dim {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for r in 0..self.dim() {
            acc = &acc + self.get(r, r);
        }
        acc
    }

    // Word matrices are signed permutations, so most entries are zero;
    // entrywise operations skip the zeros instead of multiplying them out.
    pub fn scale(&self, factor: &GaussianRational) -> DyadicMatrix {
        DyadicMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|e| if e.is_zero() { e.clone() } else { e * factor })
                .collect(),
        }
    }

    pub fn add(&self, other: &DyadicMatrix) -> Result<DyadicMatrix> {
        self.check_depth(other)?;
        Ok(DyadicMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| {
                    if b.is_zero() {
                        a.clone()
                    } else if a.is_zero() {
                        b.clone()
                    } else {
                        a + b
                    }
                })
                .collect(),
        })
    }

    pub fn sub(&self, other: &DyadicMatrix) -> Result<DyadicMatrix> {
        self.check_depth(other)?;
        Ok(DyadicMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| {
                    if b.is_zero() {
                        a.clone()
                    } else if a.is_zero() {
                        -b
                    } else {
                        a - b
                    }
                })
                .collect(),
        })
    }

    fn check_depth(&self, other: &DyadicMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "depths {} and {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// Matrix product, skipping zero entries of the left factor.
    pub fn mul(&self, other: &DyadicMatrix) -> Result<DyadicMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "depths {} and {}",
                self.n, other.n
            )));
        }
        let dim = self.dim();
        let mut out = DyadicMatrix::zero(self.n)?;
        for r in 0..dim {
            for k in 0..dim {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..dim {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(r, c);
                    let val = cur + &(a * b);
                    out.set(r, c, val);
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, v: &[GaussianRational]) -> Result<Vec<GaussianRational>> {
        let dim = self.dim();
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} against dimension {dim}",
                v.len()
            )));
        }
        let mut out = vec![GaussianRational::zero(); dim];
        for r in 0..dim {
            for c in 0..dim {
                let a = self.get(r, c);
                if !a.is_zero() && !v[c].is_zero() {
                    out[r] = &out[r] + &(a * &v[c]);
                }
            }
        }
        Ok(out)
    }

    /// Tab-separated rows, entries in lowest terms.
    pub fn render(&self) -> String {
        let dim = self.dim();
        let mut out = String::new();
        for r in 0..dim {
            for c in 0..dim {
                if c > 0 {
                    out.push('\t');
                }
                out.push_str(&self.get(r, c).render());
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<DyadicMatrix> {
        let mut rows = Vec::new();
        for line in text.split('\n') {
            let body = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            };
            if body.trim().is_empty() {
                continue;
            }
            let row: Vec<GaussianRational> = body
                .split_whitespace()
                .map(GaussianRational::parse)
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        DyadicMatrix::from_rows(rows)
    }
}

impl fmt::Debug for DyadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DyadicMatrix(n={})", self.n)?;
        for r in 0..self.dim() {
            write!(f, "\n  ")?;
            for c in 0..self.dim() {
                write!(f, "{}\t", self.get(r, c))?;
            }
        }
        Ok(())
    }
}

/// One quadrupling step `Q^s_p(e)`.
pub fn quadruple(s: bool, p: bool, e: &DyadicMatrix) -> Result<DyadicMatrix> {
    let half = e.dim();
    let mut out = DyadicMatrix::zero(e.n + 1)?;
    for r in 0..half {
        for c in 0..half {
            let v = e.get(r, c);
            if v.is_zero() {
                continue;
            }
            match (s, p) {
                (false, false) => {
                    out.set(r, c, v.clone());
                    out.set(r + half, c + half, v.clone());
                }
                (false, true) => {
                    out.set(r, c + half, v.clone());
                    out.set(r + half, c, v.clone());
                }
                (true, false) => {
                    out.set(r, c, v.clone());
                    out.set(r + half, c + half, -v);
                }
                (true, true) => {
                    out.set(r, c + half, v.clone());
                    out.set(r + half, c, -v);
                }
            }
        }
    }
    Ok(out)
}

/// Represent a word at depth `n`: iterate [`quadruple`] over the columns,
/// position 1 innermost, then apply the word's sign. The result is the
/// matrix of [`SignedWord::apply`] on the Walsh basis in Paley order.
pub fn word_to_matrix(w: &SignedWord, n: u32) -> Result<DyadicMatrix> {
    let len = w.s_mask().len().max(w.p_mask().len());
    if len > n {
        return Err(Error::DimensionMismatch(format!(
            "word {} does not fit depth {n}",
            w.render()
        )));
    }
    let mut m = DyadicMatrix::scalar(GaussianRational::one());
    for pos in 1..=n {
        m = quadruple(w.s_mask().get(pos), w.p_mask().get(pos), &m)?;
    }
    Ok(if w.sign().is_positive() {
        m
    } else {
        m.scale(&GaussianRational::from_int(-1))
    })
}

/// Check the transpose law `A^T = (-1)^c11 A` where `c11` counts the `[1;1]`
/// columns of the word, and return the sign. A mismatch is a library bug.
pub fn transpose_law(w: &SignedWord, n: u32) -> Result<Sign> {
    let c11 = w.s_mask().and(w.p_mask()).weight();
    let sign = Sign::from_parity(c11);
    let m = word_to_matrix(w, n)?;
    let expected = if sign.is_positive() {
        m.clone()
    } else {
        m.scale(&GaussianRational::from_int(-1))
    };
    if m.transpose() != expected {
        return Err(Error::InvariantViolation(format!(
            "transpose law failed for {} at depth {n}",
            w.render()
        )));
    }
    Ok(sign)
}

/// Normalized Hilbert-Schmidt pairing `<A,B>_n = 2^-n tr(A^T B)`, computed
/// as the entrywise dot scaled by `2^-n`.
pub fn hs_inner(a: &DyadicMatrix, b: &DyadicMatrix) -> Result<GaussianRational> {
    if a.depth() != b.depth() {
        return Err(Error::DimensionMismatch(format!(
            "depths {} and {}",
            a.depth(),
            b.depth()
        )));
    }
    let mut acc = GaussianRational::zero();
    for (x, y) in a.entries.iter().zip(&b.entries) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    let scale = GaussianRational::from_rational(BigRational::new(
        BigInt::one(),
        BigInt::one() << a.depth(),
    ));
    Ok(&acc * &scale)
}

/// An exact eigenpair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPair {
    pub value: GaussianRational,
    pub vector: Vec<GaussianRational>,
}

/// Double an eigensystem through one quadrupling step `Q^s_p`:
///
/// ```text
/// (0,0): λ ~ (x,0)    λ ~ (0,x)
/// (1,0): λ ~ (x,0)   -λ ~ (0,x)
/// (0,1): λ ~ (x,x)   -λ ~ (x,-x)
/// (1,1): iλ ~ (x,ix) -iλ ~ (x,-ix)
/// ```
pub fn eigen_double(pairs: &[EigenPair], s: bool, p: bool) -> Vec<EigenPair> {
    let mut out = Vec::with_capacity(pairs.len() * 2);
    let zero = |len: usize| vec![GaussianRational::zero(); len];
    let i = GaussianRational::i();
    for pair in pairs {
        let x = &pair.vector;
        let lam = &pair.value;
        match (s, p) {
            (false, false) => {
                out.push(EigenPair {
                    value: lam.clone(),
                    vector: [x.clone(), zero(x.len())].concat(),
                });
                out.push(EigenPair {
                    value: lam.clone(),
                    vector: [zero(x.len()), x.clone()].concat(),
                });
            }
            (true, false) => {
                out.push(EigenPair {
                    value: lam.clone(),
                    vector: [x.clone(), zero(x.len())].concat(),
                });
                out.push(EigenPair {
                    value: -lam,
                    vector: [zero(x.len()), x.clone()].concat(),
                });
            }
            (false, true) => {
                out.push(EigenPair {
                    value: lam.clone(),
                    vector: [x.clone(), x.clone()].concat(),
                });
                out.push(EigenPair {
                    value: -lam,
                    vector: [x.clone(), x.iter().map(|v| -v).collect()].concat(),
                });
            }
            (true, true) => {
                // Q11(e)(x, ix) = (i e x, -e x) = iλ (x, ix).
                out.push(EigenPair {
                    value: &i * lam,
                    vector: [x.clone(), x.iter().map(|v| &i * v).collect()].concat(),
                });
                out.push(EigenPair {
                    value: &(-&i) * lam,
                    vector: [x.clone(), x.iter().map(|v| &(-&i) * v).collect()].concat(),
                });
            }
        }
    }
    out
}

/// Full constructed eigensystem of `word_to_matrix(w, n)`: fold
/// [`eigen_double`] from the 1x1 base, then scale eigenvalues by the sign.
pub fn word_eigensystem(w: &SignedWord, n: u32) -> Result<Vec<EigenPair>> {
    let len = w.s_mask().len().max(w.p_mask().len());
    if len > n {
        return Err(Error::DimensionMismatch(format!(
            "word {} does not fit depth {n}",
            w.render()
        )));
    }
    let mut pairs = vec![EigenPair {
        value: GaussianRational::one(),
        vector: vec![GaussianRational::one()],
    }];
    for pos in 1..=n {
        pairs = eigen_double(&pairs, w.s_mask().get(pos), w.p_mask().get(pos));
    }
    if !w.sign().is_positive() {
        for pair in &mut pairs {
            pair.value = -&pair.value;
        }
    }
    Ok(pairs)
}

/// The adjoint `P = (Q^s_p)^*` of a depth-`n` quadrupling: partition `A`
/// into `2^n x 2^n` blocks and return the `q`-weighted block average
/// `P A = 2^-n sum_jl q_jl A_jl`.
pub fn adjoint_p(a: &DyadicMatrix, s: DyadicMask, p: DyadicMask, n: u32) -> Result<DyadicMatrix> {
    if a.depth() < n {
        return Err(Error::DimensionMismatch(format!(
            "matrix depth {} cannot shed {} quadrupling levels",
            a.depth(),
            n
        )));
    }
    let pattern = word_to_matrix(&SignedWord::new(Sign::Plus, s, p), n)?;
    let blocks = pattern.dim();
    let inner = a.depth() - n;
    let size = 1usize << inner;
    let mut out = DyadicMatrix::zero(inner)?;
    for bj in 0..blocks {
        for bl in 0..blocks {
            let q = pattern.get(bj, bl);
            if q.is_zero() {
                continue;
            }
            for r in 0..size {
                for c in 0..size {
                    let v = a.get(bj * size + r, bl * size + c);
                    if !v.is_zero() {
                        let cur = out.get(r, c);
                        out.set(r, c, cur + &(q * v));
                    }
                }
            }
        }
    }
    let scale =
        GaussianRational::from_rational(BigRational::new(BigInt::one(), BigInt::one() << n));
    Ok(out.scale(&scale))
}

/// Verification report for the Clifford identity on a generator span.
#[derive(Clone, Debug)]
pub struct CliffordReport {
    /// Common sign of the generators' squares.
    pub sign: Sign,
    /// Did `(sum_i x_i M_i)^2 = sign * (sum_i x_i^2) I` hold exactly?
    pub square_ok: bool,
    /// Number of distinct index pairs among the `2^k` subproducts.
    pub span_dimension: usize,
    /// `2^k` for `k` generators.
    pub expected_dimension: usize,
}

impl CliffordReport {
    pub fn ok(&self) -> bool {
        self.square_ok && self.span_dimension == self.expected_dimension
    }
}

/// Verify the Clifford identity `(sum_i x_i M_i)^2 = sigma (sum_i x_i^2) I`
/// for a pure, pairwise anticommutative, basic generator family, and count
/// the distinct index pairs its subproducts span.
pub fn clifford_verify(generators: &[SignedWord], x: &[BigRational]) -> Result<CliffordReport> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    if x.len() != generators.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} generators",
            x.len(),
            generators.len()
        )));
    }
    let sign = generators[0].sigma();
    for g in generators {
        if g.is_scalar() {
            return Err(Error::InvalidArgument(
                "generators must not be scalars".into(),
            ));
        }
        if g.sigma() != sign {
            return Err(Error::InvalidArgument(
                "generators must be pure: all squares of one sign".into(),
            ));
        }
    }
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            if a.comm(b) != Sign::Minus {
                return Err(Error::InvalidArgument(format!(
                    "generators {} and {} commute",
                    a.render(),
                    b.render()
                )));
            }
        }
    }
    let n = generators
        .iter()
        .map(|g| g.s_mask().len().max(g.p_mask().len()))
        .max()
        .unwrap_or(1);

    // j(x) = sum_i x_i M_i over the generators themselves.
    let mut j = DyadicMatrix::zero(n)?;
    for (g, coeff) in generators.iter().zip(x) {
        let m = word_to_matrix(g, n)?;
        j = j.add(&m.scale(&GaussianRational::from_rational(coeff.clone())))?;
    }
    let square = j.mul(&j)?;
    let q: BigRational = x.iter().map(|v| v * v).sum();
    let q = if sign.is_positive() { q } else { -q };
    let expected = DyadicMatrix::identity(n)?.scale(&GaussianRational::from_rational(q));

    // Span: distinct index pairs among all subset products.
    let mut seen = std::collections::BTreeSet::new();
    for subset in 0u64..1 << generators.len() {
        let mut acc = SignedWord::identity();
        for (i, g) in generators.iter().enumerate() {
            if subset >> i & 1 == 1 {
                acc = acc.mul(g);
            }
        }
        seen.insert((acc.s_mask().bits(), acc.p_mask().bits()));
    }

    Ok(CliffordReport {
        sign,
        square_ok: square == expected,
        span_dimension: seen.len(),
        expected_dimension: 1 << generators.len(),
    })
}
