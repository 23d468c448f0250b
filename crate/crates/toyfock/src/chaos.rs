//! The algebra of finite Walsh series with exact rational coefficients.
//!
//! A [`ChaosElement`] is a finite sum `f = sum_d a_d r^d` over Walsh functions
//! `r^d` indexed by masks. Multiplication is xor-convolution (from
//! `r_j^2 = 1`), expectation reads off the constant coefficient, and the
//! inner product is the coefficient dot product. [`riesz`] builds the Riesz
//! products `[1 + x r] = prod_j (1 + x_j r_j)`, whose composition law is
//! carried by the rational [`diamond`] operation.
//!
//! [`to_atoms`]/[`from_atoms`] convert between Walsh coefficients and the
//! values on the `2^n` dyadic atoms of depth `n` via a fast Walsh-Hadamard
//! transform in Paley ordering; the atom side makes pointwise composition
//! with arbitrary rational functions ([`compose_poly`], [`compose_fn`])
//! exact and cheap.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::{DyadicMask, ScalarSeq, CAPACITY};
use crate::{Error, Result, Sign};

/// Largest atom depth the dense transform will materialize (`2^22` entries).
pub const MAX_ATOM_DEPTH: u32 = 22;

/// A finite Walsh series: sparse map from masks to nonzero rationals.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ChaosElement {
    terms: BTreeMap<DyadicMask, BigRational>,
}

impl ChaosElement {
    pub fn zero() -> ChaosElement {
        ChaosElement::default()
    }

    /// The multiplicative unit `1 = r^0`.
    pub fn unit() -> ChaosElement {
        ChaosElement::walsh(DyadicMask::EMPTY)
    }

    /// The basis element `r^p` with coefficient 1.
    pub fn walsh(p: DyadicMask) -> ChaosElement {
        let mut terms = BTreeMap::new();
        terms.insert(p, BigRational::one());
        ChaosElement { terms }
    }

    /// The single Rademacher function `r_j`.
    pub fn rademacher(j: u32) -> Result<ChaosElement> {
        Ok(ChaosElement::walsh(DyadicMask::singleton(j)?))
    }

    pub fn constant(value: BigRational) -> ChaosElement {
        let mut f = ChaosElement::zero();
        f.add_term(DyadicMask::EMPTY, value);
        f
    }

    pub fn from_terms<I>(terms: I) -> ChaosElement
    where
        I: IntoIterator<Item = (DyadicMask, BigRational)>,
    {
        let mut f = ChaosElement::zero();
        for (mask, coeff) in terms {
            f.add_term(mask, coeff);
        }
        f
    }

    /// Add `coeff * r^mask`, dropping the term if it cancels to zero.
    pub fn add_term(&mut self, mask: DyadicMask, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn coeff(&self, mask: DyadicMask) -> BigRational {
        self.terms
            .get(&mask)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Terms in increasing Paley order.
    pub fn terms(&self) -> impl Iterator<Item = (&DyadicMask, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum length among the masks present; the minimal working depth.
    pub fn depth(&self) -> u32 {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    /// The expectation: the coefficient at mask 0.
    pub fn expectation(&self) -> BigRational {
        self.coeff(DyadicMask::EMPTY)
    }

    /// `<f, g> = sum_m a_m b_m`.
    pub fn inner(&self, other: &ChaosElement) -> BigRational {
        let mut acc = BigRational::zero();
        for (mask, a) in &self.terms {
            if let Some(b) = other.terms.get(mask) {
                acc += a * b;
            }
        }
        acc
    }

    /// Squared L2 norm, `<f, f>`.
    pub fn norm_sq(&self) -> BigRational {
        self.inner(self)
    }

    pub fn scale(&self, factor: &BigRational) -> ChaosElement {
        if factor.is_zero() {
            return ChaosElement::zero();
        }
        ChaosElement {
            terms: self.terms.iter().map(|(m, c)| (*m, c * factor)).collect(),
        }
    }

    /// Rebuild the element term by term; `None` drops a term.
    pub fn basis_map<F>(&self, mut f: F) -> ChaosElement
    where
        F: FnMut(DyadicMask, &BigRational) -> Option<(DyadicMask, BigRational)>,
    {
        let mut out = ChaosElement::zero();
        for (mask, coeff) in &self.terms {
            if let Some((new_mask, new_coeff)) = f(*mask, coeff) {
                out.add_term(new_mask, new_coeff);
            }
        }
        out
    }

    /// Parse the module text format: one `<mask> <num>/<den>` term per line,
    /// blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Result<ChaosElement> {
        let mut f = ChaosElement::zero();
        let mut offset = 0usize;
        for line in text.split('\n') {
            let line_start = offset;
            offset += line.len() + 1;
            let body = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            };
            let mut fields = body.split_whitespace();
            let Some(mask_tok) = fields.next() else {
                continue;
            };
            let Some(coeff_tok) = fields.next() else {
                return Err(Error::Parse {
                    pos: line_start,
                    msg: "expected `<mask> <numerator>/<denominator>`".into(),
                });
            };
            if fields.next().is_some() {
                return Err(Error::Parse {
                    pos: line_start,
                    msg: "trailing fields after coefficient".into(),
                });
            }
            let mask = DyadicMask::parse(mask_tok).map_err(|e| relocate(e, line_start))?;
            let coeff = parse_rational(coeff_tok).map_err(|e| relocate(e, line_start))?;
            f.add_term(mask, coeff);
        }
        Ok(f)
    }

    /// Render the text format, terms in Paley order, one per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (mask, coeff) in &self.terms {
            out.push_str(&mask.render());
            out.push(' ');
            out.push_str(&format!("{}/{}", coeff.numer(), coeff.denom()));
            out.push('\n');
        }
        out
    }
}

fn relocate(err: Error, base: usize) -> Error {
    match err {
        Error::Parse { pos, msg } => Error::Parse {
            pos: base + pos,
            msg,
        },
        other => other,
    }
}

/// Parse `n` or `n/d` into a rational.
pub fn parse_rational(token: &str) -> Result<BigRational> {
    let bad = |msg: &str| Error::Parse {
        pos: 0,
        msg: format!("{msg}: {token:?}"),
    };
    match token.split_once('/') {
        Some((n, d)) => {
            let numer: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
            let denom: BigInt = d.parse().map_err(|_| bad("bad denominator"))?;
            if denom.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(numer, denom))
        }
        None => {
            let numer: BigInt = token.parse().map_err(|_| bad("bad rational"))?;
            Ok(BigRational::from_integer(numer))
        }
    }
}

impl fmt::Display for ChaosElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mask, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mask.is_empty() {
                write!(f, "{}", coeff)?;
            } else {
                write!(f, "{}*r^{}", coeff, mask.render())?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ChaosElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChaosElement({})", self)
    }
}

impl std::ops::Add for &ChaosElement {
    type Output = ChaosElement;
    fn add(self, rhs: &ChaosElement) -> ChaosElement {
        let mut out = self.clone();
        for (mask, coeff) in &rhs.terms {
            out.add_term(*mask, coeff.clone());
        }
        out
    }
}

impl std::ops::Sub for &ChaosElement {
    type Output = ChaosElement;
    fn sub(self, rhs: &ChaosElement) -> ChaosElement {
        let mut out = self.clone();
        for (mask, coeff) in &rhs.terms {
            out.add_term(*mask, -coeff.clone());
        }
        out
    }
}

impl std::ops::Neg for &ChaosElement {
    type Output = ChaosElement;
    fn neg(self) -> ChaosElement {
        ChaosElement {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

/// Xor-convolution product: `r^p r^q = r^(p xor q)` extended bilinearly.
impl std::ops::Mul for &ChaosElement {
    type Output = ChaosElement;
    fn mul(self, rhs: &ChaosElement) -> ChaosElement {
        let mut out = ChaosElement::zero();
        for (p, a) in &self.terms {
            for (q, b) in &rhs.terms {
                out.add_term(p.xor(*q), a * b);
            }
        }
        out
    }
}

/// Named form of the product for call sites that read better with it.
pub fn walsh_mul(f: &ChaosElement, g: &ChaosElement) -> ChaosElement {
    f * g
}

/// The Riesz product `[1 + x r] = prod_j (1 + x_j r_j)`.
pub fn riesz(x: &ScalarSeq) -> ChaosElement {
    let factors: Vec<(u32, BigRational, BigRational)> = x
        .support()
        .map(|j| (j, BigRational::one(), x.get(j)))
        .collect();
    general_riesz(&factors)
}

/// `prod_j (a_j + b_j r_j)` over distinct positions.
///
/// This closed form backs the operator Riesz products: every family's action
/// on `[1 + x r]` lands in this shape.
pub fn general_riesz(factors: &[(u32, BigRational, BigRational)]) -> ChaosElement {
    let mut acc = ChaosElement::unit();
    for (pos, a, b) in factors {
        let r = DyadicMask::singleton(*pos).expect("position within capacity");
        let mut next = ChaosElement::zero();
        for (mask, coeff) in acc.terms() {
            if !a.is_zero() {
                next.add_term(*mask, coeff * a);
            }
            if !b.is_zero() {
                next.add_term(mask.xor(r), coeff * b);
            }
        }
        acc = next;
    }
    acc
}

/// The rational composition law of Riesz parameters:
/// `x <> y = (x + y)/(1 + xy)` when `xy != -1`, else 0.
pub fn diamond(x: &BigRational, y: &BigRational) -> BigRational {
    let prod = x * y;
    if prod == -BigRational::one() {
        BigRational::zero()
    } else {
        (x + y) / (BigRational::one() + prod)
    }
}

/// Indicator of a depth-`n` dyadic atom as the scaled Riesz product
/// `2^(-n) [1 + s r]`, `s` the atom's Rademacher sign pattern.
pub fn atom_indicator(signs: &[Sign]) -> Result<ChaosElement> {
    let n = signs.len() as u32;
    if n > CAPACITY {
        return Err(Error::CapacityOverflow(n as u64));
    }
    let x = ScalarSeq::from_pairs(signs.iter().enumerate().map(|(i, s)| {
        (
            i as u32 + 1,
            BigRational::from_integer(BigInt::from(s.value())),
        )
    }))?;
    let scale = BigRational::new(BigInt::one(), BigInt::one() << n);
    Ok(riesz(&x).scale(&scale))
}

/// Values of a function on the `2^n` dyadic atoms of depth `n`; entry `t`
/// is the value on `[t 2^-n, (t+1) 2^-n)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AtomVector {
    depth: u32,
    values: Vec<BigRational>,
}

impl AtomVector {
    pub fn new(depth: u32, values: Vec<BigRational>) -> Result<AtomVector> {
        if depth > MAX_ATOM_DEPTH {
            return Err(Error::InvalidArgument(format!(
                "atom depth {depth} exceeds the supported maximum {MAX_ATOM_DEPTH}"
            )));
        }
        if values.len() != 1usize << depth {
            return Err(Error::DimensionMismatch(format!(
                "depth {} needs {} atom values, got {}",
                depth,
                1usize << depth,
                values.len()
            )));
        }
        Ok(AtomVector { depth, values })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigRational> {
        self.values
    }

    /// Apply a rational function pointwise.
    pub fn map<F>(&self, f: F) -> AtomVector
    where
        F: Fn(&BigRational) -> BigRational,
    {
        AtomVector {
            depth: self.depth,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn pointwise_mul(&self, other: &AtomVector) -> Result<AtomVector> {
        if self.depth != other.depth {
            return Err(Error::DimensionMismatch(format!(
                "atom depths {} and {} differ",
                self.depth, other.depth
            )));
        }
        Ok(AtomVector {
            depth: self.depth,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// One rational per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for v in &self.values {
            out.push_str(&format!("{}/{}\n", v.numer(), v.denom()));
        }
        out
    }

    pub fn parse(text: &str) -> Result<AtomVector> {
        let mut values = Vec::new();
        for line in text.split('\n') {
            let body = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            };
            let tok = body.trim();
            if tok.is_empty() {
                continue;
            }
            values.push(parse_rational(tok)?);
        }
        let len = values.len();
        if !len.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "atom vector length {len} is not a power of two"
            )));
        }
        AtomVector::new(len.trailing_zeros(), values)
    }
}

/// In-place Walsh-Hadamard butterflies over integers.
fn fwht_bigint(data: &mut [BigInt]) {
    let n = data.len();
    let mut stride = 1;
    while stride < n {
        for block in (0..n).step_by(stride * 2) {
            for i in block..block + stride {
                let a = std::mem::take(&mut data[i]);
                let b = std::mem::take(&mut data[i + stride]);
                data[i] = &a + &b;
                data[i + stride] = a - b;
            }
        }
        stride *= 2;
    }
}

fn bit_reverse(t: usize, n: u32) -> usize {
    let mut out = 0usize;
    for j in 0..n {
        out |= ((t >> j) & 1) << (n - 1 - j);
    }
    out
}

/// Common-denominator split so the transform runs over integers.
fn to_integers(values: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let mut lcm = BigInt::one();
    for v in values {
        lcm = lcm.lcm(v.denom());
    }
    let nums = values
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    (nums, lcm)
}

/// Evaluate a Walsh series on every dyadic atom of depth `n`.
///
/// `r_j` is `+1` on the first half of each of its periods, so the sign of
/// `r_j` on atom `t` is read off digit `j` of the atom's left endpoint; in
/// index terms that is bit `n - j` of `t`, which the final bit-reversal
/// permutation accounts for.
pub fn to_atoms(f: &ChaosElement, n: u32) -> Result<AtomVector> {
    if n > MAX_ATOM_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "atom depth {n} exceeds the supported maximum {MAX_ATOM_DEPTH}"
        )));
    }
    if f.depth() > n {
        return Err(Error::DimensionMismatch(format!(
            "element of depth {} does not fit atom depth {}",
            f.depth(),
            n
        )));
    }
    let size = 1usize << n;
    let mut dense = vec![BigRational::zero(); size];
    for (mask, coeff) in f.terms() {
        dense[mask.paley_index() as usize] = coeff.clone();
    }
    let (mut nums, den) = to_integers(&dense);
    fwht_bigint(&mut nums);
    let mut values = vec![BigRational::zero(); size];
    for (u, num) in nums.into_iter().enumerate() {
        values[bit_reverse(u, n)] = BigRational::new(num, den.clone());
    }
    AtomVector::new(n, values)
}

/// Recover the Walsh coefficients from atom values; inverse of [`to_atoms`].
pub fn from_atoms(v: &AtomVector) -> ChaosElement {
    let n = v.depth();
    let size = 1usize << n;
    let mut permuted = vec![BigRational::zero(); size];
    for (t, val) in v.values().iter().enumerate() {
        permuted[bit_reverse(t, n)] = val.clone();
    }
    let (mut nums, den) = to_integers(&permuted);
    fwht_bigint(&mut nums);
    let scale = den * (BigInt::one() << n);
    let mut f = ChaosElement::zero();
    for (idx, num) in nums.into_iter().enumerate() {
        if !num.is_zero() {
            f.add_term(
                DyadicMask::paley_mask(idx as u64),
                BigRational::new(num, scale.clone()),
            );
        }
    }
    f
}

/// A univariate polynomial over the rationals, coefficients ascending.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Polynomial {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn constant(c: BigRational) -> Polynomial {
        Polynomial::new(vec![c])
    }

    /// The identity polynomial `t`.
    pub fn identity() -> Polynomial {
        Polynomial::new(vec![BigRational::zero(), BigRational::one()])
    }

    /// The monomial `t^k`.
    pub fn monomial(k: usize) -> Polynomial {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation at a rational point.
    pub fn eval(&self, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Horner evaluation in the Walsh algebra itself.
    ///
    /// Independent of the transform path; the two agreeing is the operative
    /// content of polynomial composition on a finite algebra.
    pub fn eval_chaos_ring(&self, f: &ChaosElement) -> ChaosElement {
        let mut acc = ChaosElement::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * f) + &ChaosElement::constant(c.clone());
        }
        acc
    }

    /// Split into even-degree and odd-degree parts, `phi = phi_e + phi_o`.
    pub fn parity_split(&self) -> (Polynomial, Polynomial) {
        let mut even = vec![BigRational::zero(); self.coeffs.len()];
        let mut odd = vec![BigRational::zero(); self.coeffs.len()];
        for (k, c) in self.coeffs.iter().enumerate() {
            if k % 2 == 0 {
                even[k] = c.clone();
            } else {
                odd[k] = c.clone();
            }
        }
        (Polynomial::new(even), Polynomial::new(odd))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigRational::zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        Polynomial::new(coeffs)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}

/// Compose a polynomial with `f` through the atom transform at depth `n`.
pub fn compose_poly(phi: &Polynomial, f: &ChaosElement, n: u32) -> Result<ChaosElement> {
    compose_fn(|t| phi.eval(t), f, n)
}

/// Compose an arbitrary rational function with `f` pointwise on the atoms.
pub fn compose_fn<F>(phi: F, f: &ChaosElement, n: u32) -> Result<ChaosElement>
where
    F: Fn(&BigRational) -> BigRational,
{
    let atoms = to_atoms(f, n)?;
    Ok(from_atoms(&atoms.map(|t| phi(t))))
}
