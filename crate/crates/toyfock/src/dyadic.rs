//! Finitary 0-1 sequences and the bracket calculus over them.
//!
//! A finitary 0-1 sequence is stored as a [`DyadicMask`]: bit `i-1` of a
//! machine word holds position `i` of the sequence. Positions are 1-based and
//! capped at [`CAPACITY`]; anything deeper is reported as an error, never
//! silently wrapped. The integer value of the word is exactly the Paley index
//! of the corresponding Walsh function, so the natural order on indices
//! coincides with the lexicographic order on sequences.
//!
//! [`ScalarSeq`] holds a finitary sequence of rationals and provides the
//! generalized power `x^d = prod_{j in d} x_j` (empty product 1, so `0^0 = 1`)
//! and the summation bracket over a mask.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Highest representable sequence position.
pub const CAPACITY: u32 = 64;

/// A finitary 0-1 sequence of positions `1..=64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DyadicMask(u64);

impl DyadicMask {
    /// The zero sequence.
    pub const EMPTY: DyadicMask = DyadicMask(0);

    pub fn from_bits(bits: u64) -> DyadicMask {
        DyadicMask(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// The sequence `1_j` with a single 1 at position `j`.
    pub fn singleton(pos: u32) -> Result<DyadicMask> {
        if pos == 0 || pos > CAPACITY {
            return Err(Error::CapacityOverflow(pos as u64));
        }
        Ok(DyadicMask(1u64 << (pos - 1)))
    }

    pub fn from_positions(positions: &[u32]) -> Result<DyadicMask> {
        let mut bits = 0u64;
        for &pos in positions {
            if pos == 0 || pos > CAPACITY {
                return Err(Error::CapacityOverflow(pos as u64));
            }
            bits |= 1u64 << (pos - 1);
        }
        Ok(DyadicMask(bits))
    }

    /// All ones through position `depth`.
    pub fn full(depth: u32) -> Result<DyadicMask> {
        if depth > CAPACITY {
            return Err(Error::CapacityOverflow(depth as u64));
        }
        if depth == 0 {
            return Ok(DyadicMask::EMPTY);
        }
        Ok(DyadicMask(u64::MAX >> (CAPACITY - depth)))
    }

    pub fn get(self, pos: u32) -> bool {
        (1..=CAPACITY).contains(&pos) && (self.0 >> (pos - 1)) & 1 == 1
    }

    /// Element-wise addition modulo 2.
    pub fn xor(self, other: DyadicMask) -> DyadicMask {
        DyadicMask(self.0 ^ other.0)
    }

    pub fn and(self, other: DyadicMask) -> DyadicMask {
        DyadicMask(self.0 & other.0)
    }

    pub fn or(self, other: DyadicMask) -> DyadicMask {
        DyadicMask(self.0 | other.0)
    }

    /// Set difference; meaningful when `other <= self`, where it agrees with xor.
    pub fn diff(self, other: DyadicMask) -> DyadicMask {
        DyadicMask(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: DyadicMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// The summation bracket of a 0-1 sequence: the number of 1s.
    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    /// Position of the last 1, 0 for the zero sequence; unlike the depth,
    /// this is intrinsic to the sequence.
    pub fn len(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// 1-based positions of the 1s, ascending.
    pub fn positions(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (1..=CAPACITY).filter(move |&p| (bits >> (p - 1)) & 1 == 1)
    }

    /// All `2^weight` masks `c <= self`, in increasing Paley order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// The index `n = sum_j p_j 2^(j-1)`.
    pub fn paley_index(self) -> u64 {
        self.0
    }

    /// Inverse of [`paley_index`](Self::paley_index); total on `u64`.
    pub fn paley_mask(n: u64) -> DyadicMask {
        DyadicMask(n)
    }

    /// Parse a 0-1 string written position-1-first, e.g. `101`.
    pub fn parse(text: &str) -> Result<DyadicMask> {
        if text.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                msg: "empty mask".into(),
            });
        }
        if text.len() as u32 > CAPACITY {
            return Err(Error::CapacityOverflow(text.len() as u64));
        }
        let mut bits = 0u64;
        for (i, ch) in text.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => bits |= 1u64 << i,
                _ => {
                    return Err(Error::Parse {
                        pos: i,
                        msg: format!("expected 0 or 1, found {:?}", ch as char),
                    })
                }
            }
        }
        Ok(DyadicMask(bits))
    }

    /// Render position-1-first with the zero tail suppressed; `0` for empty.
    pub fn render(self) -> String {
        if self.is_empty() {
            return "0".into();
        }
        (1..=self.len())
            .map(|p| if self.get(p) { '1' } else { '0' })
            .collect()
    }

    /// Render as a fixed-width column string, leftmost digit = position `depth`.
    pub fn render_cols(self, depth: u32) -> String {
        (1..=depth.max(1))
            .rev()
            .map(|p| if self.get(p) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for DyadicMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DyadicMask({})", self.render())
    }
}

impl fmt::Display for DyadicMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Iterator over the submasks of a mask, ascending.
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = DyadicMask;

    fn next(&mut self) -> Option<DyadicMask> {
        let cur = self.next?;
        // Next submask in increasing order: propagate a carry through the
        // gaps outside `mask`, then strip them off again.
        self.next = if cur == self.mask {
            None
        } else {
            Some(((cur | !self.mask).wrapping_add(1)) & self.mask)
        };
        Some(DyadicMask(cur))
    }
}

/// A finitary sequence of rationals, positions 1-based.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ScalarSeq {
    entries: BTreeMap<u32, BigRational>,
}

impl ScalarSeq {
    pub fn new() -> ScalarSeq {
        ScalarSeq::default()
    }

    pub fn from_pairs<I>(pairs: I) -> Result<ScalarSeq>
    where
        I: IntoIterator<Item = (u32, BigRational)>,
    {
        let mut seq = ScalarSeq::new();
        for (pos, value) in pairs {
            seq.set(pos, value)?;
        }
        Ok(seq)
    }

    /// The constant-1 sequence truncated to `1..=depth`.
    pub fn ones(depth: u32) -> Result<ScalarSeq> {
        ScalarSeq::from_pairs((1..=depth).map(|p| (p, BigRational::one())))
    }

    pub fn set(&mut self, pos: u32, value: BigRational) -> Result<()> {
        if pos == 0 {
            return Err(Error::InvalidArgument(
                "sequence positions start at 1".into(),
            ));
        }
        if value.is_zero() {
            self.entries.remove(&pos);
        } else {
            self.entries.insert(pos, value);
        }
        Ok(())
    }

    pub fn get(&self, pos: u32) -> BigRational {
        self.entries
            .get(&pos)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Positions carrying a nonzero value, ascending.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    /// Largest position in the support, 0 if none.
    pub fn support_len(&self) -> u32 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    /// Support as a mask; errors past position 64.
    pub fn support_mask(&self) -> Result<DyadicMask> {
        let positions: Vec<u32> = self.support().collect();
        DyadicMask::from_positions(&positions)
    }

    /// The generalized power `x^d = prod_{j: d_j = 1} x_j`, empty product 1.
    pub fn gen_power(&self, d: DyadicMask) -> BigRational {
        let mut acc = BigRational::one();
        for pos in d.positions() {
            match self.entries.get(&pos) {
                Some(v) => acc *= v,
                None => return BigRational::zero(),
            }
        }
        acc
    }

    /// The summation bracket over a mask: `sum_{j: p_j = 1} x_j`.
    pub fn dot_mask(&self, p: DyadicMask) -> BigRational {
        let mut acc = BigRational::zero();
        for pos in p.positions() {
            if let Some(v) = self.entries.get(&pos) {
                acc += v;
            }
        }
        acc
    }

    /// Element-wise product with a 0-1 mask (truncation to the mask).
    pub fn restrict(&self, d: DyadicMask) -> ScalarSeq {
        ScalarSeq {
            entries: self
                .entries
                .iter()
                .filter(|(pos, _)| d.get(**pos))
                .map(|(pos, v)| (*pos, v.clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn xor_examples() {
        let p = DyadicMask::parse("110").unwrap();
        let q = DyadicMask::parse("011").unwrap();
        assert_eq!(p.xor(q), DyadicMask::parse("101").unwrap());
        assert_eq!(p.xor(p), DyadicMask::EMPTY);
        // Worked product mask arithmetic: 1011 xor 0001 = 1010.
        let a = DyadicMask::parse("1011").unwrap();
        let b = DyadicMask::parse("0001").unwrap();
        assert_eq!(a.xor(b), DyadicMask::parse("1010").unwrap());
    }

    #[test]
    fn gen_power_examples() {
        let x = ScalarSeq::from_pairs([(1, rat(2)), (2, rat(3)), (3, rat(5))]).unwrap();
        assert_eq!(x.gen_power(DyadicMask::parse("101").unwrap()), rat(10));
        assert_eq!(x.gen_power(DyadicMask::EMPTY), rat(1));

        let y = ScalarSeq::from_pairs([(2, rat(7))]).unwrap();
        assert_eq!(y.gen_power(DyadicMask::parse("01").unwrap()), rat(7));
        assert_eq!(y.gen_power(DyadicMask::parse("1").unwrap()), rat(0));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(DyadicMask::parse("101").unwrap().weight(), 2);
        assert_eq!(DyadicMask::EMPTY.weight(), 0);
        assert_eq!(DyadicMask::parse("1111").unwrap().weight(), 4);
    }

    #[test]
    fn paley_examples() {
        assert_eq!(DyadicMask::parse("101").unwrap().paley_index(), 5);
        assert_eq!(DyadicMask::EMPTY.paley_index(), 0);
        assert_eq!(DyadicMask::paley_mask(6), DyadicMask::parse("011").unwrap());
    }

    #[test]
    fn paley_roundtrip_and_order() {
        for n in 0..512u64 {
            assert_eq!(DyadicMask::paley_mask(n).paley_index(), n);
        }
        // Numeric order on indices = lexicographic order on sequences: both
        // are the order of the underlying bits.
        for a in 0..64u64 {
            for b in 0..64u64 {
                let (p, q) = (DyadicMask::paley_mask(a), DyadicMask::paley_mask(b));
                assert_eq!(p < q, a < b);
            }
        }
    }

    #[test]
    fn subsets_examples() {
        let d = DyadicMask::parse("101").unwrap();
        let subs: Vec<DyadicMask> = d.subsets().collect();
        assert_eq!(
            subs,
            vec![
                DyadicMask::EMPTY,
                DyadicMask::parse("1").unwrap(),
                DyadicMask::parse("001").unwrap(),
                DyadicMask::parse("101").unwrap(),
            ]
        );
        assert_eq!(DyadicMask::EMPTY.subsets().count(), 1);
        assert_eq!(DyadicMask::parse("111").unwrap().subsets().count(), 8);
    }

    #[test]
    fn zero_one_power_algebra() {
        // p^c p^d = p^(c or d) for 0-1 valued p, exhaustively at depth 6.
        // For a 0-1 sequence, p^c = 1 iff c <= p, else 0.
        let pow = |p: u64, c: u64| u64::from(c & !p == 0);
        for p in 0..64u64 {
            for c in 0..64u64 {
                for d in 0..64u64 {
                    assert_eq!(pow(p, c) * pow(p, d), pow(p, c | d));
                }
            }
        }
    }

    #[test]
    fn indicator_identity() {
        // [1 - d] = 0^d: the empty-product convention makes it 1 iff d = 0.
        let zero = ScalarSeq::new();
        assert_eq!(zero.gen_power(DyadicMask::EMPTY), rat(1));
        for n in 1..128u64 {
            assert_eq!(zero.gen_power(DyadicMask::paley_mask(n)), rat(0));
        }
    }

    #[test]
    fn riesz_bracket_identity() {
        // sum_{p <= 1_n} d^p x^p = prod_{j <= n} (1 + d_j x_j), exact rationals.
        let d = ScalarSeq::from_pairs([
            (1, ratio(1, 2)),
            (2, rat(-3)),
            (3, ratio(2, 7)),
            (5, rat(4)),
            (8, ratio(-5, 3)),
        ])
        .unwrap();
        let x = ScalarSeq::from_pairs([
            (1, rat(2)),
            (2, ratio(1, 3)),
            (4, rat(-1)),
            (7, ratio(3, 4)),
            (8, ratio(1, 5)),
        ])
        .unwrap();
        let n = 8;
        let full = DyadicMask::full(n).unwrap();
        let mut lhs = BigRational::zero();
        for p in full.subsets() {
            lhs += d.gen_power(p) * x.gen_power(p);
        }
        let mut rhs = BigRational::one();
        for j in 1..=n {
            rhs *= BigRational::one() + d.get(j) * x.get(j);
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(DyadicMask::singleton(65).is_err());
        assert!(DyadicMask::singleton(0).is_err());
        assert!(DyadicMask::full(64).is_ok());
        assert!(DyadicMask::full(65).is_err());
        assert!(DyadicMask::parse(&"0".repeat(65)).is_err());
    }

    #[test]
    fn render_conventions() {
        let m = DyadicMask::from_positions(&[1, 3]).unwrap();
        assert_eq!(m.render(), "101");
        assert_eq!(m.render_cols(4), "0101");
        assert_eq!(DyadicMask::EMPTY.render(), "0");
        assert_eq!(DyadicMask::EMPTY.render_cols(2), "00");
        assert_eq!(DyadicMask::parse("0").unwrap(), DyadicMask::EMPTY);
        assert_eq!(
            DyadicMask::parse("00100").unwrap(),
            DyadicMask::singleton(3).unwrap()
        );
    }
}
