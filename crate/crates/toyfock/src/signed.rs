//! The signed group of double binary sequences.
//!
//! A [`SignedWord`] `±[s;p]` holds two masks: the upper row `s` codes the
//! sign swaps (the symmetry exponent) and the lower row `p` codes the
//! replacements. Multiplication twists by `(-1)^(p1 . s2)`:
//!
//! ```text
//! [s;p][t;q] = (-1)^<p & t> [s+t; p+q]
//! ```
//!
//! so every pair of words commutes or anticommutes and every word squares to
//! `±1`. The word acts on chaos as the operator `S^s R^p` (replacement
//! first, then the sign swaps), which is exactly the matrix the quadrupling
//! representation assigns to it.
//!
//! [`embed`] realizes any prescribed sign vector and commutativity matrix
//! inside the group by choosing columns from the anticommuting triple
//! `T = {[0;1], [1;0], [1;1]}`; [`is_basic`] decides scalar-freeness of
//! subproducts by GF(2) rank of the stacked `(s|p)` vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chaos::ChaosElement;
use crate::dyadic::{DyadicMask, CAPACITY};
use crate::{Error, Result, Sign};

/// A group element `±[s;p]` at a declared rendering depth.
///
/// Equality ignores the depth: words are compared after zero-extension,
/// which is the canonical embedding of shallow words into deeper ones.
#[derive(Clone, Copy)]
pub struct SignedWord {
    sign: Sign,
    s: DyadicMask,
    p: DyadicMask,
    depth: u32,
}

impl PartialEq for SignedWord {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && self.s == other.s && self.p == other.p
    }
}

impl Eq for SignedWord {}

impl std::hash::Hash for SignedWord {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.sign, self.s, self.p).hash(state);
    }
}

impl SignedWord {
    pub fn new(sign: Sign, s: DyadicMask, p: DyadicMask) -> SignedWord {
        let depth = s.len().max(p.len()).max(1);
        SignedWord { sign, s, p, depth }
    }

    pub fn with_depth(sign: Sign, s: DyadicMask, p: DyadicMask, depth: u32) -> Result<SignedWord> {
        if depth == 0 || depth > CAPACITY {
            return Err(Error::CapacityOverflow(depth as u64));
        }
        if s.len() > depth || p.len() > depth {
            return Err(Error::InvalidArgument(format!(
                "masks [{};{}] do not fit depth {}",
                s.render(),
                p.render(),
                depth
            )));
        }
        Ok(SignedWord { sign, s, p, depth })
    }

    pub fn identity() -> SignedWord {
        SignedWord::new(Sign::Plus, DyadicMask::EMPTY, DyadicMask::EMPTY)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Upper row: the symmetry (sign swap) exponent.
    pub fn s_mask(&self) -> DyadicMask {
        self.s
    }

    /// Lower row: the replacement exponent.
    pub fn p_mask(&self) -> DyadicMask {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Same word rendered at a deeper depth.
    pub fn extended(&self, depth: u32) -> Result<SignedWord> {
        SignedWord::with_depth(self.sign, self.s, self.p, depth.max(self.depth))
    }

    pub fn negate(&self) -> SignedWord {
        SignedWord {
            sign: self.sign.flip(),
            ..*self
        }
    }

    /// Is the word `±[0;0]`?
    pub fn is_scalar(&self) -> bool {
        self.s.is_empty() && self.p.is_empty()
    }

    /// Group product with the `(-1)^(p1 . s2)` twist.
    pub fn mul(&self, other: &SignedWord) -> SignedWord {
        let twist = Sign::from_parity(self.p.and(other.s).weight());
        SignedWord {
            sign: self.sign * other.sign * twist,
            s: self.s.xor(other.s),
            p: self.p.xor(other.p),
            depth: self.depth.max(other.depth),
        }
    }

    /// `w^-1`; since `w w = sigma(w)`, the inverse is `sigma(w) w`.
    pub fn inverse(&self) -> SignedWord {
        let sq = self.mul(self).sign;
        if sq.is_positive() {
            *self
        } else {
            self.negate()
        }
    }

    /// The signum `sigma[s;p] = (-1)^<s & p>`: the sign of the square of the
    /// sign-stripped word.
    pub fn sigma(&self) -> Sign {
        Sign::from_parity(self.s.and(self.p).weight())
    }

    /// The commutativity function `(-1)^(<p & t> + <q & s>)`; `Plus` iff the
    /// two words commute.
    pub fn comm(&self, other: &SignedWord) -> Sign {
        Sign::from_parity(self.p.and(other.s).weight() + other.p.and(self.s).weight())
    }

    /// Action on chaos as the operator `S^s R^p`:
    /// `r^q -> sign (-1)^<s & (q+p)> r^(q+p)`.
    pub fn apply(&self, f: &ChaosElement) -> ChaosElement {
        f.basis_map(|q, a| {
            let shifted = q.xor(self.p);
            let flips = self.s.and(shifted).weight();
            let keep = self.sign * Sign::from_parity(flips);
            Some((
                shifted,
                if keep.is_positive() {
                    a.clone()
                } else {
                    -a.clone()
                },
            ))
        })
    }

    /// Parse `[s;p]` with an optional leading `-`; masks are written with
    /// the leftmost digit at the highest position.
    pub fn parse(text: &str) -> Result<SignedWord> {
        let src = text.trim();
        let (sign, body) = match src.strip_prefix('-') {
            Some(rest) => (Sign::Minus, rest.trim_start()),
            None => (
                Sign::Plus,
                src.strip_prefix('+').unwrap_or(src).trim_start(),
            ),
        };
        let inner = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::Parse {
                pos: 0,
                msg: format!("expected [s;p], found {src:?}"),
            })?;
        let (s_txt, p_txt) = inner.split_once(';').ok_or_else(|| Error::Parse {
            pos: 0,
            msg: "expected `;` between the two rows".into(),
        })?;
        let parse_cols = |txt: &str| -> Result<DyadicMask> {
            let reversed: String = txt.trim().chars().rev().collect();
            DyadicMask::parse(&reversed)
        };
        let s = parse_cols(s_txt)?;
        let p = parse_cols(p_txt)?;
        let depth = (s_txt.trim().len().max(p_txt.trim().len()) as u32).max(1);
        SignedWord::with_depth(sign, s, p, depth)
    }

    /// Render `[s;p]` at the word's depth, leftmost digit = highest position.
    pub fn render(&self) -> String {
        let body = format!(
            "[{};{}]",
            self.s.render_cols(self.depth),
            self.p.render_cols(self.depth)
        );
        if self.sign.is_positive() {
            body
        } else {
            format!("-{body}")
        }
    }
}

impl fmt::Display for SignedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for SignedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignedWord({})", self.render())
    }
}

/// Scalar-freeness of subproducts: the words are basic iff their stacked
/// `(s|p)` bit vectors are linearly independent over GF(2) (a product of a
/// subset is `±[0;0]` exactly when the subset xors to zero).
pub fn is_basic(words: &[SignedWord]) -> bool {
    let mut pivots: Vec<u128> = Vec::with_capacity(words.len());
    for w in words {
        let mut v = (w.s.bits() as u128) << 64 | w.p.bits() as u128;
        // Pivots are kept in descending leading-bit order, so one pass fully
        // reduces v: each xor clears the current bit and touches lower ones only.
        for &pivot in &pivots {
            let high = 127 - pivot.leading_zeros();
            if v >> high & 1 == 1 {
                v ^= pivot;
            }
        }
        if v == 0 {
            return false;
        }
        pivots.push(v);
        pivots.sort_unstable_by_key(|x| x.leading_zeros());
    }
    true
}

/// Brute-force oracle for [`is_basic`]: search all nonempty subsets for a
/// scalar product. Exponential; test sizes only.
pub fn is_basic_brute_force(words: &[SignedWord]) -> bool {
    let n = words.len();
    assert!(n <= 20, "brute force oracle limited to 20 words");
    for subset in 1u32..1 << n {
        let mut acc = SignedWord::identity();
        for (i, w) in words.iter().enumerate() {
            if subset >> i & 1 == 1 {
                acc = acc.mul(w);
            }
        }
        if acc.is_scalar() {
            return false;
        }
    }
    true
}

/// One column of a double sequence: an element of the anticommuting triple
/// `T`, ordered `R < S < RS`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Column {
    /// `[0;1]`: replacement bit only; positive.
    R,
    /// `[1;0]`: sign-swap bit only; positive.
    S,
    /// `[1;1]`: both bits; negative.
    RS,
}

impl Column {
    pub const TRIPLE: [Column; 3] = [Column::R, Column::S, Column::RS];

    fn bits(self) -> (bool, bool) {
        match self {
            Column::R => (false, true),
            Column::S => (true, false),
            Column::RS => (true, true),
        }
    }

    /// Per-position commutativity factor between two columns of the triple:
    /// equal columns commute, distinct ones anticommute.
    fn comm(self, other: Column) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Set one column of a word under construction.
fn put_column(s: &mut u64, p: &mut u64, pos: u32, col: Column) {
    let (sb, pb) = col.bits();
    if sb {
        *s |= 1 << (pos - 1);
    }
    if pb {
        *p |= 1 << (pos - 1);
    }
}

fn column_at(w: &SignedWord, pos: u32) -> Option<Column> {
    match (w.s_mask().get(pos), w.p_mask().get(pos)) {
        (false, false) => None,
        (false, true) => Some(Column::R),
        (true, false) => Some(Column::S),
        (true, true) => Some(Column::RS),
    }
}

/// An embedding request: target signs and a symmetric commutativity matrix
/// with unit diagonal, both over `{+1, -1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbedSpec {
    pub signs: Vec<i8>,
    pub comm: Vec<Vec<i8>>,
}

impl EmbedSpec {
    /// Parse the JSON interchange form `{"signs":[1,-1],"comm":[[1,-1],[-1,1]]}`.
    pub fn from_json(text: &str) -> Result<EmbedSpec> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: 0,
            msg: format!("embedding spec JSON: {e}"),
        })
    }

    pub fn validate(&self) -> Result<(Vec<Sign>, Vec<Vec<Sign>>)> {
        let m = self.signs.len();
        if m == 0 {
            return Err(Error::InvalidEmbedSpec("empty sign vector".into()));
        }
        if m as u32 > CAPACITY {
            return Err(Error::CapacityOverflow(m as u64));
        }
        if self.comm.len() != m {
            return Err(Error::InvalidEmbedSpec(format!(
                "comm matrix has {} rows for {} signs",
                self.comm.len(),
                m
            )));
        }
        let signs: Vec<Sign> = self
            .signs
            .iter()
            .map(|&v| {
                Sign::from_i8(v).ok_or_else(|| Error::InvalidEmbedSpec(format!("bad sign {v}")))
            })
            .collect::<Result<_>>()?;
        let mut comm = Vec::with_capacity(m);
        for (i, row) in self.comm.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidEmbedSpec(format!(
                    "comm row {i} has length {}, expected {m}",
                    row.len()
                )));
            }
            let row: Vec<Sign> = row
                .iter()
                .map(|&v| {
                    Sign::from_i8(v)
                        .ok_or_else(|| Error::InvalidEmbedSpec(format!("bad entry {v}")))
                })
                .collect::<Result<_>>()?;
            comm.push(row);
        }
        for i in 0..m {
            if comm[i][i] != Sign::Plus {
                return Err(Error::InvalidEmbedSpec(format!("diagonal entry {i} is -1")));
            }
            for j in 0..i {
                if comm[i][j] != comm[j][i] {
                    return Err(Error::InvalidEmbedSpec(format!(
                        "comm matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok((signs, comm))
    }
}

/// Construct words `d_1..d_m` with `depth(d_k) = k`, the prescribed signs,
/// and the prescribed pairwise commutativities.
///
/// Columns are chosen left to right from the triple `T`: at position `j < k`
/// the column fixes the cumulative commutativity with `d_j` (matching
/// `d_j`'s own column at `j` contributes `+1`, either other choice `-1`;
/// ties resolved to the smaller column), and the final column at position
/// `k` sets the signum through the parity of `[1;1]` columns (keeping it
/// prefers `[1;0]`). The output is always basic: the top positions are
/// strictly increasing, so the `(s|p)` vectors are triangular over GF(2).
pub fn embed(spec: &EmbedSpec) -> Result<Vec<SignedWord>> {
    let (signs, comm) = spec.validate()?;
    let m = signs.len();
    let mut words: Vec<SignedWord> = Vec::with_capacity(m);
    for k in 0..m {
        let mut cols: Vec<Column> = Vec::with_capacity(k + 1);
        for j in 0..k {
            // Cumulative commutativity with d_j from the columns chosen so
            // far (positions 1..=j); column j+1 then fixes the requirement.
            let mut have = Sign::Plus;
            for (i, col) in cols.iter().enumerate() {
                if let Some(theirs) = column_at(&words[j], i as u32 + 1) {
                    have = have * col.comm(theirs);
                }
            }
            let need = comm[k][j] * have;
            let anchor = column_at(&words[j], j as u32 + 1)
                .expect("word j has a column at its own top position");
            cols.push(if need == Sign::Plus {
                anchor
            } else {
                *Column::TRIPLE
                    .iter()
                    .filter(|c| **c != anchor)
                    .min()
                    .expect("two columns remain")
            });
        }
        // Top column sets the signum: sigma = (-1)^(count of [1;1] columns).
        let negatives = cols.iter().filter(|c| **c == Column::RS).count() as u32;
        let top = if Sign::from_parity(negatives) == signs[k] {
            Column::S
        } else {
            Column::RS
        };
        cols.push(top);
        let (mut s, mut p) = (0u64, 0u64);
        for (i, col) in cols.iter().enumerate() {
            put_column(&mut s, &mut p, i as u32 + 1, *col);
        }
        words.push(SignedWord::with_depth(
            Sign::Plus,
            DyadicMask::from_bits(s),
            DyadicMask::from_bits(p),
            k as u32 + 1,
        )?);
    }
    // The construction is deterministic; recheck its own contract before
    // handing the words out.
    let report = verify_embedding(&words, spec)?;
    if !report.ok() {
        return Err(Error::InvariantViolation(format!(
            "embedding verification failed: {report:?}"
        )));
    }
    Ok(words)
}

/// Post-hoc verification of an embedding against its spec.
#[derive(Clone, Debug)]
pub struct EmbedVerification {
    pub sigma_ok: bool,
    pub comm_ok: bool,
    pub basic: bool,
}

impl EmbedVerification {
    pub fn ok(&self) -> bool {
        self.sigma_ok && self.comm_ok && self.basic
    }
}

pub fn verify_embedding(words: &[SignedWord], spec: &EmbedSpec) -> Result<EmbedVerification> {
    let (signs, comm) = spec.validate()?;
    if words.len() != signs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} words against {} requested signs",
            words.len(),
            signs.len()
        )));
    }
    let sigma_ok = words.iter().zip(&signs).all(|(w, s)| w.sigma() == *s);
    let mut comm_ok = true;
    for (i, wi) in words.iter().enumerate() {
        for (j, wj) in words.iter().enumerate() {
            comm_ok &= wi.comm(wj) == comm[i][j];
        }
    }
    Ok(EmbedVerification {
        sigma_ok,
        comm_ok,
        basic: is_basic(words),
    })
}

/// The anticommutative basic family of a common sign:
/// `d_k = [1 0..0; 0 1..1]` (positive) or `e_k = [1 0..0; 1 1..1]`
/// (negative), `k = 1..m`.
pub fn anticommutative_family(m: usize, sign: Sign) -> Result<Vec<SignedWord>> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "family length must be positive".into(),
        ));
    }
    if m as u32 > CAPACITY {
        return Err(Error::CapacityOverflow(m as u64));
    }
    (1..=m as u32)
        .map(|k| {
            let s = DyadicMask::singleton(k)?;
            let below = DyadicMask::full(k - 1)?;
            let p = if sign == Sign::Plus {
                below
            } else {
                below.or(s)
            };
            SignedWord::with_depth(Sign::Plus, s, p, k)
        })
        .collect()
}

/// Two internally commutative families, every cross pair anticommutative,
/// all signs equal to `sign`.
///
/// `e_k` carries sign-swap bits at positions 1 and 2k, `e'_k` at 1 and
/// 2k+1; the replacement rows fill position 1 for `e_k` only, plus the slot
/// beneath the top bit as the sign choice dictates.
pub fn mutually_anticommuting_commutative_pair(
    m: usize,
    sign: Sign,
) -> Result<(Vec<SignedWord>, Vec<SignedWord>)> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "family length must be positive".into(),
        ));
    }
    let top = 2 * m as u32 + 1;
    if top > CAPACITY {
        return Err(Error::CapacityOverflow(top as u64));
    }
    let mut first = Vec::with_capacity(m);
    let mut second = Vec::with_capacity(m);
    for k in 1..=m as u32 {
        let one = DyadicMask::singleton(1)?;
        let s_e = one.or(DyadicMask::singleton(2 * k)?);
        let s_e2 = one.or(DyadicMask::singleton(2 * k + 1)?);
        // Fill beneath the top bit: 1 for e / 0 for e' gives both positive,
        // 0 for e / 1 for e' gives both negative.
        let (p_e, p_e2) = if sign == Sign::Plus {
            (one.or(DyadicMask::singleton(2 * k)?), DyadicMask::EMPTY)
        } else {
            (one, DyadicMask::singleton(2 * k + 1)?)
        };
        first.push(SignedWord::with_depth(Sign::Plus, s_e, p_e, 2 * k)?);
        second.push(SignedWord::with_depth(Sign::Plus, s_e2, p_e2, 2 * k + 1)?);
    }
    Ok((first, second))
}

/// Result of an augmentation step.
#[derive(Clone, Debug)]
pub struct AugmentOutcome {
    pub family: Vec<SignedWord>,
    pub anticommutative: bool,
    pub signs: Vec<Sign>,
}

fn family_signs(words: &[SignedWord]) -> Vec<Sign> {
    words.iter().map(|w| w.sigma()).collect()
}

fn pairwise_anticommutative(words: &[SignedWord]) -> bool {
    words
        .iter()
        .enumerate()
        .all(|(i, a)| words[i + 1..].iter().all(|b| a.comm(b) == Sign::Minus))
}

/// Augment an anticommutative family: prepend `member_col` to every word at
/// one new position and add a fresh word carrying `fresh_col` there.
///
/// Rules enforced:
/// 1. the two columns must be distinct elements of the triple;
/// 2. keeping a negative family negative requires `fresh_col = [1;1]` and
///    `member_col` in `{[1;0], [0;1]}`;
/// 3. turning a negative family positive requires `member_col = [1;1]` and
///    a positive `fresh_col`;
/// 4. a positive or mixed family cannot be made negative in one step (see
///    [`double_augment_to_negative`] for the positive case).
pub fn augment(
    words: &[SignedWord],
    member_col: Column,
    fresh_col: Column,
    target_sign: Option<Sign>,
) -> Result<AugmentOutcome> {
    if words.is_empty() {
        return Err(Error::InvalidArgument("nothing to augment".into()));
    }
    if member_col == fresh_col {
        return Err(Error::AugmentRule {
            rule: 1,
            msg: "member and fresh columns must be two distinct columns of the triple".into(),
        });
    }
    let old_signs = family_signs(words);
    let all_negative = old_signs.iter().all(|s| *s == Sign::Minus);
    if let Some(target) = target_sign {
        match target {
            Sign::Minus if all_negative => {
                if !(fresh_col == Column::RS && member_col != Column::RS) {
                    return Err(Error::AugmentRule {
                        rule: 2,
                        msg: "keeping a negative family negative requires the fresh word on \
                              [1;1] and a positive member column"
                            .into(),
                    });
                }
            }
            Sign::Plus if all_negative => {
                if !(member_col == Column::RS && fresh_col != Column::RS) {
                    return Err(Error::AugmentRule {
                        rule: 3,
                        msg: "switching a negative family positive requires the member column \
                              [1;1] and a positive fresh column"
                            .into(),
                    });
                }
            }
            Sign::Minus => {
                return Err(Error::AugmentRule {
                    rule: 4,
                    msg: "a positive or mixed family cannot be made negative by a single \
                          augmentation"
                        .into(),
                });
            }
            Sign::Plus => {}
        }
    }
    let pos = words.iter().map(|w| w.depth()).max().unwrap_or(0) + 1;
    if pos > CAPACITY {
        return Err(Error::CapacityOverflow(pos as u64));
    }
    let mut family: Vec<SignedWord> = Vec::with_capacity(words.len() + 1);
    for w in words {
        let mut s = w.s_mask().bits();
        let mut p = w.p_mask().bits();
        put_column(&mut s, &mut p, pos, member_col);
        family.push(SignedWord::with_depth(
            w.sign(),
            DyadicMask::from_bits(s),
            DyadicMask::from_bits(p),
            pos,
        )?);
    }
    let (mut s, mut p) = (0u64, 0u64);
    put_column(&mut s, &mut p, pos, fresh_col);
    family.push(SignedWord::with_depth(
        Sign::Plus,
        DyadicMask::from_bits(s),
        DyadicMask::from_bits(p),
        pos,
    )?);
    let outcome = AugmentOutcome {
        anticommutative: pairwise_anticommutative(&family),
        signs: family_signs(&family),
        family,
    };
    if let Some(target) = target_sign {
        if outcome.signs.iter().any(|s| *s != target) {
            return Err(Error::InvariantViolation(format!(
                "augmentation produced signs {:?} against target {target}",
                outcome.signs
            )));
        }
    }
    if !outcome.anticommutative {
        return Err(Error::InvariantViolation(
            "augmentation broke anticommutativity".into(),
        ));
    }
    Ok(outcome)
}

/// Rule-4 double augmentation: turn a positive anticommutative family
/// negative with two new positions (members get `[0;1]` then `[1;1]`, the
/// fresh word sits on `[1;1]` at the top position).
pub fn double_augment_to_negative(words: &[SignedWord]) -> Result<AugmentOutcome> {
    if words.is_empty() {
        return Err(Error::InvalidArgument("nothing to augment".into()));
    }
    let old_signs = family_signs(words);
    if old_signs.contains(&Sign::Minus) {
        return Err(Error::AugmentRule {
            rule: 4,
            msg: "double augmentation to negative starts from a positive family; a mixed \
                  family stays mixed under any uniform augmentation"
                .into(),
        });
    }
    let base = words.iter().map(|w| w.depth()).max().unwrap_or(0);
    let (lo, hi) = (base + 1, base + 2);
    if hi > CAPACITY {
        return Err(Error::CapacityOverflow(hi as u64));
    }
    let mut family = Vec::with_capacity(words.len() + 1);
    for w in words {
        let mut s = w.s_mask().bits();
        let mut p = w.p_mask().bits();
        put_column(&mut s, &mut p, lo, Column::RS);
        put_column(&mut s, &mut p, hi, Column::R);
        family.push(SignedWord::with_depth(
            w.sign(),
            DyadicMask::from_bits(s),
            DyadicMask::from_bits(p),
            hi,
        )?);
    }
    let (mut s, mut p) = (0u64, 0u64);
    put_column(&mut s, &mut p, hi, Column::RS);
    family.push(SignedWord::with_depth(
        Sign::Plus,
        DyadicMask::from_bits(s),
        DyadicMask::from_bits(p),
        hi,
    )?);
    let outcome = AugmentOutcome {
        anticommutative: pairwise_anticommutative(&family),
        signs: family_signs(&family),
        family,
    };
    if !outcome.anticommutative || outcome.signs.iter().any(|s| *s != Sign::Minus) {
        return Err(Error::InvariantViolation(
            "double augmentation failed to produce a negative anticommutative family".into(),
        ));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn word(text: &str) -> SignedWord {
        SignedWord::parse(text).unwrap()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn worked_products() {
        // The two worked products, signs included.
        let lhs = word("[1101;1011]").mul(&word("[0011;0001]"));
        assert_eq!(lhs, word("[1110;1010]"));
        assert_eq!(lhs.sign(), Sign::Plus);

        let lhs = word("[0001;0011]").mul(&word("[1101;0101]"));
        assert_eq!(lhs, word("-[1100;0110]"));
    }

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let i = word("[1;1]");
        let sq = i.mul(&i);
        assert!(sq.is_scalar());
        assert_eq!(sq.sign(), Sign::Minus);
        assert_eq!(i.sigma(), Sign::Minus);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(word("[1;0]").sigma(), Sign::Plus);
        assert_eq!(word("[0;1]").sigma(), Sign::Plus);
        assert_eq!(word("[10;11]").sigma(), Sign::Minus);
        // sigma ignores the carried sign and matches the square's sign.
        let w = word("-[10;11]");
        assert_eq!(w.sigma(), w.mul(&w).sign());
    }

    #[test]
    fn comm_examples() {
        let r = word("[0;1]");
        let s = word("[1;0]");
        assert_eq!(r.comm(&s), Sign::Minus);
        assert_eq!(r.comm(&r), Sign::Plus);
        // i = [11;01] commutes with the imaginary unit [01;01].
        assert_eq!(word("[01;01]").comm(&word("[11;01]")), Sign::Plus);
    }

    #[test]
    fn comm_agrees_with_products() {
        let samples = [
            word("[1;0]"),
            word("[0;1]"),
            word("[1;1]"),
            word("[10;11]"),
            word("[1101;1011]"),
            word("-[0111;0010]"),
        ];
        for a in &samples {
            for b in &samples {
                let ab = a.mul(b);
                let ba = b.mul(a);
                match a.comm(b) {
                    Sign::Plus => assert_eq!(ab, ba),
                    Sign::Minus => assert_eq!(ab, ba.negate()),
                }
            }
        }
    }

    #[test]
    fn group_axioms_on_samples() {
        let samples = [
            SignedWord::identity(),
            word("[1;0]"),
            word("[0;1]"),
            word("[1;1]"),
            word("-[10;11]"),
            word("[0110;1011]"),
        ];
        let e = SignedWord::identity();
        for a in &samples {
            assert_eq!(a.mul(&e), *a);
            assert_eq!(e.mul(a), *a);
            assert_eq!(a.mul(&a.inverse()), e);
            for b in &samples {
                for c in &samples {
                    assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
                }
            }
        }
    }

    #[test]
    fn action_examples() {
        let r1 = ChaosElement::rademacher(1).unwrap();
        // [1;0] acts as S_1.
        assert_eq!(word("[1;0]").apply(&r1), -&r1);
        // [0;1] acts as R_1.
        assert_eq!(word("[0;1]").apply(&r1), ChaosElement::unit());
        assert_eq!(SignedWord::identity().apply(&r1), r1);
    }

    #[test]
    fn action_is_homomorphism() {
        let words = [
            word("[1;0]"),
            word("[0;1]"),
            word("[11;01]"),
            word("-[101;110]"),
        ];
        let mut f = ChaosElement::rademacher(1).unwrap();
        f.add_term(DyadicMask::parse("011").unwrap(), ratio(2, 3));
        for a in &words {
            for b in &words {
                assert_eq!(a.mul(b).apply(&f), a.apply(&b.apply(&f)));
            }
        }
    }

    #[test]
    fn word_action_matches_operator_powers() {
        use crate::operators::{apply_power, PowerOp};
        // [s;p] acts as S^s after R^p.
        let w = word("[101;011]");
        let mut f = ChaosElement::walsh(DyadicMask::parse("110").unwrap());
        f.add_term(DyadicMask::EMPTY, ratio(1, 2));
        let via_ops = apply_power(
            PowerOp::symmetry(w.s_mask()),
            &apply_power(PowerOp::replacement(w.p_mask()), &f),
        );
        assert_eq!(w.apply(&f), via_ops);
    }

    #[test]
    fn parse_render_roundtrip() {
        for text in ["[1;0]", "-[10;11]", "[0001;0011]", "[1101;1011]"] {
            let w = word(text);
            assert_eq!(w.render(), text);
            assert_eq!(SignedWord::parse(&w.render()).unwrap(), w);
        }
        assert!(SignedWord::parse("[1;").is_err());
        assert!(SignedWord::parse("10;11").is_err());
        assert!(SignedWord::parse("[2;0]").is_err());
    }

    #[test]
    fn depth_extension_is_canonical() {
        let shallow = word("[1;1]");
        let deep = word("[01;01]");
        assert_eq!(shallow, deep);
        assert_eq!(shallow.extended(2).unwrap().render(), "[01;01]");
    }

    #[test]
    fn basicness_examples() {
        let r = word("[0;1]");
        let s = word("[1;0]");
        let rs = word("[1;1]");
        assert!(is_basic(&[r, s]));
        assert!(!is_basic(&[r, s, rs]));
        assert!(is_basic(&[word("[10;11]")]));
        assert!(!is_basic(&[SignedWord::identity()]));
        // Duplicate entries multiply to a scalar.
        assert!(!is_basic(&[r, r]));
    }

    #[test]
    fn basicness_matches_brute_force() {
        // A few structured sets at depth <= 4.
        let sets: Vec<Vec<SignedWord>> = vec![
            vec![word("[01;10]"), word("[10;01]"), word("[11;11]")],
            vec![word("[01;10]"), word("[10;01]"), word("[11;10]")],
            vec![
                word("[0011;0101]"),
                word("[0110;1010]"),
                word("[0101;1111]"),
                word("[1;1]"),
            ],
            anticommutative_family(4, Sign::Minus).unwrap(),
        ];
        for set in sets {
            assert_eq!(is_basic(&set), is_basic_brute_force(&set), "{set:?}");
        }
    }

    #[test]
    fn embed_examples() {
        // m = 1, sign +1: the tie-break prefers [1;0].
        let spec = EmbedSpec {
            signs: vec![1],
            comm: vec![vec![1]],
        };
        assert_eq!(embed(&spec).unwrap(), vec![word("[1;0]")]);

        // m = 2, both negative, anticommuting: d1 = [1;1], d2 = [10;11].
        let spec = EmbedSpec {
            signs: vec![-1, -1],
            comm: vec![vec![1, -1], vec![-1, 1]],
        };
        let words = embed(&spec).unwrap();
        assert_eq!(words, vec![word("[1;1]"), word("[10;11]")]);
        assert_eq!(words[1].depth(), 2);
    }

    #[test]
    fn embed_satisfies_arbitrary_specs() {
        // Every sign/comm pattern on three generators.
        for mask in 0..8u32 {
            let signs: Vec<i8> = (0..3)
                .map(|i| if mask >> i & 1 == 0 { 1 } else { -1 })
                .collect();
            for cmask in 0..8u32 {
                let pick = |i: usize| if cmask >> i & 1 == 0 { 1 } else { -1 };
                let comm = vec![
                    vec![1, pick(0), pick(1)],
                    vec![pick(0), 1, pick(2)],
                    vec![pick(1), pick(2), 1],
                ];
                let spec = EmbedSpec {
                    signs: signs.clone(),
                    comm,
                };
                let words = embed(&spec).unwrap();
                let check = verify_embedding(&words, &spec).unwrap();
                assert!(check.ok(), "spec {signs:?} {cmask:?}");
                for (k, w) in words.iter().enumerate() {
                    assert_eq!(w.depth(), k as u32 + 1);
                }
            }
        }
    }

    #[test]
    fn embed_rejects_malformed_specs() {
        let asym = EmbedSpec {
            signs: vec![1, 1],
            comm: vec![vec![1, -1], vec![1, 1]],
        };
        assert!(embed(&asym).is_err());
        let diag = EmbedSpec {
            signs: vec![1],
            comm: vec![vec![-1]],
        };
        assert!(embed(&diag).is_err());
        let ragged = EmbedSpec {
            signs: vec![1, 1],
            comm: vec![vec![1]],
        };
        assert!(embed(&ragged).is_err());
    }

    #[test]
    fn anticommutative_family_examples() {
        let neg = anticommutative_family(2, Sign::Minus).unwrap();
        assert_eq!(neg, vec![word("[1;1]"), word("[10;11]")]);
        let pos = anticommutative_family(2, Sign::Plus).unwrap();
        assert_eq!(pos, vec![word("[1;0]"), word("[10;01]")]);

        for sign in [Sign::Plus, Sign::Minus] {
            let family = anticommutative_family(5, sign).unwrap();
            assert!(pairwise_anticommutative(&family));
            assert!(family.iter().all(|w| w.sigma() == sign));
            assert!(is_basic(&family));
        }
    }

    #[test]
    fn commutative_pair_contract() {
        for sign in [Sign::Plus, Sign::Minus] {
            let (e, e2) = mutually_anticommuting_commutative_pair(3, sign).unwrap();
            for family in [&e, &e2] {
                for (i, a) in family.iter().enumerate() {
                    assert_eq!(a.sigma(), sign);
                    for b in &family[i + 1..] {
                        assert_eq!(a.comm(b), Sign::Plus, "within-family must commute");
                    }
                }
            }
            for a in &e {
                for b in &e2 {
                    assert_eq!(a.comm(b), Sign::Minus, "cross pairs must anticommute");
                }
            }
            let all: Vec<SignedWord> = e.iter().chain(e2.iter()).copied().collect();
            assert!(is_basic(&all));
        }
    }

    #[test]
    fn augment_rules() {
        let neg = anticommutative_family(2, Sign::Minus).unwrap();
        // Rule 2: stay negative.
        let out = augment(&neg, Column::S, Column::RS, Some(Sign::Minus)).unwrap();
        assert!(out.anticommutative);
        assert!(out.signs.iter().all(|s| *s == Sign::Minus));
        assert_eq!(out.family.len(), 3);

        // Rule 2 violation: fresh word not on [1;1].
        let err = augment(&neg, Column::RS, Column::S, Some(Sign::Minus)).unwrap_err();
        assert!(matches!(err, Error::AugmentRule { rule: 2, .. }));

        // Rule 3: negative to positive.
        let out = augment(&neg, Column::RS, Column::R, Some(Sign::Plus)).unwrap();
        assert!(out.anticommutative);
        assert!(out.signs.iter().all(|s| *s == Sign::Plus));

        // Rule 1: equal columns rejected.
        let err = augment(&neg, Column::S, Column::S, None).unwrap_err();
        assert!(matches!(err, Error::AugmentRule { rule: 1, .. }));

        // Rule 4: positive family cannot turn negative in one step.
        let pos = anticommutative_family(2, Sign::Plus).unwrap();
        let err = augment(&pos, Column::RS, Column::S, Some(Sign::Minus)).unwrap_err();
        assert!(matches!(err, Error::AugmentRule { rule: 4, .. }));

        // Plain rule-1 augmentation preserves anticommutativity.
        let out = augment(&pos, Column::R, Column::S, None).unwrap();
        assert!(out.anticommutative);
    }

    #[test]
    fn double_augmentation_goes_negative() {
        let pos = anticommutative_family(3, Sign::Plus).unwrap();
        let out = double_augment_to_negative(&pos).unwrap();
        assert!(out.anticommutative);
        assert!(out.signs.iter().all(|s| *s == Sign::Minus));
        assert_eq!(out.family.len(), 4);

        // Mixed families are rejected outright.
        let mixed = vec![word("[1;0]"), word("[10;11]")];
        assert!(pairwise_anticommutative(&mixed));
        let err = double_augment_to_negative(&mixed).unwrap_err();
        assert!(matches!(err, Error::AugmentRule { rule: 4, .. }));
    }

    #[test]
    fn embed_spec_json_format() {
        let spec: EmbedSpec =
            serde_json::from_str(r#"{"signs":[1,-1],"comm":[[1,-1],[-1,1]]}"#).unwrap();
        assert_eq!(spec.signs, vec![1, -1]);
        let words = embed(&spec).unwrap();
        assert_eq!(words.len(), 2);
    }
}
