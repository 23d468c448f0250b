//! Parser for operator expressions used by the CLI and FFI surfaces.
//!
//! Grammar (whitespace around tokens is ignored):
//!
//! ```text
//! expr   := term ('.' term)*
//! term   := KIND '@' POSITION            single coordinate, e.g. N@1
//!         | KIND '^' MASK                coordinate power,  e.g. D^101
//!         | 'cN^d' '{c=' MASK ',d=' MASK '}'
//!         | 'cD^d' '{c=' MASK ',d=' MASK '}'
//! KIND   := N | N1 | D | D1 | R | S | A
//! ```
//!
//! `a.b` denotes the operator product `a b`: `b` acts on the input first,
//! matching the written composition order.

use crate::chaos::ChaosElement;
use crate::dyadic::DyadicMask;
use crate::operators::{apply, apply_power, PowerOp, PrimitiveKind};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Step {
    Single(PrimitiveKind, u32),
    Power(PowerOp),
}

/// A parsed operator expression; steps are stored left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorExpr {
    steps: Vec<Step>,
    source: String,
}

impl OperatorExpr {
    pub fn parse(text: &str) -> Result<OperatorExpr> {
        let mut steps = Vec::new();
        let mut cursor = 0usize;
        for piece in text.split('.') {
            let start = cursor;
            cursor += piece.len() + 1;
            let term = piece.trim();
            if term.is_empty() {
                return Err(Error::Parse {
                    pos: start,
                    msg: "empty operator term".into(),
                });
            }
            let offset = start + piece.len() - piece.trim_start().len();
            steps.push(parse_term(term, offset)?);
        }
        Ok(OperatorExpr {
            steps,
            source: text.trim().to_string(),
        })
    }

    /// Apply the expression to `f`; the rightmost term acts first.
    pub fn apply(&self, f: &ChaosElement) -> Result<ChaosElement> {
        let mut value = f.clone();
        for step in self.steps.iter().rev() {
            value = match step {
                Step::Single(kind, j) => apply(*kind, *j, &value)?,
                Step::Power(op) => apply_power(*op, &value),
            };
        }
        Ok(value)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

fn parse_term(term: &str, offset: usize) -> Result<Step> {
    let err = |msg: String| Error::Parse { pos: offset, msg };

    if let Some(rest) = term
        .strip_prefix("cN^d")
        .or_else(|| term.strip_prefix("cD^d"))
    {
        let family = if term.starts_with("cN") {
            PrimitiveKind::Number
        } else {
            PrimitiveKind::Annihilation
        };
        let body = rest
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| err(format!("expected {{c=...,d=...}} after {}", &term[..4])))?;
        let mut c = None;
        let mut d = None;
        for field in body.split(',') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| err(format!("bad field {field:?} in superscript term")))?;
            let mask = DyadicMask::parse(value.trim()).map_err(|e| match e {
                Error::Parse { msg, .. } => err(msg),
                other => other,
            })?;
            match key.trim() {
                "c" => c = Some(mask),
                "d" => d = Some(mask),
                other => return Err(err(format!("unknown field {other:?}"))),
            }
        }
        let c = c.ok_or_else(|| err("missing c=".into()))?;
        let d = d.ok_or_else(|| err("missing d=".into()))?;
        let op = match family {
            PrimitiveKind::Number => PowerOp::number(c, d)?,
            _ => PowerOp::annihilation(c, d)?,
        };
        return Ok(Step::Power(op));
    }

    if let Some((kind_tok, pos_tok)) = term.split_once('@') {
        let kind = PrimitiveKind::parse(kind_tok.trim())
            .ok_or_else(|| err(format!("unknown operator {:?}", kind_tok.trim())))?;
        if matches!(kind, PrimitiveKind::Zero | PrimitiveKind::Identity) {
            return Err(err(format!("{} takes no coordinate", kind.symbol())));
        }
        let j: u32 = pos_tok
            .trim()
            .parse()
            .map_err(|_| err(format!("bad coordinate {:?}", pos_tok.trim())))?;
        if j == 0 {
            return Err(err("coordinates start at 1".into()));
        }
        return Ok(Step::Single(kind, j));
    }

    if let Some((kind_tok, mask_tok)) = term.split_once('^') {
        let kind = PrimitiveKind::parse(kind_tok.trim())
            .ok_or_else(|| err(format!("unknown operator {:?}", kind_tok.trim())))?;
        let mask = DyadicMask::parse(mask_tok.trim()).map_err(|e| match e {
            Error::Parse { msg, .. } => err(msg),
            other => other,
        })?;
        return Ok(Step::Power(PowerOp::from_kind(kind, mask)?));
    }

    Err(err(format!(
        "cannot parse operator term {term:?}; expected K@j, K^mask, or cN^d{{c=..,d=..}}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::ChaosElement;

    fn w(s: &str) -> ChaosElement {
        ChaosElement::walsh(DyadicMask::parse(s).unwrap())
    }

    #[test]
    fn single_coordinate_terms() {
        let expr = OperatorExpr::parse("D@1").unwrap();
        assert_eq!(expr.apply(&w("11")).unwrap(), w("01"));

        let expr = OperatorExpr::parse("N@3").unwrap();
        assert!(expr.apply(&w("11")).unwrap().is_zero());
    }

    #[test]
    fn power_terms() {
        let expr = OperatorExpr::parse("S^100").unwrap();
        assert_eq!(expr.apply(&w("101")).unwrap(), -&w("101"));

        let expr = OperatorExpr::parse("R^011").unwrap();
        assert_eq!(expr.apply(&w("110")).unwrap(), w("101"));
    }

    #[test]
    fn two_superscript_terms() {
        let expr = OperatorExpr::parse("cN^d{c=001,d=101}").unwrap();
        // ^cN^d keeps r^p iff p agrees with d-c on d: p=100 works.
        assert_eq!(expr.apply(&w("100")).unwrap(), w("100"));
        assert!(expr.apply(&w("101")).unwrap().is_zero());

        let expr = OperatorExpr::parse("cD^d{c=0,d=1}").unwrap();
        assert_eq!(expr.apply(&w("1")).unwrap(), ChaosElement::unit());
    }

    #[test]
    fn composition_right_acts_first() {
        // N@1.R@1 is the operator product N R = 1D.
        let expr = OperatorExpr::parse("N@1.R@1").unwrap();
        assert_eq!(expr.apply(&ChaosElement::unit()).unwrap(), w("1"));
        let expr = OperatorExpr::parse("R@1 . N@1").unwrap();
        assert!(expr.apply(&ChaosElement::unit()).unwrap().is_zero());
    }

    #[test]
    fn parse_errors_carry_position() {
        assert!(OperatorExpr::parse("").is_err());
        assert!(OperatorExpr::parse("Q@1").is_err());
        assert!(OperatorExpr::parse("N@0").is_err());
        assert!(OperatorExpr::parse("N@1..R@1").is_err());
        assert!(OperatorExpr::parse("cN^d{c=11,d=01}").is_err());
        match OperatorExpr::parse("N@1.X@2") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
