//! Evaluation of rule expressions against feature rows.

use crate::error::{Error, Result};
use crate::features::{BlockFeatures, DocumentFeatures, FeatureValue, LineFeatures};

use super::{ArithOp, Expr, FeatureRef, LabelSet, Level, Neighbor, Operand, Term, Thresholds};

/// Labels visible to context tests. A missing neighbour is `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Neighbors {
    pub prev: Option<LabelSet>,
    pub next: Option<LabelSet>,
    pub current: LabelSet,
}

/// Everything an expression may read while testing one element.
///
/// For block rules `block` is the block being classified and `line` is unset
/// except while evaluating the body of `any first N lines`. For line rules
/// `line` is the line and `block` its containing block.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub thresholds: &'a Thresholds,
    pub doc: &'a DocumentFeatures,
    pub block: &'a BlockFeatures,
    pub line: Option<&'a LineFeatures>,
    /// Line rows of `block`, in order.
    pub block_lines: &'a [LineFeatures],
    pub neighbors: Neighbors,
}

fn missing(f: &FeatureRef) -> Error {
    Error::MissingFeature(format!("{}.{}", f.level.prefix(), f.name))
}

impl<'a> EvalContext<'a> {
    fn feature(&self, f: &FeatureRef) -> Result<FeatureValue> {
        let v = match f.level {
            Level::Line => self.line.and_then(|l| l.value(&f.name)),
            Level::Block => self.block.value(&f.name),
            Level::Document => self.doc.value(&f.name).map(FeatureValue::Num),
        };
        v.ok_or_else(|| missing(f))
    }

    fn term(&self, t: &Term) -> Result<f64> {
        match t {
            Term::Number(n) => Ok(*n),
            Term::Param(p) => self
                .thresholds
                .get(p)
                .ok_or_else(|| Error::UnknownThreshold(p.clone())),
            Term::Feature(f) => self.feature(f)?.as_num().ok_or_else(|| missing(f)),
        }
    }

    fn operand(&self, o: &Operand) -> Result<f64> {
        let mut v = self.term(&o.base)?;
        for (op, t) in &o.scale {
            let k = self.term(t)?;
            match op {
                ArithOp::Mul => v *= k,
                ArithOp::Div => v /= k,
            }
        }
        Ok(v)
    }

    /// Evaluates `expr`. Expressions from a parsed rule file never fail;
    /// hand-built ones report the first unknown name.
    pub fn eval(&self, expr: &Expr) -> Result<bool> {
        Ok(match expr {
            Expr::And(parts) => {
                for p in parts {
                    if !self.eval(p)? {
                        return Ok(false);
                    }
                }
                true
            }
            Expr::Or(parts) => {
                for p in parts {
                    if self.eval(p)? {
                        return Ok(true);
                    }
                }
                false
            }
            Expr::Not(e) => !self.eval(e)?,
            Expr::Compare { lhs, op, rhs } => op.holds(self.operand(lhs)?, self.operand(rhs)?),
            Expr::InRange { value, lo, hi } => {
                let v = self.operand(value)?;
                let above = if lo.inclusive { v >= lo.value } else { v > lo.value };
                let below = if hi.inclusive { v <= hi.value } else { v < hi.value };
                above && below
            }
            Expr::Flag(f) => self.feature(f)?.as_bool().ok_or_else(|| missing(f))?,
            Expr::CatEq { feature, value, negated } => {
                let actual = match self.feature(feature)? {
                    FeatureValue::Cat(c) => c,
                    _ => return Err(missing(feature)),
                };
                let equal = actual.as_deref().unwrap_or("none").eq_ignore_ascii_case(value);
                equal != *negated
            }
            Expr::Neighbor { which, label, negated } => {
                let set = match which {
                    Neighbor::Prev => self.neighbors.prev,
                    Neighbor::Next => self.neighbors.next,
                    Neighbor::Current => Some(self.neighbors.current),
                };
                let is = set.is_some_and(|s| s.contains(*label));
                is != *negated
            }
            Expr::AnyLine { count, expr } => {
                let n = self.term(count)?.max(0.0) as usize;
                for line in self.block_lines.iter().take(n) {
                    let inner = EvalContext { line: Some(line), ..*self };
                    if inner.eval(expr)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}
