//! Induced models as rule files plus a JSON metadata sidecar.
//!
//! The rule file uses the rule engine's syntax, one `rule` statement per
//! induced rule, so it can be edited by hand or loaded as a rule set. The
//! sidecar keeps what the text cannot: cut points, hyperparameters and
//! coverage counts.

use serde::{Deserialize, Serialize};

use crate::alto::ElementKind;
use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::label::LogicalLabel;
use crate::rules::{
    parse_rules_with_schema, Bound, CmpOp, Expr, FeatureRef, Level, Operand, Rule, Scope, Statement, Term,
    Thresholds,
};

use super::data::FeatureSpec;
use super::discretize::{Condition, FeatureBins, Test};
use super::learn::{BinaryModel, Hyperparameters, InducedRule};
use super::model::OneVsRest;

fn level_of(kind: ElementKind) -> Level {
    match kind {
        ElementKind::Line => Level::Line,
        ElementKind::Block => Level::Block,
    }
}

fn scope_of(kind: ElementKind) -> Scope {
    match kind {
        ElementKind::Line => Scope::Line,
        ElementKind::Block => Scope::Block,
    }
}

/// The rule-engine expression equivalent to one condition.
pub fn condition_expr(level: Level, c: &Condition) -> Expr {
    let f = FeatureRef::new(level, c.feature.clone());
    let value = Operand::term(Term::Feature(f.clone()));
    match &c.test {
        Test::Range { lower: Some(lo), upper: Some(hi) } => Expr::InRange {
            value,
            lo: Bound { value: *lo, inclusive: false },
            hi: Bound { value: *hi, inclusive: true },
        },
        Test::Range { lower: Some(lo), upper: None } => Expr::Compare { lhs: value, op: CmpOp::Gt, rhs: Operand::number(*lo) },
        Test::Range { lower: None, upper: Some(hi) } => Expr::Compare { lhs: value, op: CmpOp::Le, rhs: Operand::number(*hi) },
        Test::Range { lower: None, upper: None } => Expr::InRange {
            value,
            lo: Bound { value: f64::NEG_INFINITY, inclusive: false },
            hi: Bound { value: f64::INFINITY, inclusive: false },
        },
        Test::Is(true) => Expr::Flag(f),
        Test::Is(false) => Expr::Not(Box::new(Expr::Flag(f))),
        Test::Equals(s) => Expr::CatEq { feature: f, value: s.clone(), negated: false },
    }
}

fn unsupported(e: &Expr) -> Error {
    Error::InvalidArgument(format!(
        "`{e}` cannot be used in an induced rule; use `in (a, b]`, `<=`, `>`, a flag, `not` flag or `= \"value\"`"
    ))
}

fn plain_feature(o: &Operand) -> Option<&FeatureRef> {
    match (&o.base, o.scale.is_empty()) {
        (Term::Feature(f), true) => Some(f),
        _ => None,
    }
}

fn constant(o: &Operand) -> Option<f64> {
    match (&o.base, o.scale.is_empty()) {
        (Term::Number(n), true) => Some(*n),
        _ => None,
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn expr_condition(e: &Expr) -> Result<Condition> {
    let cond = |f: &FeatureRef, test| Condition { feature: f.name.clone(), test };
    match e {
        Expr::InRange { value, lo, hi } if !lo.inclusive && (hi.inclusive || hi.value.is_infinite()) => {
            let f = plain_feature(value).ok_or_else(|| unsupported(e))?;
            Ok(cond(f, Test::Range { lower: finite(lo.value), upper: finite(hi.value) }))
        }
        Expr::Compare { lhs, op, rhs } => {
            let (f, c) = plain_feature(lhs).zip(constant(rhs)).ok_or_else(|| unsupported(e))?;
            match op {
                CmpOp::Gt => Ok(cond(f, Test::Range { lower: Some(c), upper: None })),
                CmpOp::Le => Ok(cond(f, Test::Range { lower: None, upper: Some(c) })),
                _ => Err(unsupported(e)),
            }
        }
        Expr::Flag(f) => Ok(cond(f, Test::Is(true))),
        Expr::Not(inner) => match inner.as_ref() {
            Expr::Flag(f) => Ok(cond(f, Test::Is(false))),
            _ => Err(unsupported(e)),
        },
        Expr::CatEq { feature, value, negated: false } => Ok(cond(feature, Test::Equals(value.to_lowercase()))),
        _ => Err(unsupported(e)),
    }
}

/// Conditions of a conjunction written in rule syntax.
pub fn expr_conditions(e: &Expr) -> Result<Vec<Condition>> {
    match e {
        Expr::And(parts) => parts.iter().map(expr_condition).collect(),
        other => Ok(vec![expr_condition(other)?]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RuleMeta {
    grow_positives: usize,
    grow_negatives: usize,
    train_positives: usize,
    train_negatives: usize,
    dl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelMeta {
    positive: LogicalLabel,
    params: Hyperparameters,
    bins: Vec<FeatureBins>,
    uncovered_positives: usize,
    uncovered_negatives: usize,
    rules: Vec<RuleMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Metadata {
    kind: ElementKind,
    features: Vec<FeatureSpec>,
    models: Vec<ModelMeta>,
}

impl OneVsRest {
    /// Rules as a rule file, grouped by label in model order.
    pub fn to_rule_text(&self) -> String {
        let level = level_of(self.kind);
        let mut out = String::from("# Induced rules; bins and coverage are in the metadata file.\n");
        for m in &self.models {
            for (i, r) in m.rules.iter().enumerate() {
                let when = Expr::and(r.conditions.iter().map(|c| condition_expr(level, c)).collect());
                let stmt = Statement::Rule(Rule {
                    id: format!("{}{}", m.positive.name(), i + 1),
                    scope: scope_of(self.kind),
                    label: m.positive,
                    when,
                });
                out.push_str(&stmt.to_string());
                out.push('\n');
            }
        }
        out
    }

    /// Everything except the rule conditions, as pretty JSON.
    pub fn metadata_json(&self) -> Result<String> {
        let meta = Metadata {
            kind: self.kind,
            features: self.models.first().map(|m| m.features.clone()).unwrap_or_default(),
            models: self
                .models
                .iter()
                .map(|m| ModelMeta {
                    positive: m.positive,
                    params: m.params,
                    bins: m.bins.clone(),
                    uncovered_positives: m.uncovered_positives,
                    uncovered_negatives: m.uncovered_negatives,
                    rules: m
                        .rules
                        .iter()
                        .map(|r| RuleMeta {
                            grow_positives: r.grow_positives,
                            grow_negatives: r.grow_negatives,
                            train_positives: r.train_positives,
                            train_negatives: r.train_negatives,
                            dl: r.dl,
                        })
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&meta)?)
    }

    /// Rebuilds a model from its rule file and metadata. Conditions come from
    /// the rule file, so hand edits to conditions are honoured; the number of
    /// rules per label must still match the metadata.
    pub fn load(rule_text: &str, metadata_json: &str) -> Result<OneVsRest> {
        let meta: Metadata = serde_json::from_str(metadata_json)?;
        let level = level_of(meta.kind);
        let schema = |l: Level, name: &str| -> Option<FeatureKind> {
            if l != level {
                return None;
            }
            meta.features.iter().find(|f| f.name == name).map(|f| f.kind.into())
        };
        let statements = parse_rules_with_schema(rule_text, &Thresholds::empty(), &schema)?;
        let mut rules: Vec<(LogicalLabel, Vec<Condition>)> = Vec::new();
        for s in &statements {
            match s {
                Statement::Rule(r) if r.scope == scope_of(meta.kind) => rules.push((r.label, expr_conditions(&r.when)?)),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "induced model files may only hold {} rules, found `{other}`",
                        scope_of(meta.kind).as_str()
                    )))
                }
            }
        }
        let mut models = Vec::new();
        for m in &meta.models {
            let mine: Vec<Vec<Condition>> =
                rules.iter().filter(|(l, _)| *l == m.positive).map(|(_, c)| c.clone()).collect();
            if mine.len() != m.rules.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} rules for {} in the rule file but {} in the metadata",
                    mine.len(),
                    m.positive,
                    m.rules.len()
                )));
            }
            models.push(BinaryModel {
                positive: m.positive,
                kind: meta.kind,
                features: meta.features.clone(),
                rules: mine
                    .into_iter()
                    .zip(&m.rules)
                    .map(|(conditions, r)| InducedRule {
                        conditions,
                        grow_positives: r.grow_positives,
                        grow_negatives: r.grow_negatives,
                        train_positives: r.train_positives,
                        train_negatives: r.train_negatives,
                        dl: r.dl,
                    })
                    .collect(),
                bins: m.bins.clone(),
                params: m.params,
                uncovered_positives: m.uncovered_positives,
                uncovered_negatives: m.uncovered_negatives,
            });
        }
        if rules.iter().any(|(l, _)| !meta.models.iter().any(|m| m.positive == *l)) {
            return Err(Error::InvalidArgument("rule file has a label with no model in the metadata".into()));
        }
        Ok(OneVsRest { kind: meta.kind, models })
    }
}
