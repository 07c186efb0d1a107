//! Declarative rule sets and the block-then-line annotation pipeline.
//!
//! A rule file holds four kinds of statements:
//!
//! ```text
//! rule <id> <scope> -> <Label> : <expr>
//! conflict <id> <scope> <Label>[|<Label>...] vs <Label>[|<Label>...] -> <Label> : <expr>
//! override <id> <scope> -> <Label> : <expr>
//! default <scope> -> <Label>
//! ```
//!
//! See `docs/rules.md` at the repository root for the expression grammar.

mod eval;
mod pipeline;
mod syntax;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::label::LogicalLabel;

pub use eval::{EvalContext, Neighbors};
pub use pipeline::{Annotator, Labels, Pin};
pub use syntax::{builtin_feature_kind, parse_rules, parse_rules_with_schema, FeatureSchema};

/// The rule set shipped with the crate.
pub const DEFAULT_RULES: &str = include_str!("default.rules");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    Block,
    Line,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Block => "block",
            Scope::Line => "line",
        }
    }
}

/// Which row a feature reference reads from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// `L.` the line itself (or the line being tested inside `any first`).
    Line,
    /// `B.` the block, or the line's containing block.
    Block,
    /// `D.` document statistics.
    Document,
}

impl Level {
    pub fn prefix(self) -> &'static str {
        match self {
            Level::Line => "L",
            Level::Block => "B",
            Level::Document => "D",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureRef {
    pub level: Level,
    pub name: String,
}

impl FeatureRef {
    pub fn new(level: Level, name: impl Into<String>) -> Self {
        FeatureRef { level, name: name.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Feature(FeatureRef),
    Number(f64),
    /// `@name`, resolved against the rule set's thresholds.
    Param(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Mul,
    Div,
}

/// A term optionally scaled by constants, e.g. `D.medWordCount / 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operand {
    pub base: Term,
    pub scale: Vec<(ArithOp, Term)>,
}

impl Operand {
    pub fn term(base: Term) -> Self {
        Operand { base, scale: Vec::new() }
    }

    pub fn number(v: f64) -> Self {
        Operand::term(Term::Number(v))
    }

    pub fn feature(level: Level, name: &str) -> Self {
        Operand::term(Term::Feature(FeatureRef::new(level, name)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

/// One end of an interval; infinite values are written `-inf` / `inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub inclusive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    Prev,
    Next,
    /// The element's own candidate labels.
    Current,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
    Compare { lhs: Operand, op: CmpOp, rhs: Operand },
    InRange { value: Operand, lo: Bound, hi: Bound },
    /// Boolean feature is true.
    Flag(FeatureRef),
    /// Categorical feature equals a string.
    CatEq { feature: FeatureRef, value: String, negated: bool },
    /// Label test on a neighbouring element. A missing neighbour never
    /// "is" anything, so `prev is X` is false and `prev is not X` is true.
    Neighbor { which: Neighbor, label: LogicalLabel, negated: bool },
    /// Block scope: the inner line expression holds for any of the first
    /// `count` lines of the block.
    AnyLine { count: Term, expr: Box<Expr> },
}

impl Expr {
    pub fn and(parts: Vec<Expr>) -> Expr {
        if parts.len() == 1 {
            parts.into_iter().next().expect("one part")
        } else {
            Expr::And(parts)
        }
    }

    /// Whether the expression reads neighbour or own-candidate labels.
    pub fn uses_labels(&self) -> bool {
        match self {
            Expr::And(v) | Expr::Or(v) => v.iter().any(Expr::uses_labels),
            Expr::Not(e) => e.uses_labels(),
            Expr::AnyLine { expr, .. } => expr.uses_labels(),
            Expr::Neighbor { .. } => true,
            Expr::Compare { .. } | Expr::InRange { .. } | Expr::Flag(_) | Expr::CatEq { .. } => false,
        }
    }
}

/// Adds a candidate label when the condition holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub id: String,
    pub scope: Scope,
    pub label: LogicalLabel,
    pub when: Expr,
}

/// Settles a candidate set that contains labels from both sides.
///
/// If `when` holds, the side without `winner` is dropped; otherwise the
/// winner's side is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictRule {
    pub id: String,
    pub scope: Scope,
    pub left: Vec<LogicalLabel>,
    pub right: Vec<LogicalLabel>,
    pub winner: LogicalLabel,
    pub when: Expr,
}

/// Replaces a resolved label when the condition holds; evaluated in a
/// forward pass against resolved neighbour labels.
#[derive(Debug, Clone, PartialEq)]
pub struct OverrideRule {
    pub id: String,
    pub scope: Scope,
    pub label: LogicalLabel,
    pub when: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Rule(Rule),
    Conflict(ConflictRule),
    Override(OverrideRule),
    Default(Scope, LogicalLabel),
}

/// Named numeric constants referenced as `@name` in rule files.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    values: BTreeMap<String, f64>,
}

/// Constants of the shipped rule set. Pixel values assume the resolution of
/// the scans the rules were written for.
pub const DEFAULT_THRESHOLDS: [(&str, f64); 13] = [
    ("text_word_divisor", 3.0),
    ("title_block_max_lines", 4.0),
    ("header_lines_first_page", 30.0),
    ("header_lines_other_pages", 4.0),
    ("header_sim", 90.0),
    ("header_max_lines", 15.0),
    ("header_max_words", 50.0),
    ("title_height_divisor", 2.0),
    ("line_title_max_sim", 60.0),
    ("title_min_capital", 10.0),
    ("title_min_diff_hpos", 104.0),
    ("firstline_max_diff_hpos", 105.0),
    ("title_max_capital", 15.0),
];

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            values: DEFAULT_THRESHOLDS.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

impl Thresholds {
    /// No named constants; for rule files that only use literals.
    pub fn empty() -> Self {
        Thresholds { values: BTreeMap::new() }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    /// Overrides a known constant.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match self.values.get_mut(name) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::UnknownThreshold(name.to_string())),
        }
    }

    /// Adds or replaces a constant; used for custom rule files.
    pub fn define(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_string(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// A parsed and validated rule file.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub statements: Vec<Statement>,
    pub thresholds: Thresholds,
}

impl RuleSet {
    /// Parses and validates `text`; every `@name` must exist in `thresholds`.
    pub fn parse(text: &str, thresholds: Thresholds) -> Result<RuleSet> {
        let statements = parse_rules(text, &thresholds)?;
        Ok(RuleSet { statements, thresholds })
    }

    /// The shipped rule set with default constants.
    pub fn default_rules() -> RuleSet {
        RuleSet::parse(DEFAULT_RULES, Thresholds::default()).expect("shipped rules are valid")
    }

    pub fn rules(&self, scope: Scope) -> impl Iterator<Item = &Rule> {
        self.statements.iter().filter_map(move |s| match s {
            Statement::Rule(r) if r.scope == scope => Some(r),
            _ => None,
        })
    }

    pub fn conflicts(&self, scope: Scope) -> impl Iterator<Item = &ConflictRule> {
        self.statements.iter().filter_map(move |s| match s {
            Statement::Conflict(r) if r.scope == scope => Some(r),
            _ => None,
        })
    }

    pub fn overrides(&self, scope: Scope) -> impl Iterator<Item = &OverrideRule> {
        self.statements.iter().filter_map(move |s| match s {
            Statement::Override(r) if r.scope == scope => Some(r),
            _ => None,
        })
    }

    pub fn default_label(&self, scope: Scope) -> Option<LogicalLabel> {
        self.statements.iter().rev().find_map(|s| match s {
            Statement::Default(sc, l) if *sc == scope => Some(*l),
            _ => None,
        })
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A small set of labels, used for candidate labels during classification.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LabelSet(u8);

const ALL_LABELS: [LogicalLabel; 6] = [
    LogicalLabel::Text,
    LogicalLabel::Title,
    LogicalLabel::Header,
    LogicalLabel::Firstline,
    LogicalLabel::Other,
    LogicalLabel::Lastline,
];

fn bit(l: LogicalLabel) -> u8 {
    1 << (l as u8)
}

impl LabelSet {
    pub fn single(l: LogicalLabel) -> Self {
        LabelSet(bit(l))
    }

    pub fn contains(self, l: LogicalLabel) -> bool {
        self.0 & bit(l) != 0
    }

    pub fn insert(&mut self, l: LogicalLabel) {
        self.0 |= bit(l);
    }

    pub fn remove(&mut self, l: LogicalLabel) {
        self.0 &= !bit(l);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = LogicalLabel> {
        ALL_LABELS.into_iter().filter(move |l| self.contains(*l))
    }

    pub fn intersects(self, labels: &[LogicalLabel]) -> bool {
        labels.iter().any(|l| self.contains(*l))
    }
}

impl FromIterator<LogicalLabel> for LabelSet {
    fn from_iter<I: IntoIterator<Item = LogicalLabel>>(iter: I) -> Self {
        let mut s = LabelSet::default();
        for l in iter {
            s.insert(l);
        }
        s
    }
}
