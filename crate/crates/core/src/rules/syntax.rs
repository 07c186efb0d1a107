//! Rule file lexer, parser, validator and canonical printer.

use std::fmt;

use crate::error::{Error, Result};
use crate::features::{block_feature_kind, line_feature_kind, FeatureKind, DOCUMENT_COLUMNS};
use crate::label::LogicalLabel;

use super::{
    ArithOp, Bound, CmpOp, ConflictRule, Expr, FeatureRef, Level, Neighbor, Operand, OverrideRule,
    Rule, Scope, Statement, Term, Thresholds,
};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    Param(String),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Param(p) => write!(f, "`@{p}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax_err(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::RuleSyntax { line, column: col, message: message.into() }
}

const SYMBOLS: [&str; 18] = [
    "->", "<=", ">=", "=>", "=<", "!=", "<", ">", "=", "(", ")", "[", "]", ",", "|", "/", "*", ":",
];

/// Splits the file into statements. A statement starts on a line whose first
/// character is not whitespace; indented lines continue it.
fn lex(text: &str) -> Result<Vec<Vec<Token>>> {
    let mut statements: Vec<Vec<Token>> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = match raw.find('#') {
            Some(i) if !in_string(raw, i) => &raw[..i],
            _ => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let starts_statement = !content.starts_with(char::is_whitespace);
        let tokens = lex_line(content, line_no)?;
        if starts_statement || statements.is_empty() {
            statements.push(tokens);
        } else {
            statements.last_mut().expect("non-empty").extend(tokens);
        }
    }
    Ok(statements)
}

fn in_string(s: &str, idx: usize) -> bool {
    s[..idx].matches('"').count() % 2 == 1
}

fn lex_line(s: &str, line: usize) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|(_, d)| d.is_ascii_digit() || *d == 'i')) {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            let value = match text.as_str() {
                "-inf" => f64::NEG_INFINITY,
                _ => text
                    .parse::<f64>()
                    .map_err(|_| syntax_err(line, col, format!("invalid number `{text}`")))?,
            };
            out.push(Token { tok: Tok::Number(value), line, col });
            continue;
        }
        if c.is_alphabetic() || c == '_' || c == '@' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            let tok = if let Some(p) = text.strip_prefix('@') {
                if p.is_empty() {
                    return Err(syntax_err(line, col, "empty parameter name"));
                }
                Tok::Param(p.to_string())
            } else if text == "inf" {
                Tok::Number(f64::INFINITY)
            } else {
                Tok::Ident(text)
            };
            out.push(Token { tok, line, col });
            continue;
        }
        if c == '.' {
            out.push(Token { tok: Tok::Sym("."), line, col });
            i += 1;
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i].1 != '"' {
                i += 1;
            }
            if i >= chars.len() {
                return Err(syntax_err(line, col, "unterminated string"));
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push(Token { tok: Tok::Str(text), line, col });
            i += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().map(|(_, c)| c).collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                out.push(Token { tok: Tok::Sym(sym), line, col });
                i += sym.chars().count();
            }
            None => return Err(syntax_err(line, col, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

/// Kind of the feature `name` at `level`, or `None` if it does not exist.
pub type FeatureSchema<'a> = &'a dyn Fn(Level, &str) -> Option<FeatureKind>;

/// The features computed by this crate.
pub fn builtin_feature_kind(level: Level, name: &str) -> Option<FeatureKind> {
    match level {
        Level::Line => line_feature_kind(name),
        Level::Block => block_feature_kind(name),
        Level::Document => DOCUMENT_COLUMNS.contains(&name).then_some(FeatureKind::Numeric),
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    thresholds: &'a Thresholds,
    schema: FeatureSchema<'a>,
    scope: Scope,
    /// True while parsing the body of `any first N lines (...)`.
    in_any: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (0, 0),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(syntax_err(l, c, message))
    }

    fn next(&mut self) -> Result<Token> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err("unexpected end of statement"),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(x), .. }) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(x), .. }) if x == kw)
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.expected(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.is_kw(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.expected(&format!("`{kw}`"))
        }
    }

    fn expected<T>(&self, what: &str) -> Result<T> {
        match self.peek() {
            Some(t) => self.err(format!("expected {what}, found {}", t.tok)),
            None => self.err(format!("expected {what} at end of statement")),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.expected("identifier"),
        }
    }

    fn label(&mut self) -> Result<LogicalLabel> {
        let (l, c) = self.here();
        let name = self.ident()?;
        name.parse::<LogicalLabel>()
            .map_err(|_| syntax_err(l, c, format!("unknown label `{name}`")))
    }

    fn scope(&mut self) -> Result<Scope> {
        let (l, c) = self.here();
        match self.ident()?.as_str() {
            "block" => Ok(Scope::Block),
            "line" => Ok(Scope::Line),
            other => Err(syntax_err(l, c, format!("unknown scope `{other}`, expected `block` or `line`"))),
        }
    }

    fn check_label_for_scope(&self, label: LogicalLabel, at: (usize, usize)) -> Result<()> {
        if self.scope == Scope::Block && !label.valid_for_block() {
            return Err(syntax_err(at.0, at.1, format!("label {label} cannot be assigned to blocks")));
        }
        Ok(())
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn statement(&mut self) -> Result<Statement> {
        let (l, c) = self.here();
        let kw = self.ident()?;
        let stmt = match kw.as_str() {
            "rule" => {
                let id = self.ident()?;
                self.scope = self.scope()?;
                self.expect_sym("->")?;
                let at = self.here();
                let label = self.label()?;
                self.check_label_for_scope(label, at)?;
                self.expect_sym(":")?;
                let when = self.expr()?;
                Statement::Rule(Rule { id, scope: self.scope, label, when })
            }
            "override" => {
                let id = self.ident()?;
                self.scope = self.scope()?;
                self.expect_sym("->")?;
                let at = self.here();
                let label = self.label()?;
                self.check_label_for_scope(label, at)?;
                self.expect_sym(":")?;
                let when = self.expr()?;
                Statement::Override(OverrideRule { id, scope: self.scope, label, when })
            }
            "conflict" => {
                let id = self.ident()?;
                self.scope = self.scope()?;
                let left = self.label_group()?;
                self.expect_kw("vs")?;
                let right = self.label_group()?;
                self.expect_sym("->")?;
                let at = self.here();
                let winner = self.label()?;
                if !left.contains(&winner) && !right.contains(&winner) {
                    return Err(syntax_err(at.0, at.1, format!("winner {winner} is not one of the conflicting labels")));
                }
                self.expect_sym(":")?;
                let when = self.expr()?;
                Statement::Conflict(ConflictRule { id, scope: self.scope, left, right, winner, when })
            }
            "default" => {
                self.scope = self.scope()?;
                self.expect_sym("->")?;
                let at = self.here();
                let label = self.label()?;
                self.check_label_for_scope(label, at)?;
                Statement::Default(self.scope, label)
            }
            other => {
                return Err(syntax_err(
                    l,
                    c,
                    format!("unknown statement `{other}`, expected rule, conflict, override or default"),
                ))
            }
        };
        if !self.at_end() {
            return self.expected("end of statement");
        }
        Ok(stmt)
    }

    fn label_group(&mut self) -> Result<Vec<LogicalLabel>> {
        let mut out = Vec::new();
        loop {
            let at = self.here();
            let l = self.label()?;
            self.check_label_for_scope(l, at)?;
            out.push(l);
            if self.is_sym("|") {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut parts = vec![self.and_expr()?];
        while self.is_kw("or") {
            self.pos += 1;
            parts.push(self.and_expr()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one") } else { Expr::Or(parts) })
    }

    fn and_expr(&mut self) -> Result<Expr> {
        let mut parts = vec![self.unary()?];
        while self.is_kw("and") {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one") } else { Expr::And(parts) })
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.is_kw("not") {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        if self.is_sym("(") {
            self.pos += 1;
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        let at = self.here();
        if self.is_kw("prev") || self.is_kw("next") || self.is_kw("self") {
            if self.in_any {
                return Err(syntax_err(at.0, at.1, "label tests are not allowed inside `any`"));
            }
            let which = match self.ident()?.as_str() {
                "prev" => Neighbor::Prev,
                "next" => Neighbor::Next,
                _ => Neighbor::Current,
            };
            self.expect_kw("is")?;
            let negated = if self.is_kw("not") {
                self.pos += 1;
                true
            } else {
                false
            };
            let label = self.label()?;
            return Ok(Expr::Neighbor { which, label, negated });
        }
        if self.is_kw("any") {
            if self.scope != Scope::Block || self.in_any {
                return Err(syntax_err(at.0, at.1, "`any first N lines` is only allowed in block rules"));
            }
            self.pos += 1;
            self.expect_kw("first")?;
            let count = self.constant_term()?;
            self.expect_kw("lines")?;
            self.expect_sym("(")?;
            self.in_any = true;
            let inner = self.expr();
            self.in_any = false;
            let inner = inner?;
            self.expect_sym(")")?;
            return Ok(Expr::AnyLine { count, expr: Box::new(inner) });
        }

        let lhs = self.operand()?;
        // Bare boolean feature, optionally `is true` / `is false`.
        if let (Term::Feature(f), true) = (&lhs.base, lhs.scale.is_empty()) {
            if self.feature_kind(f) == Some(FeatureKind::Boolean) {
                if self.is_kw("is") {
                    self.pos += 1;
                    let v = self.ident()?;
                    return match v.to_ascii_lowercase().as_str() {
                        "true" => Ok(Expr::Flag(f.clone())),
                        "false" => Ok(Expr::Not(Box::new(Expr::Flag(f.clone())))),
                        _ => Err(syntax_err(at.0, at.1, "expected `true` or `false` after `is`")),
                    };
                }
                return Ok(Expr::Flag(f.clone()));
            }
            if self.feature_kind(f) == Some(FeatureKind::Categorical) {
                let negated = if self.is_sym("=") {
                    false
                } else if self.is_sym("!=") {
                    true
                } else {
                    return self.expected("`=` or `!=` after categorical feature");
                };
                self.pos += 1;
                return match self.next()? {
                    Token { tok: Tok::Str(s), .. } | Token { tok: Tok::Ident(s), .. } => {
                        Ok(Expr::CatEq { feature: f.clone(), value: s, negated })
                    }
                    t => Err(syntax_err(t.line, t.col, format!("expected a string, found {}", t.tok))),
                };
            }
        }
        self.check_numeric(&lhs, at)?;
        if self.is_kw("in") {
            self.pos += 1;
            let lo_inclusive = match self.next()?.tok {
                Tok::Sym("(") => false,
                Tok::Sym("[") => true,
                _ => return self.err("expected `(` or `[` to open interval"),
            };
            let lo = self.number()?;
            self.expect_sym(",")?;
            let hi = self.number()?;
            let hi_inclusive = match self.next()?.tok {
                Tok::Sym(")") => false,
                Tok::Sym("]") => true,
                _ => return self.err("expected `)` or `]` to close interval"),
            };
            return Ok(Expr::InRange {
                value: lhs,
                lo: Bound { value: lo, inclusive: lo_inclusive },
                hi: Bound { value: hi, inclusive: hi_inclusive },
            });
        }
        let op = match self.peek().map(|t| &t.tok) {
            Some(Tok::Sym("<")) => CmpOp::Lt,
            Some(Tok::Sym("<=")) | Some(Tok::Sym("=<")) => CmpOp::Le,
            Some(Tok::Sym(">")) => CmpOp::Gt,
            Some(Tok::Sym(">=")) | Some(Tok::Sym("=>")) => CmpOp::Ge,
            Some(Tok::Sym("=")) => CmpOp::Eq,
            Some(Tok::Sym("!=")) => CmpOp::Ne,
            _ => return self.expected("comparison operator"),
        };
        self.pos += 1;
        let at = self.here();
        let rhs = self.operand()?;
        self.check_numeric(&rhs, at)?;
        Ok(Expr::Compare { lhs, op, rhs })
    }

    fn number(&mut self) -> Result<f64> {
        match self.next()? {
            Token { tok: Tok::Number(n), .. } => Ok(n),
            t => Err(syntax_err(t.line, t.col, format!("expected a number, found {}", t.tok))),
        }
    }

    fn constant_term(&mut self) -> Result<Term> {
        let t = self.next()?;
        match t.tok {
            Tok::Number(n) => Ok(Term::Number(n)),
            Tok::Param(p) => {
                self.check_param(&p, (t.line, t.col))?;
                Ok(Term::Param(p))
            }
            other => Err(syntax_err(t.line, t.col, format!("expected a number or @parameter, found {other}"))),
        }
    }

    fn check_param(&self, name: &str, at: (usize, usize)) -> Result<()> {
        if self.thresholds.get(name).is_none() {
            return Err(syntax_err(at.0, at.1, format!("unknown threshold `@{name}`")));
        }
        Ok(())
    }

    fn term(&mut self) -> Result<Term> {
        let t = self.next()?;
        match t.tok {
            Tok::Number(n) => Ok(Term::Number(n)),
            Tok::Param(p) => {
                self.check_param(&p, (t.line, t.col))?;
                Ok(Term::Param(p))
            }
            Tok::Ident(prefix) => {
                let level = match prefix.as_str() {
                    "L" => Level::Line,
                    "B" => Level::Block,
                    "D" => Level::Document,
                    _ => {
                        return Err(syntax_err(
                            t.line,
                            t.col,
                            format!("expected a feature reference like L.name, B.name or D.name, found `{prefix}`"),
                        ))
                    }
                };
                self.expect_sym(".")?;
                let at = self.here();
                let name = self.ident()?;
                let f = FeatureRef { level, name };
                self.validate_feature(&f, at)?;
                Ok(Term::Feature(f))
            }
            other => Err(syntax_err(t.line, t.col, format!("expected an operand, found {other}"))),
        }
    }

    fn operand(&mut self) -> Result<Operand> {
        let base = self.term()?;
        let mut scale = Vec::new();
        loop {
            let op = if self.is_sym("/") {
                ArithOp::Div
            } else if self.is_sym("*") {
                ArithOp::Mul
            } else {
                break;
            };
            self.pos += 1;
            scale.push((op, self.constant_term()?));
        }
        Ok(Operand { base, scale })
    }

    fn feature_kind(&self, f: &FeatureRef) -> Option<FeatureKind> {
        (self.schema)(f.level, &f.name)
    }

    fn validate_feature(&self, f: &FeatureRef, at: (usize, usize)) -> Result<()> {
        if f.level == Level::Line && self.scope == Scope::Block && !self.in_any {
            return Err(syntax_err(at.0, at.1, "line features in block rules must appear inside `any first N lines`"));
        }
        if self.feature_kind(f).is_none() {
            return Err(syntax_err(
                at.0,
                at.1,
                format!("unknown feature `{}.{}`", f.level.prefix(), f.name),
            ));
        }
        Ok(())
    }

    fn check_numeric(&self, o: &Operand, at: (usize, usize)) -> Result<()> {
        if let Term::Feature(f) = &o.base {
            match self.feature_kind(f) {
                Some(FeatureKind::Numeric) => {}
                _ => {
                    return Err(syntax_err(
                        at.0,
                        at.1,
                        format!("feature `{}.{}` is not numeric", f.level.prefix(), f.name),
                    ))
                }
            }
        }
        Ok(())
    }
}

/// Parses a rule file. Unknown features, labels and thresholds are rejected
/// with the line and column where they appear.
pub fn parse_rules(text: &str, thresholds: &Thresholds) -> Result<Vec<Statement>> {
    parse_rules_with_schema(text, thresholds, &builtin_feature_kind)
}

/// Like [`parse_rules`] but validates feature names against `schema`.
pub fn parse_rules_with_schema(
    text: &str,
    thresholds: &Thresholds,
    schema: FeatureSchema<'_>,
) -> Result<Vec<Statement>> {
    lex(text)?
        .into_iter()
        .map(|toks| {
            let mut p = Parser { toks, pos: 0, thresholds, schema, scope: Scope::Block, in_any: false };
            p.statement()
        })
        .collect()
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Feature(r) => write!(f, "{}.{}", r.level.prefix(), r.name),
            Term::Number(n) => f.write_str(&fmt_num(*n)),
            Term::Param(p) => write!(f, "@{p}"),
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for (op, t) in &self.scale {
            let sym = match op {
                ArithOp::Mul => "*",
                ArithOp::Div => "/",
            };
            write!(f, " {sym} {t}")?;
        }
        Ok(())
    }
}

impl Expr {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: or, 1: and, 2: unary
        match self {
            Expr::Or(parts) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" or ")?;
                    }
                    p.fmt_prec(f, 1)?;
                }
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::And(parts) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    p.fmt_prec(f, 2)?;
                }
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Not(inner) => {
                f.write_str("not ")?;
                inner.fmt_prec(f, 2)
            }
            Expr::Compare { lhs, op, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            Expr::InRange { value, lo, hi } => write!(
                f,
                "{value} in {}{}, {}{}",
                if lo.inclusive { "[" } else { "(" },
                fmt_num(lo.value),
                fmt_num(hi.value),
                if hi.inclusive { "]" } else { ")" }
            ),
            Expr::Flag(r) => write!(f, "{}.{}", r.level.prefix(), r.name),
            Expr::CatEq { feature, value, negated } => write!(
                f,
                "{}.{} {} \"{value}\"",
                feature.level.prefix(),
                feature.name,
                if *negated { "!=" } else { "=" }
            ),
            Expr::Neighbor { which, label, negated } => {
                let w = match which {
                    Neighbor::Prev => "prev",
                    Neighbor::Next => "next",
                    Neighbor::Current => "self",
                };
                write!(f, "{w} is {}{}", if *negated { "not " } else { "" }, label.name())
            }
            Expr::AnyLine { count, expr } => {
                write!(f, "any first {count} lines (")?;
                expr.fmt_prec(f, 0)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Rule(r) => {
                write!(f, "rule {} {} -> {} :\n    {}", r.id, r.scope.as_str(), r.label.name(), r.when)
            }
            Statement::Override(r) => {
                write!(f, "override {} {} -> {} :\n    {}", r.id, r.scope.as_str(), r.label.name(), r.when)
            }
            Statement::Conflict(r) => {
                let group = |g: &[LogicalLabel]| g.iter().map(|l| l.name()).collect::<Vec<_>>().join("|");
                write!(
                    f,
                    "conflict {} {} {} vs {} -> {} :\n    {}",
                    r.id,
                    r.scope.as_str(),
                    group(&r.left),
                    group(&r.right),
                    r.winner.name(),
                    r.when
                )
            }
            Statement::Default(scope, label) => write!(f, "default {} -> {}", scope.as_str(), label.name()),
        }
    }
}
