//! Recursive-descent parser.
//!
//! Precedence, loosest first: `given`, `or`, `and`, `not`, comparisons and
//! `in`, `+ -`, `* /`, unary `-`, postfix `[i]`. Comparisons do not chain.
//! Inside a tuple literal `<…>` a bare `>` closes the tuple; parenthesize
//! to compare.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::One;

use super::ast::{BinOp, Expr, ExprKind, Model, Stmt, UnOp};
use super::lexer::{self, tokenize, Tok, Token, KEYWORDS};
use super::{Diagnostic, Span};
use crate::builtins;
use crate::value::Value;

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    defined: HashSet<String>,
    /// Top is true inside a tuple literal, where `>` closes.
    gt_closes: Vec<bool>,
}

/// Minimum and maximum argument counts of a callable name.
fn call_arity(name: &str) -> Option<(usize, Option<usize>)> {
    match name {
        "min" | "max" => Some((2, None)),
        "apply" => Some((2, None)),
        _ => builtins::get(name).map(|f| (f.arity(), Some(f.arity()))),
    }
}

impl Parser {
    fn new(src: &str, defined: HashSet<String>) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            defined,
            gt_closes: vec![false],
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(
            format!("expected {what}, found {}", self.peek().describe()),
            self.span(),
        )
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<Span> {
        if self.peek() == &t {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn with_gt<T>(&mut self, closes: bool, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.gt_closes.push(closes);
        let r = f(self);
        self.gt_closes.pop();
        r
    }

    fn gt_is_closer(&self) -> bool {
        *self.gt_closes.last().unwrap_or(&false)
    }

    fn model(&mut self) -> PResult<Model> {
        let mut stmts = Vec::new();
        while self.peek() != &Tok::Eof {
            stmts.push(self.stmt()?);
        }
        Ok(Model { stmts })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.span();
        if self.eat_kw("let") {
            let name_span = self.span();
            let name = match self.peek().clone() {
                Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => {
                    return Err(Diagnostic::error(
                        format!("`{s}` is a reserved word and cannot be defined"),
                        name_span,
                    ))
                }
                Tok::Ident(s) => {
                    self.advance();
                    s
                }
                _ => return Err(self.unexpected("a name after `let`")),
            };
            if self.defined.contains(&name) {
                return Err(Diagnostic::error(
                    format!("duplicate definition of `{name}`"),
                    name_span,
                ));
            }
            self.expect(Tok::Eq, "`=`")?;
            let expr = self.expr()?;
            self.defined.insert(name.clone());
            let span = start.to(expr.span);
            Ok(Stmt::Let {
                name,
                name_span,
                expr,
                span,
            })
        } else if self.eat_kw("query") {
            let expr = self.expr()?;
            let span = start.to(expr.span);
            Ok(Stmt::Query { expr, span })
        } else {
            Err(self.unexpected("`let` or `query`"))
        }
    }

    pub(super) fn expr(&mut self) -> PResult<Expr> {
        let target = self.or_expr()?;
        if !self.eat_kw("given") {
            return Ok(target);
        }
        if self.peek() == &Tok::LBracket {
            let open = self.advance().span;
            let conds = self.with_gt(false, |p| p.list(Tok::RBracket, Parser::expr))?;
            let close = self.expect(Tok::RBracket, "`,` or `]`")?;
            if conds.is_empty() {
                return Err(Diagnostic::error("empty condition list", open.to(close)));
            }
            let span = target.span.to(close);
            return Ok(Expr::new(ExprKind::GivenAll(Box::new(target), conds), span));
        }
        let evidence = self.or_expr()?;
        if self.at_kw("given") {
            return Err(Diagnostic::error(
                "`given` does not chain; combine conditions with `and`",
                self.span(),
            ));
        }
        let span = target.span.to(evidence.span);
        Ok(Expr::new(
            ExprKind::Given(Box::new(target), Box::new(evidence)),
            span,
        ))
    }

    /// Comma-separated items up to (not including) `close`; a trailing comma
    /// is allowed.
    fn list<T>(&mut self, close: Tok, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        while self.peek() != &close {
            out.push(item(self)?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(out)
    }

    fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        let span = a.span.to(b.span);
        Expr::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), span)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut e = self.and_expr()?;
        while self.eat_kw("or") {
            let r = self.and_expr()?;
            e = Self::binary(BinOp::Or, e, r);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut e = self.not_expr()?;
        while self.eat_kw("and") {
            let r = self.not_expr()?;
            e = Self::binary(BinOp::And, e, r);
        }
        Ok(e)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        if self.eat_kw("not") {
            let e = self.not_expr()?;
            let span = start.to(e.span);
            return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(e)), span));
        }
        self.cmp_expr()
    }

    fn cmp_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt if !self.gt_is_closer() => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return None,
        })
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let e = self.add_expr()?;
        let e = if let Some(op) = self.cmp_op() {
            self.advance();
            let r = self.add_expr()?;
            Self::binary(op, e, r)
        } else if self.eat_kw("in") {
            self.expect(Tok::LBrace, "`{` after `in`")?;
            let set = self.with_gt(false, |p| p.list(Tok::RBrace, Parser::value))?;
            let close = self.expect(Tok::RBrace, "`,` or `}`")?;
            let span = e.span.to(close);
            Expr::new(ExprKind::In(Box::new(e), set), span)
        } else {
            return Ok(e);
        };
        if self.cmp_op().is_some() || self.at_kw("in") {
            return Err(Diagnostic::error(
                "comparisons do not chain; use `and`",
                self.span(),
            ));
        }
        Ok(e)
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut e = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(e),
            };
            self.advance();
            let r = self.mul_expr()?;
            e = Self::binary(op, e, r);
        }
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(e),
            };
            self.advance();
            let r = self.unary()?;
            e = Self::binary(op, e, r);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.span();
        if self.eat(&Tok::Minus) {
            let e = self.unary()?;
            let span = start.to(e.span);
            return Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(e)), span));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.peek() == &Tok::LBracket {
            self.advance();
            let idx = self.with_gt(false, Parser::expr)?;
            let close = self.expect(Tok::RBracket, "`]`")?;
            let span = e.span.to(close);
            e = Expr::new(ExprKind::Index(Box::new(e), Box::new(idx)), span);
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Number(n) => {
                self.advance();
                Ok(Expr::new(ExprKind::Const(Value::Num(n)), start))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Expr::new(ExprKind::Const(Value::sym(&s)), start))
            }
            Tok::FnRef(name) => {
                self.advance();
                let f = builtins::get(&name).ok_or_else(|| {
                    Diagnostic::error(format!("unknown function `{name}`"), start)
                })?;
                Ok(Expr::new(ExprKind::Const(Value::Func(f)), start))
            }
            Tok::LBrace => self.pmf_literal(),
            Tok::LParen => {
                self.advance();
                let mut e = self.with_gt(false, Parser::expr)?;
                let close = self.expect(Tok::RParen, "`)`")?;
                // The span covers the parentheses so query sources read back whole.
                e.span = start.to(close);
                Ok(e)
            }
            Tok::Lt => {
                self.advance();
                let items = self.with_gt(true, |p| p.list(Tok::Gt, Parser::expr))?;
                let close = self.expect(Tok::Gt, "`,` or `>`")?;
                Ok(Expr::new(ExprKind::Tuple(items), start.to(close)))
            }
            Tok::Ident(word) => match word.as_str() {
                "true" | "false" => {
                    self.advance();
                    Ok(Expr::new(ExprKind::Const(Value::Bool(word == "true")), start))
                }
                "table" => self.table(),
                "mix" => self.mix(),
                w if KEYWORDS.contains(&w) => Err(self.unexpected("an expression")),
                _ if self.peek_at(1) == &Tok::LParen => self.call(word),
                _ => {
                    self.advance();
                    if !self.defined.contains(&word) {
                        return Err(Diagnostic::error(
                            format!("`{word}` is used before its definition"),
                            start,
                        ));
                    }
                    Ok(Expr::new(ExprKind::Ident(word), start))
                }
            },
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn call(&mut self, name: String) -> PResult<Expr> {
        let start = self.advance().span;
        self.expect(Tok::LParen, "`(`")?;
        if name == "bern" {
            let p = self.weight()?;
            let close = self.expect(Tok::RParen, "`)`")?;
            if p > BigRational::one() {
                return Err(Diagnostic::error(
                    "bern probability must lie between 0 and 1",
                    start.to(close),
                ));
            }
            return Ok(Expr::new(ExprKind::Bern(p), start.to(close)));
        }
        let args = self.with_gt(false, |p| p.list(Tok::RParen, Parser::expr))?;
        let close = self.expect(Tok::RParen, "`,` or `)`")?;
        let span = start.to(close);
        let (lo, hi) = call_arity(&name)
            .ok_or_else(|| Diagnostic::error(format!("unknown function `{name}`"), start))?;
        if args.len() < lo || hi.is_some_and(|hi| args.len() > hi) {
            let expected = match hi {
                Some(hi) if hi == lo => format!("{lo}"),
                _ => format!("at least {lo}"),
            };
            return Err(Diagnostic::error(
                format!("`{name}` takes {expected} argument(s), got {}", args.len()),
                span,
            ));
        }
        Ok(Expr::new(ExprKind::Call(name, args), span))
    }

    fn table(&mut self) -> PResult<Expr> {
        let start = self.advance().span;
        self.expect(Tok::LParen, "`(` after `table`")?;
        let selector = self.with_gt(false, Parser::expr)?;
        self.expect(Tok::RParen, "`)`")?;
        let open = self.expect(Tok::LBrace, "`{`")?;
        let branches = self.with_gt(false, |p| {
            p.list(Tok::RBrace, |p| {
                let key_span = p.span();
                let key = p.value()?;
                p.expect(Tok::Colon, "`:`")?;
                let e = p.expr()?;
                Ok((key, key_span, e))
            })
        })?;
        let close = self.expect(Tok::RBrace, "`,` or `}`")?;
        if branches.is_empty() {
            return Err(Diagnostic::error("table needs at least one branch", open.to(close)));
        }
        let mut seen = HashSet::new();
        for (k, span, _) in &branches {
            if !seen.insert(k.clone()) {
                return Err(Diagnostic::error(format!("duplicate table key {k}"), *span));
            }
        }
        Ok(Expr::new(
            ExprKind::Table(
                Box::new(selector),
                branches.into_iter().map(|(k, _, e)| (k, e)).collect(),
            ),
            start.to(close),
        ))
    }

    fn mix(&mut self) -> PResult<Expr> {
        let start = self.advance().span;
        let open = self.expect(Tok::LBrace, "`{` after `mix`")?;
        let alts = self.with_gt(false, |p| p.list(Tok::RBrace, Parser::expr))?;
        let close = self.expect(Tok::RBrace, "`,` or `}`")?;
        if alts.is_empty() {
            return Err(Diagnostic::error("mix needs at least one alternative", open.to(close)));
        }
        Ok(Expr::new(ExprKind::Mix(alts), start.to(close)))
    }

    fn pmf_literal(&mut self) -> PResult<Expr> {
        let open = self.advance().span;
        let entries = self.with_gt(false, |p| {
            p.list(Tok::RBrace, |p| {
                let v = p.value()?;
                p.expect(Tok::Colon, "`:`")?;
                let w = p.weight()?;
                Ok((v, w))
            })
        })?;
        let close = self.expect(Tok::RBrace, "`,` or `}`")?;
        if entries.is_empty() {
            return Err(Diagnostic::error("empty pmf literal", open.to(close)));
        }
        Ok(Expr::new(ExprKind::Pmf(entries), open.to(close)))
    }

    /// `NUMBER` or `NUMBER / NUMBER`.
    fn weight(&mut self) -> PResult<BigRational> {
        let start = self.span();
        let Tok::Number(n) = self.peek().clone() else {
            return Err(self.unexpected("a probability weight"));
        };
        self.advance();
        if self.eat(&Tok::Slash) {
            let Tok::Number(d) = self.peek().clone() else {
                return Err(self.unexpected("a denominator"));
            };
            self.advance();
            return lexer::divide(&n, &d)
                .ok_or_else(|| Diagnostic::error("zero denominator", start.to(self.prev_span())));
        }
        Ok(n)
    }

    /// A literal domain value.
    fn value(&mut self) -> PResult<Value> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Minus => {
                self.advance();
                if !matches!(self.peek(), Tok::Number(_)) {
                    return Err(self.unexpected("a number after `-`"));
                }
                let n = self.weight()?;
                Ok(Value::Num(-n))
            }
            Tok::Number(_) => Ok(Value::Num(self.weight()?)),
            Tok::Str(s) => {
                self.advance();
                Ok(Value::sym(&s))
            }
            Tok::FnRef(name) => {
                self.advance();
                builtins::get(&name)
                    .map(Value::Func)
                    .ok_or_else(|| Diagnostic::error(format!("unknown function `{name}`"), start))
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.advance();
                Ok(Value::Bool(w == "true"))
            }
            Tok::Ident(w) if KEYWORDS.contains(&w.as_str()) => Err(Diagnostic::error(
                format!("`{w}` is a reserved word; quote it to use it as a symbol"),
                start,
            )),
            Tok::Ident(w) => {
                self.advance();
                Ok(Value::sym(&w))
            }
            Tok::Lt => {
                self.advance();
                let items = self.with_gt(true, |p| p.list(Tok::Gt, Parser::value))?;
                self.expect(Tok::Gt, "`,` or `>`")?;
                Ok(Value::tuple(items))
            }
            _ => Err(self.unexpected("a value")),
        }
    }
}

/// Parses a whole model.
pub fn parse(src: &str) -> PResult<Model> {
    Parser::new(src, HashSet::new())?.model()
}

/// Parses one expression in a scope where `defined` names exist.
pub fn parse_expr<I, S>(src: &str, defined: I) -> PResult<Expr>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut p = Parser::new(src, defined.into_iter().map(Into::into).collect())?;
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.unexpected("end of query"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn kinds(src: &str) -> Vec<ExprKind> {
        parse(src)
            .unwrap()
            .without_spans()
            .stmts
            .into_iter()
            .map(|s| match s {
                Stmt::Let { expr, .. } | Stmt::Query { expr, .. } => expr.kind,
            })
            .collect()
    }

    #[test]
    fn coin_literal() {
        let k = kinds("let f = {tail: 1/2, head: 1/2}");
        assert_eq!(
            k[0],
            ExprKind::Pmf(vec![(Value::sym("tail"), q(1, 2)), (Value::sym("head"), q(1, 2))])
        );
    }

    #[test]
    fn sprinkler_table() {
        let src = "let r = bern(0.20)\n\
                   let s = table(r) { true: {true:0.01,false:0.99}, false: {true:0.40,false:0.60} }";
        let k = kinds(src);
        assert_eq!(k[0], ExprKind::Bern(q(1, 5)));
        let ExprKind::Table(sel, branches) = &k[1] else {
            panic!("expected a table")
        };
        assert_eq!(sel.kind, ExprKind::Ident("r".into()));
        assert_eq!(branches.len(), 2);
        assert_eq!(branches[0].0, Value::Bool(true));
    }

    #[test]
    fn given_binds_loosest() {
        let src = "let d1 = {1: 1/2, 2: 1/2}\nlet d = d1 + d1\nquery d1 given (d <= 3)";
        let k = kinds(src);
        let ExprKind::Given(t, e) = &k[2] else {
            panic!("expected given")
        };
        assert_eq!(t.kind, ExprKind::Ident("d1".into()));
        assert!(matches!(e.kind, ExprKind::Binary(BinOp::Le, ..)));
        let k2 = kinds("let a = bern(1/2)\nquery a given not a or a and a");
        let ExprKind::Given(_, e) = &k2[1] else {
            panic!()
        };
        assert!(matches!(e.kind, ExprKind::Binary(BinOp::Or, ..)));
    }

    #[test]
    fn arithmetic_precedence() {
        let k = kinds("let x = {1: 1}\nquery -x * 2 + x[1] == 3");
        let ExprKind::Binary(BinOp::Eq, l, _) = &k[1] else {
            panic!()
        };
        let ExprKind::Binary(BinOp::Add, m, r) = &l.kind else {
            panic!()
        };
        assert!(matches!(m.kind, ExprKind::Binary(BinOp::Mul, ..)));
        assert!(matches!(r.kind, ExprKind::Index(..)));
    }

    #[test]
    fn tuples_membership_and_lists() {
        let k = kinds("let a = {1: 1}\nquery <a, (a > 1), <>> given [a in {1, 2}, a != 3]");
        let ExprKind::GivenAll(t, conds) = &k[1] else {
            panic!()
        };
        let ExprKind::Tuple(items) = &t.kind else {
            panic!()
        };
        assert_eq!(items.len(), 3);
        assert_eq!(items[2].kind, ExprKind::Tuple(vec![]));
        assert_eq!(conds.len(), 2);
        assert!(matches!(conds[0].kind, ExprKind::In(..)));
    }

    #[test]
    fn values_cover_all_literal_forms() {
        let k = kinds(r#"let v = {-1/4: 1, "two words": 1, <1, x>: 1, @max: 1}"#);
        let ExprKind::Pmf(entries) = &k[0] else {
            panic!()
        };
        assert_eq!(entries[0].0, Value::ratio(-1, 4));
        assert_eq!(entries[1].0, Value::sym("two words"));
        assert_eq!(entries[2].0, Value::tuple([Value::int(1), Value::sym("x")]));
        assert_eq!(entries[3].0, Value::Func(builtins::builtin("max")));
    }

    #[test]
    fn diagnostics_carry_spans() {
        let e = parse("let x = x + 1").unwrap_err();
        assert!(e.message.contains("before its definition"), "{e}");
        assert_eq!((e.span.line, e.span.col), (1, 9));
        let e = parse("let r = {1: 1}\nlet r = {2: 1}").unwrap_err();
        assert!(e.message.contains("duplicate"));
        assert_eq!(e.span.line, 2);
        assert!(parse("query 1 < 2 < 3").is_err());
        assert!(parse("query {}").is_err());
        assert!(parse("query nope(1)").is_err());
        assert!(parse("query max(1)").is_err());
        assert!(parse("query 1 given []").is_err());
        assert!(parse("let given = 1").is_err());
        assert!(parse("query {1: 1/0}").is_err());
        assert!(parse("query bern(3/2)").is_err());
    }

    #[test]
    fn standalone_expression_in_scope() {
        let e = parse_expr("rain given grass_wet", ["rain", "grass_wet"]).unwrap();
        assert!(matches!(e.kind, ExprKind::Given(..)));
        assert!(parse_expr("rain", Vec::<String>::new()).is_err());
        assert!(parse_expr("1 2", Vec::<String>::new()).is_err());
    }

    #[test]
    fn empty_model() {
        assert_eq!(parse("% nothing here\n").unwrap().stmts.len(), 0);
    }
}
