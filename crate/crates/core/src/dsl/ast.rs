//! Syntax tree of a model file.

use num_rational::BigRational;

use super::Span;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Let { name: String, name_span: Span, expr: Expr, span: Span },
    Query { expr: Expr, span: Span },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    /// Name of the builtin implementing the operator.
    pub fn builtin(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "eq",
            BinOp::Ne => "ne",
            BinOp::Lt => "lt",
            BinOp::Le => "le",
            BinOp::Gt => "gt",
            BinOp::Ge => "ge",
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => PREC_OR,
            BinOp::And => PREC_AND,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => PREC_CMP,
            BinOp::Add | BinOp::Sub => PREC_ADD,
            BinOp::Mul | BinOp::Div => PREC_MUL,
        }
    }
}

pub const PREC_GIVEN: u8 = 1;
pub const PREC_OR: u8 = 2;
pub const PREC_AND: u8 = 3;
pub const PREC_NOT: u8 = 4;
pub const PREC_CMP: u8 = 5;
pub const PREC_ADD: u8 = 6;
pub const PREC_MUL: u8 = 7;
pub const PREC_NEG: u8 = 8;
pub const PREC_POSTFIX: u8 = 9;
pub const PREC_ATOM: u8 = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    /// `{value: weight, …}`, one fresh elementary variable.
    Pmf(Vec<(Value, BigRational)>),
    /// `bern(p)`, shorthand for `{true: p, false: 1 - p}`.
    Bern(BigRational),
    Ident(String),
    /// Number, boolean, quoted symbol or `@function`.
    Const(Value),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Given(Box<Expr>, Box<Expr>),
    /// `x given [c1, …]`.
    GivenAll(Box<Expr>, Vec<Expr>),
    Call(String, Vec<Expr>),
    Table(Box<Expr>, Vec<(Value, Expr)>),
    Mix(Vec<Expr>),
    Tuple(Vec<Expr>),
    /// `e[i]`, 1-based.
    Index(Box<Expr>, Box<Expr>),
    /// `e in {v, …}`.
    In(Box<Expr>, Vec<Value>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Given(..) | ExprKind::GivenAll(..) => PREC_GIVEN,
            ExprKind::Binary(op, ..) => op.precedence(),
            ExprKind::Unary(UnOp::Not, _) => PREC_NOT,
            ExprKind::Unary(UnOp::Neg, _) => PREC_NEG,
            ExprKind::In(..) => PREC_CMP,
            ExprKind::Index(..) => PREC_POSTFIX,
            _ => PREC_ATOM,
        }
    }

    fn strip(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Pmf(_) | ExprKind::Bern(_) | ExprKind::Ident(_) | ExprKind::Const(_) => {}
            ExprKind::Unary(_, e) | ExprKind::In(e, _) => e.strip(),
            ExprKind::Binary(_, a, b) | ExprKind::Given(a, b) | ExprKind::Index(a, b) => {
                a.strip();
                b.strip();
            }
            ExprKind::GivenAll(e, es) => {
                e.strip();
                es.iter_mut().for_each(Expr::strip);
            }
            ExprKind::Call(_, es) | ExprKind::Mix(es) | ExprKind::Tuple(es) => {
                es.iter_mut().for_each(Expr::strip)
            }
            ExprKind::Table(e, branches) => {
                e.strip();
                branches.iter_mut().for_each(|(_, b)| b.strip());
            }
        }
    }

    /// Copy with every span zeroed.
    pub fn without_spans(&self) -> Expr {
        let mut e = self.clone();
        e.strip();
        e
    }
}

impl Model {
    /// Copy with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> Model {
        Model {
            stmts: self
                .stmts
                .iter()
                .map(|s| match s {
                    Stmt::Let { name, expr, .. } => Stmt::Let {
                        name: name.clone(),
                        name_span: Span::default(),
                        expr: expr.without_spans(),
                        span: Span::default(),
                    },
                    Stmt::Query { expr, .. } => Stmt::Query {
                        expr: expr.without_spans(),
                        span: Span::default(),
                    },
                })
                .collect(),
        }
    }
}
