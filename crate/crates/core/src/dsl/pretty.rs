//! Source text from a syntax tree. Reparsing the output gives back the same
//! tree up to spans.

use super::ast::{Expr, ExprKind, Model, Stmt, UnOp, PREC_ADD, PREC_CMP, PREC_NEG, PREC_NOT, PREC_OR, PREC_POSTFIX};
use crate::value::{format_number, terminating_decimal, Value};

pub fn pretty(model: &Model) -> String {
    let mut out = String::new();
    for stmt in &model.stmts {
        match stmt {
            Stmt::Let { name, expr, .. } => {
                out.push_str("let ");
                out.push_str(name);
                out.push_str(" = ");
                out.push_str(&pretty_expr(expr));
            }
            Stmt::Query { expr, .. } => {
                out.push_str("query ");
                out.push_str(&pretty_expr(expr));
            }
        }
        out.push('\n');
    }
    out
}

pub fn pretty_expr(e: &Expr) -> String {
    let mut out = String::new();
    write(e, 0, &mut out);
    out
}

fn write(e: &Expr, min_prec: u8, out: &mut String) {
    if e.precedence() < min_prec {
        out.push('(');
        write(e, 0, out);
        out.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Pmf(entries) => {
            out.push('{');
            for (i, (v, w)) in entries.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("{v}: {}", format_number(w)));
            }
            out.push('}');
        }
        ExprKind::Bern(p) => out.push_str(&format!("bern({})", format_number(p))),
        ExprKind::Ident(name) => out.push_str(name),
        ExprKind::Const(v) => out.push_str(&constant(v)),
        ExprKind::Unary(UnOp::Neg, x) => {
            out.push('-');
            write(x, PREC_NEG, out);
        }
        ExprKind::Unary(UnOp::Not, x) => {
            out.push_str("not ");
            write(x, PREC_NOT, out);
        }
        ExprKind::Binary(op, a, b) => {
            let (l, r) = match op.precedence() {
                PREC_CMP => (PREC_ADD, PREC_ADD),
                p => (p, p + 1),
            };
            write(a, l, out);
            out.push_str(&format!(" {} ", op.symbol()));
            write(b, r, out);
        }
        ExprKind::Given(t, ev) => {
            write(t, PREC_OR, out);
            out.push_str(" given ");
            write(ev, PREC_OR, out);
        }
        ExprKind::GivenAll(t, conds) => {
            write(t, PREC_OR, out);
            out.push_str(" given [");
            list(conds, 0, out);
            out.push(']');
        }
        ExprKind::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            list(args, 0, out);
            out.push(')');
        }
        ExprKind::Table(sel, branches) => {
            out.push_str("table(");
            write(sel, 0, out);
            out.push_str(") {");
            for (i, (k, b)) in branches.iter().enumerate() {
                out.push_str(if i > 0 { ", " } else { " " });
                out.push_str(&format!("{k}: "));
                write(b, 0, out);
            }
            out.push_str(" }");
        }
        ExprKind::Mix(alts) => {
            out.push_str("mix { ");
            list(alts, 0, out);
            out.push_str(" }");
        }
        ExprKind::Tuple(items) => {
            out.push('<');
            // A bare `>` would close the tuple.
            list(items, PREC_CMP + 1, out);
            out.push('>');
        }
        ExprKind::Index(x, i) => {
            write(x, PREC_POSTFIX, out);
            out.push('[');
            write(i, 0, out);
            out.push(']');
        }
        ExprKind::In(x, set) => {
            write(x, PREC_ADD, out);
            out.push_str(" in {");
            let items: Vec<String> = set.iter().map(Value::to_string).collect();
            out.push_str(&items.join(", "));
            out.push('}');
        }
    }
}

fn list(items: &[Expr], min_prec: u8, out: &mut String) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write(item, min_prec, out);
    }
}

/// Constants in expression position. Symbols are always quoted there, since
/// a bare word is an identifier.
fn constant(v: &Value) -> String {
    match v {
        Value::Sym(s) => format!("{:?}", &**s),
        Value::Num(n) if n.is_integer() => format_number(n),
        Value::Num(n) => terminating_decimal(n).unwrap_or_else(|| format_number(n)),
        other => other.to_string(),
    }
}
