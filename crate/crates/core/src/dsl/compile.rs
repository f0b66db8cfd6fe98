//! Lowering of syntax trees to p-expression DAGs.

use std::collections::HashMap;

use indexmap::IndexMap;

use super::ast::{Expr, ExprKind, Model, Stmt, UnOp};
use super::{parse_expr, Diagnostic, Span};
use crate::builtins;
use crate::graph::{NodeId, Pex};
use crate::value::Value;

#[derive(Debug, Clone)]
pub struct CompiledQuery {
    /// Query text as written.
    pub source: String,
    pub span: Span,
    pub root: Pex,
}

#[derive(Debug, Clone, Default)]
pub struct CompiledModel {
    /// Definitions in file order.
    pub names: IndexMap<String, Pex>,
    pub queries: Vec<CompiledQuery>,
    /// One fresh elementary node per pmf literal, in source order.
    pub literal_nodes: Vec<Pex>,
    labels: HashMap<NodeId, String>,
}

impl CompiledModel {
    pub fn get(&self, name: &str) -> Option<&Pex> {
        self.names.get(name)
    }

    /// First name bound to `id`, if any.
    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels.get(&id).map(String::as_str)
    }

    pub fn summary(&self) -> String {
        format!(
            "{} definitions, {} queries",
            self.names.len(),
            self.queries.len()
        )
    }
}

struct Compiler<'m> {
    model: &'m mut CompiledModel,
}

impl Compiler<'_> {
    fn node(&mut self, e: &Expr) -> Result<Pex, Diagnostic> {
        let err = |msg: String| Diagnostic::error(msg, e.span);
        Ok(match &e.kind {
            ExprKind::Pmf(entries) => {
                let n = Pex::elementary(entries.iter().cloned())
                    .map_err(|x| err(x.to_string()))?;
                self.model.literal_nodes.push(n.clone());
                n
            }
            ExprKind::Bern(p) => {
                let n = Pex::bernoulli(p.clone()).map_err(|x| err(x.to_string()))?;
                self.model.literal_nodes.push(n.clone());
                n
            }
            ExprKind::Ident(name) => self
                .model
                .names
                .get(name)
                .cloned()
                .ok_or_else(|| err(format!("`{name}` is used before its definition")))?,
            ExprKind::Const(v) => Pex::certain(v.clone()),
            ExprKind::Unary(op, x) => {
                let x = self.node(x)?;
                let name = match op {
                    UnOp::Neg => "neg",
                    UnOp::Not => "not",
                };
                Pex::apply(name, &[x])
            }
            ExprKind::Binary(op, a, b) => {
                let (a, b) = (self.node(a)?, self.node(b)?);
                Pex::apply(op.builtin(), &[a, b])
            }
            ExprKind::Given(t, ev) => {
                let (t, ev) = (self.node(t)?, self.node(ev)?);
                Pex::given(&t, &ev)
            }
            ExprKind::GivenAll(t, conds) => {
                let t = self.node(t)?;
                let conds = self.nodes(conds)?;
                Pex::multi_given(&t, &conds).map_err(|x| err(x.to_string()))?
            }
            ExprKind::Call(name, args) => {
                let args = self.nodes(args)?;
                match name.as_str() {
                    "apply" => Pex::multi_func(&args[0], &args[1..]).map_err(|x| err(x.to_string()))?,
                    "min" | "max" => {
                        let mut it = args.into_iter();
                        let first = it.next().ok_or_else(|| err(format!("`{name}` needs arguments")))?;
                        it.fold(first, |acc, x| Pex::apply(name, &[acc, x]))
                    }
                    _ => {
                        let f = builtins::get(name)
                            .ok_or_else(|| err(format!("unknown function `{name}`")))?;
                        Pex::func(&f, &args).map_err(|x| err(x.to_string()))?
                    }
                }
            }
            ExprKind::Table(sel, branches) => {
                let sel = self.node(sel)?;
                let mut out = Vec::with_capacity(branches.len());
                for (k, b) in branches {
                    out.push((k.clone(), self.node(b)?));
                }
                Pex::table(&sel, out).map_err(|x| err(x.to_string()))?
            }
            ExprKind::Mix(alts) => {
                let alts = self.nodes(alts)?;
                Pex::mixture(&alts).map_err(|x| err(x.to_string()))?
            }
            ExprKind::Tuple(items) => Pex::tuple_of(&self.nodes(items)?),
            ExprKind::Index(x, i) => {
                let (x, i) = (self.node(x)?, self.node(i)?);
                Pex::apply("extract", &[x, i])
            }
            ExprKind::In(x, set) => {
                let x = self.node(x)?;
                let members = Pex::certain(Value::tuple(set.iter().cloned()));
                Pex::apply("in_set", &[x, members])
            }
        })
    }

    fn nodes(&mut self, es: &[Expr]) -> Result<Vec<Pex>, Diagnostic> {
        es.iter().map(|e| self.node(e)).collect()
    }
}

/// Builds the DAG of every definition and query of `model`. `src` is the
/// text `model` was parsed from; it provides the query sources.
pub fn compile(model: &Model, src: &str) -> Result<CompiledModel, Diagnostic> {
    let mut out = CompiledModel::default();
    for stmt in &model.stmts {
        match stmt {
            Stmt::Let {
                name, name_span, expr, ..
            } => {
                if out.names.contains_key(name) {
                    return Err(Diagnostic::error(
                        format!("duplicate definition of `{name}`"),
                        *name_span,
                    ));
                }
                let node = Compiler { model: &mut out }.node(expr)?;
                out.labels.entry(node.id()).or_insert_with(|| name.clone());
                out.names.insert(name.clone(), node);
            }
            Stmt::Query { expr, span } => {
                let root = Compiler { model: &mut out }.node(expr)?;
                let source = match expr.span.text(src) {
                    "" => super::pretty::pretty_expr(expr),
                    text => text.to_string(),
                };
                out.queries.push(CompiledQuery {
                    source,
                    span: *span,
                    root,
                });
            }
        }
    }
    Ok(out)
}

/// Compiles `text` as an extra query in the scope of `model`.
pub fn compile_query(model: &mut CompiledModel, text: &str) -> Result<CompiledQuery, Diagnostic> {
    let expr = parse_expr(text, model.names.keys().cloned())?;
    let root = Compiler { model }.node(&expr)?;
    Ok(CompiledQuery {
        source: text.trim().to_string(),
        span: expr.span,
        root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::load;
    use crate::engine::marg;

    #[test]
    fn identifiers_share_literals_do_not() {
        let m = load("let d1 = {0: 1/2, 1: 1/2}\nquery d1 - d1\nquery {0:1/2,1:1/2} + {0:1/2,1:1/2}").unwrap();
        assert_eq!(marg(&m.queries[0].root).unwrap().to_string(), "{0: 1/1}");
        assert_eq!(
            marg(&m.queries[1].root).unwrap().to_string(),
            "{0: 1/4, 1: 1/2, 2: 1/4}"
        );
        assert_eq!(m.literal_nodes.len(), 3);
        assert_eq!(m.queries[1].source, "{0:1/2,1:1/2} + {0:1/2,1:1/2}");
    }

    #[test]
    fn labels_and_summary() {
        let m = load("let a = {1: 1}\nlet b = a\nlet c = a + b").unwrap();
        assert_eq!(m.summary(), "3 definitions, 0 queries");
        assert_eq!(m.label(m.get("b").unwrap().id()), Some("a"));
        assert_eq!(m.label(m.get("c").unwrap().id()), Some("c"));
    }

    #[test]
    fn sugar_lowers_to_builtins() {
        let m = load(
            "let x = {1: 1/3, 2: 1/3, 3: 1/3}\n\
             query x in {1, 3}\nquery <x, x>[2]\nquery max(x, 2, 1)\nquery bern(1/4)\n\
             query apply({@add: 1/2, @sub: 1/2}, 5, 3)",
        )
        .unwrap();
        let pmfs: Vec<String> = m.queries.iter().map(|q| marg(&q.root).unwrap().to_string()).collect();
        assert_eq!(pmfs[0], "{true: 2/3, false: 1/3}");
        assert_eq!(pmfs[1], "{1: 1/3, 2: 1/3, 3: 1/3}");
        assert_eq!(pmfs[2], "{2: 2/3, 3: 1/3}");
        assert_eq!(pmfs[3], "{true: 1/4, false: 3/4}");
        assert_eq!(pmfs[4], "{8: 1/2, 2: 1/2}");
    }

    #[test]
    fn extra_query_in_scope() {
        let mut m = load("let r = bern(0.2)\nlet g = r or bern(1/2)").unwrap();
        let q = compile_query(&mut m, " r given g ").unwrap();
        assert_eq!(q.source, "r given g");
        assert_eq!(marg(&q.root).unwrap().p_true(), crate::Prob::new(1.into(), 3.into()));
        assert!(compile_query(&mut m, "unknown").is_err());
    }

    #[test]
    fn invalid_pmf_is_a_diagnostic() {
        let e = load("let z = {1: 0}").unwrap_err();
        assert!(e.message.contains("invalid pmf"));
    }
}
