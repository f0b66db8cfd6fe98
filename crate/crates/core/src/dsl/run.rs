//! Evaluation of compiled queries and plain-text rendering of results.

use crate::engine::{Enumerator, Options};
use crate::error::Error;
use crate::oracle::oracle_marg;
use crate::pmf::{format_prob, Pmf, ProbFormat};
use crate::Prob;

use super::{CompiledModel, CompiledQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub engine: Options,
    /// Also compute every query by possible-worlds enumeration.
    pub oracle: bool,
}

#[derive(Debug, Clone)]
pub struct QueryOutcome {
    pub query: CompiledQuery,
    pub result: Result<Pmf<Prob>, Error>,
    pub oracle: Option<Result<Pmf<Prob>, Error>>,
}

impl QueryOutcome {
    /// Whether the oracle ran and disagrees. Both failing with the same kind
    /// of error counts as agreement; a capped oracle counts as no verdict.
    pub fn oracle_mismatch(&self) -> bool {
        match (&self.result, &self.oracle) {
            (_, None) | (_, Some(Err(Error::CapExceeded { .. }))) => false,
            (Ok(a), Some(Ok(b))) => !a.same_mapping(b),
            (Err(a), Some(Err(b))) => a.kind() != b.kind(),
            _ => true,
        }
    }
}

fn run_one(query: &CompiledQuery, opts: RunOptions) -> QueryOutcome {
    let result = Enumerator::<Prob>::new(opts.engine).marg(&query.root);
    let oracle = opts.oracle.then(|| oracle_marg(&query.root));
    QueryOutcome {
        query: query.clone(),
        result,
        oracle,
    }
}

/// Runs `queries` in order. Each query owns its enumeration state, so they
/// run on separate threads; results keep the input order.
pub fn run_list(queries: &[CompiledQuery], opts: RunOptions) -> Vec<QueryOutcome> {
    let width = std::thread::available_parallelism().map_or(1, |n| n.get());
    if queries.len() <= 1 || width == 1 {
        return queries.iter().map(|q| run_one(q, opts)).collect();
    }
    let mut out = Vec::with_capacity(queries.len());
    for chunk in queries.chunks(width) {
        std::thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|q| s.spawn(move || run_one(q, opts))).collect();
            out.extend(handles.into_iter().map(|h| h.join().expect("query thread panicked")));
        });
    }
    out
}

/// Runs every query of `model` in file order.
pub fn run_queries(model: &CompiledModel, opts: RunOptions) -> Vec<QueryOutcome> {
    run_list(&model.queries, opts)
}

/// `P(true)` for boolean distributions, the whole pmf otherwise.
pub fn render_result(pmf: &Pmf<Prob>, fmt: ProbFormat) -> String {
    if pmf.is_boolean() {
        return format_prob(&pmf.p_true(), fmt);
    }
    render_pmf(pmf, fmt)
}

/// `{v: p, …}` in pmf order.
pub fn render_pmf(pmf: &Pmf<Prob>, fmt: ProbFormat) -> String {
    let items: Vec<String> = pmf
        .iter()
        .map(|(v, p)| format!("{v}: {}", format_prob(p, fmt)))
        .collect();
    format!("{{{}}}", items.join(", "))
}

/// Text for stdout and text for stderr. With several queries each result is
/// preceded by a `% source` line.
pub fn render_text(outcomes: &[QueryOutcome], fmt: ProbFormat) -> (String, String) {
    let mut out = String::new();
    let mut err = String::new();
    let headed = outcomes.len() > 1;
    for o in outcomes {
        match &o.result {
            Ok(pmf) => {
                if headed {
                    out.push_str(&format!("% {}\n", o.query.source));
                }
                out.push_str(&render_result(pmf, fmt));
                out.push('\n');
            }
            Err(e) => err.push_str(&format!(
                "error: query `{}` at {}: {e}\n",
                o.query.source, o.query.span
            )),
        }
        if o.oracle_mismatch() {
            let shown = |r: &Option<Result<Pmf<Prob>, Error>>| match r {
                Some(Ok(p)) => render_pmf(p, ProbFormat::Fraction),
                Some(Err(e)) => e.to_string(),
                None => String::new(),
            };
            err.push_str(&format!(
                "oracle mismatch: query `{}`: engine {}, oracle {}\n",
                o.query.source,
                match &o.result {
                    Ok(p) => render_pmf(p, ProbFormat::Fraction),
                    Err(e) => e.to_string(),
                },
                shown(&o.oracle)
            ));
        }
    }
    (out, err)
}
