//! Machine-readable results. Field names and nesting are stable; entries
//! keep pmf order.

use serde::Serialize;
use statues::dsl::QueryOutcome;
use statues::{format_prob, ProbFormat, Probability};

#[derive(Serialize)]
struct Output<'a> {
    queries: Vec<Query<'a>>,
}

#[derive(Serialize)]
struct Query<'a> {
    source: &'a str,
    pmf: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Entry {
    value: String,
    prob_fraction: String,
    prob_float: f64,
}

pub fn render(outcomes: &[QueryOutcome]) -> String {
    let queries = outcomes
        .iter()
        .map(|o| match &o.result {
            Ok(pmf) => Query {
                source: &o.query.source,
                pmf: pmf
                    .iter()
                    .map(|(v, p)| Entry {
                        value: v.to_string(),
                        prob_fraction: format_prob(p, ProbFormat::Fraction),
                        prob_float: p.to_f64(),
                    })
                    .collect(),
                error: None,
            },
            Err(e) => Query {
                source: &o.query.source,
                pmf: Vec::new(),
                error: Some(e.to_string()),
            },
        })
        .collect();
    serde_json::to_string_pretty(&Output { queries }).expect("plain data serializes")
}
