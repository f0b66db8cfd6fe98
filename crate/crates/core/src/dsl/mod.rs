//! The `.prob` modeling language.
//!
//! ```text
//! % two dice
//! let d1 = {1: 1/6, 2: 1/6, 3: 1/6, 4: 1/6, 5: 1/6, 6: 1/6}
//! let d2 = {1: 1/6, 2: 1/6, 3: 1/6, 4: 1/6, 5: 1/6, 6: 1/6}
//! let d = d1 + d2
//! query d1 given d <= 3
//! ```
//!
//! Every pmf literal is a fresh independent variable; every use of a name
//! refers to the node bound by its `let`.

pub mod ast;
mod compile;
pub mod lexer;
mod parser;
mod pretty;
pub mod run;

use std::fmt;

pub use compile::{compile, compile_query, CompiledModel, CompiledQuery};
pub use parser::{parse, parse_expr};
pub use pretty::{pretty, pretty_expr};
pub use run::{render_pmf, render_result, render_text, run_list, run_queries, QueryOutcome, RunOptions};

/// Byte range plus the line and column (1-based) of its start.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            end: other.end.max(self.end),
            ..self
        }
    }

    pub fn text(self, src: &str) -> &str {
        src.get(self.start..self.end).unwrap_or("")
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }

    /// `file:line:col: error: message`.
    pub fn render(&self, file: &str) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        format!("{file}:{}: {sev}: {}", self.span, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// Parses and compiles `src` in one go.
pub fn load(src: &str) -> Result<CompiledModel, Diagnostic> {
    compile(&parse(src)?, src)
}
