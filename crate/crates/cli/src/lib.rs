//! The `statues` command: runs, checks and traces `.prob` model files.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use statues::dsl::{self, render_text, CompiledModel, CompiledQuery, QueryOutcome, RunOptions};
use statues::{Options, ProbFormat};

mod json;
mod table;

pub use table::{trace_table, TraceTable};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A query failed to evaluate.
    pub const EVAL: i32 = 1;
    /// The model did not parse or compile, or could not be read.
    pub const SYNTAX: i32 = 2;
    /// The engine and the oracle disagree.
    pub const MISMATCH: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "statues", version, about = "Exact inference on discrete probabilistic models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every query of a model.
    Run(RunArgs),
    /// Parse and compile a model without evaluating it.
    Check(ModelArg),
    /// Show the enumeration steps of a single query.
    Trace(RunArgs),
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// Model file, or `-` for standard input.
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Evaluate this expression instead of the file's queries.
    #[arg(long, short)]
    pub query: Option<String>,
    #[arg(long, short, value_enum, default_value_t = Format::Fraction)]
    pub format: Format,
    /// Digits after the decimal point in float output.
    #[arg(long, default_value_t = 17, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
    /// Cross-check every result by possible-worlds enumeration.
    #[arg(long)]
    pub oracle: bool,
    /// Skip binding of nodes that need no referential consistency.
    #[arg(long)]
    pub skip_binding: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Fraction,
    Float,
    Json,
}

impl RunArgs {
    fn prob_format(&self) -> ProbFormat {
        match self.format {
            Format::Float => ProbFormat::Decimal(self.digits as usize),
            Format::Fraction | Format::Json => ProbFormat::Fraction,
        }
    }

    fn options(&self) -> Options {
        Options {
            skip_binding: self.skip_binding,
            ..Options::default()
        }
    }
}

/// Standard streams of one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

struct Loaded {
    file: String,
    model: CompiledModel,
}

fn load(arg: &ModelArg, io: &mut Io) -> Result<Loaded, i32> {
    let (file, src) = if arg.model.as_os_str() == "-" {
        let mut src = String::new();
        if let Err(e) = io.stdin.read_to_string(&mut src) {
            let _ = writeln!(io.stderr, "error: cannot read standard input: {e}");
            return Err(exit::SYNTAX);
        }
        ("<stdin>".to_string(), src)
    } else {
        let file = arg.model.display().to_string();
        match std::fs::read_to_string(&arg.model) {
            Ok(src) => (file, src),
            Err(e) => {
                let _ = writeln!(io.stderr, "error: cannot read {file}: {e}");
                return Err(exit::SYNTAX);
            }
        }
    };
    match dsl::load(&src) {
        Ok(model) => Ok(Loaded { file, model }),
        Err(d) => {
            let _ = writeln!(io.stderr, "{}", d.render(&file));
            Err(exit::SYNTAX)
        }
    }
}

/// The queries to evaluate: the `--query` expression if given, else the
/// file's own.
fn queries(args: &RunArgs, loaded: &mut Loaded, io: &mut Io) -> Result<Vec<CompiledQuery>, i32> {
    match &args.query {
        None => Ok(loaded.model.queries.clone()),
        Some(text) => match dsl::compile_query(&mut loaded.model, text) {
            Ok(q) => Ok(vec![q]),
            Err(d) => {
                let _ = writeln!(io.stderr, "{}", d.render("--query"));
                Err(exit::SYNTAX)
            }
        },
    }
}

fn exit_code(outcomes: &[QueryOutcome]) -> i32 {
    if outcomes.iter().any(QueryOutcome::oracle_mismatch) {
        exit::MISMATCH
    } else if outcomes.iter().any(|o| o.result.is_err()) {
        exit::EVAL
    } else {
        exit::OK
    }
}

fn cmd_run(args: &RunArgs, io: &mut Io) -> Result<i32, i32> {
    let mut loaded = load(&args.model, io)?;
    let queries = queries(args, &mut loaded, io)?;
    let opts = RunOptions {
        engine: args.options(),
        oracle: args.oracle,
    };
    let outcomes = dsl::run_list(&queries, opts);
    let (text, diagnostics) = render_text(&outcomes, args.prob_format());
    if args.format == Format::Json {
        let _ = writeln!(io.stdout, "{}", json::render(&outcomes));
    } else {
        let _ = io.stdout.write_all(text.as_bytes());
    }
    let _ = io.stderr.write_all(diagnostics.as_bytes());
    Ok(exit_code(&outcomes))
}

fn cmd_check(arg: &ModelArg, io: &mut Io) -> Result<i32, i32> {
    let loaded = load(arg, io)?;
    let _ = writeln!(io.stdout, "{}", loaded.model.summary());
    Ok(exit::OK)
}

fn cmd_trace(args: &RunArgs, io: &mut Io) -> Result<i32, i32> {
    let mut loaded = load(&args.model, io)?;
    let queries = queries(args, &mut loaded, io)?;
    let [query] = queries.as_slice() else {
        let _ = writeln!(
            io.stderr,
            "{}: error: trace needs exactly one query, found {}",
            loaded.file,
            queries.len()
        );
        return Err(exit::SYNTAX);
    };
    let (result, trace) = statues::engine::marg_traced_with(&query.root, args.options());
    let table = trace_table(&trace, &query.root, &loaded.model, args.prob_format());
    let _ = io.stdout.write_all(table.render(table::terminal_width()).as_bytes());
    match result {
        Ok(pmf) => {
            let _ = writeln!(io.stdout, "result: {}", dsl::render_pmf(&pmf, args.prob_format()));
            Ok(exit::OK)
        }
        Err(e) => {
            let _ = writeln!(
                io.stderr,
                "error: query `{}` at {}: {e}",
                query.source, query.span
            );
            Ok(exit::EVAL)
        }
    }
}

/// Runs one invocation and returns its exit code.
pub fn execute(cli: &Cli, io: &mut Io) -> i32 {
    let out = match &cli.command {
        Command::Run(args) => cmd_run(args, io),
        Command::Check(arg) => cmd_check(arg, io),
        Command::Trace(args) => cmd_trace(args, io),
    };
    out.unwrap_or_else(|code| code)
}
