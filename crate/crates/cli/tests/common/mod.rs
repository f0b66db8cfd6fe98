//! Helpers shared by the command-line tests.
#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use statues::pmf::format_decimal;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn example(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", name].iter().collect();
    p.display().to_string()
}

pub fn statues(args: &[&str]) -> Output {
    statues_with_stdin(args, "")
}

pub fn statues_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_statues"))
        .args(args)
        .env("COLUMNS", "1000")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Exact value of a decimal literal such as `-0.125` or `7`.
pub fn decimal(s: &str) -> BigRational {
    let (neg, s) = s.strip_prefix('-').map_or((false, s), |r| (true, r));
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("decimal digits");
    let v = BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    if neg {
        -v
    } else {
        v
    }
}

/// Exact value of `a/b`, an integer or a decimal.
pub fn number(s: &str) -> BigRational {
    match s.split_once('/') {
        Some((n, d)) => BigRational::new(n.parse().unwrap(), d.parse().unwrap()),
        None => decimal(s),
    }
}

fn significant(s: &str) -> usize {
    s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count()
}

/// Whether `ours` matches a printed reference value to the precision it was
/// printed at. Prints of 15 or more significant digits come from binary
/// floats, so only their first 15 significant digits are compared.
pub fn agrees(ours: &BigRational, printed: &str) -> bool {
    let reference = decimal(printed);
    let decimals = printed.split_once('.').map_or(0, |(_, f)| f.len());
    let places = if significant(printed) >= 15 {
        let mut magnitude = 0i64;
        let mut x = reference.abs();
        let ten = BigRational::from_integer(10.into());
        let one = BigRational::from_integer(1.into());
        if !x.is_zero() {
            while x < one {
                x *= &ten;
                magnitude -= 1;
            }
            while x >= ten {
                x /= &ten;
                magnitude += 1;
            }
        }
        (14 - magnitude).max(0) as usize
    } else {
        decimals
    };
    format_decimal(ours, places) == format_decimal(&reference, places)
}

/// `{k: v, …}` as printed by the tool, split into its entries.
pub fn entries(pmf: &str) -> Vec<(String, String)> {
    let inner = pmf.trim().trim_start_matches('{').trim_end_matches('}');
    let mut out = Vec::new();
    let (mut depth, mut start) = (0, 0);
    let bytes: Vec<char> = inner.chars().collect();
    let mut items = Vec::new();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            '<' => depth += 1,
            '>' => depth -= 1,
            ',' if depth == 0 => {
                items.push(bytes[start..i].iter().collect::<String>());
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(bytes[start..].iter().collect::<String>());
    for item in items {
        let (k, v) = item.rsplit_once(':').expect("key: value");
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    out
}

/// Result blocks of a multi-query run, keyed by query source.
pub fn results(stdout: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut lines = stdout.lines();
    while let Some(header) = lines.next() {
        let source = header.strip_prefix("% ").expect("query header").to_string();
        out.push((source, lines.next().expect("result line").to_string()));
    }
    out
}

pub fn result_of<'a>(results: &'a [(String, String)], source: &str) -> &'a str {
    &results
        .iter()
        .find(|(s, _)| s == source)
        .unwrap_or_else(|| panic!("no query `{source}`"))
        .1
}
