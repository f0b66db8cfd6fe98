//! Domain elements of random variables.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::func::PureFn;

/// An element of a finite discrete domain.
///
/// Numbers are exact reduced rationals, so `2` and `4/2` are the same value.
/// The derived order ranks by variant first (booleans, numbers, symbols,
/// tuples, functions) and then within the variant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Num(BigRational),
    Sym(Arc<str>),
    Tuple(Arc<[Value]>),
    Func(PureFn),
}

impl Value {
    pub fn int(n: i64) -> Self {
        Value::Num(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` in lowest terms. Panics if `den` is zero.
    pub fn ratio(num: i64, den: i64) -> Self {
        Value::Num(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn sym(s: &str) -> Self {
        Value::Sym(Arc::from(s))
    }

    pub fn tuple(items: impl IntoIterator<Item = Value>) -> Self {
        Value::Tuple(items.into_iter().collect())
    }

    /// The empty tuple, last tail of every tuple chain.
    pub fn unit() -> Self {
        Value::Tuple(Arc::from(Vec::new()))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self {
            Value::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Value]> {
        match self {
            Value::Tuple(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_func(&self) -> Option<&PureFn> {
        match self {
            Value::Func(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Value::Tuple(items) if items.is_empty())
    }

    /// `<head . tail>`: prepends `head` to the tuple `tail`.
    pub fn cons(head: Value, tail: &Value) -> Option<Value> {
        let rest = tail.as_tuple()?;
        let mut items = Vec::with_capacity(rest.len() + 1);
        items.push(head);
        items.extend_from_slice(rest);
        Some(Value::Tuple(items.into()))
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::int(n)
    }
}

impl From<BigRational> for Value {
    fn from(r: BigRational) -> Self {
        Value::Num(r)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::sym(s)
    }
}

impl From<PureFn> for Value {
    fn from(f: PureFn) -> Self {
        Value::Func(f)
    }
}

/// `a/b`, or a bare integer when the denominator is 1.
pub fn format_number(n: &BigRational) -> String {
    if n.denom().is_one() {
        n.numer().to_string()
    } else {
        format!("{}/{}", n.numer(), n.denom())
    }
}

/// Exact decimal text of `n` when its expansion terminates.
pub fn terminating_decimal(n: &BigRational) -> Option<String> {
    let mut den = n.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let digits = twos.max(fives);
    if digits == 0 {
        return Some(n.numer().to_string());
    }
    let scaled = n * BigRational::from_integer(BigInt::from(10).pow(digits as u32));
    let int = scaled.to_integer();
    let neg = int.is_negative();
    let s = int.abs().to_string();
    let s = format!("{s:0>width$}", width = digits + 1);
    let (whole, frac) = s.split_at(s.len() - digits);
    Some(format!("{}{whole}.{frac}", if neg { "-" } else { "" }))
}

/// Whether `s` can be written as a bare symbol in model source.
pub fn is_bare_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
        && !crate::dsl::lexer::KEYWORDS.contains(&s)
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Num(n) => f.write_str(&format_number(n)),
            Value::Sym(s) if is_bare_symbol(s) => f.write_str(s),
            Value::Sym(s) => write!(f, "{:?}", &**s),
            Value::Tuple(items) => {
                f.write_str("<")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(">")
            }
            Value::Func(func) => write!(f, "@{}", func.name()),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
