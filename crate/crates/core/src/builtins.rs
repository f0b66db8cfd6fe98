//! The built-in pure function library.
//!
//! Each builtin is a process-wide singleton, so function values obtained by
//! name compare equal across models.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::func::PureFn;
use crate::value::Value;

const MAX_EXPONENT: i64 = 4096;

type Res = Result<Value, String>;

fn num<'a>(v: &'a Value, what: &str) -> Result<&'a BigRational, String> {
    v.as_num()
        .ok_or_else(|| format!("{what} expects numbers, got {v}"))
}

fn boolean(v: &Value, what: &str) -> Result<bool, String> {
    v.as_bool()
        .ok_or_else(|| format!("{what} expects booleans, got {v}"))
}

fn arith(name: &'static str, op: fn(&BigRational, &BigRational) -> Res) -> PureFn {
    PureFn::new(name, 2, move |args| op(num(&args[0], name)?, num(&args[1], name)?))
}

fn compare(name: &'static str, op: fn(std::cmp::Ordering) -> bool) -> PureFn {
    PureFn::new(name, 2, move |args| {
        let (a, b) = (num(&args[0], name)?, num(&args[1], name)?);
        Ok(Value::Bool(op(a.cmp(b))))
    })
}

fn logic(name: &'static str, op: fn(bool, bool) -> bool) -> PureFn {
    PureFn::new(name, 2, move |args| {
        Ok(Value::Bool(op(boolean(&args[0], name)?, boolean(&args[1], name)?)))
    })
}

fn exact_sqrt(x: &BigRational) -> Res {
    if x.is_negative() {
        return Err(format!("square root of negative number {}", Value::Num(x.clone())));
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Ok(Value::Num(BigRational::new(rn, rd)))
    } else {
        Err(format!(
            "square root of {} is irrational",
            Value::Num(x.clone())
        ))
    }
}

fn power(base: &BigRational, exp: &BigRational) -> Res {
    if !exp.is_integer() {
        return Err(format!("non-integer exponent {}", Value::Num(exp.clone())));
    }
    let e = exp
        .to_integer()
        .to_i64()
        .filter(|e| e.abs() <= MAX_EXPONENT)
        .ok_or_else(|| format!("exponent {} too large", Value::Num(exp.clone())))?;
    if base.is_zero() && e < 0 {
        return Err("zero raised to a negative power".into());
    }
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    if e < 0 {
        acc = acc.recip();
    }
    Ok(Value::Num(acc))
}

fn build() -> HashMap<String, PureFn> {
    let fns = [
        arith("add", |a, b| Ok(Value::Num(a + b))),
        arith("sub", |a, b| Ok(Value::Num(a - b))),
        arith("mul", |a, b| Ok(Value::Num(a * b))),
        arith("div", |a, b| {
            if b.is_zero() {
                Err("division by zero".into())
            } else {
                Ok(Value::Num(a / b))
            }
        }),
        arith("min", |a, b| Ok(Value::Num(a.min(b).clone()))),
        arith("max", |a, b| Ok(Value::Num(a.max(b).clone()))),
        arith("pow", power),
        PureFn::new("neg", 1, |args| Ok(Value::Num(-num(&args[0], "neg")?.clone()))),
        PureFn::new("abs", 1, |args| Ok(Value::Num(num(&args[0], "abs")?.abs()))),
        PureFn::new("sqrt", 1, |args| exact_sqrt(num(&args[0], "sqrt")?)),
        PureFn::new("id", 1, |args| Ok(args[0].clone())),
        PureFn::new("eq", 2, |args| Ok(Value::Bool(args[0] == args[1]))),
        PureFn::new("ne", 2, |args| Ok(Value::Bool(args[0] != args[1]))),
        compare("lt", |o| o.is_lt()),
        compare("le", |o| o.is_le()),
        compare("gt", |o| o.is_gt()),
        compare("ge", |o| o.is_ge()),
        logic("and", |a, b| a && b),
        logic("or", |a, b| a || b),
        logic("implies", |a, b| !a || b),
        logic("iff", |a, b| a == b),
        PureFn::new("not", 1, |args| Ok(Value::Bool(!boolean(&args[0], "not")?))),
        PureFn::new("extract", 2, |args| {
            let items = args[0]
                .as_tuple()
                .ok_or_else(|| format!("extract expects a tuple, got {}", args[0]))?;
            let i = num(&args[1], "extract")?;
            let idx = i
                .is_integer()
                .then(|| i.to_integer().to_usize())
                .flatten()
                .filter(|&i| i >= 1 && i <= items.len())
                .ok_or_else(|| format!("index {} out of range 1..={}", args[1], items.len()))?;
            Ok(items[idx - 1].clone())
        }),
        PureFn::new("in_set", 2, |args| {
            let set = args[1]
                .as_tuple()
                .ok_or_else(|| format!("in_set expects a tuple of members, got {}", args[1]))?;
            Ok(Value::Bool(set.contains(&args[0])))
        }),
    ];
    fns.into_iter().map(|f| (f.name().to_string(), f)).collect()
}

/// Names of all builtins.
pub const NAMES: &[&str] = &[
    "add", "sub", "mul", "div", "min", "max", "pow", "neg", "abs", "sqrt", "id", "eq", "ne", "lt",
    "le", "gt", "ge", "and", "or", "implies", "iff", "not", "extract", "in_set",
];

fn registry() -> &'static HashMap<String, PureFn> {
    static REGISTRY: OnceLock<HashMap<String, PureFn>> = OnceLock::new();
    REGISTRY.get_or_init(build)
}

/// Looks a builtin up by name.
pub fn get(name: &str) -> Option<PureFn> {
    registry().get(name).cloned()
}

/// Looks a builtin up by name, panicking on unknown names.
pub fn builtin(name: &str) -> PureFn {
    get(name).unwrap_or_else(|| panic!("unknown builtin {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Value {
        Value::int(n)
    }

    fn call(name: &str, args: &[Value]) -> Res {
        builtin(name).call(args)
    }

    #[test]
    fn every_name_is_registered() {
        for name in NAMES {
            assert_eq!(builtin(name).name(), *name);
        }
        assert_eq!(registry().len(), NAMES.len());
        assert_eq!(builtin("add"), builtin("add"));
        assert_ne!(builtin("add"), builtin("sub"));
    }

    #[test]
    fn arithmetic_is_exact() {
        assert_eq!(call("div", &[int(1), int(3)]).unwrap(), Value::ratio(1, 3));
        assert_eq!(call("pow", &[Value::ratio(2, 3), int(-2)]).unwrap(), Value::ratio(9, 4));
        assert_eq!(call("sqrt", &[Value::ratio(9, 16)]).unwrap(), Value::ratio(3, 4));
        assert_eq!(call("max", &[int(3), int(5)]).unwrap(), int(5));
        assert_eq!(call("abs", &[int(-5)]).unwrap(), int(5));
    }

    #[test]
    fn failures_are_reported() {
        assert!(call("div", &[int(1), int(0)]).is_err());
        assert!(call("sqrt", &[int(-4)]).is_err());
        assert!(call("sqrt", &[int(2)]).is_err());
        assert!(call("add", &[Value::Bool(true), int(1)]).is_err());
        assert!(call("and", &[int(1), Value::Bool(true)]).is_err());
        assert!(call("pow", &[int(0), int(-1)]).is_err());
        assert!(call("pow", &[int(2), Value::ratio(1, 2)]).is_err());
    }

    #[test]
    fn tuple_helpers() {
        let t = Value::tuple([Value::sym("rainy"), Value::sym("sad")]);
        assert_eq!(call("extract", &[t.clone(), int(2)]).unwrap(), Value::sym("sad"));
        assert!(call("extract", &[t.clone(), int(0)]).is_err());
        assert!(call("extract", &[t, int(3)]).is_err());
        let set = Value::tuple([int(2), int(3), int(12)]);
        assert_eq!(call("in_set", &[int(12), set.clone()]).unwrap(), Value::Bool(true));
        assert_eq!(call("in_set", &[int(4), set]).unwrap(), Value::Bool(false));
    }

    #[test]
    fn comparisons_and_logic() {
        assert_eq!(call("le", &[int(3), int(3)]).unwrap(), Value::Bool(true));
        assert_eq!(call("gt", &[int(3), int(3)]).unwrap(), Value::Bool(false));
        assert_eq!(call("eq", &[Value::sym("a"), int(1)]).unwrap(), Value::Bool(false));
        assert_eq!(
            call("implies", &[Value::Bool(false), Value::Bool(false)]).unwrap(),
            Value::Bool(true)
        );
        assert_eq!(call("not", &[Value::Bool(true)]).unwrap(), Value::Bool(false));
    }
}
