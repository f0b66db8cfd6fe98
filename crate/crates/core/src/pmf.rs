//! Probability mass functions.

use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Probability;
use crate::value::Value;
use crate::Prob;

/// A condensed finite mapping from values to strictly positive
/// probabilities summing to one. Insertion order is preserved.
#[derive(Clone, PartialEq)]
pub struct Pmf<P = Prob> {
    entries: IndexMap<Value, P>,
}

impl<P: Probability> Pmf<P> {
    /// Merges duplicate values, drops zero weights and normalizes. Surviving
    /// values keep the position of their first occurrence.
    pub fn condense<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Value, P)>,
    {
        let mut merged: IndexMap<Value, P> = IndexMap::new();
        for (value, weight) in entries {
            if weight < P::zero() {
                return Err(Error::InvalidPmf(format!(
                    "negative weight {weight:?} for {value}"
                )));
            }
            match merged.get_mut(&value) {
                Some(w) => *w = w.clone() + weight,
                None => {
                    merged.insert(value, weight);
                }
            }
        }
        merged.retain(|_, w| !w.is_zero());
        if merged.is_empty() {
            return Err(Error::InvalidPmf("no entry with positive weight".into()));
        }
        Ok(Self::normalized(merged))
    }

    /// Divides already condensed positive weights by their total.
    pub(crate) fn normalized(mut weights: IndexMap<Value, P>) -> Self {
        debug_assert!(!weights.is_empty());
        let total = weights
            .values()
            .fold(P::zero(), |acc, w| acc + w.clone());
        if !total.is_one() {
            for w in weights.values_mut() {
                *w = w.clone() / total.clone();
            }
        }
        Pmf { entries: weights }
    }

    /// The distribution of a certain value.
    pub fn certain(value: Value) -> Self {
        let mut entries = IndexMap::new();
        entries.insert(value, P::one());
        Pmf { entries }
    }

    /// Probability of `value`, zero when absent.
    pub fn prob_of(&self, value: &Value) -> P {
        self.entries.get(value).cloned().unwrap_or_else(P::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Value, &P)> + '_ {
        self.entries.iter()
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> + '_ {
        self.entries.keys()
    }

    pub fn contains(&self, value: &Value) -> bool {
        self.entries.contains_key(value)
    }

    pub fn is_certain(&self) -> bool {
        self.entries.len() == 1
    }

    /// Whether every value is a boolean.
    pub fn is_boolean(&self) -> bool {
        self.entries.keys().all(|v| matches!(v, Value::Bool(_)))
    }

    /// `P(true)`, for boolean distributions.
    pub fn p_true(&self) -> P {
        self.prob_of(&Value::Bool(true))
    }

    /// Same support, probabilities converted through `f64`-free exact
    /// conversion from this exact pmf.
    pub fn map_probs<Q: Probability>(&self, f: impl Fn(&P) -> Q) -> Pmf<Q> {
        Pmf {
            entries: self.entries.iter().map(|(v, p)| (v.clone(), f(p))).collect(),
        }
    }

    /// Order-insensitive equality of the value→probability mapping.
    pub fn same_mapping(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .entries
                .iter()
                .all(|(v, p)| other.entries.get(v).is_some_and(|q| q == p))
    }

    pub fn to_vec(&self) -> Vec<(Value, P)> {
        self.entries
            .iter()
            .map(|(v, p)| (v.clone(), p.clone()))
            .collect()
    }
}

impl Pmf<Prob> {
    /// Exact sum of all probabilities.
    pub fn total(&self) -> Prob {
        self.entries.values().fold(Prob::zero(), |acc, p| acc + p)
    }

    /// Builds an exact pmf from integer-ratio pairs, e.g. `[(v, 1, 3)]`.
    pub fn from_ratios<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Value, i64, i64)>,
    {
        Self::condense(
            entries
                .into_iter()
                .map(|(v, n, d)| (v, BigRational::new(BigInt::from(n), BigInt::from(d)))),
        )
    }
}

impl<P: Probability> fmt::Debug for Pmf<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

impl fmt::Display for Pmf<Prob> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, p)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}: {}", format_prob(p, ProbFormat::Fraction))?;
        }
        f.write_str("}")
    }
}

/// How probabilities are rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbFormat {
    /// Canonical `num/den`.
    Fraction,
    /// Fixed number of digits after the point, rounded half to even.
    Decimal(usize),
}

pub fn format_prob(p: &BigRational, mode: ProbFormat) -> String {
    match mode {
        ProbFormat::Fraction => format!("{}/{}", p.numer(), p.denom()),
        ProbFormat::Decimal(digits) => format_decimal(p, digits.max(1)),
    }
}

/// Decimal expansion of `x` with `digits` digits after the point, rounded
/// half to even.
pub fn format_decimal(x: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = x.abs() * BigRational::from_integer(scale);
    let (quot, rem) = scaled.numer().div_rem(scaled.denom());
    let twice: BigInt = rem * 2;
    let rounded = match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Greater => quot + 1,
        std::cmp::Ordering::Less => quot,
        std::cmp::Ordering::Equal if quot.is_odd() => quot + 1,
        std::cmp::Ordering::Equal => quot,
    };
    let s = format!("{rounded:0>width$}", width = digits + 1);
    let (whole, frac) = s.split_at(s.len() - digits);
    let sign = if x.is_negative() && !rounded_is_zero(&s) { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    }
}

fn rounded_is_zero(s: &str) -> bool {
    s.bytes().all(|b| b == b'0')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Prob {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn condense_merges_and_drops_zeros() {
        let pmf = Pmf::condense([
            (Value::sym("tail"), q(1, 2)),
            (Value::sym("head"), q(3, 8)),
            (Value::sym("head"), q(1, 8)),
            (Value::sym("tie"), q(0, 1)),
        ])
        .unwrap();
        assert_eq!(pmf.to_vec(), vec![
            (Value::sym("tail"), q(1, 2)),
            (Value::sym("head"), q(1, 2)),
        ]);
    }

    #[test]
    fn condense_normalizes_weights() {
        let pmf = Pmf::condense([(Value::int(0), q(2, 1)), (Value::int(1), q(6, 1))]).unwrap();
        assert_eq!(pmf.prob_of(&Value::int(0)), q(1, 4));
        assert_eq!(pmf.prob_of(&Value::int(1)), q(3, 4));
        assert_eq!(pmf.total(), q(1, 1));
        let single = Pmf::condense([(Value::sym("x"), q(1, 1))]).unwrap();
        assert!(single.is_certain());
    }

    #[test]
    fn condense_rejects_bad_input() {
        assert!(matches!(Pmf::<Prob>::condense([]), Err(Error::InvalidPmf(_))));
        assert!(matches!(
            Pmf::condense([(Value::int(0), q(0, 1))]),
            Err(Error::InvalidPmf(_))
        ));
        assert!(matches!(
            Pmf::condense([(Value::int(0), q(1, 1)), (Value::int(1), q(-1, 2))]),
            Err(Error::InvalidPmf(_))
        ));
    }

    #[test]
    fn prob_of_absent_is_zero() {
        let pmf = Pmf::from_ratios([(Value::int(0), 1, 4), (Value::int(1), 3, 4)]).unwrap();
        assert_eq!(pmf.prob_of(&Value::int(1)), q(3, 4));
        assert_eq!(pmf.prob_of(&Value::int(7)), q(0, 1));
    }

    #[test]
    fn first_occurrence_order_survives_zero_then_positive() {
        let pmf = Pmf::condense([
            (Value::int(5), q(0, 1)),
            (Value::int(1), q(1, 1)),
            (Value::int(5), q(1, 1)),
        ])
        .unwrap();
        let order: Vec<_> = pmf.values().cloned().collect();
        assert_eq!(order, vec![Value::int(5), Value::int(1)]);
    }

    #[test]
    fn float_pmfs_condense_too() {
        let pmf = Pmf::condense([(Value::int(0), 1.0f64), (Value::int(0), 1.0), (Value::int(1), 2.0)])
            .unwrap();
        assert_eq!(pmf.prob_of(&Value::int(0)), 0.5);
    }

    #[test]
    fn format_fraction_and_decimal() {
        assert_eq!(format_prob(&q(7, 12), ProbFormat::Fraction), "7/12");
        assert_eq!(format_prob(&q(1, 2), ProbFormat::Decimal(4)), "0.5000");
        assert_eq!(format_prob(&q(1, 1), ProbFormat::Decimal(1)), "1.0");
        assert_eq!(format_prob(&q(1, 1), ProbFormat::Fraction), "1/1");
        // 891/2491 = 0.357687675632276194..., the float print 0.35768767563227616
        // agrees on the first 16 significant digits.
        let s = format_prob(&q(891, 2491), ProbFormat::Decimal(17));
        assert_eq!(s, "0.35768767563227619");
        assert_eq!(&s[..17], &"0.35768767563227616"[..17]);
    }

    #[test]
    fn decimal_rounds_half_to_even() {
        assert_eq!(format_decimal(&q(1, 8), 2), "0.12");
        assert_eq!(format_decimal(&q(3, 8), 2), "0.38");
        assert_eq!(format_decimal(&q(5, 2), 0), "2");
        assert_eq!(format_decimal(&q(7, 2), 0), "4");
        assert_eq!(format_decimal(&q(-1, 3), 3), "-0.333");
        assert_eq!(format_decimal(&q(-1, 3000), 2), "0.00");
        assert_eq!(format_decimal(&q(2, 100000), 4), "0.0000");
    }
}
