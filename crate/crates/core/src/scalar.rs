//! Probability scalars.
//!
//! Models always store exact rational priors. The engine is generic over the
//! scalar it accumulates in, so the same query can be run exactly
//! ([`Prob`](crate::Prob)) or in floating point (`f64`, `f32`).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Probability:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Converts an exact prior weight into this scalar.
    fn from_ratio(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// Whether arithmetic in this scalar is exact (no rounding).
    fn is_exact() -> bool {
        false
    }
}

impl Probability for BigRational {
    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }
}

impl Probability for f64 {
    fn from_ratio(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Probability for f32 {
    fn from_ratio(r: &BigRational) -> Self {
        ToPrimitive::to_f32(r).unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn conversions_agree() {
        let r = BigRational::new(BigInt::from(7), BigInt::from(12));
        assert_eq!(<BigRational as Probability>::from_ratio(&r), r);
        assert!((f64::from_ratio(&r) - 7.0 / 12.0).abs() < 1e-15);
        assert!((f32::from_ratio(&r) - 7.0 / 12.0).abs() < 1e-6);
        assert!(<BigRational as Probability>::is_exact());
        assert!(!<f64 as Probability>::is_exact());
    }
}
