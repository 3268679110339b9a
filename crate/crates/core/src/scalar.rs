//! Scalar abstraction for transition matrices.
//!
//! Transition probabilities of the local-move chains are ratios of tuple
//! counts, so matrices can be built either in floating point or exactly in
//! rationals. Everything that only needs field arithmetic is generic over
//! [`Scalar`]; spectral work converts to `f64`.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Num, ToPrimitive};
use std::fmt::Debug;

pub trait Scalar: Num + Clone + Debug + PartialOrd + Send + Sync {
    /// True when arithmetic is exact, so equality checks need no tolerance.
    const EXACT: bool;

    fn from_ratio(num: u64, den: u64) -> Self;

    fn as_f64(&self) -> f64;

    /// Equality up to `tol` for inexact types, exact equality otherwise.
    fn near(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.as_f64() - other.as_f64()).abs() <= tol
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn as_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for Rational64 {
    const EXACT: bool = true;

    fn from_ratio(num: u64, den: u64) -> Self {
        Rational64::new(num as i64, den as i64)
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
