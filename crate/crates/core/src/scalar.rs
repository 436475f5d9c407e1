use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number over arbitrary-precision integers, always kept in
/// lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Entrywise agreement threshold for `f64` computations.
pub const REAL_TOLERANCE: f64 = 1e-12;

/// Field-like scalar used by every formula in the crate.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact and agreement means equality.
    const EXACT: bool;

    fn from_u64(v: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// `|self - other|` as an `f64`.
    fn distance(&self, other: &Self) -> f64;

    /// Equality for exact kinds, `REAL_TOLERANCE` closeness otherwise.
    fn agrees_with(&self, other: &Self) -> bool {
        if Self::EXACT {
            self == other
        } else {
            self.distance(other) <= REAL_TOLERANCE
        }
    }

    fn from_usize(v: usize) -> Self {
        Self::from_u64(v as u64)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn distance(&self, other: &Self) -> f64 {
        Signed::abs(&(self - other))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_u64(v: u64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn distance(&self, other: &Self) -> f64 {
        Scalar::to_f64(&(self - other).abs())
    }
}
