//! Numeric type used for reported scores.
//!
//! Matching itself works on integer triple counts; only the final
//! precision / recall / F1 values are expressed in a scalar type. `f64` is
//! the everyday choice, [`Rational`](crate::Rational) gives exact values for
//! equality checks between two searches.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {
    /// `num / den`, or zero when `den` is zero.
    fn from_counts(num: usize, den: usize) -> Self;

    fn to_f64(self) -> f64;
}

impl Scalar for f64 {
    fn from_counts(num: usize, den: usize) -> Self {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    fn from_counts(num: usize, den: usize) -> Self {
        if den == 0 {
            0.0
        } else {
            (num as f64 / den as f64) as f32
        }
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for Ratio<i64> {
    fn from_counts(num: usize, den: usize) -> Self {
        if den == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(num as i64, den as i64)
        }
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

/// Harmonic mean of `a` and `b`, zero when both are zero.
pub fn harmonic_mean<T: Scalar>(a: T, b: T) -> T {
    let sum = a + b;
    if sum == T::zero() {
        T::zero()
    } else {
        (T::one() + T::one()) * a * b / sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_denominator_is_zero() {
        assert_eq!(f64::from_counts(3, 0), 0.0);
        assert_eq!(Ratio::<i64>::from_counts(3, 0), Ratio::from_integer(0));
    }

    #[test]
    fn rational_is_exact() {
        let p = Ratio::<i64>::from_counts(2, 3);
        let r = Ratio::<i64>::from_counts(2, 5);
        // 2PR/(P+R) = 2 * 4/15 / (16/15) = 1/2
        assert_eq!(harmonic_mean(p, r), Ratio::new(1, 2));
        assert_eq!(f32::from_counts(1, 4), 0.25f32);
    }
}
