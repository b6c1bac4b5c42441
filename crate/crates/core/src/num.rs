//! Scalar types used for derived statistics (means, load factors).
//!
//! Counts are always integers; only the ratios built from them are generic,
//! so the same statistics can be read as `f32`, `f64` or an exact
//! [`Rational64`](num_rational::Rational64).

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num};

pub trait Scalar: Num + FromPrimitive + Copy + PartialOrd + Debug {
    /// `num / den`; zero when `den` is zero.
    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            return Self::zero();
        }
        Self::from_u64(num).expect("count fits scalar")
            / Self::from_u64(den).expect("count fits scalar")
    }

    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for Ratio<i64> {
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
