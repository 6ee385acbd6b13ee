use std::fmt::Debug;
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// Exact rational scalar. Wu-Palmer values are ratios of small integers, so
/// sums of them stay exact.
pub type Exact = Ratio<i128>;

/// Numeric type used for similarity and match scores.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Sum + Send + Sync + 'static {
    fn from_ratio(num: u64, den: u64) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as u64, 1)
    }

    fn to_f64(self) -> f64;

    /// Smallest gain a local search treats as an improvement.
    fn tolerance() -> Self;

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn tolerance() -> Self {
        1e-5
    }
}

impl Scalar for Exact {
    fn from_ratio(num: u64, den: u64) -> Self {
        Ratio::new(i128::from(num), i128::from(den))
    }
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

/// `num / den`, or zero when `den` is zero.
pub fn ratio_or_zero<S: Scalar>(num: S, den: S) -> S {
    if den == S::zero() {
        S::zero()
    } else {
        num / den
    }
}

/// Arithmetic mean, zero for an empty input.
pub fn mean<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    let mut total = S::zero();
    let mut n = 0usize;
    for v in values {
        total = total + v;
        n += 1;
    }
    ratio_or_zero(total, S::from_count(n))
}
