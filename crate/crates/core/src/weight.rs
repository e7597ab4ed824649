//! Weight scalars for the inference engines.
//!
//! Every engine backend is generic over a [`Weight`]: `f64` for the float
//! mode and [`Exact`] (a reduced fraction over arbitrary-precision
//! integers) for the exact-rational mode. Exact mode is intended for short
//! records (n ≤ 16) where oracle equality tests must hold bit for bit.

use crate::error::Error;
use crate::Result;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Sub};

/// Exact probability scalar: reduced fraction over big integers. Safe for
/// every operation the engines perform, including cross-record arithmetic.
pub type Exact = BigRational;

/// Exact probability scalar over `i128`, an order of magnitude faster than
/// [`Exact`]. Sound for single-record mass arithmetic (sums, products and
/// mass ratios all have denominators dividing step_den^n · 2^(n+1), within
/// `i128` for n ≤ 16 and small step denominators); cross-record sums and
/// differences can overflow and belong to [`Exact`]. Overflow checks stay
/// on in every build profile, so a violation panics instead of wrapping.
pub type Exact128 = Ratio<i128>;

/// Shorthand for building an exact fraction.
pub fn exact(num: i64, den: i64) -> Exact {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// Scalar type usable as a probability weight by the generic engines.
pub trait Weight:
    Clone
    + PartialEq
    + PartialOrd
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    /// Exact small rational, e.g. `from_ratio(1, 2)`.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Lossless for f64; exact numerator/denominator for rationals.
    fn to_f64(&self) -> f64;

    /// Whether the forward filter should rescale per step (floats only).
    const RESCALES: bool;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl Weight for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    const RESCALES: bool = true;
}

impl Weight for Exact {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    const RESCALES: bool = false;
}

impl Weight for Exact128 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    const RESCALES: bool = false;
}

/// The three step probabilities as engine weights.
#[derive(Debug, Clone, PartialEq)]
pub struct StepWeights<T> {
    pub pause: T,
    pub up: T,
    pub down: T,
}

impl<T: Weight> StepWeights<T> {
    /// Branches with nonzero probability, as (increment, weight) pairs in a
    /// fixed order (up, pause, down).
    pub fn branches(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        [
            (1i64, self.up.clone()),
            (0i64, self.pause.clone()),
            (-1i64, self.down.clone()),
        ]
        .into_iter()
        .filter(|(_, w)| !w.is_zero())
    }

    pub fn weight_of(&self, increment: i64) -> T {
        match increment {
            0 => self.pause.clone(),
            1 => self.up.clone(),
            -1 => self.down.clone(),
            _ => T::zero(),
        }
    }
}

impl<T: Weight> StepWeights<T> {
    /// Step law from integer ratios p = p_num/p_den, ε = eps_num/eps_den,
    /// validated against the same ranges as
    /// [`crate::record::StepDistribution`]. Exact for the rational scalars.
    pub fn from_ratios(p_num: i64, p_den: i64, eps_num: i64, eps_den: i64) -> Result<Self> {
        if p_den <= 0 || eps_den <= 0 {
            return Err(Error::InvalidDistribution(
                "denominators must be positive".to_string(),
            ));
        }
        let p = T::from_ratio(p_num, p_den);
        let eps = T::from_ratio(eps_num, eps_den);
        if p < T::half() || p > T::one() {
            return Err(Error::InvalidDistribution(format!(
                "p = {p_num}/{p_den} outside [1/2, 1]"
            )));
        }
        if eps < T::zero() || eps >= T::one() {
            return Err(Error::InvalidDistribution(format!(
                "epsilon = {eps_num}/{eps_den} outside [0, 1)"
            )));
        }
        let one = T::one();
        Ok(StepWeights {
            pause: eps.clone(),
            up: p.clone() * (one.clone() - eps.clone()),
            down: (one.clone() - p) * (one - eps),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_step_weights_sum_to_one() {
        let w: StepWeights<Exact> = StepWeights::from_ratios(7, 10, 3, 10).unwrap();
        assert_eq!(
            w.pause + w.up + w.down,
            Exact::one(),
            "exact step law must be a probability vector"
        );
    }

    #[test]
    fn zero_branches_are_skipped() {
        let w: StepWeights<Exact> = StepWeights::from_ratios(1, 2, 0, 1).unwrap();
        let incs: Vec<i64> = w.branches().map(|(i, _)| i).collect();
        assert_eq!(incs, vec![1, -1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StepWeights::<Exact>::from_ratios(1, 3, 0, 1).is_err());
        assert!(StepWeights::<Exact>::from_ratios(1, 2, 1, 1).is_err());
    }
}
