//! Deterministic random primitives threaded through every enumerator.
//!
//! `RandomState` is a SplitMix64 state word. Every draw consumes a state by
//! value and hands back the successor, so a generation run is a pure function
//! of its starting seed. The stream is identical on every platform; it does
//! not try to match any other tool's numeric sequence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RngError {
    #[error("uniform bound must be at least 1")]
    ZeroBound,
    #[error("weight vector must contain at least one weight")]
    EmptyWeights,
    #[error("weight at index {0} is zero; weights must be positive")]
    ZeroWeight(usize),
    #[error("exponent range is empty: lo {lo} > hi {hi}")]
    EmptyExponentRange { lo: i64, hi: i64 },
}

/// Opaque generator state. Copying a state and drawing from both copies
/// yields the same values; the library itself never reuses a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomState(u64);

impl RandomState {
    pub fn from_seed(seed: u64) -> Self {
        RandomState(seed)
    }

    /// Next raw 64-bit output and the successor state.
    #[inline]
    pub fn next_u64(self) -> (u64, RandomState) {
        let next = self.0.wrapping_add(GOLDEN_GAMMA);
        let mut z = next;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31), RandomState(next))
    }

    /// Uniform natural in `[0, bound)`.
    pub fn next_uniform(self, bound: u64) -> Result<(u64, RandomState), RngError> {
        if bound == 0 {
            return Err(RngError::ZeroBound);
        }
        Ok(self.below(bound))
    }

    /// Unbiased multiply-and-reject reduction. `bound` must be nonzero.
    #[inline]
    pub(crate) fn below(self, bound: u64) -> (u64, RandomState) {
        debug_assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        let mut state = self;
        loop {
            let (x, next) = state.next_u64();
            state = next;
            let m = (x as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return ((m >> 64) as u64, state);
            }
        }
    }

    /// Uniform integer in the inclusive range `[lo, hi]`. Requires `lo <= hi`.
    pub(crate) fn between(self, lo: i64, hi: i64) -> (i64, RandomState) {
        debug_assert!(lo <= hi);
        let span = (hi as i128 - lo as i128 + 1) as u64;
        let (offset, state) = self.below(span);
        ((lo as i128 + offset as i128) as i64, state)
    }

    pub fn random_bool(self) -> (bool, RandomState) {
        let (x, state) = self.next_u64();
        (x >> 63 == 1, state)
    }

    /// Picks case `i` with probability `w[i] / sum(w)`.
    pub fn weighted_switch(self, weights: &WeightVector) -> (usize, RandomState) {
        let (u, state) = self.below(weights.total);
        let mut acc = 0u64;
        for (i, &w) in weights.weights.iter().enumerate() {
            acc += u64::from(w);
            if acc > u {
                return (i, state);
            }
        }
        unreachable!("draw below total weight always lands in a case")
    }

    /// Draws from `{±2^e | lo <= e <= hi}`: exponent uniform, then sign uniform.
    pub fn signed_power_of_two(self, lo: u32, hi: u32) -> Result<(BigInt, RandomState), RngError> {
        let ((negative, exponent), state) = self.signed_exponent(i64::from(lo), i64::from(hi))?;
        let magnitude = BigInt::one() << (exponent as usize);
        Ok((if negative { -magnitude } else { magnitude }, state))
    }

    /// Same distribution as [`signed_power_of_two`](Self::signed_power_of_two)
    /// but admits negative exponents, yielding exact rationals.
    pub fn signed_power_of_two_rational(self, lo: i32, hi: i32) -> Result<(BigRational, RandomState), RngError> {
        let ((negative, exponent), state) = self.signed_exponent(i64::from(lo), i64::from(hi))?;
        let magnitude = pow2(exponent as i32);
        Ok((if negative { -magnitude } else { magnitude }, state))
    }

    pub(crate) fn signed_exponent(self, lo: i64, hi: i64) -> Result<((bool, i64), RandomState), RngError> {
        if lo > hi {
            return Err(RngError::EmptyExponentRange { lo, hi });
        }
        let (exponent, state) = self.between(lo, hi);
        let (negative, state) = state.random_bool();
        Ok(((negative, exponent), state))
    }
}

/// Exact `2^exponent`.
pub(crate) fn pow2(exponent: i32) -> BigRational {
    let magnitude = BigInt::one() << exponent.unsigned_abs() as usize;
    if exponent >= 0 {
        BigRational::from_integer(magnitude)
    } else {
        BigRational::new_raw(BigInt::one(), magnitude)
    }
}

/// Positive integer case weights, at least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    weights: Vec<u32>,
    total: u64,
}

impl WeightVector {
    pub fn new(weights: Vec<u32>) -> Result<Self, RngError> {
        if weights.is_empty() {
            return Err(RngError::EmptyWeights);
        }
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(RngError::ZeroWeight(i));
        }
        let total = weights.iter().map(|&w| u64::from(w)).sum();
        Ok(WeightVector { weights, total })
    }

    /// `k` equal weights.
    pub fn uniform(k: usize) -> Result<Self, RngError> {
        Self::new(vec![1; k])
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}
