//! Log-space factorial ratios.
//!
//! Every ladder-operator matrix element in the crate is a square root of a
//! factorial ratio; evaluating them through `ln n!` keeps N = 500 states
//! finite without arbitrary precision.

use statrs::function::factorial::{ln_binomial, ln_factorial as statrs_ln_factorial};

/// `ln n!`.
#[inline]
pub fn ln_factorial(n: usize) -> f64 {
    statrs_ln_factorial(n as u64)
}

/// `ln C(n, k)`, or `-inf` when `k > n`.
#[inline]
pub fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_binomial(n as u64, k as u64)
}

/// `ln (n! / (n-k)!)`, the log of the falling factorial; `-inf` when `k > n`.
#[inline]
pub fn ln_falling(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(n - k)
}

/// `√(n!/(n-k)!)`, the amplitude picked up by `aᵏ|n⟩`. Zero when `k > n`.
#[inline]
pub fn lowering_factor(n: usize, k: usize) -> f64 {
    if k > n {
        0.0
    } else if k == 0 {
        1.0
    } else {
        (0.5 * ln_falling(n, k)).exp()
    }
}

/// `√((n+k)!/n!)`, the amplitude picked up by `a†ᵏ|n⟩`.
#[inline]
pub fn raising_factor(n: usize, k: usize) -> f64 {
    lowering_factor(n + k, k)
}
