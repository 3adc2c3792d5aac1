//! Factories for the fixed-N state families: NOON states, the linear beam
//! splitter output, number pairs and embedded cats.
//!
//! All factories return amplitudes in the crate convention
//! `Σ_m d_m |N−m⟩_a |m⟩_b`. The beam-splitter output is often written as
//! `Σ_m d_m |m⟩_a |N−m⟩_b`; its binomial amplitudes are symmetric under
//! `m → N−m`, so the flip leaves the amplitude vector unchanged.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::FixedNState;
use crate::special::ln_choose;
use crate::{Error, Result};

/// `(|N,0⟩ + e^{iφ}|0,N⟩)/√2`.
pub fn make_noon(n: usize, phase: f64) -> Result<FixedNState> {
    if n == 0 {
        return Err(Error::InvalidParameter("NOON state needs N ≥ 1".into()));
    }
    make_embedded_cat(0, n, phase)
}

/// Output of a 50/50 beam splitter fed with `|N⟩|0⟩`:
/// `d_m = √(N! / (2ᴺ m! (N−m)!))`.
pub fn make_binomial_splitter(n: usize) -> Result<FixedNState> {
    if n == 0 {
        return Err(Error::InvalidParameter("beam-splitter state needs N ≥ 1".into()));
    }
    let ln_half = -(n as f64) * std::f64::consts::LN_2;
    let amps = (0..=n).map(|m| Complex64::new((0.5 * (ln_choose(n, m) + ln_half)).exp(), 0.0)).collect();
    // Summed binomial weights differ from 1 by rounding only.
    FixedNState::normalized(amps)
}

/// Number state with `n_left` quanta in mode b and `N − n_left` in mode a.
pub fn make_number_pair(n_left: usize, n: usize) -> Result<FixedNState> {
    if n_left > n {
        return Err(Error::InvalidParameter(format!("n_L = {n_left} exceeds N = {n}")));
    }
    FixedNState::basis(n, n_left)
}

/// `(|N−n_L⟩_a|n_L⟩_b + e^{iφ}|n_L⟩_a|N−n_L⟩_b)/√2`, separated by `n = N − 2n_L`.
pub fn make_embedded_cat(n_left: usize, n: usize, phase: f64) -> Result<FixedNState> {
    if 2 * n_left >= n {
        return Err(Error::InvalidParameter(format!("embedded cat needs n_L < N − n_L (got n_L = {n_left}, N = {n})")));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
    amps[n_left] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[n - n_left] = Complex64::from_polar(FRAC_1_SQRT_2, phase);
    FixedNState::new(amps)
}

/// `(a† + b†)ᴺ|0,0⟩/√(2ᴺ N!)`, all quanta in the symmetric mode. Same amplitudes
/// as [`make_binomial_splitter`]; kept separate for readability at call sites.
pub fn make_coherent_spin(n: usize) -> Result<FixedNState> {
    make_binomial_splitter(n)
}

/// Serializable description of a state, as used in CLI config fragments such
/// as `{"kind": "noon", "n": 5, "phase": 0.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateRecipe {
    Noon {
        n: usize,
        #[serde(default)]
        phase: f64,
    },
    BinomialSplitter {
        n: usize,
    },
    #[serde(alias = "embedded_initial")]
    EmbeddedCat {
        n: usize,
        n_l: usize,
        #[serde(default)]
        phase: f64,
    },
    NumberPair {
        n: usize,
        n_l: usize,
    },
}

impl StateRecipe {
    pub fn total_number(&self) -> usize {
        match *self {
            StateRecipe::Noon { n, .. }
            | StateRecipe::BinomialSplitter { n }
            | StateRecipe::EmbeddedCat { n, .. }
            | StateRecipe::NumberPair { n, .. } => n,
        }
    }

    pub fn build(&self) -> Result<FixedNState> {
        match *self {
            StateRecipe::Noon { n, phase } => make_noon(n, phase),
            StateRecipe::BinomialSplitter { n } => make_binomial_splitter(n),
            StateRecipe::EmbeddedCat { n, n_l, phase } => make_embedded_cat(n_l, n, phase),
            StateRecipe::NumberPair { n, n_l } => make_number_pair(n_l, n),
        }
    }
}
