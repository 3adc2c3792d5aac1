//! Beam-splitter loss on each mode.
//!
//! Coupling a mode to vacuum through a beam splitter of transmission η is the
//! amplitude-damping channel with Kraus operators
//! `K_k = Σ_n √(C(n,k) η^{n−k} (1−η)^k) |n−k⟩⟨n|`; the two modes are damped
//! independently.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::{OperatorMonomial, TwoModeDensityMatrix, TwoModeState};
use crate::special::ln_choose;
use crate::{Error, Result};

/// Transmission probabilities of the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSetting {
    pub eta_a: f64,
    pub eta_b: f64,
}

impl LossSetting {
    pub fn new(eta_a: f64, eta_b: f64) -> Result<Self> {
        for eta in [eta_a, eta_b] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidParameter(format!("transmission {eta} outside [0, 1]")));
            }
        }
        Ok(Self { eta_a, eta_b })
    }

    pub fn symmetric(eta: f64) -> Result<Self> {
        Self::new(eta, eta)
    }

    pub fn is_symmetric(&self) -> bool {
        self.eta_a == self.eta_b
    }
}

/// `√(C(n,k) η^{n−k} (1−η)^k)`: amplitude for losing `k` of `n` quanta.
fn damping_amplitude(eta: f64, n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let kept = n - k;
    // 0⁰ = 1 at the endpoints.
    let ln_keep = if kept == 0 { 0.0 } else { kept as f64 * eta.ln() };
    let ln_lose = if k == 0 { 0.0 } else { k as f64 * (1.0 - eta).ln() };
    let ln_w = ln_choose(n, k) + ln_keep + ln_lose;
    if ln_w == f64::NEG_INFINITY {
        0.0
    } else {
        (0.5 * ln_w).exp()
    }
}

/// Table `w[n][k]` of damping amplitudes for `0 ≤ k ≤ n ≤ cutoff`.
fn damping_table(eta: f64, cutoff: usize) -> Vec<Vec<f64>> {
    (0..=cutoff).map(|n| (0..=n).map(|k| damping_amplitude(eta, n, k)).collect()).collect()
}

/// Applies the two-mode loss channel. The output keeps the input cutoff.
pub fn apply_loss(rho: &TwoModeDensityMatrix, loss: LossSetting) -> Result<TwoModeDensityMatrix> {
    LossSetting::new(loss.eta_a, loss.eta_b)?;
    let cutoff = rho.cutoff();
    let wa = damping_table(loss.eta_a, cutoff);
    let wb = damping_table(loss.eta_b, cutoff);
    let idx = |na: usize, nb: usize| na * (cutoff + 1) + nb;

    // Each source entry |ra,rb⟩⟨ca,cb| scatters into |ra−k, rb−l⟩⟨ca−k, cb−l|.
    let mut out: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    for ((ra, rb), (ca, cb), v) in rho.iter() {
        for k in 0..=ra.min(ca) {
            let fa = wa[ra][k] * wa[ca][k];
            if fa == 0.0 {
                continue;
            }
            for l in 0..=rb.min(cb) {
                let f = fa * wb[rb][l] * wb[cb][l];
                if f == 0.0 {
                    continue;
                }
                *out.entry((idx(ra - k, rb - l), idx(ca - k, cb - l))).or_insert(Complex64::new(0.0, 0.0)) += v * f;
            }
        }
    }
    TwoModeDensityMatrix::from_entries(cutoff, out)
}

/// Detected correlation `⟨a_det†ⁿ b_detⁿ⟩` after loss.
///
/// With equal transmissions this is the analytic `ηⁿ ⟨a†ⁿbⁿ⟩`; otherwise the
/// full channel is applied and the moment taken on its output.
pub fn detected_moment<S: TwoModeState + ?Sized>(state: &S, n: usize, loss: LossSetting) -> Result<Complex64> {
    LossSetting::new(loss.eta_a, loss.eta_b)?;
    let mono = OperatorMonomial::correlation(n);
    if loss.is_symmetric() {
        return Ok(state.moment(mono)? * loss.eta_a.powi(n as i32));
    }
    apply_loss(&state.to_density_matrix(), loss)?.moment(mono)
}
