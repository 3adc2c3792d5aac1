//! The pure-state normalization `𝒩_{n,N} = 1 / max Σ_m |d_m d_{m+n}|`.
//!
//! The objective is `½ dᵀ A d` where `A` is the adjacency matrix of the
//! disjoint paths `{r, r+n, r+2n, …}`. Its maximum over unit vectors is half
//! the largest adjacency eigenvalue, `cos(π/(L+1))` for the longest path
//! length `L = ⌊N/n⌋ + 1`. [`maximize_coherence_sum`] finds the same maximum
//! by direct numerical ascent and serves as an independent check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{Error, Result};

/// Gradient step of the ascent.
const STEP: f64 = 1.0;

fn check_orders(total: usize, order: usize) -> Result<()> {
    if order == 0 || order > total {
        return Err(Error::InvalidParameter(format!("normalization needs 1 ≤ n ≤ N (got n = {order}, N = {total})")));
    }
    Ok(())
}

/// `max Σ_m |d_m d_{m+n}|` over normalized amplitude vectors of length N+1.
pub fn max_coherence_sum(total: usize, order: usize) -> Result<f64> {
    check_orders(total, order)?;
    if 2 * order > total {
        // Paths of at most two nodes; the cosine would round away from ½.
        return Ok(0.5);
    }
    let longest = total / order + 1;
    Ok((std::f64::consts::PI / (longest + 1) as f64).cos())
}

/// `𝒩_{n,N}`; exactly 2 when `n > N/2`.
pub fn normalization(total: usize, order: usize) -> Result<f64> {
    Ok(1.0 / max_coherence_sum(total, order)?)
}

/// Settings for [`maximize_coherence_sum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop a restart once one step improves the objective by less than this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { restarts: 200, max_iterations: 1_000_000, tolerance: 1e-15, seed: 0x6e6f6f6e }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub value: f64,
    pub amplitudes: Vec<f64>,
    /// Index of the restart that produced the best value.
    pub restart: usize,
}

fn objective(d: &[f64], order: usize) -> f64 {
    d.iter().zip(&d[order..]).map(|(x, y)| x * y).sum()
}

fn normalize(d: &mut [f64]) {
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    d.iter_mut().for_each(|x| *x /= norm);
}

fn ascend(total: usize, order: usize, settings: &OracleSettings, restart: usize) -> (f64, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    rng.set_stream(restart as u64);
    let len = total + 1;
    let mut d: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + f64::MIN_POSITIVE).collect();
    normalize(&mut d);
    let mut value = objective(&d, order);
    let mut next = vec![0.0; len];
    for _ in 0..settings.max_iterations {
        // Gradient of Σ d_m d_{m+n} is d_{m−n} + d_{m+n}; take a step, project onto
        // the nonnegative orthant, renormalize.
        for m in 0..len {
            let mut g = 0.0;
            if m >= order {
                g += d[m - order];
            }
            if m + order < len {
                g += d[m + order];
            }
            next[m] = (d[m] + STEP * g).max(0.0);
        }
        normalize(&mut next);
        let updated = objective(&next, order);
        std::mem::swap(&mut d, &mut next);
        let gain = updated - value;
        value = updated.max(value);
        if gain < settings.tolerance {
            break;
        }
    }
    (value, d)
}

/// Maximizes `Σ_m d_m d_{m+n}` over nonnegative unit vectors by projected
/// gradient ascent from `settings.restarts` random starts.
///
/// Each restart draws from its own ChaCha stream, so the outcome does not
/// depend on how rayon schedules the restarts.
pub fn maximize_coherence_sum(total: usize, order: usize, settings: &OracleSettings) -> Result<OracleOutcome> {
    check_orders(total, order)?;
    if settings.restarts == 0 {
        return Err(Error::InvalidParameter("oracle needs at least one restart".into()));
    }
    let runs: Vec<(f64, Vec<f64>)> =
        (0..settings.restarts).into_par_iter().map(|k| ascend(total, order, settings, k)).collect();
    let (restart, (value, amplitudes)) = runs
        .into_iter()
        .enumerate()
        .fold(None, |best: Option<(usize, (f64, Vec<f64>))>, (k, run)| match best {
            Some(b) if b.1 .0 >= run.0 => Some(b),
            _ => Some((k, run)),
        })
        .expect("at least one restart");
    Ok(OracleOutcome { value, amplitudes, restart })
}
