//! Two-mode Josephson dynamics,
//! `H = κ(a†b + b†a) + (g/2)(a†²a² + b†²b²)`, solved exactly in the fixed-N
//! sector by diagonalization.
//!
//! Times are in units of `1/κ` when `κ = 1`.
//!
//! `T_N` is the period of the two-state oscillation between the initial
//! number state and its mirror image: the populations swap at `T_N/2`, and an
//! equal-weight (NOON-type) superposition forms at `T_N/4`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherence::catness_fidelity;
use crate::fock::FixedNState;
use crate::{Error, Result};

/// Hamiltonian and its cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct JosephsonSystem {
    total_number: usize,
    coupling: f64,
    nonlinearity: f64,
    hamiltonian: DMatrix<f64>,
    /// Ascending.
    eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, in the order of `eigenvalues`.
    eigenvectors: DMatrix<f64>,
}

impl JosephsonSystem {
    /// Builds `H` in the basis `|N−m⟩_a|m⟩_b` and diagonalizes it.
    pub fn new(total_number: usize, nonlinearity: f64, coupling: f64) -> Result<Self> {
        if total_number == 0 {
            return Err(Error::InvalidParameter("Josephson system needs N ≥ 1".into()));
        }
        if !nonlinearity.is_finite() || !coupling.is_finite() {
            return Err(Error::InvalidParameter("g and κ must be finite".into()));
        }
        let n = total_number;
        let mut h = DMatrix::zeros(n + 1, n + 1);
        for m in 0..=n {
            let (na, nb) = ((n - m) as f64, m as f64);
            h[(m, m)] = 0.5 * nonlinearity * (na * (na - 1.0) + nb * (nb - 1.0));
            if m < n {
                let off = coupling * (((m + 1) * (n - m)) as f64).sqrt();
                h[(m, m + 1)] = off;
                h[(m + 1, m)] = off;
            }
        }
        let eig = SymmetricEigen::new(h.clone());
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(n + 1, n + 1, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { total_number, coupling, nonlinearity, hamiltonian: h, eigenvalues, eigenvectors })
    }

    pub fn total_number(&self) -> usize {
        self.total_number
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn nonlinearity(&self) -> f64 {
        self.nonlinearity
    }

    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.hamiltonian
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Lowest-energy eigenstate.
    pub fn ground_state(&self) -> FixedNState {
        let amps = self.eigenvectors.column(0).iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FixedNState::normalized(amps).expect("eigenvectors are unit vectors")
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn energy(&self, state: &FixedNState) -> Result<f64> {
        self.check(state)?;
        let d = state.amplitudes();
        let mut e = Complex64::new(0.0, 0.0);
        for i in 0..=self.total_number {
            for j in i.saturating_sub(1)..=(i + 1).min(self.total_number) {
                e += d[i].conj() * self.hamiltonian[(i, j)] * d[j];
            }
        }
        Ok(e.re)
    }

    fn check(&self, state: &FixedNState) -> Result<()> {
        if state.total_number() != self.total_number {
            return Err(Error::DimensionMismatch { expected: self.total_number + 1, actual: state.total_number() + 1 });
        }
        Ok(())
    }

    /// Eigenbasis coefficients `Vᵀ d`.
    fn project(&self, state: &FixedNState) -> Vec<Complex64> {
        let d = state.amplitudes();
        (0..=self.total_number).map(|k| self.eigenvectors.column(k).iter().zip(d).map(|(&v, &x)| x * v).sum()).collect()
    }

    fn propagate(&self, coeffs: &[Complex64], t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.total_number + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            let phased = c * Complex64::from_polar(1.0, -self.eigenvalues[k] * t);
            for (m, o) in out.iter_mut().enumerate() {
                *o += phased * self.eigenvectors[(m, k)];
            }
        }
        out
    }

    /// `e^{−iHt}|ψ⟩`.
    pub fn state_at(&self, initial: &FixedNState, t: f64) -> Result<FixedNState> {
        Ok(self.states_at(initial, &[t])?.remove(0))
    }

    /// States at each of `times`.
    pub fn states_at(&self, initial: &FixedNState, times: &[f64]) -> Result<Vec<FixedNState>> {
        self.check(initial)?;
        let coeffs = self.project(initial);
        // t = 0 returns the input exactly rather than V Vᵀ d with rounding.
        times
            .iter()
            .map(|&t| if t == 0.0 { Ok(initial.clone()) } else { FixedNState::normalized(self.propagate(&coeffs, t)) })
            .collect()
    }

    /// Evolves `initial` and records populations, `⟨J_z⟩` and `c_n` for each
    /// requested order.
    pub fn evolve(&self, initial: &FixedNState, times: &[f64], orders: &[usize]) -> Result<EvolutionTrace> {
        let states = self.states_at(initial, times)?;
        let n = self.total_number as f64;
        let mut trace = EvolutionTrace {
            times: times.to_vec(),
            distributions: Vec::with_capacity(times.len()),
            jz_mean: Vec::with_capacity(times.len()),
            orders: orders.to_vec(),
            cn_series: vec![Vec::with_capacity(times.len()); orders.len()],
            period: None,
        };
        for state in &states {
            let p: Vec<f64> = (0..=self.total_number).map(|m| state.probability(m)).collect();
            trace.jz_mean.push(p.iter().enumerate().map(|(m, q)| q * 0.5 * (n - 2.0 * m as f64)).sum());
            trace.distributions.push(p);
            for (series, &order) in trace.cn_series.iter_mut().zip(orders) {
                series.push(catness_fidelity(state, order, crate::coherence::DEFAULT_SUPPORT_THRESHOLD)?.bound);
            }
        }
        Ok(trace)
    }

    /// `c_n(t)` for each order, one series per order.
    pub fn coherence_trace(&self, initial: &FixedNState, orders: &[usize], times: &[f64]) -> Result<Vec<Vec<f64>>> {
        Ok(self.evolve(initial, times, orders)?.cn_series)
    }

    /// Estimates `T_N` for an initial state concentrated on one number state.
    pub fn tunnelling_period(&self, initial: &FixedNState, scan: &ScanSettings) -> Result<TunnellingPeriod> {
        self.check(initial)?;
        let coeffs = self.project(initial);
        // The two eigenstates carrying most of the initial state.
        let mut weights: Vec<(usize, f64)> = coeffs.iter().map(|c| c.norm_sqr()).enumerate().collect();
        weights.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        let (i, j) = (weights[0].0, weights[1].0);
        let gap = (self.eigenvalues[i] - self.eigenvalues[j]).abs();
        let scale = self.eigenvalues.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
        // Symmetric eigensolvers resolve eigenvalues to a few ulps of the spectral radius.
        if gap <= RESOLUTION_ULPS * f64::EPSILON * scale {
            return Err(Error::Numerical(format!(
                "two-state splitting {gap:e} is below the eigenvalue resolution; no oscillation to time"
            )));
        }
        let spectral = 2.0 * std::f64::consts::PI / gap;

        let n = self.total_number as f64;
        let jz = |c: &[Complex64], t: f64| -> f64 {
            self.propagate(c, t).iter().enumerate().map(|(m, d)| d.norm_sqr() * 0.5 * (n - 2.0 * m as f64)).sum()
        };
        let jz0 = jz(&coeffs, 0.0);
        if jz0.abs() < 1e-12 {
            return Err(Error::Numerical("initial ⟨J_z⟩ is zero; no population transfer to time".into()));
        }
        let window = scan.window_periods * spectral;
        let samples = scan.samples.max(3);
        let dt = window / (samples - 1) as f64;
        // Track ⟨J_z⟩ measured against the initial sign, so transfer is a dip.
        let signed: Vec<f64> = (0..samples).map(|k| jz(&coeffs, k as f64 * dt) * jz0.signum()).collect();
        let enter = -0.5 * jz0.abs();
        let start = signed.iter().position(|&v| v < enter).ok_or_else(|| {
            Error::Numerical("⟨J_z⟩ never reverses sign within the scan window; no two-state oscillation".into())
        })?;
        let end = signed[start..].iter().position(|&v| v >= enter).map_or(samples, |k| start + k);
        let k_min = (start..end).fold(start, |best, k| if signed[k] < signed[best] { k } else { best });
        let transfer = if k_min > 0 && k_min + 1 < samples {
            let (y0, y1, y2) = (signed[k_min - 1], signed[k_min], signed[k_min + 1]);
            let curvature = y0 - 2.0 * y1 + y2;
            let shift = if curvature > 0.0 { 0.5 * (y0 - y2) / curvature } else { 0.0 };
            (k_min as f64 + shift) * dt
        } else {
            k_min as f64 * dt
        };
        let scanned = 2.0 * transfer;
        Ok(TunnellingPeriod {
            period: spectral,
            transfer_time: spectral / 2.0,
            scanned_period: scanned,
            relative_difference: (scanned - spectral).abs() / spectral,
            eigenstates: (i.min(j), i.max(j)),
        })
    }
}

/// Splittings within this many ulps of the spectral radius are treated as degenerate.
pub const RESOLUTION_ULPS: f64 = 64.0;

/// Scan used to validate the spectral period estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    /// Window length in units of the spectral period estimate.
    pub window_periods: f64,
    pub samples: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { window_periods: 5.0, samples: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnellingPeriod {
    /// `T_N = 2π/|E_i − E_j|` from the two dominant eigenstates.
    pub period: f64,
    /// `T_N/2`, the time of maximal transfer.
    pub transfer_time: f64,
    /// Twice the first `⟨J_z⟩` extremum of opposite sign, from the scan.
    pub scanned_period: f64,
    pub relative_difference: f64,
    pub eigenstates: (usize, usize),
}

/// Time-resolved populations, `⟨J_z⟩` and coherence bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// `P(m)` at each time, `m` counting quanta in mode b.
    pub distributions: Vec<Vec<f64>>,
    pub jz_mean: Vec<f64>,
    pub orders: Vec<usize>,
    /// `c_n(t)`, one series per entry of `orders`.
    pub cn_series: Vec<Vec<f64>>,
    /// `T_N`, when it was estimated.
    pub period: Option<f64>,
}

impl EvolutionTrace {
    /// Header `t, P0, …, PN, c_n…` for [`EvolutionTrace::csv_rows`].
    pub fn csv_header(&self) -> Vec<String> {
        let n = self.distributions.first().map_or(0, Vec::len);
        std::iter::once("t".to_string())
            .chain((0..n).map(|m| format!("P{m}")))
            .chain(self.orders.iter().map(|o| format!("c{o}")))
            .collect()
    }

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        (0..self.times.len())
            .map(|k| {
                std::iter::once(self.times[k])
                    .chain(self.distributions[k].iter().copied())
                    .chain(self.cn_series.iter().map(|s| s[k]))
                    .collect()
            })
            .collect()
    }
}

/// `e^{−iHt}` as a dense matrix, for callers that need the propagator itself.
pub fn propagator(system: &JosephsonSystem, t: f64) -> DMatrix<Complex64> {
    let v = system.eigenvectors().map(|x| Complex64::new(x, 0.0));
    let phases = DVector::from_iterator(
        system.eigenvalues().len(),
        system.eigenvalues().iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
    );
    &v * DMatrix::from_diagonal(&phases) * v.transpose()
}
