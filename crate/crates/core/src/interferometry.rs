//! Simulated interferometric readout: mode rotations, output-intensity
//! fringes, binned count probabilities versus phase and their Fourier
//! analysis, and the identities expressing `⟨a†ⁿbⁿ⟩` through spin or
//! quadrature measurements.
//!
//! The interferometer outputs are `c = (a + e^{iφ}b)/√2` and
//! `d = (a − e^{iφ}b)/√2`. In `⟨c†ⁿcⁿ⟩(φ)` the only term oscillating as
//! `e^{inφ}` is `⟨a†ⁿbⁿ⟩/2ⁿ`, so fringes at angular frequency `n` can only come
//! from order-n coherence.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::fock::{FixedNState, OperatorMonomial, TwoModeDensityMatrix, TwoModeState};
use crate::operators::{anticommutator, TruncatedModes};
use crate::special::ln_falling;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Linear two-mode transformation `(c, d)ᵀ = U (a, b)ᵀ` with `U` unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTransform {
    pub u: [[Complex64; 2]; 2],
}

impl ModeTransform {
    pub fn new(u: [[Complex64; 2]; 2]) -> Result<Self> {
        let col = |j: usize| [u[0][j], u[1][j]];
        let dot = |x: [Complex64; 2], y: [Complex64; 2]| x[0].conj() * y[0] + x[1].conj() * y[1];
        let (c0, c1) = (col(0), col(1));
        if (dot(c0, c0).re - 1.0).abs() > 1e-12 || (dot(c1, c1).re - 1.0).abs() > 1e-12 || dot(c0, c1).norm() > 1e-12 {
            return Err(Error::InvalidParameter("mode transformation is not unitary".into()));
        }
        Ok(Self { u })
    }

    /// `c = (a + e^{iφ}b)/√2`, `d = (a − e^{iφ}b)/√2`.
    pub fn interferometer(phi: f64) -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let e = Complex64::from_polar(FRAC_1_SQRT_2, phi);
        Self { u: [[h, e], [h, -e]] }
    }

    /// `c = (a + b)/√2`, `d = e^{−iπ/4}(a − b)/√2`.
    pub fn rotated_spin_basis() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let p = Complex64::from_polar(FRAC_1_SQRT_2, -FRAC_PI_4);
        Self { u: [[h, h], [p, -p]] }
    }

    pub fn inverse(&self) -> Self {
        let u = self.u;
        Self { u: [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]] }
    }

    /// Matrix taking fixed-N amplitudes in the `(a, b)` basis to the `(c, d)`
    /// basis; column `m` is the image of `|N−m⟩_a|m⟩_b`.
    pub fn sector_matrix(&self, total: usize) -> DMatrix<Complex64> {
        // a† = u₀₀ c† + u₁₀ d†, b† = u₀₁ c† + u₁₁ d†.
        let (a_c, a_d) = (self.u[0][0], self.u[1][0]);
        let (b_c, b_d) = (self.u[0][1], self.u[1][1]);
        let mut out = DMatrix::zeros(total + 1, total + 1);
        for m in 0..=total {
            // Build (a†)^{N−m}(b†)^m|0⟩/√((N−m)! m!) one normalized creation at a time.
            // v[k] is the amplitude of k quanta in d.
            let mut v = vec![Complex64::new(1.0, 0.0)];
            let mut created = 0usize;
            let mut apply = |v: &mut Vec<Complex64>, to_c: Complex64, to_d: Complex64, count: usize| {
                created += 1;
                let mut next = vec![ZERO; created + 1];
                for (k, &x) in v.iter().enumerate() {
                    if x == ZERO {
                        continue;
                    }
                    let n_c = created - 1 - k;
                    next[k] += to_c * ((n_c + 1) as f64).sqrt() * x;
                    next[k + 1] += to_d * ((k + 1) as f64).sqrt() * x;
                }
                let norm = 1.0 / (count as f64).sqrt();
                next.iter_mut().for_each(|z| *z *= norm);
                *v = next;
            };
            for j in 1..=total - m {
                apply(&mut v, a_c, a_d, j);
            }
            for j in 1..=m {
                apply(&mut v, b_c, b_d, j);
            }
            for (k, x) in v.into_iter().enumerate() {
                out[(k, m)] = x;
            }
        }
        out
    }

    /// Amplitudes of `state` in the `(c, d)` basis, `Σ_k e_k |N−k⟩_c|k⟩_d`.
    pub fn apply(&self, state: &FixedNState) -> FixedNState {
        let m = self.sector_matrix(state.total_number());
        let out = (0..=state.total_number())
            .map(|k| (0..=state.total_number()).map(|j| m[(k, j)] * state.amplitude(j)).sum())
            .collect();
        FixedNState::normalized(out).expect("unitary maps preserve the norm")
    }

    /// Density matrix in the `(c, d)` basis. The output cutoff is the largest
    /// total number present, since rotation can move all quanta into one mode.
    pub fn apply_mixed(&self, rho: &TwoModeDensityMatrix) -> Result<TwoModeDensityMatrix> {
        let mut blocks: BTreeMap<(usize, usize), Vec<((usize, usize), Complex64)>> = BTreeMap::new();
        let mut top = 0;
        for (r, c, v) in rho.iter() {
            let (tr, tc) = (r.0 + r.1, c.0 + c.1);
            top = top.max(tr).max(tc);
            blocks.entry((tr, tc)).or_default().push(((r.1, c.1), v));
        }
        let mut mats: BTreeMap<usize, DMatrix<Complex64>> = BTreeMap::new();
        for &(tr, tc) in blocks.keys() {
            for t in [tr, tc] {
                mats.entry(t).or_insert_with(|| self.sector_matrix(t));
            }
        }
        let idx = |na: usize, nb: usize| na * (top + 1) + nb;
        let mut out: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for ((tr, tc), entries) in blocks {
            let mut block = DMatrix::zeros(tr + 1, tc + 1);
            for ((i, j), v) in entries {
                block[(i, j)] = v;
            }
            let rotated = &mats[&tr] * block * mats[&tc].adjoint();
            for i in 0..=tr {
                for j in 0..=tc {
                    let v = rotated[(i, j)];
                    if v.norm() > 1e-300 {
                        out.insert((idx(tr - i, i), idx(tc - j, j)), v);
                    }
                }
            }
        }
        TwoModeDensityMatrix::from_entries(top, out)
    }
}

/// `state` expressed in the interferometer outputs `c, d` at phase `φ`.
pub fn rotate_modes(state: &FixedNState, phi: f64) -> FixedNState {
    ModeTransform::interferometer(phi).apply(state)
}

/// `⟨c†c − d†d⟩(φ) = 2⟨J_X⟩cos φ − 2⟨J_Y⟩sin φ`.
pub fn intensity_difference<S: TwoModeState + ?Sized>(state: &S, phi: f64) -> f64 {
    let m = state.schwinger_moments(&[]);
    2.0 * m.jx * phi.cos() - 2.0 * m.jy * phi.sin()
}

/// Peak-to-mean amplitude of the first-order fringe, `2|⟨a†b⟩|`.
pub fn fringe_visibility<S: TwoModeState + ?Sized>(state: &S) -> f64 {
    let m = state.schwinger_moments(&[]);
    2.0 * m.jx.hypot(m.jy)
}

/// Probability of at least `threshold` quanta in output `c` versus phase, and
/// its discrete Fourier magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    /// `φ_j = 2πj/K`.
    pub phases: Vec<f64>,
    pub bin_threshold: usize,
    pub probabilities: Vec<f64>,
    /// `|(1/K) Σ_j P(φ_j) e^{−iωφ_j}|` for `ω = 0, …, K/2`.
    pub spectrum: Vec<f64>,
}

impl FringeScan {
    /// Largest spectral magnitude over `ω ≥ 1`; ties go to the lower frequency.
    pub fn dominant_frequency(&self) -> Option<(usize, f64)> {
        self.spectrum.iter().copied().enumerate().skip(1).fold(None, |best, (w, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((w, v)),
        })
    }
}

/// Uniform phase grid of `k` points on `[0, 2π)`.
pub fn phase_grid(k: usize) -> Vec<f64> {
    (0..k).map(|j| 2.0 * PI * j as f64 / k as f64).collect()
}

/// `|(1/K) Σ_j f_j e^{−iωφ_j}|` for `ω = 0, …, K/2`.
pub fn fourier_magnitudes(samples: &[f64]) -> Vec<f64> {
    fourier_coefficients(samples).iter().take(samples.len() / 2 + 1).map(|c| c.norm()).collect()
}

/// `(1/K) Σ_j f_j e^{−iωφ_j}` for `ω = 0, …, K−1`.
fn fourier_coefficients(samples: &[f64]) -> Vec<Complex64> {
    let k = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(k).process(&mut buf);
    buf.iter_mut().for_each(|c| *c /= k as f64);
    buf
}

/// Scans `P(n_c ≥ M)` over `K` phases from the exact rotated number
/// distribution.
pub fn binned_probability_scan(state: &FixedNState, threshold: usize, k: usize) -> Result<FringeScan> {
    let n = state.total_number();
    if threshold > n {
        return Err(Error::InvalidParameter(format!("bin threshold M = {threshold} exceeds N = {n}")));
    }
    if k < 2 || !k.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("phase grid size K = {k} must be a power of two ≥ 2")));
    }
    let phases = phase_grid(k);
    let probabilities: Vec<f64> = phases
        .iter()
        .map(|&phi| {
            let rotated = rotate_modes(state, phi);
            // n_c = N − k ≥ M  ⇔  k ≤ N − M.
            (0..=n - threshold).map(|k| rotated.probability(k)).sum::<f64>().clamp(0.0, 1.0)
        })
        .collect();
    let spectrum = fourier_magnitudes(&probabilities);
    Ok(FringeScan { phases, bin_threshold: threshold, probabilities, spectrum })
}

/// `⟨c†ⁿcⁿ⟩(φ_j)` on a grid of `k` phases, from the rotated number distribution.
pub fn correlation_scan(state: &FixedNState, order: usize, k: usize) -> Vec<f64> {
    let n = state.total_number();
    phase_grid(k)
        .iter()
        .map(|&phi| {
            let rotated = rotate_modes(state, phi);
            (0..=n)
                .filter(|&kd| n - kd >= order)
                .map(|kd| rotated.probability(kd) * ln_falling(n - kd, order).exp())
                .sum()
        })
        .collect()
}

/// Recovers `⟨a†ⁿbⁿ⟩ = 2ⁿ (1/K) Σ_j ⟨c†ⁿcⁿ⟩(φ_j) e^{−inφ_j}` from a uniform scan.
pub fn moment_from_fringes(scan: &[f64], order: usize) -> Result<Complex64> {
    let k = scan.len();
    if k <= 2 * order {
        return Err(Error::Aliasing { samples: k, frequency: order });
    }
    let coeff: Complex64 = scan
        .iter()
        .enumerate()
        .map(|(j, &f)| f * Complex64::from_polar(1.0, -(order as f64) * 2.0 * PI * j as f64 / k as f64))
        .sum::<Complex64>()
        / k as f64;
    Ok(coeff * 2f64.powi(order as i32))
}

/// Sign variants of the third-order spin identity, with
/// `J_θ = J_X cos θ + J_Y sin θ` and `G_θ = J_{θ+π/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThirdOrderVariant {
    /// `2J_X³ − 2iJ_Y³ + i√2(J_{π/4}³ + G_{π/4}³) − √2(J_{π/4}³ − G_{π/4}³)`.
    Expanded,
    /// `2J_X³ − √2(J'_{π/4}³ + J'_{3π/4}³) − 2iJ_Y³ + i√2(J'_{π/4}³ + J'_{3π/4}³)`
    /// with the opposite rotation `J'_θ = J_X cos θ − J_Y sin θ`.
    Compact,
}

/// The variant that holds as an operator identity; see
/// [`MeasurementIdentity::ThirdOrderSpin`].
pub const THIRD_ORDER_VARIANT: ThirdOrderVariant = ThirdOrderVariant::Expanded;

fn third_order_combination(
    variant: ThirdOrderVariant,
    jx3: Complex64,
    jy3: Complex64,
    j3: Complex64,
    g3: Complex64,
) -> Complex64 {
    match variant {
        ThirdOrderVariant::Expanded => jx3 * 2.0 - I * jy3 * 2.0 + I * SQRT_2 * (j3 + g3) - SQRT_2 * (j3 - g3),
        ThirdOrderVariant::Compact => {
            // J'_{π/4} = J_{−π/4} = −G_{π/4};  J'_{3π/4} = J_{−3π/4} = −J_{π/4}.
            let sum = -g3 - j3;
            jx3 * 2.0 - SQRT_2 * sum - I * jy3 * 2.0 + I * SQRT_2 * sum
        }
    }
}

/// `⟨a†ⁿbⁿ⟩` from Schwinger moments alone, for `n ≤ 3`.
pub fn moment_from_spins<S: TwoModeState + ?Sized>(state: &S, order: usize) -> Result<Complex64> {
    moment_from_spins_with(state, order, THIRD_ORDER_VARIANT)
}

/// [`moment_from_spins`] with an explicit third-order variant.
pub fn moment_from_spins_with<S: TwoModeState + ?Sized>(
    state: &S,
    order: usize,
    variant: ThirdOrderVariant,
) -> Result<Complex64> {
    let c = |x: f64| Complex64::new(x, 0.0);
    match order {
        0 => Ok(c(1.0)),
        1 => {
            let m = state.schwinger_moments(&[]);
            Ok(Complex64::new(m.jx, m.jy))
        }
        2 => {
            let m = state.schwinger_moments(&[]);
            Ok(Complex64::new(m.jx2 - m.jy2, m.jxy_anticommutator))
        }
        3 => {
            let m = state.schwinger_moments(&[0.0, FRAC_PI_4]);
            let axes = m.at_angle(0.0).expect("requested angle");
            let diag = m.at_angle(FRAC_PI_4).expect("requested angle");
            Ok(third_order_combination(variant, c(axes.j3), c(axes.g3), c(diag.j3), c(diag.g3)))
        }
        _ => Err(Error::InvalidParameter(format!("spin route covers orders ≤ 3 (got {order})"))),
    }
}

/// Joint quadrature moments from which `⟨a†b⟩` and `⟨a†²b²⟩` follow, with
/// `a = X_A + iP_A`, `b = X_B + iP_B` and `X_θ = X cos θ + P sin θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMoments {
    /// `⟨Q_A Q_B⟩` for `Q ∈ {X, P}`, indexed `[A][B]`.
    pub first: [[f64; 2]; 2],
    /// `⟨Q_A² Q_B²⟩` for `Q ∈ {X, P, X_{π/4}}`, indexed `[A][B]`.
    pub second: [[f64; 3]; 3],
    /// `⟨X²⟩, ⟨P²⟩, ⟨X_{π/4}²⟩, ⟨{X, P}⟩` for mode A.
    pub single_a: [f64; 4],
    /// The same for mode B.
    pub single_b: [f64; 4],
}

impl QuadratureMoments {
    /// Evaluates the moments on `rho`. Every operator involved is a product
    /// `A ⊗ B` of single-mode operators, so it is applied mode by mode.
    pub fn of(rho: &TwoModeDensityMatrix) -> Result<Self> {
        // Squares of quadratures raise occupations by at most two.
        let dim = rho.cutoff() + 3;
        let lower =
            DMatrix::from_fn(dim, dim, |r, c| if c == r + 1 { Complex64::new((c as f64).sqrt(), 0.0) } else { ZERO });
        let raise = lower.adjoint();
        let x = (&lower + &raise) * Complex64::new(0.5, 0.0);
        let p = (&lower - &raise) * (Complex64::new(1.0, 0.0) / (2.0 * I));
        let r = (&x + &p) * Complex64::new(FRAC_1_SQRT_2, 0.0);
        let id = DMatrix::<Complex64>::identity(dim, dim);
        let q = [x.clone(), p.clone()];
        let q2 = [&x * &x, &p * &p, &r * &r];
        let ev = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| product_expectation(rho, a, b);

        let mut first = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                first[i][j] = ev(&q[i], &q[j]);
            }
        }
        let mut second = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                second[i][j] = ev(&q2[i], &q2[j]);
            }
        }
        let xp = anticommutator(&x, &p);
        let single_a = [ev(&q2[0], &id), ev(&q2[1], &id), ev(&q2[2], &id), ev(&xp, &id)];
        let single_b = [ev(&id, &q2[0]), ev(&id, &q2[1]), ev(&id, &q2[2]), ev(&id, &xp)];
        Ok(Self { first, second, single_a, single_b })
    }

    /// `⟨a†b⟩ = ⟨X_A X_B⟩ + ⟨P_A P_B⟩ + i(⟨X_A P_B⟩ − ⟨P_A X_B⟩)`.
    pub fn first_order(&self) -> Complex64 {
        let f = self.first;
        Complex64::new(f[0][0] + f[1][1], f[0][1] - f[1][0])
    }

    /// `⟨a†²b²⟩ = ⟨u_A u_B⟩ + ⟨v_A v_B⟩ − i⟨v_A u_B⟩ + i⟨u_A v_B⟩` with
    /// `u = X² − P²` and `v = {X, P} = 2X_{π/4}² − X² − P²`, expanded into the
    /// measured joint moments.
    pub fn second_order(&self) -> Complex64 {
        // Per-mode coefficient vectors over (X², P², X_{π/4}²).
        let u = [1.0, -1.0, 0.0];
        let v = [-1.0, -1.0, 2.0];
        let pair = |l: [f64; 3], r: [f64; 3]| -> f64 {
            let mut acc = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    acc += l[i] * r[j] * self.second[i][j];
                }
            }
            acc
        };
        Complex64::new(pair(u, u) + pair(v, v), pair(u, v) - pair(v, u))
    }
}

/// `Re Tr(ρ (A ⊗ B))` for single-mode operators `A` on mode a and `B` on mode b.
fn product_expectation(rho: &TwoModeDensityMatrix, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    rho.iter().map(|(r, c, v)| v * a[(c.0, r.0)] * b[(c.1, r.1)]).sum::<Complex64>().re
}

/// `⟨a†b⟩` or `⟨a†²b²⟩` from quadrature moments.
pub fn moment_from_quadratures<S: TwoModeState + ?Sized>(state: &S, order: usize) -> Result<Complex64> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!("quadrature route covers orders ≤ 2 (got {order})")));
    }
    let q = QuadratureMoments::of(&state.to_density_matrix())?;
    Ok(match order {
        0 => Complex64::new(1.0, 0.0),
        1 => q.first_order(),
        _ => q.second_order(),
    })
}

/// Measurement identities that can be checked as operator equalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementIdentity {
    /// `a†²b² = J_X² − J_Y² + i{J_X, J_Y}`
    SecondOrderSpin,
    /// `a†b = X_A X_B + P_A P_B + i(X_A P_B − P_A X_B)`
    FirstOrderQuadrature,
    /// `a†b = X_A X_B + P_A P_B − i(P_A X_B + X_A P_B)`, which does not hold.
    FirstOrderQuadratureSymmetric,
    /// `a†²b² = u_A u_B + v_A v_B − i v_A u_B + i u_A v_B`
    SecondOrderQuadrature,
    /// `X_{π/4}² = (X² + P² + {X, P})/2` on mode A.
    RotatedQuadrature,
    /// `(a†b)³` through cubes of rotated spins, in the given variant.
    ThirdOrderSpin(ThirdOrderVariant),
}

impl MeasurementIdentity {
    pub const ALL: [MeasurementIdentity; 7] = [
        MeasurementIdentity::SecondOrderSpin,
        MeasurementIdentity::FirstOrderQuadrature,
        MeasurementIdentity::FirstOrderQuadratureSymmetric,
        MeasurementIdentity::SecondOrderQuadrature,
        MeasurementIdentity::RotatedQuadrature,
        MeasurementIdentity::ThirdOrderSpin(ThirdOrderVariant::Expanded),
        MeasurementIdentity::ThirdOrderSpin(ThirdOrderVariant::Compact),
    ];

    /// Ladder degree of the operators involved.
    fn degree(self) -> usize {
        match self {
            MeasurementIdentity::FirstOrderQuadrature | MeasurementIdentity::FirstOrderQuadratureSymmetric => 2,
            MeasurementIdentity::RotatedQuadrature => 2,
            MeasurementIdentity::SecondOrderSpin | MeasurementIdentity::SecondOrderQuadrature => 4,
            MeasurementIdentity::ThirdOrderSpin(_) => 6,
        }
    }

    /// Largest entry of `lhs − rhs` on states with at most `n_up` quanta per mode.
    pub fn deviation(self, n_up: usize) -> f64 {
        let degree = self.degree();
        let ops = TruncatedModes::new(n_up + degree);
        let c = |x: f64| Complex64::new(x, 0.0);
        let (xa, pa) = ops.quadratures_a();
        let (xb, pb) = ops.quadratures_b();
        let (lhs, rhs) = match self {
            MeasurementIdentity::SecondOrderSpin => {
                let (jx, jy) = (ops.jx(), ops.jy());
                (ops.monomial(OperatorMonomial::correlation(2)), &jx * &jx - &jy * &jy + anticommutator(&jx, &jy) * I)
            }
            MeasurementIdentity::FirstOrderQuadrature => {
                let rhs = &xa * &xb + &pa * &pb + (&xa * &pb - &pa * &xb) * I;
                (ops.monomial(OperatorMonomial::correlation(1)), rhs)
            }
            MeasurementIdentity::FirstOrderQuadratureSymmetric => {
                let rhs = &xa * &xb + &pa * &pb - (&pa * &xb + &xa * &pb) * I;
                (ops.monomial(OperatorMonomial::correlation(1)), rhs)
            }
            MeasurementIdentity::SecondOrderQuadrature => {
                let ua = &xa * &xa - &pa * &pa;
                let ub = &xb * &xb - &pb * &pb;
                let va = anticommutator(&xa, &pa);
                let vb = anticommutator(&xb, &pb);
                let rhs = &ua * &ub + &va * &vb - &va * &ub * I + &ua * &vb * I;
                (ops.monomial(OperatorMonomial::correlation(2)), rhs)
            }
            MeasurementIdentity::RotatedQuadrature => {
                let x45 = (&xa + &pa) * c(FRAC_1_SQRT_2);
                let rhs = (&xa * &xa + &pa * &pa + anticommutator(&xa, &pa)) * c(0.5);
                (&x45 * &x45, rhs)
            }
            MeasurementIdentity::ThirdOrderSpin(variant) => {
                let cube = |m: DMatrix<Complex64>| &m * &m * &m;
                let jx3 = cube(ops.jx());
                let jy3 = cube(ops.jy());
                let j3 = cube(ops.j_theta(FRAC_PI_4));
                let g3 = cube(ops.j_theta(3.0 * FRAC_PI_4));
                let rhs = match variant {
                    ThirdOrderVariant::Expanded => {
                        &jx3 * c(2.0) - &jy3 * (I * 2.0) + (&j3 + &g3) * (I * SQRT_2) - (&j3 - &g3) * c(SQRT_2)
                    }
                    ThirdOrderVariant::Compact => {
                        let sum = -(&g3 + &j3);
                        &jx3 * c(2.0) - &sum * c(SQRT_2) - &jy3 * (I * 2.0) + &sum * (I * SQRT_2)
                    }
                };
                (ops.monomial(OperatorMonomial::correlation(3)), rhs)
            }
        };
        ops.deviation(&lhs, &rhs, degree)
    }
}
