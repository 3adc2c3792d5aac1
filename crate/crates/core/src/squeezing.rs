//! Spin squeezing, the coherence-size bound it implies, and inference of a
//! two-atom coherence from measured spin variances.
//!
//! A state whose superposition in the `J_Z` eigenbasis spans at most `δ₀`
//! obeys `(ΔJ_Y)² ≥ |⟨J_X⟩|²/δ₀²`. Reading this backwards, a squeezed `J_Y`
//! variance forces `δ₀ ≥ |⟨J_X⟩|/ΔJ_Y`, which for a fully polarized mean spin
//! `|⟨J_X⟩| ≈ ⟨N⟩/2` becomes `δ₀ > √N/ξ_N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::{SchwingerMoments, TwoModeState};
use crate::{Error, Result};

/// Measured or computed spin moments entering the squeezing tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeData {
    pub mean_n: f64,
    pub jx_mean: f64,
    pub jy_mean: f64,
    pub jz_mean: f64,
    pub jy_var: f64,
    pub jz_var: f64,
}

impl SqueezeData {
    pub fn new(mean_n: f64, jx_mean: f64, jy_mean: f64, jz_mean: f64, jy_var: f64, jz_var: f64) -> Result<Self> {
        let all = [mean_n, jx_mean, jy_mean, jz_mean, jy_var, jz_var];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spin data must be finite".into()));
        }
        if jy_var < 0.0 || jz_var < 0.0 {
            return Err(Error::InvalidParameter("variances must be nonnegative".into()));
        }
        if mean_n < 0.0 {
            return Err(Error::InvalidParameter("⟨N⟩ must be nonnegative".into()));
        }
        Ok(Self { mean_n, jx_mean, jy_mean, jz_mean, jy_var, jz_var })
    }

    /// From a data row `(N, ⟨J_x⟩, ⟨J_y⟩, ⟨J_z⟩, ⟨J_y²⟩, ⟨J_z²⟩)`.
    pub fn from_second_moments(n: f64, jx: f64, jy: f64, jz: f64, jy2: f64, jz2: f64) -> Result<Self> {
        Self::new(n, jx, jy, jz, jy2 - jy * jy, jz2 - jz * jz)
    }

    pub fn from_moments(m: &SchwingerMoments) -> Self {
        Self {
            mean_n: m.ntot,
            jx_mean: m.jx,
            jy_mean: m.jy,
            jz_mean: m.jz,
            jy_var: m.jy_var().max(0.0),
            jz_var: m.jz_var().max(0.0),
        }
    }

    pub fn jy2(&self) -> f64 {
        self.jy_var + self.jy_mean * self.jy_mean
    }

    pub fn jz2(&self) -> f64 {
        self.jz_var + self.jz_mean * self.jz_mean
    }
}

/// Which denominator normalizes `ΔJ_Y` in `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezeNormalization {
    /// `ΔJ_Y / √(|⟨J_X⟩|/2)`
    JxNormalized,
    /// `ΔJ_Y / (√⟨N⟩/2)`
    NNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParameter {
    pub xi: f64,
    pub normalization: SqueezeNormalization,
}

fn xi_from(std_dev: f64, data: &SqueezeData, mode: SqueezeNormalization) -> Result<SqueezeParameter> {
    let denom = match mode {
        SqueezeNormalization::JxNormalized => (data.jx_mean.abs() / 2.0).sqrt(),
        SqueezeNormalization::NNormalized => {
            if data.mean_n <= 0.0 {
                return Err(Error::Inapplicable("squeezing test requires ⟨N⟩ > 0".into()));
            }
            data.mean_n.sqrt() / 2.0
        }
    };
    Ok(SqueezeParameter { xi: std_dev / denom, normalization: mode })
}

/// `ξ` from the `J_Y` variance.
///
/// Both normalizations are refused when `⟨J_X⟩ = 0`: the test relies on a
/// nonzero mean spin, as for any NOON state it would report spurious squeezing.
pub fn squeeze_parameter(data: &SqueezeData, mode: SqueezeNormalization) -> Result<SqueezeParameter> {
    if data.jx_mean == 0.0 {
        return Err(Error::Inapplicable("squeezing test requires ⟨J_X⟩ ≠ 0".into()));
    }
    xi_from(data.jy_var.sqrt(), data, mode)
}

/// Lower bound on the coherence order implied by `ξ_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceBound {
    pub xi: f64,
    pub min_order: f64,
    pub certified: bool,
}

/// `n > √N / ξ_N`, certified when `ξ_N < 1`.
pub fn coherence_bound(xi: f64, n: f64) -> Result<CoherenceBound> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("ξ must be positive and finite (got {xi})")));
    }
    if !(n >= 0.0) {
        return Err(Error::InvalidParameter(format!("N must be nonnegative (got {n})")));
    }
    Ok(CoherenceBound { xi, min_order: n.sqrt() / xi, certified: xi < 1.0 })
}

/// `|⟨J_X⟩| / ΔJ_Y`, the smallest spread compatible with the data.
/// Infinite when `ΔJ_Y = 0` and `⟨J_X⟩ ≠ 0`.
pub fn spread_lower_bound(data: &SqueezeData) -> f64 {
    if data.jx_mean == 0.0 {
        return 0.0;
    }
    data.jx_mean.abs() / data.jy_var.sqrt()
}

/// Outcome of checking `(ΔJ_Y)² ≥ |⟨J_X⟩|²/δ₀²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadCheck {
    pub passed: bool,
    /// `(ΔJ_Y)² − |⟨J_X⟩|²/δ₀²`; `−∞` when `δ₀ = 0` but `⟨J_X⟩ ≠ 0`.
    pub margin: f64,
    /// `δ₀ = 0` together with a nonzero mean spin, which no state allows.
    pub contradiction: bool,
}

/// Checks the spread inequality on a state with claimed spread `delta0`
/// (in units of `j_z`).
pub fn mixed_state_bound_check<S: TwoModeState + ?Sized>(state: &S, delta0: f64) -> Result<SpreadCheck> {
    if !(delta0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("spread must be ≥ 0 (got {delta0})")));
    }
    let m = state.schwinger_moments(&[]);
    let jx2 = m.jx * m.jx;
    if delta0 == 0.0 {
        let contradiction = jx2 > 1e-24;
        let margin = if contradiction { f64::NEG_INFINITY } else { m.jy_var() };
        return Ok(SpreadCheck { passed: !contradiction, margin, contradiction });
    }
    let margin = m.jy_var() - jx2 / (delta0 * delta0);
    Ok(SpreadCheck { passed: margin >= -crate::DERIVED_TOL, margin, contradiction: false })
}

/// One verified step of the two-atom inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub statement: String,
    pub holds: bool,
    /// Signed distance from failure; positive when the step holds.
    pub margin: f64,
}

/// Inference of a two-atom coherence in the rotated modes
/// `c = (a+b)/√2`, `d = e^{−iπ/4}(a−b)/√2` from spin data with squeezed `J_z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceReport {
    /// `ΔJ_min / (√⟨N⟩/2)` for the less noisy transverse component.
    pub xi: Option<f64>,
    /// Which component `xi` refers to: `"y"` or `"z"`.
    pub squeezed_axis: String,
    /// `√⟨N⟩ / xi`.
    pub min_order: Option<f64>,
    /// Whether `|⟨c†²d²⟩| ≠ 0` is established.
    pub certified: bool,
    /// Lower bound `|⟨J_y²⟩ − ⟨J_z²⟩|` on `|⟨c†²d²⟩|`.
    pub rotated_moment_lower_bound: f64,
    pub chain: Vec<ChainStep>,
}

/// Tolerance on first moments, as a multiple of `√⟨N⟩`.
pub const DEFAULT_MEAN_TOLERANCE: f64 = 0.05;

/// Runs the chain: `⟨J_y⟩ ∼ 0`, `⟨J_z⟩ ∼ 0`, `⟨J_z²⟩ < N/4 < ⟨J_y²⟩`, hence
/// `⟨J_y²⟩ − ⟨J_z²⟩ ≠ 0`, hence `|⟨c†²d²⟩| ≥ |⟨J_y²⟩ − ⟨J_z²⟩| > 0`.
pub fn infer_two_atom_coherence(data: &SqueezeData, mean_tolerance: f64) -> Result<InferenceReport> {
    if !(mean_tolerance >= 0.0) {
        return Err(Error::InvalidParameter(format!("mean tolerance must be ≥ 0 (got {mean_tolerance})")));
    }
    let n = data.mean_n;
    let allowed = mean_tolerance * n.sqrt();
    let quarter = n / 4.0;
    let (jy2, jz2) = (data.jy2(), data.jz2());
    let step = |statement: &str, margin: f64| ChainStep { statement: statement.into(), holds: margin > 0.0, margin };

    let mut chain = vec![
        ChainStep {
            statement: "|<Jy>| <= tol*sqrt(N)".into(),
            holds: data.jy_mean.abs() <= allowed,
            margin: allowed - data.jy_mean.abs(),
        },
        ChainStep {
            statement: "|<Jz>| <= tol*sqrt(N)".into(),
            holds: data.jz_mean.abs() <= allowed,
            margin: allowed - data.jz_mean.abs(),
        },
        step("<Jz^2> < N/4", quarter - jz2),
        step("N/4 < <Jy^2>", jy2 - quarter),
    ];
    let ordered = chain.iter().all(|s| s.holds);
    let difference = jy2 - jz2;
    chain.push(ChainStep {
        statement: "<Jy^2> - <Jz^2> != 0".into(),
        holds: ordered && difference != 0.0,
        margin: difference.abs(),
    });
    chain.push(ChainStep {
        statement: "|<c+^2 d^2>| >= |<Jy^2> - <Jz^2>| > 0".into(),
        holds: ordered && difference != 0.0,
        margin: difference.abs(),
    });
    let certified = chain.iter().all(|s| s.holds);

    let (var, axis) = if data.jz_var <= data.jy_var { (data.jz_var, "z") } else { (data.jy_var, "y") };
    let xi = (n > 0.0).then(|| var.sqrt() / (n.sqrt() / 2.0));
    let min_order = xi.filter(|&x| x > 0.0).map(|x| n.sqrt() / x);
    Ok(InferenceReport {
        xi,
        squeezed_axis: axis.into(),
        min_order,
        certified,
        rotated_moment_lower_bound: if certified { difference.abs() } else { 0.0 },
        chain,
    })
}

/// `⟨c†²d²⟩ = −⟨{J_z, J_y}⟩ + i(⟨J_y²⟩ − ⟨J_z²⟩)` for the rotated modes, from
/// spin moments of the original modes.
pub fn rotated_second_moment<S: TwoModeState + ?Sized>(state: &S) -> Complex64 {
    use crate::fock::sector::{j_theta, jz};
    let half_pi = std::f64::consts::FRAC_PI_2;
    let anti = state
        .sector_expectation(&|n, v| {
            let zy = jz(n, &j_theta(n, half_pi, v));
            let yz = j_theta(n, half_pi, &jz(n, v));
            zy.into_iter().zip(yz).map(|(a, b)| a + b).collect()
        })
        .re;
    let m = state.schwinger_moments(&[]);
    Complex64::new(-anti, m.jy2 - m.jz2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_binomial_splitter, make_coherent_spin, make_noon};

    #[test]
    fn coherent_spin_is_unsqueezed() {
        let data = SqueezeData::from_moments(&make_coherent_spin(100).unwrap().schwinger_moments(&[]));
        for mode in [SqueezeNormalization::JxNormalized, SqueezeNormalization::NNormalized] {
            let xi = squeeze_parameter(&data, mode).unwrap();
            assert!((xi.xi - 1.0).abs() < 1e-10);
            assert_eq!(xi.normalization, mode);
        }
    }

    #[test]
    fn squeezed_example() {
        let n = 64.0;
        let data = SqueezeData::new(n, n / 2.0, 0.0, 0.0, n / 16.0, 4.0).unwrap();
        let xi = squeeze_parameter(&data, SqueezeNormalization::JxNormalized).unwrap();
        assert!((xi.xi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noon_is_inapplicable() {
        let data = SqueezeData::from_moments(&make_noon(4, 0.0).unwrap().schwinger_moments(&[]));
        assert!(matches!(squeeze_parameter(&data, SqueezeNormalization::NNormalized), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn bound_arithmetic() {
        let b = coherence_bound(0.5, 100.0).unwrap();
        assert_eq!(b.min_order, 20.0);
        assert!(b.certified);
        assert!(coherence_bound(0.999, 100.0).unwrap().min_order > 10.0);
        assert!(!coherence_bound(1.0, 100.0).unwrap().certified);
        assert!(coherence_bound(0.0, 100.0).is_err());
        assert!(coherence_bound(-1.0, 100.0).is_err());
    }

    #[test]
    fn spread_check_binomial() {
        let s = make_binomial_splitter(4).unwrap();
        let m = s.schwinger_moments(&[]);
        assert!((m.jx - 2.0).abs() < 1e-12 && (m.jy_var() - 1.0).abs() < 1e-12);
        let check = mixed_state_bound_check(&s, 4.0).unwrap();
        assert!(check.passed);
        assert!((check.margin - 0.75).abs() < 1e-12);
        let bad = mixed_state_bound_check(&s, 0.0).unwrap();
        assert!(bad.contradiction && !bad.passed);
    }

    #[test]
    fn inference_examples() {
        let n = 100.0;
        let data = SqueezeData::new(n, 40.0, 0.0, 0.0, 3.0 * n / 4.0, 0.2 * n / 4.0).unwrap();
        let report = infer_two_atom_coherence(&data, DEFAULT_MEAN_TOLERANCE).unwrap();
        assert!(report.certified);
        assert_eq!(report.squeezed_axis, "z");
        assert!((report.rotated_moment_lower_bound - (0.75 - 0.05) * n).abs() < 1e-9);

        let data = SqueezeData::new(n, 50.0, 0.0, 0.0, n / 4.0, n / 4.0).unwrap();
        let report = infer_two_atom_coherence(&data, DEFAULT_MEAN_TOLERANCE).unwrap();
        assert!(!report.certified);
        assert_eq!(report.rotated_moment_lower_bound, 0.0);

        let data = SqueezeData::new(n, 40.0, 3.0, 0.0, 3.0 * n / 4.0, 0.2 * n / 4.0).unwrap();
        assert!(!infer_two_atom_coherence(&data, DEFAULT_MEAN_TOLERANCE).unwrap().certified);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(SqueezeData::new(10.0, 1.0, 0.0, 0.0, -1.0, 1.0).is_err());
        assert!(SqueezeData::new(f64::NAN, 1.0, 0.0, 0.0, 1.0, 1.0).is_err());
    }
}
