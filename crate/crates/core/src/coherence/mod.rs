//! Coherence quantifiers: the order-n coherence spectrum, the catness
//! fidelity `C_n`, the measurable bound `c_n = 𝒩 |⟨a†ⁿbⁿ⟩| / S` and the
//! finite-probability correction to it.
//!
//! An order-n coherence element is `⟨n′, m′+n| ρ |n′+n, m′⟩`: it links two
//! number states of equal total number whose `n_a − n_b` differ by `2n`.
//! `C_n = 𝒩 Σ |element|` and, since every term of
//! `⟨a†ⁿbⁿ⟩ = Σ element · √((m′+n)!/m′!) √((n′+n)!/n′!)` carries a weight at
//! most `S`, `c_n ≤ C_n` always holds.
//!
//! `𝒩` is the pure-state normalization `𝒩_{n,N}` from [`normalization`]; for
//! a density matrix with several total numbers the largest supported total
//! number is used. With `𝒩 = 2` the bound reads `2|⟨a†ⁿbⁿ⟩|/S`.

mod normalization;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::{FixedNState, OperatorMonomial, TwoModeDensityMatrix, TwoModeState};
use crate::special::ln_falling;
use crate::{Error, Result};

pub use normalization::{max_coherence_sum, maximize_coherence_sum, normalization, OracleOutcome, OracleSettings};

/// Population above which an occupation pair counts as supported when
/// computing `S`.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-9;

/// Elements smaller than this are left out of the listed spectrum.
pub const ELEMENT_THRESHOLD: f64 = 1e-12;

/// One order-n coherence `⟨n′, m′+n| ρ |n′+n, m′⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceElement {
    pub order: usize,
    /// `n′`
    pub left_index: usize,
    /// `m′`
    pub right_index: usize,
    /// `j_c = n′ − m′`
    pub offset: i64,
    /// `2 |element|`
    pub magnitude: f64,
}

impl CoherenceElement {
    fn new(order: usize, left_index: usize, right_index: usize, value: Complex64) -> Self {
        Self {
            order,
            left_index,
            right_index,
            offset: left_index as i64 - right_index as i64,
            magnitude: 2.0 * value.norm(),
        }
    }
}

/// `ln(√((m′+n)!/m′!) √((n′+n)!/n′!))`, the weight of a pair in `⟨a†ⁿbⁿ⟩`.
pub fn ln_pair_weight(order: usize, left_index: usize, right_index: usize) -> f64 {
    0.5 * (ln_falling(right_index + order, order) + ln_falling(left_index + order, order))
}

/// Every order-n element of a pure state as `(n′, m′, value)`.
fn pure_elements(state: &FixedNState, order: usize) -> Vec<(usize, usize, Complex64)> {
    let total = state.total_number();
    if order == 0 || order > total {
        return Vec::new();
    }
    // Row |n′, m′+n⟩ has b-index m′+n, column |n′+n, m′⟩ has b-index m′.
    (0..=total - order)
        .map(|m| (total - order - m, m, state.amplitude(m + order) * state.amplitude(m).conj()))
        .collect()
}

fn mixed_elements(rho: &TwoModeDensityMatrix, order: usize) -> Vec<(usize, usize, Complex64)> {
    if order == 0 {
        return Vec::new();
    }
    rho.iter()
        .filter(|&((ra, rb), (ca, cb), _)| ca == ra + order && rb == cb + order)
        .map(|((ra, _), (_, cb), v)| (ra, cb, v))
        .collect()
}

fn listed(order: usize, elements: &[(usize, usize, Complex64)]) -> Vec<CoherenceElement> {
    elements
        .iter()
        .filter(|(_, _, v)| v.norm() > ELEMENT_THRESHOLD)
        .map(|&(l, r, v)| CoherenceElement::new(order, l, r, v))
        .collect()
}

/// Order-n coherence elements of `rho` above [`ELEMENT_THRESHOLD`]. An empty
/// list means no order-n coherence is resolvable at the cutoff.
pub fn coherence_spectrum(rho: &TwoModeDensityMatrix, order: usize) -> Result<Vec<CoherenceElement>> {
    if order == 0 {
        return Err(Error::InvalidParameter("coherence order must be ≥ 1".into()));
    }
    Ok(listed(order, &mixed_elements(rho, order)))
}

/// [`coherence_spectrum`] of a pure fixed-N state, without forming `ρ`.
pub fn coherence_spectrum_pure(state: &FixedNState, order: usize) -> Result<Vec<CoherenceElement>> {
    if order == 0 {
        return Err(Error::InvalidParameter("coherence order must be ≥ 1".into()));
    }
    Ok(listed(order, &pure_elements(state, order)))
}

/// The factor `S` together with the pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SFactor {
    pub ln_s: f64,
    /// `exp(ln_s)`; infinite once `S` overflows `f64`.
    pub s: f64,
    /// `n′` of the maximizing pair.
    pub left_index: usize,
    /// `m′` of the maximizing pair.
    pub right_index: usize,
}

/// A supported pair `(n′, m′)` and its log weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairWeight {
    pub left_index: usize,
    pub right_index: usize,
    pub ln_weight: f64,
}

fn s_from_pairs(pairs: &[PairWeight]) -> Result<SFactor> {
    pairs
        .iter()
        .fold(None::<&PairWeight>, |best, p| match best {
            Some(b) if b.ln_weight >= p.ln_weight => Some(b),
            _ => Some(p),
        })
        .map(|p| SFactor {
            ln_s: p.ln_weight,
            s: p.ln_weight.exp(),
            left_index: p.left_index,
            right_index: p.right_index,
        })
        .ok_or_else(|| Error::EmptySupport("no pair of supported states is linked at this order".into()))
}

/// Pairs `(n′, m′)` entering `S` for a pure state: both linked states have
/// probability above `threshold`, or the element linking them is nonzero.
pub fn supported_pairs_pure(state: &FixedNState, order: usize, threshold: f64) -> Vec<PairWeight> {
    pure_elements(state, order)
        .into_iter()
        .filter(|&(_, m, v)| {
            v.norm() > 0.0 || (state.probability(m) > threshold && state.probability(m + order) > threshold)
        })
        .map(|(l, r, _)| PairWeight { left_index: l, right_index: r, ln_weight: ln_pair_weight(order, l, r) })
        .collect()
}

/// Pairs `(n′, m′)` entering `S` for a density matrix, by the same rule as
/// [`supported_pairs_pure`].
pub fn supported_pairs(rho: &TwoModeDensityMatrix, order: usize, threshold: f64) -> Vec<PairWeight> {
    let mut pairs: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for (l, r, v) in mixed_elements(rho, order) {
        if v.norm() > 0.0 {
            pairs.insert((l, r), ());
        }
    }
    let supported = rho.support(threshold);
    for &(na, nb) in &supported {
        // (na, nb) as the row |n′, m′+n⟩; the column |n′+n, m′⟩ must be supported too.
        if nb >= order && rho.population(na + order, nb - order) > threshold {
            pairs.insert((na, nb - order), ());
        }
    }
    pairs
        .into_keys()
        .map(|(l, r)| PairWeight { left_index: l, right_index: r, ln_weight: ln_pair_weight(order, l, r) })
        .collect()
}

/// `S` for a fixed-N support given as b-indices `m`; the pair `(m, m+n)`
/// carries weight `B_m = √((m+n)!/m!) √((N−m)!/(N−m−n)!)`.
pub fn s_factor_fixed(total: usize, order: usize, support: &[usize]) -> Result<SFactor> {
    if order == 0 || order > total {
        return Err(Error::InvalidParameter(format!("order {order} outside 1..={total}")));
    }
    let set: std::collections::BTreeSet<usize> = support.iter().copied().filter(|&m| m <= total).collect();
    let pairs: Vec<PairWeight> = set
        .iter()
        .filter(|&&m| m + order <= total && set.contains(&(m + order)))
        .map(|&m| {
            let left = total - order - m;
            PairWeight { left_index: left, right_index: m, ln_weight: ln_pair_weight(order, left, m) }
        })
        .collect();
    s_from_pairs(&pairs)
}

/// `S` for a density matrix with joint-pair support.
pub fn s_factor(rho: &TwoModeDensityMatrix, order: usize, threshold: f64) -> Result<SFactor> {
    if order == 0 {
        return Err(Error::InvalidParameter("coherence order must be ≥ 1".into()));
    }
    s_from_pairs(&supported_pairs(rho, order, threshold))
}

/// `C_n` and `c_n` at one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Catness {
    pub order: usize,
    /// `C_n = 𝒩 Σ |element|`
    pub fidelity: f64,
    /// `c_n = 𝒩 |⟨a†ⁿbⁿ⟩| / S`
    pub bound: f64,
    /// `𝒩` used for both; `None` when the order exceeds every supported total number.
    pub norm: Option<f64>,
    pub s: Option<SFactor>,
}

impl Catness {
    fn zero(order: usize, norm: Option<f64>) -> Self {
        Self { order, fidelity: 0.0, bound: 0.0, norm, s: None }
    }
}

fn assemble(
    order: usize,
    total_for_norm: Option<usize>,
    elements: &[(usize, usize, Complex64)],
    pairs: &[PairWeight],
    scaled_moment: impl FnOnce(f64) -> Result<Complex64>,
) -> Result<Catness> {
    let norm = match total_for_norm {
        Some(t) if order >= 1 && order <= t => normalization(t, order)?,
        _ => return Ok(Catness::zero(order, None)),
    };
    let Ok(s) = s_from_pairs(pairs) else {
        return Ok(Catness::zero(order, Some(norm)));
    };
    let fidelity = norm * elements.iter().map(|(_, _, v)| v.norm()).sum::<f64>();
    let bound = norm * scaled_moment(s.ln_s)?.norm();
    Ok(Catness { order, fidelity, bound, norm: Some(norm), s: Some(s) })
}

/// `C_n` and `c_n` of a pure fixed-N state, with `𝒩 = 𝒩_{n,N}`.
pub fn catness_fidelity(state: &FixedNState, order: usize, threshold: f64) -> Result<Catness> {
    if order == 0 {
        return Err(Error::InvalidParameter("coherence order must be ≥ 1".into()));
    }
    let elements = pure_elements(state, order);
    let pairs = supported_pairs_pure(state, order, threshold);
    assemble(order, Some(state.total_number()), &elements, &pairs, |ln_s| {
        Ok(state.scaled_moment(OperatorMonomial::correlation(order), ln_s))
    })
}

/// Largest total number among states that are supported or carry a nonzero
/// coherence.
fn largest_total_number(rho: &TwoModeDensityMatrix, threshold: f64) -> Option<usize> {
    rho.iter()
        .filter(|&(r, c, v)| if r == c { v.re > threshold } else { r.0 + r.1 == c.0 + c.1 && v.norm() > 0.0 })
        .map(|(r, _, _)| r.0 + r.1)
        .max()
}

/// `C_n` and `c_n` of a density matrix, with `𝒩` taken at the largest
/// supported total number.
pub fn catness_fidelity_mixed(rho: &TwoModeDensityMatrix, order: usize, threshold: f64) -> Result<Catness> {
    if order == 0 {
        return Err(Error::InvalidParameter("coherence order must be ≥ 1".into()));
    }
    let elements = mixed_elements(rho, order);
    let pairs = supported_pairs(rho, order, threshold);
    let total = largest_total_number(rho, threshold);
    if total.is_some_and(|t| order > t) {
        return Ok(Catness::zero(order, None));
    }
    assemble(order, total, &elements, &pairs, |ln_s| rho.scaled_moment(OperatorMonomial::correlation(order), ln_s))
}

/// Lower bound on `C_n` from a measured moment when states above `n_up`
/// quanta per mode carry total probability at most `epsilon`:
/// `max(0, (|moment| − (ε/2)(N_up + n)ⁿ) / S)`.
///
/// Multiply by `𝒩/2` to express it in the `𝒩` convention of [`Catness`].
pub fn corrected_lower_bound(moment: Complex64, epsilon: f64, n_up: usize, order: usize, s: f64) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be ≥ 0 (got {epsilon})")));
    }
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("S must be positive (got {s})")));
    }
    let correction = 0.5 * epsilon * ((n_up + order) as f64).powi(order as i32);
    Ok(((moment.norm() - correction) / s).max(0.0))
}

/// Per-order entry of a [`CoherenceReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub order: usize,
    pub elements: Vec<CoherenceElement>,
    pub fidelity: f64,
    pub bound: f64,
    pub norm: Option<f64>,
    pub moment_re: f64,
    pub moment_im: f64,
    pub s: Option<SFactor>,
    /// Pairs entering `S`, with their log weights `ln B`.
    pub pair_weights: Vec<PairWeight>,
}

/// Coherence spectrum, `C_n`, `c_n`, `𝒩` and `S` over a range of orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub orders: Vec<OrderReport>,
    /// Largest order with an element above [`ELEMENT_THRESHOLD`].
    pub delta: usize,
    pub support_threshold: f64,
    /// How pairs enter `S`: both states supported, or linked by a nonzero element.
    pub support_rule: String,
}

const SUPPORT_RULE: &str = "joint_pair";

fn delta_from(max_order: usize, elements_at: impl Fn(usize) -> Vec<(usize, usize, Complex64)>) -> usize {
    (1..=max_order).rev().find(|&n| elements_at(n).iter().any(|(_, _, v)| v.norm() > ELEMENT_THRESHOLD)).unwrap_or(0)
}

impl CoherenceReport {
    /// Report for a pure fixed-N state at the given orders.
    pub fn pure(state: &FixedNState, orders: &[usize], threshold: f64) -> Result<Self> {
        let rows = orders
            .iter()
            .map(|&n| {
                let cat = catness_fidelity(state, n, threshold)?;
                let moment = state.moment(OperatorMonomial::correlation(n))?;
                Ok(OrderReport {
                    order: n,
                    elements: coherence_spectrum_pure(state, n)?,
                    fidelity: cat.fidelity,
                    bound: cat.bound,
                    norm: cat.norm,
                    moment_re: moment.re,
                    moment_im: moment.im,
                    s: cat.s,
                    pair_weights: supported_pairs_pure(state, n, threshold),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let delta = delta_from(state.total_number(), |n| pure_elements(state, n));
        Ok(Self { orders: rows, delta, support_threshold: threshold, support_rule: SUPPORT_RULE.into() })
    }

    /// Report for a density matrix at the given orders. Orders above the
    /// cutoff report zero coherence.
    pub fn mixed(rho: &TwoModeDensityMatrix, orders: &[usize], threshold: f64) -> Result<Self> {
        let rows = orders
            .iter()
            .map(|&n| {
                let cat = catness_fidelity_mixed(rho, n, threshold)?;
                let moment = if n <= rho.cutoff() {
                    rho.moment(OperatorMonomial::correlation(n))?
                } else {
                    Complex64::new(0.0, 0.0)
                };
                Ok(OrderReport {
                    order: n,
                    elements: coherence_spectrum(rho, n)?,
                    fidelity: cat.fidelity,
                    bound: cat.bound,
                    norm: cat.norm,
                    moment_re: moment.re,
                    moment_im: moment.im,
                    s: cat.s,
                    pair_weights: supported_pairs(rho, n, threshold),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let delta = delta_from(rho.cutoff(), |n| mixed_elements(rho, n));
        Ok(Self { orders: rows, delta, support_threshold: threshold, support_rule: SUPPORT_RULE.into() })
    }

    /// CSV header matching [`CoherenceReport::csv_rows`].
    pub const CSV_HEADER: [&'static str; 6] = ["n", "C_n", "c_n", "norm", "S", "delta"];

    /// One row per order: `n, C_n, c_n, norm, S, delta`. Missing `𝒩` or `S`
    /// are reported as NaN.
    pub fn csv_rows(&self) -> Vec<[f64; 6]> {
        self.orders
            .iter()
            .map(|o| {
                [
                    o.order as f64,
                    o.fidelity,
                    o.bound,
                    o.norm.unwrap_or(f64::NAN),
                    o.s.map_or(f64::NAN, |s| s.s),
                    self.delta as f64,
                ]
            })
            .collect()
    }
}
