//! Two-mode Fock-space algebra: fixed-N pure states, truncated density
//! matrices, normally ordered moments and Schwinger spin moments.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::ln_falling;
use crate::{Error, Result, DERIVED_TOL, NORM_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Normally ordered product `(a†)ᵖ (b†)ᑫ aʳ bˢ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorMonomial {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
}

impl OperatorMonomial {
    pub const fn new(p: usize, q: usize, r: usize, s: usize) -> Self {
        Self { p, q, r, s }
    }

    /// `a†ⁿ bⁿ`, the n-th order correlation.
    pub const fn correlation(n: usize) -> Self {
        Self::new(n, 0, 0, n)
    }

    pub const fn adjoint(self) -> Self {
        Self::new(self.r, self.s, self.p, self.q)
    }

    /// Whether the monomial can have a nonzero value on a fixed-N state.
    pub const fn conserves_number(self) -> bool {
        self.p + self.q == self.r + self.s
    }

    /// `ln` of the matrix element taking `|na, nb⟩` to
    /// `|na − r + p, nb − s + q⟩`, or `None` when the lowering part
    /// annihilates the state.
    fn ln_element(self, na: usize, nb: usize) -> Option<f64> {
        if na < self.r || nb < self.s {
            return None;
        }
        let (la, lb) = (na - self.r, nb - self.s);
        Some(
            0.5 * (ln_falling(na, self.r)
                + ln_falling(nb, self.s)
                + ln_falling(la + self.p, self.p)
                + ln_falling(lb + self.q, self.q)),
        )
    }
}

/// Pure state `Σ_m d_m |N−m⟩_a |m⟩_b` with fixed total number N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFixedNState", into = "RawFixedNState")]
pub struct FixedNState {
    total_number: usize,
    amplitudes: Vec<Complex64>,
}

impl FixedNState {
    /// Wraps amplitudes that are already normalized to within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("a fixed-N state needs N+1 ≥ 1 amplitudes".into()));
        }
        if amplitudes.iter().any(|d| !d.re.is_finite() || !d.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm: f64 = amplitudes.iter().map(|d| d.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm is {norm}, expected 1")));
        }
        Ok(Self { total_number: amplitudes.len() - 1, amplitudes })
    }

    /// Rescales arbitrary (nonzero) amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|d| d.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("amplitudes have zero or non-finite norm".into()));
        }
        amplitudes.iter_mut().for_each(|d| *d /= norm);
        Self::new(amplitudes)
    }

    /// The number state `|N−m⟩_a |m⟩_b`.
    pub fn basis(total_number: usize, m: usize) -> Result<Self> {
        if m > total_number {
            return Err(Error::InvalidParameter(format!("index {m} exceeds N = {total_number}")));
        }
        let mut amplitudes = vec![ZERO; total_number + 1];
        amplitudes[m] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    pub fn total_number(&self) -> usize {
        self.total_number
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, m: usize) -> Complex64 {
        self.amplitudes.get(m).copied().unwrap_or(ZERO)
    }

    pub fn probability(&self, m: usize) -> f64 {
        self.amplitude(m).norm_sqr()
    }

    /// Indices `m` whose probability exceeds `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..=self.total_number).filter(|&m| self.probability(m) > threshold).collect()
    }

    /// Spread δ = max |j_k − j_k'| over supported number states; for fixed N
    /// this is the largest index distance in the support.
    pub fn spread(&self, threshold: f64) -> f64 {
        let support = self.support(threshold);
        match (support.first(), support.last()) {
            (Some(lo), Some(hi)) => (hi - lo) as f64,
            _ => 0.0,
        }
    }

    /// Inner product `⟨self|other⟩`.
    pub fn overlap(&self, other: &FixedNState) -> Result<Complex64> {
        if self.total_number != other.total_number {
            return Err(Error::DimensionMismatch { expected: self.total_number + 1, actual: other.total_number + 1 });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(x, y)| x.conj() * y).sum())
    }

    /// Moment rescaled by `exp(−ln_scale)`, so that large-N correlations can be
    /// divided by equally large factors without overflowing.
    pub fn scaled_moment(&self, mono: OperatorMonomial, ln_scale: f64) -> Complex64 {
        if !mono.conserves_number() {
            return ZERO;
        }
        let n = self.total_number;
        let mut acc = ZERO;
        for (m, &d) in self.amplitudes.iter().enumerate() {
            if d == ZERO {
                continue;
            }
            let Some(ln_el) = mono.ln_element(n - m, m) else { continue };
            // Target index counts b quanta after the monomial acts.
            let target = m - mono.s + mono.q;
            let bra = self.amplitudes[target];
            if bra == ZERO {
                continue;
            }
            acc += bra.conj() * d * (ln_el - ln_scale).exp();
        }
        acc
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixedNState {
    total_number: usize,
    amplitudes_re: Vec<f64>,
    amplitudes_im: Vec<f64>,
}

impl TryFrom<RawFixedNState> for FixedNState {
    type Error = Error;

    fn try_from(raw: RawFixedNState) -> Result<Self> {
        let expected = raw.total_number + 1;
        for len in [raw.amplitudes_re.len(), raw.amplitudes_im.len()] {
            if len != expected {
                return Err(Error::DimensionMismatch { expected, actual: len });
            }
        }
        let amplitudes =
            raw.amplitudes_re.into_iter().zip(raw.amplitudes_im).map(|(re, im)| Complex64::new(re, im)).collect();
        FixedNState::new(amplitudes)
    }
}

impl From<FixedNState> for RawFixedNState {
    fn from(state: FixedNState) -> Self {
        Self {
            total_number: state.total_number,
            amplitudes_re: state.amplitudes.iter().map(|d| d.re).collect(),
            amplitudes_im: state.amplitudes.iter().map(|d| d.im).collect(),
        }
    }
}

/// Density matrix on the truncated space `0 ≤ n_a, n_b ≤ cutoff`.
///
/// Basis index of `|n_a, n_b⟩` is `n_a·(cutoff+1) + n_b`. Only nonzero entries
/// are stored; the ordered map keeps every reduction deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensityMatrix", into = "RawDensityMatrix")]
pub struct TwoModeDensityMatrix {
    cutoff: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl TwoModeDensityMatrix {
    /// Validates and wraps a sparse set of entries.
    pub fn from_entries(cutoff: usize, entries: BTreeMap<(usize, usize), Complex64>) -> Result<Self> {
        let dim = (cutoff + 1) * (cutoff + 1);
        if let Some(&(i, j)) = entries.keys().find(|&&(i, j)| i >= dim || j >= dim) {
            return Err(Error::InvalidState(format!("entry ({i}, {j}) outside dimension {dim}")));
        }
        let rho = Self { cutoff, entries: entries.into_iter().filter(|(_, v)| *v != ZERO).collect() };
        rho.validate()?;
        Ok(rho)
    }

    pub fn from_dense(cutoff: usize, matrix: &DMatrix<Complex64>) -> Result<Self> {
        let dim = (cutoff + 1) * (cutoff + 1);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: matrix.nrows().max(matrix.ncols()) });
        }
        let mut entries = BTreeMap::new();
        for j in 0..dim {
            for i in 0..dim {
                let v = matrix[(i, j)];
                if v != ZERO {
                    entries.insert((i, j), v);
                }
            }
        }
        Self::from_entries(cutoff, entries)
    }

    /// Incoherent mixture `Σ p_k |n_a, n_b⟩⟨n_a, n_b|`.
    pub fn diagonal_mixture(cutoff: usize, weights: &[((usize, usize), f64)]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for &((na, nb), p) in weights {
            if na > cutoff || nb > cutoff {
                return Err(Error::Truncation { required: na.max(nb), cutoff });
            }
            let idx = na * (cutoff + 1) + nb;
            *entries.entry((idx, idx)).or_insert(ZERO) += Complex64::new(p, 0.0);
        }
        Self::from_entries(cutoff, entries)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    pub fn index(&self, na: usize, nb: usize) -> usize {
        na * (self.cutoff + 1) + nb
    }

    pub fn occupations(&self, index: usize) -> (usize, usize) {
        (index / (self.cutoff + 1), index % (self.cutoff + 1))
    }

    /// `⟨na, nb| ρ |ma, mb⟩`.
    pub fn entry(&self, row: (usize, usize), col: (usize, usize)) -> Complex64 {
        if row.0 > self.cutoff || row.1 > self.cutoff || col.0 > self.cutoff || col.1 > self.cutoff {
            return ZERO;
        }
        let key = (self.index(row.0, row.1), self.index(col.0, col.1));
        self.entries.get(&key).copied().unwrap_or(ZERO)
    }

    /// Probability of `|na, nb⟩`.
    pub fn population(&self, na: usize, nb: usize) -> f64 {
        self.entry((na, nb), (na, nb)).re
    }

    /// Nonzero entries as `((row occupations), (column occupations), value)`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), (usize, usize), Complex64)> + '_ {
        self.entries.iter().map(|(&(i, j), &v)| (self.occupations(i), self.occupations(j), v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> f64 {
        self.entries.iter().filter(|((i, j), _)| i == j).map(|(_, v)| v.re).sum()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (&(i, j), &v) in &self.entries {
            m[(i, j)] = v;
        }
        m
    }

    /// Supported occupation pairs (population above `threshold`).
    pub fn support(&self, threshold: f64) -> Vec<(usize, usize)> {
        self.entries
            .iter()
            .filter(|((i, j), v)| i == j && v.re > threshold)
            .map(|(&(i, _), _)| self.occupations(i))
            .collect()
    }

    /// Spread δ of the supported `j_z = (n_a − n_b)/2` values.
    pub fn spread(&self, threshold: f64) -> f64 {
        let jz: Vec<i64> = self.support(threshold).iter().map(|&(a, b)| a as i64 - b as i64).collect();
        match (jz.iter().min(), jz.iter().max()) {
            (Some(lo), Some(hi)) => (hi - lo) as f64 / 2.0,
            _ => 0.0,
        }
    }

    /// Largest total number `n_a + n_b` among supported states.
    pub fn max_total_number(&self, threshold: f64) -> Option<usize> {
        self.support(threshold).iter().map(|&(a, b)| a + b).max()
    }

    /// If every supported state has the same total number, returns it.
    pub fn fixed_total_number(&self, threshold: f64) -> Option<usize> {
        let support = self.support(threshold);
        let first = support.first().map(|&(a, b)| a + b)?;
        support.iter().all(|&(a, b)| a + b == first).then_some(first)
    }

    /// Moment rescaled by `exp(−ln_scale)`; see [`FixedNState::scaled_moment`].
    pub fn scaled_moment(&self, mono: OperatorMonomial, ln_scale: f64) -> Result<Complex64> {
        self.check_monomial(mono)?;
        let mut acc = ZERO;
        for (&(i, j), &v) in &self.entries {
            let (ra, rb) = self.occupations(i);
            let Some(ln_el) = mono.ln_element(ra, rb) else { continue };
            let (ca, cb) = (ra - mono.r + mono.p, rb - mono.s + mono.q);
            if ca > self.cutoff || cb > self.cutoff || self.index(ca, cb) != j {
                continue;
            }
            acc += v * (ln_el - ln_scale).exp();
        }
        Ok(acc)
    }

    fn check_monomial(&self, mono: OperatorMonomial) -> Result<()> {
        let required = mono.p.max(mono.r).max(mono.q).max(mono.s);
        if required > self.cutoff {
            return Err(Error::Truncation { required, cutoff: self.cutoff });
        }
        Ok(())
    }

    /// Diagonal block with fixed total number `n`, indexed by the b occupation.
    /// Occupations beyond the cutoff carry zero weight.
    fn sector_block(&self, n: usize) -> DMatrix<Complex64> {
        let mut block = DMatrix::zeros(n + 1, n + 1);
        for (&(i, j), &v) in &self.entries {
            let (ra, rb) = self.occupations(i);
            let (ca, cb) = self.occupations(j);
            if ra + rb == n && ca + cb == n {
                block[(rb, cb)] = v;
            }
        }
        block
    }

    fn validate(&self) -> Result<()> {
        for (&(i, j), &v) in &self.entries {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidState(format!("non-finite entry at ({i}, {j})")));
            }
            let mirror = self.entries.get(&(j, i)).copied().unwrap_or(ZERO);
            if (v - mirror.conj()).norm() > NORM_TOL {
                return Err(Error::InvalidState(format!("not Hermitian at ({i}, {j})")));
            }
            if i == j {
                if v.im.abs() > NORM_TOL || v.re < -NORM_TOL {
                    return Err(Error::InvalidState(format!("diagonal entry {i} is {v}")));
                }
            } else {
                let pi = self.entries.get(&(i, i)).map_or(0.0, |d| d.re);
                let pj = self.entries.get(&(j, j)).map_or(0.0, |d| d.re);
                if v.norm_sqr() > pi * pj + DERIVED_TOL {
                    return Err(Error::InvalidState(format!("coherence ({i}, {j}) exceeds populations")));
                }
            }
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > DERIVED_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDensityMatrix {
    cutoff: usize,
    /// Row-major, `dim × dim` with `dim = (cutoff+1)²`.
    entries_re: Vec<f64>,
    entries_im: Vec<f64>,
}

impl TryFrom<RawDensityMatrix> for TwoModeDensityMatrix {
    type Error = Error;

    fn try_from(raw: RawDensityMatrix) -> Result<Self> {
        let dim = (raw.cutoff + 1) * (raw.cutoff + 1);
        for len in [raw.entries_re.len(), raw.entries_im.len()] {
            if len != dim * dim {
                return Err(Error::DimensionMismatch { expected: dim * dim, actual: len });
            }
        }
        let mut entries = BTreeMap::new();
        for (k, (&re, &im)) in raw.entries_re.iter().zip(&raw.entries_im).enumerate() {
            if re != 0.0 || im != 0.0 {
                entries.insert((k / dim, k % dim), Complex64::new(re, im));
            }
        }
        TwoModeDensityMatrix::from_entries(raw.cutoff, entries)
    }
}

impl From<TwoModeDensityMatrix> for RawDensityMatrix {
    fn from(rho: TwoModeDensityMatrix) -> Self {
        let dim = rho.dim();
        let mut entries_re = vec![0.0; dim * dim];
        let mut entries_im = vec![0.0; dim * dim];
        for (&(i, j), &v) in &rho.entries {
            entries_re[i * dim + j] = v.re;
            entries_im[i * dim + j] = v.im;
        }
        Self { cutoff: rho.cutoff, entries_re, entries_im }
    }
}

/// Second and third moments of the in-plane spin `J_θ = J_X cos θ + J_Y sin θ`
/// and of `G_θ = J_{θ+π/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularMoments {
    pub theta: f64,
    pub j2: f64,
    pub j3: f64,
    pub g2: f64,
    pub g3: f64,
}

/// Schwinger spin moments of a two-mode state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwingerMoments {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub ntot: f64,
    pub jx2: f64,
    pub jy2: f64,
    pub jz2: f64,
    /// `⟨{J_X, J_Y}⟩`.
    pub jxy_anticommutator: f64,
    /// One entry per requested angle, in request order.
    pub angular: Vec<AngularMoments>,
}

impl SchwingerMoments {
    pub fn jx_var(&self) -> f64 {
        self.jx2 - self.jx * self.jx
    }

    pub fn jy_var(&self) -> f64 {
        self.jy2 - self.jy * self.jy
    }

    pub fn jz_var(&self) -> f64 {
        self.jz2 - self.jz * self.jz
    }

    /// Angle-resolved moments for `theta`, if they were requested.
    pub fn at_angle(&self, theta: f64) -> Option<&AngularMoments> {
        self.angular.iter().find(|a| (a.theta - theta).abs() < 1e-12)
    }
}

/// Spin operators acting inside the sector of total number `n`, in the basis
/// `|n−m⟩_a|m⟩_b`.
pub(crate) mod sector {
    use super::{Complex64, ZERO};

    /// `J_θ v` with `J_θ = (e^{−iθ} a†b + e^{iθ} a b†)/2`.
    pub fn j_theta(n: usize, theta: f64, v: &[Complex64]) -> Vec<Complex64> {
        let lower = Complex64::from_polar(0.5, -theta); // a†b: m → m−1
        let upper = Complex64::from_polar(0.5, theta); // a b†: m → m+1
        let mut out = vec![ZERO; n + 1];
        for m in 0..=n {
            if v[m] == ZERO {
                continue;
            }
            if m > 0 {
                out[m - 1] += lower * (((n - m + 1) * m) as f64).sqrt() * v[m];
            }
            if m < n {
                out[m + 1] += upper * (((n - m) * (m + 1)) as f64).sqrt() * v[m];
            }
        }
        out
    }

    pub fn jz(n: usize, v: &[Complex64]) -> Vec<Complex64> {
        v.iter().enumerate().map(|(m, &x)| x * (0.5 * (n as f64 - 2.0 * m as f64))).collect()
    }

    pub fn dot(bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
        bra.iter().zip(ket).map(|(x, y)| x.conj() * y).sum()
    }
}

/// Operations shared by pure fixed-N states and density matrices.
pub trait TwoModeState {
    /// `Tr(ρ (a†)ᵖ(b†)ᑫ aʳ bˢ)`.
    fn moment(&self, mono: OperatorMonomial) -> Result<Complex64> {
        self.scaled_moment_checked(mono, 0.0)
    }

    #[doc(hidden)]
    fn scaled_moment_checked(&self, mono: OperatorMonomial, ln_scale: f64) -> Result<Complex64>;

    /// `Σ_N Tr(ρ_N O_N)` for a number-conserving operator given by its action
    /// inside each total-number sector.
    fn sector_expectation(&self, op: &dyn Fn(usize, &[Complex64]) -> Vec<Complex64>) -> Complex64;

    /// Distribution of `2j_z = n_a − n_b`.
    fn number_distribution(&self) -> BTreeMap<i64, f64>;

    fn to_density_matrix(&self) -> TwoModeDensityMatrix;

    /// First and second Schwinger moments plus angle-resolved moments of
    /// `J_θ` and `G_θ` for each requested angle.
    fn schwinger_moments(&self, angles: &[f64]) -> SchwingerMoments {
        use sector::{j_theta, jz};
        let half_pi = std::f64::consts::FRAC_PI_2;
        let e = |op: &dyn Fn(usize, &[Complex64]) -> Vec<Complex64>| self.sector_expectation(op).re;

        let ntot = e(&|n, v| v.iter().map(|&x| x * n as f64).collect());
        let jx = e(&|n, v| j_theta(n, 0.0, v));
        let jy = e(&|n, v| j_theta(n, half_pi, v));
        let jz_mean = e(&|n, v| jz(n, v));
        let jx2 = e(&|n, v| j_theta(n, 0.0, &j_theta(n, 0.0, v)));
        let jy2 = e(&|n, v| j_theta(n, half_pi, &j_theta(n, half_pi, v)));
        let jz2 = e(&|n, v| jz(n, &jz(n, v)));
        let jxy_anticommutator = e(&|n, v| {
            let xy = j_theta(n, 0.0, &j_theta(n, half_pi, v));
            let yx = j_theta(n, half_pi, &j_theta(n, 0.0, v));
            xy.into_iter().zip(yx).map(|(a, b)| a + b).collect()
        });
        let angular = angles
            .iter()
            .map(|&theta| {
                let power = |angle: f64, k: usize| e(&|n, v| (0..k).fold(v.to_vec(), |acc, _| j_theta(n, angle, &acc)));
                AngularMoments {
                    theta,
                    j2: power(theta, 2),
                    j3: power(theta, 3),
                    g2: power(theta + half_pi, 2),
                    g3: power(theta + half_pi, 3),
                }
            })
            .collect();
        SchwingerMoments { jx, jy, jz: jz_mean, ntot, jx2, jy2, jz2, jxy_anticommutator, angular }
    }
}

impl TwoModeState for FixedNState {
    fn scaled_moment_checked(&self, mono: OperatorMonomial, ln_scale: f64) -> Result<Complex64> {
        Ok(self.scaled_moment(mono, ln_scale))
    }

    fn sector_expectation(&self, op: &dyn Fn(usize, &[Complex64]) -> Vec<Complex64>) -> Complex64 {
        sector::dot(&self.amplitudes, &op(self.total_number, &self.amplitudes))
    }

    fn number_distribution(&self) -> BTreeMap<i64, f64> {
        let n = self.total_number as i64;
        self.amplitudes.iter().enumerate().map(|(m, d)| (n - 2 * m as i64, d.norm_sqr())).collect()
    }

    fn to_density_matrix(&self) -> TwoModeDensityMatrix {
        let n = self.total_number;
        let cutoff = n;
        let idx = |m: usize| (n - m) * (cutoff + 1) + m;
        let mut entries = BTreeMap::new();
        for (i, &x) in self.amplitudes.iter().enumerate() {
            for (j, &y) in self.amplitudes.iter().enumerate() {
                let v = x * y.conj();
                if v != ZERO {
                    entries.insert((idx(i), idx(j)), v);
                }
            }
        }
        TwoModeDensityMatrix { cutoff, entries }
    }
}

impl TwoModeState for TwoModeDensityMatrix {
    fn scaled_moment_checked(&self, mono: OperatorMonomial, ln_scale: f64) -> Result<Complex64> {
        self.scaled_moment(mono, ln_scale)
    }

    fn sector_expectation(&self, op: &dyn Fn(usize, &[Complex64]) -> Vec<Complex64>) -> Complex64 {
        let mut acc = ZERO;
        for n in 0..=2 * self.cutoff {
            let block = self.sector_block(n);
            if block.iter().all(|&v| v == ZERO) {
                continue;
            }
            // Tr(ρ O) = Σ_m Σ_k ρ_{mk} (O e_m)_k
            for m in 0..=n {
                let mut basis = vec![ZERO; n + 1];
                basis[m] = Complex64::new(1.0, 0.0);
                let column = op(n, &basis);
                for (k, &o) in column.iter().enumerate() {
                    acc += block[(m, k)] * o;
                }
            }
        }
        acc
    }

    fn number_distribution(&self) -> BTreeMap<i64, f64> {
        let mut dist = BTreeMap::new();
        for (&(i, j), &v) in &self.entries {
            if i == j {
                let (na, nb) = self.occupations(i);
                *dist.entry(na as i64 - nb as i64).or_insert(0.0) += v.re;
            }
        }
        dist
    }

    fn to_density_matrix(&self) -> TwoModeDensityMatrix {
        self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn noon(n: usize, phase: f64) -> FixedNState {
        let mut amps = vec![ZERO; n + 1];
        amps[0] = c(FRAC_1_SQRT_2);
        amps[n] += Complex64::from_polar(FRAC_1_SQRT_2, phase);
        FixedNState::new(amps).unwrap()
    }

    #[test]
    fn rejects_unnormalized_amplitudes() {
        assert!(FixedNState::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(FixedNState::new(vec![]).is_err());
        let s = FixedNState::normalized(vec![c(1.0), c(1.0)]).unwrap();
        assert!((s.probability(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn noon_correlation_moment() {
        let m = noon(2, 0.0).moment(OperatorMonomial::correlation(2)).unwrap();
        assert!((m - c(1.0)).norm() < 1e-12);
        let m = noon(2, PI).moment(OperatorMonomial::correlation(2)).unwrap();
        assert!((m - c(-1.0)).norm() < 1e-12);
    }

    #[test]
    fn vacuum_moment_vanishes() {
        let vac = FixedNState::basis(0, 0).unwrap();
        assert_eq!(vac.moment(OperatorMonomial::new(1, 0, 0, 1)).unwrap(), ZERO);
        let rho = vac.to_density_matrix();
        assert_eq!(rho.moment(OperatorMonomial::new(0, 0, 0, 0)).unwrap(), c(1.0));
        assert!(matches!(
            rho.moment(OperatorMonomial::new(1, 0, 0, 1)),
            Err(Error::Truncation { required: 1, cutoff: 0 })
        ));
    }

    #[test]
    fn binomial_n3_second_order() {
        let amps = [1.0f64 / 8.0, 3.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0].map(|p| c(p.sqrt()));
        let s = FixedNState::new(amps.to_vec()).unwrap();
        let m = s.moment(OperatorMonomial::correlation(2)).unwrap();
        assert!((m - c(1.5)).norm() < 1e-12);
    }

    #[test]
    fn number_nonconserving_monomial_is_exactly_zero() {
        let s = FixedNState::normalized((0..5).map(|k| Complex64::new(k as f64 + 1.0, 0.3)).collect()).unwrap();
        assert_eq!(s.moment(OperatorMonomial::new(2, 0, 0, 1)).unwrap(), ZERO);
    }

    #[test]
    fn single_excitation_spin() {
        let s = FixedNState::basis(1, 0).unwrap();
        let j = s.schwinger_moments(&[]);
        assert!((j.jz - 0.5).abs() < 1e-15);
        assert!(j.jx.abs() < 1e-15 && j.jy.abs() < 1e-15);
        assert!((j.ntot - 1.0).abs() < 1e-15);
    }

    #[test]
    fn noon_spin_moments() {
        for n in 2..8 {
            let j = noon(n, 0.3).schwinger_moments(&[]);
            assert!(j.jx.abs() < 1e-12 && j.jy.abs() < 1e-12);
            assert!((j.jz2 - (n * n) as f64 / 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn coherent_spin_state_n2() {
        let s = FixedNState::new(vec![c(0.5), c(FRAC_1_SQRT_2), c(0.5)]).unwrap();
        let j = s.schwinger_moments(&[]);
        assert!((j.jx - 1.0).abs() < 1e-12);
        assert!(j.jy.abs() < 1e-12);
    }

    #[test]
    fn distributions() {
        let d = noon(4, 0.0).number_distribution();
        assert!((d[&4] - 0.5).abs() < 1e-15 && (d[&-4] - 0.5).abs() < 1e-15);
        assert!(d.iter().filter(|(k, _)| k.abs() != 4).all(|(_, p)| *p == 0.0));

        let s = FixedNState::new(vec![c(0.5), c(FRAC_1_SQRT_2), c(0.5)]).unwrap();
        let d = s.to_density_matrix().number_distribution();
        assert!((d[&-2] - 0.25).abs() < 1e-12 && (d[&0] - 0.5).abs() < 1e-12 && (d[&2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn outer_product() {
        let rho = noon(1, 0.0).to_density_matrix();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!((rho.entry((1, 0), (0, 1)).norm() - 0.5).abs() < 1e-15);
        assert_eq!(rho.nnz(), 4);

        let rho = noon(3, 0.0).to_density_matrix();
        assert!((rho.entry((0, 3), (3, 0)) - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let mut e = BTreeMap::new();
        e.insert((0, 0), c(0.5));
        e.insert((3, 3), c(0.5));
        e.insert((0, 3), c(0.6));
        e.insert((3, 0), c(0.6));
        // |ρ_03|² = 0.36 > 0.25
        assert!(TwoModeDensityMatrix::from_entries(1, e.clone()).is_err());
        e.insert((0, 3), c(0.4));
        assert!(TwoModeDensityMatrix::from_entries(1, e.clone()).is_err(), "not Hermitian");
        e.insert((3, 0), c(0.4));
        assert!(TwoModeDensityMatrix::from_entries(1, e).is_ok());
        assert!(TwoModeDensityMatrix::diagonal_mixture(1, &[((0, 0), 0.7)]).is_err(), "trace");
    }

    #[test]
    fn json_round_trip_uses_documented_fields() {
        let s = noon(2, 0.5);
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["total_number"], 2);
        assert_eq!(json["amplitudes_re"].as_array().unwrap().len(), 3);
        let back: FixedNState = serde_json::from_value(json).unwrap();
        assert_eq!(back, s);

        let rho = s.to_density_matrix();
        let json = serde_json::to_value(&rho).unwrap();
        assert_eq!(json["cutoff"], 2);
        assert_eq!(json["entries_im"].as_array().unwrap().len(), 81);
        let back: TwoModeDensityMatrix = serde_json::from_value(json).unwrap();
        assert_eq!(back, rho);

        let bad = serde_json::json!({"total_number": 1, "amplitudes_re": [1.0, 1.0], "amplitudes_im": [0.0, 0.0]});
        assert!(serde_json::from_value::<FixedNState>(bad).is_err());
    }
}
