//! Dense two-mode operators on the truncated space `0 ≤ n_a, n_b ≤ cutoff`,
//! indexed like [`TwoModeDensityMatrix`] (`n_a (cutoff+1) + n_b`).
//!
//! Products of `k` ladder operators are exact on columns whose occupations are
//! at most `cutoff − k`; [`TruncatedModes::deviation`] compares operators on
//! exactly those columns.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{OperatorMonomial, TwoModeDensityMatrix};
use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Operator matrices for two truncated modes.
#[derive(Debug, Clone)]
pub struct TruncatedModes {
    cutoff: usize,
    a: DMatrix<Complex64>,
    b: DMatrix<Complex64>,
}

impl TruncatedModes {
    pub fn new(cutoff: usize) -> Self {
        let single = DMatrix::from_fn(cutoff + 1, cutoff + 1, |r, c| {
            if c == r + 1 {
                Complex64::new((c as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let id = DMatrix::<Complex64>::identity(cutoff + 1, cutoff + 1);
        Self { cutoff, a: single.kronecker(&id), b: id.kronecker(&single) }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    pub fn identity(&self) -> DMatrix<Complex64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    pub fn a(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<Complex64> {
        &self.b
    }

    pub fn a_dag(&self) -> DMatrix<Complex64> {
        self.a.adjoint()
    }

    pub fn b_dag(&self) -> DMatrix<Complex64> {
        self.b.adjoint()
    }

    /// `(a†)ᵖ (b†)ᑫ aʳ bˢ`.
    pub fn monomial(&self, mono: OperatorMonomial) -> DMatrix<Complex64> {
        let pow = |m: &DMatrix<Complex64>, k: usize| (0..k).fold(self.identity(), |acc, _| acc * m);
        pow(&self.a_dag(), mono.p) * pow(&self.b_dag(), mono.q) * pow(&self.a, mono.r) * pow(&self.b, mono.s)
    }

    /// `J_θ = (e^{−iθ} a†b + e^{iθ} a b†)/2`, so `J_0 = J_X` and `J_{π/2} = J_Y`.
    pub fn j_theta(&self, theta: f64) -> DMatrix<Complex64> {
        let ab = self.a_dag() * &self.b;
        let ba = ab.adjoint();
        ab * Complex64::from_polar(0.5, -theta) + ba * Complex64::from_polar(0.5, theta)
    }

    pub fn jx(&self) -> DMatrix<Complex64> {
        self.j_theta(0.0)
    }

    pub fn jy(&self) -> DMatrix<Complex64> {
        self.j_theta(std::f64::consts::FRAC_PI_2)
    }

    pub fn jz(&self) -> DMatrix<Complex64> {
        (self.a_dag() * &self.a - self.b_dag() * &self.b) * Complex64::new(0.5, 0.0)
    }

    /// `(X, P)` of mode a with `a = X + iP`.
    pub fn quadratures_a(&self) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        quadratures(&self.a)
    }

    /// `(X, P)` of mode b with `b = X + iP`.
    pub fn quadratures_b(&self) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        quadratures(&self.b)
    }

    /// Largest entry of `lhs − rhs` over columns exact for operators of
    /// total ladder degree `degree`.
    pub fn deviation(&self, lhs: &DMatrix<Complex64>, rhs: &DMatrix<Complex64>, degree: usize) -> f64 {
        let Some(limit) = self.cutoff.checked_sub(degree) else { return 0.0 };
        let mut worst: f64 = 0.0;
        for na in 0..=limit {
            for nb in 0..=limit {
                let col = na * (self.cutoff + 1) + nb;
                for row in 0..self.dim() {
                    worst = worst.max((lhs[(row, col)] - rhs[(row, col)]).norm());
                }
            }
        }
        worst
    }

    /// `Tr(ρ O)` for a density matrix whose cutoff is at most
    /// `self.cutoff − degree`, so that `O` acts exactly on its support.
    pub fn expectation(&self, rho: &TwoModeDensityMatrix, op: &DMatrix<Complex64>, degree: usize) -> Result<Complex64> {
        if rho.cutoff() + degree > self.cutoff {
            return Err(Error::Truncation { required: rho.cutoff() + degree, cutoff: self.cutoff });
        }
        let idx = |(na, nb): (usize, usize)| na * (self.cutoff + 1) + nb;
        Ok(rho.iter().map(|(r, c, v)| v * op[(idx(c), idx(r))]).sum())
    }
}

/// `X = (m + m†)/2`, `P = (m − m†)/(2i)`.
fn quadratures(m: &DMatrix<Complex64>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let md = m.adjoint();
    let x = (m + &md) * Complex64::new(0.5, 0.0);
    let p = (m - &md) * (ONE / (2.0 * I));
    (x, p)
}

/// `AB + BA`.
pub fn anticommutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b + b * a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::TwoModeState;
    use crate::states::make_binomial_splitter;

    #[test]
    fn ladder_structure() {
        let ops = TruncatedModes::new(4);
        let comm = ops.a() * ops.a_dag() - ops.a_dag() * ops.a();
        assert!(ops.deviation(&comm, &ops.identity(), 1) < 1e-14);
        let mixed = ops.a() * ops.b_dag() - ops.b_dag() * ops.a();
        assert!(mixed.norm() < 1e-14);
    }

    #[test]
    fn spin_commutator() {
        let ops = TruncatedModes::new(5);
        let lhs = ops.jx() * ops.jy() - ops.jy() * ops.jx();
        assert!(ops.deviation(&lhs, &(ops.jz() * I), 2) < 1e-13);
    }

    #[test]
    fn expectation_matches_moment() {
        let s = make_binomial_splitter(3).unwrap();
        let rho = s.to_density_matrix();
        let ops = TruncatedModes::new(3 + 4);
        let mono = OperatorMonomial::correlation(2);
        let got = ops.expectation(&rho, &ops.monomial(mono), 4).unwrap();
        assert!((got - s.moment(mono).unwrap()).norm() < 1e-12);
        assert!(TruncatedModes::new(4).expectation(&rho, &ops.identity(), 4).is_err());
    }
}
