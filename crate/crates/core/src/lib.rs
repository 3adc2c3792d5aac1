//! Numerical toolkit for mesoscopic quantum coherence in two-mode bosonic systems.
//!
//! The crate builds fixed-total-number two-mode states (NOON states, the output
//! of a linear beam splitter, embedded cats, number states), pushes them through
//! a beam-splitter loss channel or two-mode Josephson dynamics, and quantifies
//! their n-th order coherence:
//!
//! - [`coherence`]: coherence spectrum, catness fidelity `C_n`, measurable bound
//!   `c_n = 𝒩|⟨a†ⁿbⁿ⟩|/S`, the pure-state normalization `𝒩_{n,N}` and the
//!   finite-probability correction;
//! - [`squeezing`]: spin squeezing parameter and the coherence-order bound it
//!   implies, plus the two-atom inference from measured spin variances;
//! - [`interferometry`]: mode rotations, fringe scans, Fourier extraction of
//!   moments and the spin/quadrature measurement identities.
//!
//! Basis convention: a fixed-N state is `Σ_m d_m |N−m⟩_a |m⟩_b`, i.e. the
//! amplitude index counts quanta in mode `b`.

pub mod channels;
pub mod coherence;
pub mod dynamics;
mod error;
pub mod fock;
pub mod interferometry;
pub mod operators;
pub mod special;
pub mod squeezing;
pub mod states;

pub use error::{Error, Result};
pub use fock::{FixedNState, OperatorMonomial, SchwingerMoments, TwoModeDensityMatrix, TwoModeState};
pub use num_complex::Complex64;

/// Normalization tolerance applied when states are constructed.
pub const NORM_TOL: f64 = 1e-12;

/// Equality tolerance for derived quantities (traces, moments, identities).
pub const DERIVED_TOL: f64 = 1e-10;
