//! Finite-dimensional quantum machinery: states, discrete-spectrum
//! observables, outcome conventions and the quantum weight function.

mod model;
mod observable;
mod state;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub use model::{make_rich_measurement, rational_weight, weight, MeasurementModel};
pub use observable::{spectral_decompose, Observable, SpectralPair};
pub use state::StateVector;

pub type ComplexScalar = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("state has a non-finite component at index {0}")]
    NonFinite(usize),
    #[error("state has dimension zero")]
    EmptyState,
    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: residual {residual:e} exceeds {tol:e}")]
    NonHermitianInput { residual: f64, tol: f64 },
    #[error("eigenvalue clusters {left} and {right} end closer than {tol:e}")]
    DegenerateClustering { left: f64, right: f64, tol: f64 },
    #[error("invalid observable: {0}")]
    InvalidObservable(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("outcome label `{0}` appears twice")]
    DuplicateOutcomeLabel(String),
    #[error("outcome `{label}` maps to {value}, which is not an eigenvalue")]
    UnknownEigenvalue { label: String, value: f64 },
    #[error("convention is not onto the spectrum: eigenvalue {0} has no outcome")]
    ConventionNotSurjective(f64),
    #[error("unknown outcome label `{0}`")]
    UnknownOutcomeLabel(String),
    #[error("weights list is empty")]
    EmptyWeights,
    #[error("weight at position {0} is not strictly positive")]
    NonpositiveWeight(usize),
    #[error("weights sum to {0}, not exactly 1")]
    WeightsDontSumToOne(String),
    #[error("no rational with denominator <= {max_den} lies within {tol:e} of {weight}")]
    NoRationalWithinTolerance { weight: f64, max_den: u64, tol: f64 },
    #[error("denominator bound must be at least 1")]
    InvalidDenominatorBound,
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `⟨ψ|A|ψ⟩`, real part.
pub fn expectation(psi: &CVector, op: &CMatrix) -> f64 {
    psi.dotc(&(op * psi)).re
}
