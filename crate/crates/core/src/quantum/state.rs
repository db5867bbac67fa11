use nalgebra::DVector;
use num_complex::Complex64;

use super::{CVector, QuantumError};
use crate::numeric::NumericPolicy;

/// A normalized pure state on a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: CVector,
}

impl StateVector {
    pub fn new(components: Vec<Complex64>) -> Result<Self, QuantumError> {
        Self::with_policy(components, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(
        components: Vec<Complex64>,
        policy: &NumericPolicy,
    ) -> Result<Self, QuantumError> {
        Self::from_vector(DVector::from_vec(components), policy)
    }

    pub fn from_vector(components: CVector, policy: &NumericPolicy) -> Result<Self, QuantumError> {
        if components.is_empty() {
            return Err(QuantumError::EmptyState);
        }
        if let Some(i) = components
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(QuantumError::NonFinite(i));
        }
        let norm_sqr = components.norm_squared();
        if (norm_sqr - 1.0).abs() > policy.norm_tol {
            return Err(QuantumError::NotNormalized(norm_sqr));
        }
        Ok(Self { components })
    }

    /// Scales `components` to unit norm first.
    pub fn normalized(components: Vec<Complex64>) -> Result<Self, QuantumError> {
        let v = DVector::from_vec(components);
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(QuantumError::NotNormalized(norm * norm));
        }
        Self::from_vector(v.unscale(norm), &NumericPolicy::DEFAULT)
    }

    /// Real amplitudes, e.g. `[1/√2, 1/√2]`.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self, QuantumError> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self { components: v }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &CVector {
        &self.components
    }

    pub(crate) fn from_vector_unchecked(components: CVector) -> Self {
        Self { components }
    }
}
