//! Floating-point tolerances used by the Hilbert-space side of the kernel.
//!
//! The decision layer runs on exact rationals. These tolerances cover state
//! normalization, projector algebra and eigenvalue clustering.

use serde::{Deserialize, Serialize};

/// One record holding every numeric tolerance the quantum layer uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Allowed deviation of a state's squared norm from 1.
    pub norm_tol: f64,
    /// Projector idempotence, orthogonality, completeness, unitarity and
    /// intertwining residuals.
    pub projector_tol: f64,
    /// Eigenvalues closer than this are one spectral cluster.
    pub cluster_tol: f64,
    /// Largest gap accepted when snapping a float weight to a rational.
    pub rational_tol: f64,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        norm_tol: 1e-12,
        projector_tol: 1e-10,
        cluster_tol: 1e-9,
        rational_tol: 1e-9,
    };

    /// Parses `key=value` pairs separated by commas, e.g.
    /// `norm=1e-12,projector=1e-10,cluster=1e-9,rational=1e-9`.
    /// Unspecified keys keep their defaults.
    pub fn parse(spec: &str) -> Result<Self, String> {
        let mut policy = Self::DEFAULT;
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| format!("`{value}` is not a number"))?;
            if !(value.is_finite() && value > 0.0) {
                return Err(format!("tolerance `{key}` must be finite and positive"));
            }
            match key.trim() {
                "norm" => policy.norm_tol = value,
                "projector" => policy.projector_tol = value,
                "cluster" => policy.cluster_tol = value,
                "rational" => policy.rational_tol = value,
                other => return Err(format!("unknown tolerance `{other}`")),
            }
        }
        Ok(policy)
    }
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}
