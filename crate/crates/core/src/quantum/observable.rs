use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{max_abs_diff, CMatrix, QuantumError};
use crate::numeric::NumericPolicy;

/// One eigenvalue together with the projector onto its eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub eigenvalue: f64,
    pub projector: CMatrix,
}

/// A discrete-spectrum self-adjoint operator held in spectral form.
///
/// Pairs are kept sorted by ascending eigenvalue, so `eigenvalues()` is the
/// ordered spectrum and pair indices are stable identifiers for eigenspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    dim: usize,
    pairs: Vec<SpectralPair>,
}

impl Observable {
    /// Validates the projector algebra under the default policy.
    pub fn new(dim: usize, pairs: Vec<SpectralPair>) -> Result<Self, QuantumError> {
        Self::with_policy(dim, pairs, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(
        dim: usize,
        mut pairs: Vec<SpectralPair>,
        policy: &NumericPolicy,
    ) -> Result<Self, QuantumError> {
        let invalid = |msg: String| Err(QuantumError::InvalidObservable(msg));
        if dim == 0 || pairs.is_empty() {
            return invalid("observable needs a positive dimension and at least one pair".into());
        }
        for p in &pairs {
            if !p.eigenvalue.is_finite() {
                return invalid(format!("eigenvalue {} is not finite", p.eigenvalue));
            }
            if p.projector.nrows() != dim || p.projector.ncols() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    found: p.projector.nrows().max(p.projector.ncols()),
                });
            }
        }
        pairs.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
        for w in pairs.windows(2) {
            if w[1].eigenvalue - w[0].eigenvalue <= policy.cluster_tol {
                return invalid(format!(
                    "eigenvalues {} and {} are not separated by more than {:e}",
                    w[0].eigenvalue, w[1].eigenvalue, policy.cluster_tol
                ));
            }
        }
        let tol = policy.projector_tol;
        let mut total = DMatrix::<Complex64>::zeros(dim, dim);
        for (i, p) in pairs.iter().enumerate() {
            let herm = max_abs_diff(&p.projector, &p.projector.adjoint());
            if herm > tol {
                return invalid(format!("projector {i} is not Hermitian (residual {herm:e})"));
            }
            let idem = max_abs_diff(&(&p.projector * &p.projector), &p.projector);
            if idem > tol {
                return invalid(format!("projector {i} is not idempotent (residual {idem:e})"));
            }
            for (j, q) in pairs.iter().enumerate().skip(i + 1) {
                let overlap = (&p.projector * &q.projector).camax();
                if overlap > tol {
                    return invalid(format!(
                        "projectors {i} and {j} are not orthogonal (residual {overlap:e})"
                    ));
                }
            }
            total += &p.projector;
        }
        let completeness = max_abs_diff(&total, &DMatrix::identity(dim, dim));
        if completeness > tol {
            return invalid(format!(
                "projectors do not sum to the identity (residual {completeness:e})"
            ));
        }
        Ok(Self { dim, pairs })
    }

    /// Diagonal observable in the computational basis; repeated values share
    /// one eigenspace.
    pub fn diagonal(values: &[f64]) -> Result<Self, QuantumError> {
        let dim = values.len();
        let tol = NumericPolicy::DEFAULT.cluster_tol;
        let mut pairs: Vec<SpectralPair> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            let slot = match pairs.iter().position(|p| (p.eigenvalue - v).abs() <= tol) {
                Some(k) => k,
                None => {
                    pairs.push(SpectralPair {
                        eigenvalue: v,
                        projector: DMatrix::zeros(dim, dim),
                    });
                    pairs.len() - 1
                }
            };
            pairs[slot].projector[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Self::new(dim, pairs)
    }

    pub(crate) fn from_sorted_unchecked(dim: usize, pairs: Vec<SpectralPair>) -> Self {
        debug_assert!(pairs
            .windows(2)
            .all(|w| w[0].eigenvalue < w[1].eigenvalue));
        Self { dim, pairs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spectral_pairs(&self) -> &[SpectralPair] {
        &self.pairs
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.eigenvalue).collect()
    }

    pub fn projector(&self, index: usize) -> &CMatrix {
        &self.pairs[index].projector
    }

    /// Index of the spectral pair whose eigenvalue is within `tol` of `value`.
    pub fn index_of(&self, value: f64, tol: f64) -> Option<usize> {
        self.pairs
            .iter()
            .position(|p| (p.eigenvalue - value).abs() <= tol)
    }

    /// Dense form `Σ x·P(x)`.
    pub fn matrix(&self) -> CMatrix {
        self.pairs
            .iter()
            .fold(DMatrix::zeros(self.dim, self.dim), |acc, p| {
                acc + &p.projector * Complex64::new(p.eigenvalue, 0.0)
            })
    }

    /// `U X U†` for a unitary `U`, computed projector by projector so the
    /// spectrum is carried over exactly.
    pub fn conjugated_by(&self, u: &CMatrix) -> Self {
        let u_dag = u.adjoint();
        let pairs = self
            .pairs
            .iter()
            .map(|p| SpectralPair {
                eigenvalue: p.eigenvalue,
                projector: u * &p.projector * &u_dag,
            })
            .collect();
        Self::from_sorted_unchecked(u.nrows(), pairs)
    }
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are clustered greedily in ascending order: a cluster absorbs
/// every eigenvalue within `tol` of its smallest member, and its projectors are
/// summed. Clusters whose means end up within `tol` of each other signal an
/// ill-conditioned spectrum.
pub fn spectral_decompose(matrix: &CMatrix, tol: f64) -> Result<Observable, QuantumError> {
    let (rows, cols) = matrix.shape();
    if rows != cols || rows == 0 {
        return Err(QuantumError::NotSquare { rows, cols });
    }
    let residual = max_abs_diff(matrix, &matrix.adjoint());
    if residual > tol {
        return Err(QuantumError::NonHermitianInput { residual, tol });
    }
    let hermitian = (matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = hermitian.symmetric_eigen();

    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(c) if eig.eigenvalues[i] - eig.eigenvalues[c[0]] <= tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut pairs = Vec::with_capacity(clusters.len());
    for members in &clusters {
        let mean = members.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / members.len() as f64;
        let mut projector = DMatrix::<Complex64>::zeros(rows, rows);
        for &i in members {
            let v = eig.eigenvectors.column(i);
            projector += v * v.adjoint();
        }
        pairs.push(SpectralPair {
            eigenvalue: mean,
            projector,
        });
    }
    for w in pairs.windows(2) {
        if w[1].eigenvalue - w[0].eigenvalue <= tol {
            return Err(QuantumError::DegenerateClustering {
                left: w[0].eigenvalue,
                right: w[1].eigenvalue,
                tol,
            });
        }
    }
    Ok(Observable::from_sorted_unchecked(rows, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real_matrix(n: usize, data: &[f64]) -> CMatrix {
        DMatrix::from_row_iterator(n, n, data.iter().map(|&x| c(x)))
    }

    // Oracle: check the projector algebra by direct multiplication.
    fn assert_valid_decomposition(m: &CMatrix, obs: &Observable, tol: f64) {
        let n = m.nrows();
        let mut sum = DMatrix::<Complex64>::zeros(n, n);
        for p in obs.spectral_pairs() {
            let pp = &p.projector * &p.projector;
            assert!(max_abs_diff(&pp, &p.projector) < 1e-10, "P^2 != P");
            assert!(max_abs_diff(&p.projector, &p.projector.adjoint()) < 1e-10);
            sum += &p.projector;
        }
        assert!(max_abs_diff(&sum, &DMatrix::identity(n, n)) < 1e-10, "sum != I");
        assert!(max_abs_diff(&obs.matrix(), m) <= 10.0 * tol, "reconstruction");
    }

    #[test]
    fn identity_is_one_pair() {
        let id = DMatrix::<Complex64>::identity(2, 2);
        let obs = spectral_decompose(&id, 1e-9).unwrap();
        assert_eq!(obs.spectral_pairs().len(), 1);
        assert!((obs.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(obs.projector(0), &id) < 1e-12);
    }

    #[test]
    fn diagonal_matrix_keeps_basis_projectors() {
        let m = real_matrix(2, &[0.0, 0.0, 0.0, 1.0]);
        let obs = spectral_decompose(&m, 1e-9).unwrap();
        assert_eq!(obs.eigenvalues().len(), 2);
        assert!(obs.eigenvalues()[0].abs() < 1e-12);
        assert!((obs.projector(0)[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((obs.projector(1)[(1, 1)].re - 1.0).abs() < 1e-12);
        assert_valid_decomposition(&m, &obs, 1e-9);
    }

    #[test]
    fn pauli_x_projects_onto_plus_minus() {
        let m = real_matrix(2, &[0.0, 1.0, 1.0, 0.0]);
        let obs = spectral_decompose(&m, 1e-9).unwrap();
        let ev = obs.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
        // |±⟩⟨±| = 1/2 [[1, ±1], [±1, 1]]
        let minus = real_matrix(2, &[0.5, -0.5, -0.5, 0.5]);
        let plus = real_matrix(2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(max_abs_diff(obs.projector(0), &minus) < 1e-12);
        assert!(max_abs_diff(obs.projector(1), &plus) < 1e-12);
        assert_valid_decomposition(&m, &obs, 1e-9);
    }

    #[test]
    fn complex_hermitian_with_degeneracy() {
        // Pauli-y on a qubit, direct sum with a doubly degenerate block.
        let i = Complex64::new(0.0, 1.0);
        let z = c(0.0);
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[z, -i, z, z, i, z, z, z, z, z, c(1.0), z, z, z, z, c(1.0)],
        );
        let obs = spectral_decompose(&m, 1e-9).unwrap();
        assert_eq!(obs.eigenvalues().len(), 2);
        let rank_plus: f64 = (0..4).map(|k| obs.projector(1)[(k, k)].re).sum();
        assert!((rank_plus - 3.0).abs() < 1e-10);
        assert_valid_decomposition(&m, &obs, 1e-9);
    }

    #[test]
    fn near_equal_eigenvalues_cluster() {
        let m = real_matrix(3, &[1.0, 0.0, 0.0, 0.0, 1.0 + 1e-11, 0.0, 0.0, 0.0, 2.0]);
        let obs = spectral_decompose(&m, 1e-9).unwrap();
        assert_eq!(obs.eigenvalues().len(), 2);
        assert_valid_decomposition(&m, &obs, 1e-9);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = real_matrix(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            spectral_decompose(&m, 1e-9),
            Err(QuantumError::NonHermitianInput { .. })
        ));
        let rect = DMatrix::<Complex64>::zeros(2, 3);
        assert!(matches!(
            spectral_decompose(&rect, 1e-9),
            Err(QuantumError::NotSquare { .. })
        ));
    }

    #[test]
    fn chained_near_values_report_degenerate_clustering() {
        // 0 and 0.9 merge (mean 0.45); 1.1 starts a new cluster 0.65 away.
        let m = real_matrix(3, &[0.0, 0.0, 0.0, 0.0, 0.9, 0.0, 0.0, 0.0, 1.1]);
        assert!(matches!(
            spectral_decompose(&m, 1.0),
            Err(QuantumError::DegenerateClustering { .. })
        ));
    }

    #[test]
    fn validation_catches_bad_projector_sets() {
        let p0 = real_matrix(2, &[1.0, 0.0, 0.0, 0.0]);
        let p1 = real_matrix(2, &[0.0, 0.0, 0.0, 1.0]);
        let half = real_matrix(2, &[0.5, 0.0, 0.0, 0.5]);
        let pair = |x: f64, p: &CMatrix| SpectralPair {
            eigenvalue: x,
            projector: p.clone(),
        };
        assert!(Observable::new(2, vec![pair(0.0, &p0), pair(1.0, &p1)]).is_ok());
        // Incomplete.
        assert!(Observable::new(2, vec![pair(0.0, &p0)]).is_err());
        // Not idempotent.
        assert!(Observable::new(2, vec![pair(0.0, &half), pair(1.0, &half)]).is_err());
        // Overlapping.
        assert!(Observable::new(2, vec![pair(0.0, &p0), pair(1.0, &p0)]).is_err());
        // Duplicate eigenvalue.
        assert!(Observable::new(2, vec![pair(1.0, &p0), pair(1.0, &p1)]).is_err());
    }

    #[test]
    fn diagonal_groups_repeated_values() {
        let obs = Observable::diagonal(&[2.0, 1.0, 2.0]).unwrap();
        assert_eq!(obs.eigenvalues(), vec![1.0, 2.0]);
        assert!((obs.projector(1)[(2, 2)].re - 1.0).abs() < 1e-15);
    }
}
