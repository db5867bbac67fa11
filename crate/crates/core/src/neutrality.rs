//! Measurement quadruples `⟨E, H, |ψ⟩, X⟩`, the two transforms that preserve
//! their decision-theoretic content (unitary intertwining and relabeling of
//! eigenvalues), and reduction to the two-dimensional canonical form.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::numeric::NumericPolicy;
use crate::quantum::{expectation, max_abs_diff, CMatrix, Observable, QuantumError, SpectralPair, StateVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeutralityError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("state has dimension {state}, observable {observable}")]
    DimensionMismatch { state: usize, observable: usize },
    #[error("event value {0} is not an eigenvalue of the observable")]
    UnknownEigenvalue(f64),
    #[error("map is not an isometry: residual {residual:e}")]
    NotUnitary { residual: f64 },
    #[error("U·X ≠ X'·U: residual {residual:e}")]
    IntertwiningFails { residual: f64 },
    #[error("map has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("relabeling produced a non-finite value for eigenvalue {0}")]
    NonFiniteRelabel(f64),
}

/// `⟨E, H, |ψ⟩, X⟩` with `E` a subset of the spectrum of `X`, held as
/// indices into `observable.eigenvalues()`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementQuadruple {
    state: StateVector,
    observable: Observable,
    event: Vec<usize>,
}

impl MeasurementQuadruple {
    /// `event` values are matched to the spectrum within the cluster
    /// tolerance.
    pub fn new(state: StateVector, observable: Observable, event: &[f64]) -> Result<Self, NeutralityError> {
        Self::with_policy(state, observable, event, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(
        state: StateVector,
        observable: Observable,
        event: &[f64],
        policy: &NumericPolicy,
    ) -> Result<Self, NeutralityError> {
        let indices = event
            .iter()
            .map(|&x| {
                observable
                    .index_of(x, policy.cluster_tol)
                    .ok_or(NeutralityError::UnknownEigenvalue(x))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_indices(state, observable, indices)
    }

    pub fn from_indices(
        state: StateVector,
        observable: Observable,
        mut event: Vec<usize>,
    ) -> Result<Self, NeutralityError> {
        if state.dim() != observable.dim() {
            return Err(NeutralityError::DimensionMismatch {
                state: state.dim(),
                observable: observable.dim(),
            });
        }
        let n = observable.spectral_pairs().len();
        if let Some(&bad) = event.iter().find(|&&i| i >= n) {
            return Err(NeutralityError::UnknownEigenvalue(bad as f64));
        }
        event.sort_unstable();
        event.dedup();
        Ok(Self {
            state,
            observable,
            event,
        })
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn event_indices(&self) -> &[usize] {
        &self.event
    }

    pub fn event_values(&self) -> Vec<f64> {
        self.event
            .iter()
            .map(|&i| self.observable.spectral_pairs()[i].eigenvalue)
            .collect()
    }

    /// `Σ_{x ∈ E} ⟨ψ|P(x)|ψ⟩`, clamped to `[0, 1]`.
    pub fn weight(&self) -> f64 {
        self.event
            .iter()
            .map(|&i| expectation(self.state.components(), self.observable.projector(i)))
            .fold(0.0, |acc, x| acc + x)
            .clamp(0.0, 1.0)
    }
}

/// Squared amplitudes this small are treated as rounding noise.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

/// The normal form `⟨{0}, C², c|0⟩ + d|1⟩, |1⟩⟨1|⟩` with `c² = W(E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalForm {
    pub weight_value: f64,
    pub c: f64,
    pub d: f64,
}

impl CanonicalForm {
    pub fn from_weight(weight: f64) -> Self {
        let w = weight.clamp(0.0, 1.0);
        Self {
            weight_value: w,
            c: w.sqrt(),
            d: (1.0 - w).sqrt(),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.weight_value - other.weight_value).abs() <= tol
            && (self.c - other.c).abs() <= tol.sqrt()
            && (self.d - other.d).abs() <= tol.sqrt()
    }

    /// The canonical quadruple itself.
    pub fn quadruple(&self) -> MeasurementQuadruple {
        let state = StateVector::normalized(vec![Complex64::new(self.c, 0.0), Complex64::new(self.d, 0.0)])
            .expect("c² + d² = 1");
        MeasurementQuadruple::from_indices(state, binary_observable(), vec![0]).expect("indices in range")
    }
}

/// `|1⟩⟨1|` on `C²`: eigenvalue 0 on `|0⟩`, 1 on `|1⟩`.
fn binary_observable() -> Observable {
    Observable::diagonal(&[0.0, 1.0]).expect("diagonal observable is valid")
}

/// `⟨E, H', U|ψ⟩, X'⟩` for an isometry `U: H → H'` with `U·X = X'·U`.
pub fn unitary_transform(
    q: &MeasurementQuadruple,
    u: &CMatrix,
    x_prime: &Observable,
) -> Result<MeasurementQuadruple, NeutralityError> {
    unitary_transform_with_policy(q, u, x_prime, &NumericPolicy::DEFAULT)
}

pub fn unitary_transform_with_policy(
    q: &MeasurementQuadruple,
    u: &CMatrix,
    x_prime: &Observable,
    policy: &NumericPolicy,
) -> Result<MeasurementQuadruple, NeutralityError> {
    let (dim, dim_p) = (q.dim(), x_prime.dim());
    if u.nrows() != dim_p || u.ncols() != dim {
        return Err(NeutralityError::ShapeMismatch {
            rows: u.nrows(),
            cols: u.ncols(),
            expected_rows: dim_p,
            expected_cols: dim,
        });
    }
    let residual = max_abs_diff(&(u.adjoint() * u), &DMatrix::identity(dim, dim));
    if residual > policy.projector_tol {
        return Err(NeutralityError::NotUnitary { residual });
    }
    let residual = max_abs_diff(&(u * q.observable.matrix()), &(x_prime.matrix() * u));
    if residual > policy.projector_tol {
        return Err(NeutralityError::IntertwiningFails { residual });
    }
    let state = StateVector::normalized((u * q.state.components()).iter().copied().collect())?;
    MeasurementQuadruple::with_policy(state, x_prime.clone(), &q.event_values(), policy)
}

/// `⟨f(E), H, |ψ⟩, f(X)⟩`. Eigenvalues whose images fall within the cluster
/// tolerance of each other are merged and their projectors summed.
pub fn relabel<F>(q: &MeasurementQuadruple, f: F) -> Result<MeasurementQuadruple, NeutralityError>
where
    F: Fn(f64) -> f64,
{
    relabel_with_policy(q, f, &NumericPolicy::DEFAULT)
}

pub fn relabel_with_policy<F>(
    q: &MeasurementQuadruple,
    f: F,
    policy: &NumericPolicy,
) -> Result<MeasurementQuadruple, NeutralityError>
where
    F: Fn(f64) -> f64,
{
    let pairs = q.observable.spectral_pairs();
    let mut images: Vec<(f64, usize)> = Vec::with_capacity(pairs.len());
    for (i, p) in pairs.iter().enumerate() {
        let y = f(p.eigenvalue);
        if !y.is_finite() {
            return Err(NeutralityError::NonFiniteRelabel(p.eigenvalue));
        }
        images.push((y, i));
    }
    images.sort_by(|a, b| a.0.total_cmp(&b.0));

    let dim = q.dim();
    let mut new_pairs: Vec<SpectralPair> = Vec::new();
    let mut slot_of = vec![0usize; pairs.len()];
    for (y, i) in images {
        match new_pairs.last_mut() {
            Some(last) if y - last.eigenvalue <= policy.cluster_tol => {
                last.projector += &pairs[i].projector;
            }
            _ => new_pairs.push(SpectralPair {
                eigenvalue: y,
                projector: pairs[i].projector.clone(),
            }),
        }
        slot_of[i] = new_pairs.len() - 1;
    }
    let observable = Observable::with_policy(dim, new_pairs, policy)?;
    let event = q.event.iter().map(|&i| slot_of[i]).collect();
    MeasurementQuadruple::from_indices(q.state.clone(), observable, event)
}

/// Relabels by the indicator of `E` (0 on `E`, 1 elsewhere) and reads off
/// `c = √W(E)`, `d = √(1 − W(E))`.
///
/// `c²` and `d²` are taken from the two eigenspaces separately and then
/// normalized. A squared amplitude at or below [`AMPLITUDE_FLOOR`] counts as
/// exactly 0, since the square root would turn rounding noise of order
/// `1e-16` into a `1e-8` amplitude.
pub fn canonical_form(q: &MeasurementQuadruple) -> CanonicalForm {
    let binary = indicator_relabeling(q);
    let psi = binary.state.components();
    let part = |x: f64| {
        binary
            .observable
            .index_of(x, 0.5)
            .map_or(0.0, |k| expectation(psi, binary.observable.projector(k)).max(0.0))
    };
    let floor = |x: f64| if x <= AMPLITUDE_FLOOR { 0.0 } else { x };
    let (c2, d2) = (floor(part(0.0)), floor(part(1.0)));
    let total = c2 + d2;
    let (c2, d2) = (c2 / total, d2 / total);
    CanonicalForm {
        weight_value: c2,
        c: c2.sqrt(),
        d: d2.sqrt(),
    }
}

/// The binary quadruple `⟨{0}, H, |ψ⟩, 1_{E^c}(X)⟩`.
pub fn indicator_relabeling(q: &MeasurementQuadruple) -> MeasurementQuadruple {
    let event = q.event_values();
    relabel(q, |x| if event.contains(&x) { 0.0 } else { 1.0 })
        .expect("indicator relabeling of a valid quadruple is valid")
}

/// An isometry `V: C² → H` with `V·|1⟩⟨1| = X_E·V` and
/// `V(c|0⟩ + d|1⟩) = |ψ⟩`, where `X_E` is the indicator relabeling of `X`.
///
/// `V|0⟩` is `P_E|ψ⟩/c` and `V|1⟩` is `(1 − P_E)|ψ⟩/d`. When `c` (or `d`) is
/// zero any unit vector of that eigenspace is used, and when the eigenspace
/// itself is trivial the column is zero, so `V` is only a partial isometry.
pub fn canonical_intertwiner(q: &MeasurementQuadruple) -> (CMatrix, Observable) {
    let binary = indicator_relabeling(q);
    let form = canonical_form(q);
    let psi = q.state.components();
    let dim = q.dim();
    let mut v = CMatrix::zeros(dim, 2);
    for (slot, eigen, amp) in [(0, 0.0, form.c), (1, 1.0, form.d)] {
        let Some(k) = binary.observable.index_of(eigen, 0.5) else {
            continue;
        };
        let p = binary.observable.projector(k);
        let column = if amp > 1e-7 {
            (p * psi).unscale(amp)
        } else {
            let (best, _) = (0..dim)
                .map(|j| (j, p.column(j).norm()))
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            let col = p.column(best).into_owned();
            let n = col.norm();
            col.unscale(n)
        };
        v.set_column(slot, &column);
    }
    (v, binary.observable)
}

/// `|W(E₁) − W(E₂)| ≤ 1e-10`, compared through the canonical forms.
pub fn same_equivalence_class(q1: &MeasurementQuadruple, q2: &MeasurementQuadruple) -> bool {
    same_equivalence_class_with(q1, q2, NumericPolicy::DEFAULT.projector_tol)
}

pub fn same_equivalence_class_with(q1: &MeasurementQuadruple, q2: &MeasurementQuadruple, tol: f64) -> bool {
    (canonical_form(q1).weight_value - canonical_form(q2).weight_value).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quad(amps: &[f64], diag: &[f64], event: &[f64]) -> MeasurementQuadruple {
        MeasurementQuadruple::new(
            StateVector::normalized(amps.iter().map(|&a| c(a, 0.0)).collect()).unwrap(),
            Observable::diagonal(diag).unwrap(),
            event,
        )
        .unwrap()
    }

    #[test]
    fn identity_transform_is_noop() {
        let q = quad(&[0.6, 0.8], &[0.0, 1.0], &[0.0]);
        let u = CMatrix::identity(2, 2);
        let q2 = unitary_transform(&q, &u, q.observable()).unwrap();
        assert_eq!(q2.event_indices(), q.event_indices());
        assert!((q2.weight() - q.weight()).abs() < 1e-15);
    }

    #[test]
    fn swap_transform() {
        let (a, b) = (0.6, 0.8);
        let q = quad(&[a, b], &[0.0, 1.0], &[0.0]);
        let swap = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let x_prime = Observable::diagonal(&[1.0, 0.0]).unwrap();
        let q2 = unitary_transform(&q, &swap, &x_prime).unwrap();
        let comps: Vec<f64> = q2.state().components().iter().map(|z| z.re).collect();
        assert_eq!(comps, vec![b, a]);
        // Oracle: event {0} is now |1⟩, weight |a|².
        assert!((q2.weight() - a * a).abs() < 1e-12);
        assert!((q.weight() - a * a).abs() < 1e-12);
    }

    #[test]
    fn transform_errors() {
        let q = quad(&[0.6, 0.8], &[0.0, 1.0], &[0.0]);
        let not_unitary = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(
            unitary_transform(&q, &not_unitary, q.observable()),
            Err(NeutralityError::NotUnitary { .. })
        ));
        let swap = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        match unitary_transform(&q, &swap, q.observable()) {
            Err(NeutralityError::IntertwiningFails { residual }) => assert!((residual - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spin_precession_equivalence() {
        // Rotating the state before a z measurement vs. measuring the rotated
        // observable on the unrotated state.
        let theta: f64 = 0.7;
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let r = CMatrix::from_row_slice(2, 2, &[c(ct, 0.), c(-st, 0.), c(st, 0.), c(ct, 0.)]);
        let z = Observable::diagonal(&[-1.0, 1.0]).unwrap();
        let psi = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let rotated_state = StateVector::normalized((&r * psi.components()).iter().copied().collect()).unwrap();
        let before = MeasurementQuadruple::new(rotated_state, z.clone(), &[1.0]).unwrap();
        let r_dag = r.adjoint();
        let after = MeasurementQuadruple::new(psi, z.conjugated_by(&r_dag), &[1.0]).unwrap();
        // R† maps the second to the first.
        let mapped = unitary_transform(&after, &r, &z).unwrap();
        assert!((mapped.weight() - before.weight()).abs() < 1e-10);
        assert!(same_equivalence_class(&before, &after));
    }

    #[test]
    fn relabel_examples() {
        let q = quad(&[0.5, 0.5, 0.5, 0.5], &[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0]);
        let same = relabel(&q, |x| x).unwrap();
        assert_eq!(same, q);

        let ind = indicator_relabeling(&q);
        assert_eq!(ind.observable().eigenvalues(), vec![0.0, 1.0]);
        assert_eq!(ind.event_values(), vec![0.0]);
        assert!((ind.weight() - 0.5).abs() < 1e-12);

        // Merge 3 and 4: P(3) + P(4) = diag(0,0,1,1); event weight unchanged.
        let merged = relabel(&q, |x| if x > 2.5 { 9.0 } else { x }).unwrap();
        assert_eq!(merged.observable().eigenvalues(), vec![1.0, 2.0, 9.0]);
        let p = merged.observable().projector(2);
        assert_eq!(p[(2, 2)], c(1., 0.));
        assert_eq!(p[(3, 3)], c(1., 0.));
        assert!((merged.weight() - q.weight()).abs() < 1e-12);

        // Merging event and non-event eigenvalues enlarges the bet.
        let leaky = relabel(&q, |x| if x == 4.0 { 1.0 } else { x }).unwrap();
        assert!(leaky.weight() > q.weight());
    }

    #[test]
    fn canonical_examples() {
        let half = canonical_form(&quad(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], &[0.0, 1.0], &[1.0]));
        assert!((half.weight_value - 0.5).abs() < 1e-12);
        assert!((half.c - FRAC_1_SQRT_2).abs() < 1e-12 && (half.d - FRAC_1_SQRT_2).abs() < 1e-12);

        let q = quad(&[0.6, 0.0, 0.8], &[1.0, 2.0, 3.0], &[]);
        assert_eq!(canonical_form(&q), CanonicalForm { weight_value: 0.0, c: 0.0, d: 1.0 });
        let q = quad(&[0.6, 0.0, 0.8], &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        assert_eq!(canonical_form(&q), CanonicalForm { weight_value: 1.0, c: 1.0, d: 0.0 });
    }

    #[test]
    fn intertwiner_maps_canonical_onto_binary() {
        let q = quad(&[0.5, 0.5, 0.5, 0.5], &[1.0, 2.0, 3.0, 4.0], &[2.0]);
        let (v, x_e) = canonical_intertwiner(&q);
        let canon = canonical_form(&q).quadruple();
        let image = unitary_transform(&canon, &v, &x_e).unwrap();
        let diff = (image.state().components() - q.state().components()).norm();
        assert!(diff < 1e-12);
        assert_eq!(image.event_values(), vec![0.0]);
        assert!((image.weight() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn different_weights_are_different_classes() {
        let a = quad(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], &[0.0, 1.0], &[0.0]);
        let b = quad(&[0.5, 0.5, FRAC_1_SQRT_2], &[0.0, 1.0, 2.0], &[0.0]);
        assert!(!same_equivalence_class(&a, &b));
        assert!(same_equivalence_class(&a, &a));
    }

    #[test]
    fn unknown_event_value() {
        let r = MeasurementQuadruple::new(
            StateVector::basis(2, 0),
            Observable::diagonal(&[0.0, 1.0]).unwrap(),
            &[0.5],
        );
        assert_eq!(r.unwrap_err(), NeutralityError::UnknownEigenvalue(0.5));
    }
}
