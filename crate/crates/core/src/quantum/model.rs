use std::collections::BTreeSet;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{expectation, Observable, QuantumError, StateVector};
use crate::numeric::NumericPolicy;
use crate::rational::{best_rational_approximation, f64_to_ratio, ratio_to_f64, RationalWeight};

/// A concrete measurement: a state, an observable, and a convention mapping
/// each outcome label onto an eigenvalue of the observable.
///
/// The convention is stored as an index into the observable's sorted spectral
/// pairs. It must be onto the spectrum but need not be injective.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    label: String,
    state: StateVector,
    observable: Observable,
    outcome_labels: Vec<String>,
    convention: Vec<usize>,
}

impl MeasurementModel {
    /// `convention` pairs every outcome label with the eigenvalue it reports.
    pub fn new(
        label: impl Into<String>,
        state: StateVector,
        observable: Observable,
        convention: Vec<(String, f64)>,
    ) -> Result<Self, QuantumError> {
        Self::with_policy(label, state, observable, convention, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(
        label: impl Into<String>,
        state: StateVector,
        observable: Observable,
        convention: Vec<(String, f64)>,
        policy: &NumericPolicy,
    ) -> Result<Self, QuantumError> {
        if state.dim() != observable.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: observable.dim(),
                found: state.dim(),
            });
        }
        let mut seen = BTreeSet::new();
        let mut outcome_labels = Vec::with_capacity(convention.len());
        let mut indices = Vec::with_capacity(convention.len());
        for (name, value) in convention {
            if !seen.insert(name.clone()) {
                return Err(QuantumError::DuplicateOutcomeLabel(name));
            }
            let idx = observable
                .index_of(value, policy.cluster_tol)
                .ok_or_else(|| QuantumError::UnknownEigenvalue {
                    label: name.clone(),
                    value,
                })?;
            outcome_labels.push(name);
            indices.push(idx);
        }
        let hit: BTreeSet<usize> = indices.iter().copied().collect();
        if let Some(missing) = (0..observable.spectral_pairs().len()).find(|i| !hit.contains(i)) {
            return Err(QuantumError::ConventionNotSurjective(
                observable.spectral_pairs()[missing].eigenvalue,
            ));
        }
        Ok(Self {
            label: label.into(),
            state,
            observable,
            outcome_labels,
            convention: indices,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcome_labels
    }

    /// Eigenvalue reported for each outcome label, in label order.
    pub fn convention(&self) -> Vec<(&str, f64)> {
        self.outcome_labels
            .iter()
            .zip(&self.convention)
            .map(|(l, &i)| (l.as_str(), self.observable.spectral_pairs()[i].eigenvalue))
            .collect()
    }

    /// Spectral-pair indices in the image of `event` under the convention.
    fn image<I, S>(&self, event: I) -> Result<BTreeSet<usize>, QuantumError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        event
            .into_iter()
            .map(|s| {
                let s = s.as_ref();
                self.outcome_labels
                    .iter()
                    .position(|l| l == s)
                    .map(|k| self.convention[k])
                    .ok_or_else(|| QuantumError::UnknownOutcomeLabel(s.to_owned()))
            })
            .collect()
    }
}

/// Quantum weight of `event`: the sum of `⟨ψ|P(x)|ψ⟩` over the eigenvalues
/// `x` the event's outcomes are mapped to. Each eigenvalue counts once even if
/// several outcomes share it. The result is clamped into `[0, 1]`.
pub fn weight<I, S>(model: &MeasurementModel, event: I) -> Result<f64, QuantumError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let image = model.image(event)?;
    let psi = model.state.components();
    let w: f64 = image
        .into_iter()
        .map(|i| expectation(psi, model.observable.projector(i)))
        .fold(0.0, |acc, x| acc + x);
    Ok(w.clamp(0.0, 1.0))
}

/// Builds an `n`-outcome model realizing the given weights: amplitudes `√w_i`
/// on the computational basis, observable `diag(1..n)`, outcomes `o1..on`.
pub fn make_rich_measurement(weights: &[RationalWeight]) -> Result<MeasurementModel, QuantumError> {
    if weights.is_empty() {
        return Err(QuantumError::EmptyWeights);
    }
    if let Some(i) = weights.iter().position(|w| !w.value().is_positive()) {
        return Err(QuantumError::NonpositiveWeight(i));
    }
    let total: BigRational = weights.iter().map(|w| w.value().clone()).sum();
    if !total.is_one() {
        return Err(QuantumError::WeightsDontSumToOne(total.to_string()));
    }
    let n = weights.len();
    let amplitudes: Vec<Complex64> = weights
        .iter()
        .map(|w| Complex64::new(w.to_f64().sqrt(), 0.0))
        .collect();
    let state = StateVector::from_vector_unchecked(DVector::from_vec(amplitudes));
    let values: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let observable = Observable::diagonal(&values)?;
    let convention = (1..=n).map(|i| (format!("o{i}"), i as f64)).collect();
    MeasurementModel::new(format!("rich-{n}"), state, observable, convention)
}

/// Snaps `weight(model, event)` to the closest rational with denominator at
/// most `max_den`, failing when that rational is further than the policy's
/// rational tolerance from the float weight.
pub fn rational_weight<I, S>(
    model: &MeasurementModel,
    event: I,
    max_den: u64,
) -> Result<RationalWeight, QuantumError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    rational_weight_with_policy(model, event, max_den, &NumericPolicy::DEFAULT)
}

pub fn rational_weight_with_policy<I, S>(
    model: &MeasurementModel,
    event: I,
    max_den: u64,
    policy: &NumericPolicy,
) -> Result<RationalWeight, QuantumError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if max_den == 0 {
        return Err(QuantumError::InvalidDenominatorBound);
    }
    let w = weight(model, event)?;
    let exact = f64_to_ratio(w).unwrap_or_else(BigRational::zero);
    let best = best_rational_approximation(&exact, &BigInt::from(max_den));
    if (ratio_to_f64(&best) - w).abs() > policy.rational_tol {
        return Err(QuantumError::NoRationalWithinTolerance {
            weight: w,
            max_den,
            tol: policy.rational_tol,
        });
    }
    Ok(RationalWeight::new(best).expect("approximation of a value in [0,1] stays in [0,1]"))
}
