//! Versioned JSON documents for families, orderings, assignments, measurement
//! models and quadruples. Every document carries `"schema": "v1"`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::decision::{
    DecisionError, EventRef, LikelihoodOrdering, MeasurementFamily, ProbabilityAssignment, WeightedMeasurement,
};
use crate::neutrality::{MeasurementQuadruple, NeutralityError};
use crate::numeric::NumericPolicy;
use crate::quantum::{spectral_decompose, CMatrix, MeasurementModel, Observable, QuantumError, SpectralPair, StateVector};
use crate::rational::RationalWeight;

pub const SCHEMA: &str = "v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema `{0}`, expected `v1`")]
    Schema(String),
    #[error("ordering was written for family {expected}, but the family given hashes to {found}")]
    FamilyDigestMismatch { expected: String, found: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Neutrality(#[from] NeutralityError),
}

fn check_schema(schema: &str) -> Result<(), FormatError> {
    if schema == SCHEMA {
        Ok(())
    } else {
        Err(FormatError::Schema(schema.to_owned()))
    }
}

/// Hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementDoc {
    pub id: String,
    pub outcomes: Vec<String>,
    pub weights: Vec<RationalWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub schema: String,
    pub measurements: Vec<MeasurementDoc>,
}

impl FamilyDoc {
    pub fn from_family(family: &MeasurementFamily) -> Self {
        Self {
            schema: SCHEMA.into(),
            measurements: family
                .measurements()
                .iter()
                .map(|m| MeasurementDoc {
                    id: m.id().to_owned(),
                    outcomes: m.outcomes().to_vec(),
                    weights: m.weights().to_vec(),
                })
                .collect(),
        }
    }

    pub fn into_family(self) -> Result<MeasurementFamily, FormatError> {
        check_schema(&self.schema)?;
        let ms = self
            .measurements
            .into_iter()
            .map(|m| WeightedMeasurement::new(m.id, m.outcomes, m.weights))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MeasurementFamily::new(ms)?)
    }
}

pub fn parse_family(text: &str) -> Result<MeasurementFamily, FormatError> {
    serde_json::from_str::<FamilyDoc>(text)?.into_family()
}

pub fn family_to_json(family: &MeasurementFamily) -> String {
    to_pretty(&FamilyDoc::from_family(family))
}

/// Digest of the family's canonical (id-sorted, compact) serialization.
pub fn family_digest(family: &MeasurementFamily) -> String {
    let bytes = serde_json::to_vec(&FamilyDoc::from_family(family)).expect("family serializes");
    sha256_hex(&bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderingDoc {
    pub schema: String,
    pub family_digest: String,
    /// Pairs `(a, b)` with `a ⪰ b`; every other pair is false.
    pub holds: Vec<(EventRef, EventRef)>,
}

impl OrderingDoc {
    pub fn from_ordering(ord: &LikelihoodOrdering) -> Self {
        Self {
            schema: SCHEMA.into(),
            family_digest: family_digest(ord.family()),
            holds: ord
                .pairs()
                .map(|(a, b)| (ord.event_ref(a), ord.event_ref(b)))
                .collect(),
        }
    }

    pub fn into_ordering(self, family: Arc<MeasurementFamily>) -> Result<LikelihoodOrdering, FormatError> {
        check_schema(&self.schema)?;
        let found = family_digest(&family);
        if found != self.family_digest {
            return Err(FormatError::FamilyDigestMismatch {
                expected: self.family_digest,
                found,
            });
        }
        Ok(LikelihoodOrdering::from_pairs(
            family,
            self.holds.iter().map(|(a, b)| (a, b)),
        )?)
    }
}

pub fn parse_ordering(text: &str, family: Arc<MeasurementFamily>) -> Result<LikelihoodOrdering, FormatError> {
    serde_json::from_str::<OrderingDoc>(text)?.into_ordering(family)
}

pub fn ordering_to_json(ord: &LikelihoodOrdering) -> String {
    to_pretty(&OrderingDoc::from_ordering(ord))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignedMeasurementDoc {
    pub id: String,
    pub outcomes: Vec<String>,
    pub probabilities: Vec<RationalWeight>,
}

/// Per-outcome probabilities; event values follow by additivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentDoc {
    pub schema: String,
    pub family_digest: String,
    pub measurements: Vec<AssignedMeasurementDoc>,
}

impl AssignmentDoc {
    /// Fails with a field error if some singleton value lies outside `[0, 1]`.
    pub fn from_assignment(pr: &ProbabilityAssignment) -> Result<Self, FormatError> {
        let measurements = pr
            .family()
            .measurements()
            .iter()
            .enumerate()
            .map(|(m, meas)| {
                let probabilities = pr
                    .outcome_values(m)
                    .into_iter()
                    .map(|v| {
                        RationalWeight::new(v).map_err(|e| FormatError::Field {
                            field: format!("measurements[{m}].probabilities"),
                            message: e.to_string(),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Ok(AssignedMeasurementDoc {
                    id: meas.id().to_owned(),
                    outcomes: meas.outcomes().to_vec(),
                    probabilities,
                })
            })
            .collect::<Result<_, FormatError>>()?;
        Ok(Self {
            schema: SCHEMA.into(),
            family_digest: family_digest(pr.family()),
            measurements,
        })
    }
}

pub fn assignment_to_json(pr: &ProbabilityAssignment) -> Result<String, FormatError> {
    Ok(to_pretty(&AssignmentDoc::from_assignment(pr)?))
}

/// `[re, im]`.
pub type ComplexDoc = [f64; 2];

fn complex_doc(z: &Complex64) -> ComplexDoc {
    [z.re, z.im]
}

fn matrix_doc(m: &CMatrix) -> Vec<Vec<ComplexDoc>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_doc(&m[(i, j)])).collect())
        .collect()
}

fn matrix_from_doc(rows: &[Vec<ComplexDoc>], field: &str) -> Result<CMatrix, FormatError> {
    let n = rows.len();
    if n == 0 {
        return Err(FormatError::Field {
            field: field.into(),
            message: "empty matrix".into(),
        });
    }
    let cols = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(FormatError::Field {
            field: format!("{field}[{i}]"),
            message: format!("row has {} entries, expected {cols}", rows[i].len()),
        });
    }
    Ok(DMatrix::from_fn(n, cols, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralPairDoc {
    pub eigenvalue: f64,
    pub projector: Vec<Vec<ComplexDoc>>,
}

/// Either a dense Hermitian matrix, decomposed on load, or explicit
/// spectral pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ObservableDoc {
    Matrix(Vec<Vec<ComplexDoc>>),
    SpectralPairs(Vec<SpectralPairDoc>),
}

impl ObservableDoc {
    pub fn from_observable(obs: &Observable) -> Self {
        Self::SpectralPairs(
            obs.spectral_pairs()
                .iter()
                .map(|p| SpectralPairDoc {
                    eigenvalue: p.eigenvalue,
                    projector: matrix_doc(&p.projector),
                })
                .collect(),
        )
    }

    pub fn to_observable(&self, policy: &NumericPolicy) -> Result<Observable, FormatError> {
        match self {
            Self::Matrix(rows) => Ok(spectral_decompose(&matrix_from_doc(rows, "observable.matrix")?, policy.cluster_tol)?),
            Self::SpectralPairs(pairs) => {
                let pairs = pairs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        Ok(SpectralPair {
                            eigenvalue: p.eigenvalue,
                            projector: matrix_from_doc(&p.projector, &format!("observable.spectral_pairs[{i}].projector"))?,
                        })
                    })
                    .collect::<Result<Vec<_>, FormatError>>()?;
                let dim = pairs.first().map_or(0, |p| p.projector.nrows());
                Ok(Observable::with_policy(dim, pairs, policy)?)
            }
        }
    }
}

fn state_from_doc(components: &[ComplexDoc], policy: &NumericPolicy) -> Result<StateVector, FormatError> {
    Ok(StateVector::with_policy(
        components.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        policy,
    )?)
}

fn state_doc(state: &StateVector) -> Vec<ComplexDoc> {
    state.components().iter().map(complex_doc).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConventionEntry {
    pub outcome: String,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub schema: String,
    pub label: String,
    pub state: Vec<ComplexDoc>,
    pub observable: ObservableDoc,
    pub convention: Vec<ConventionEntry>,
}

impl ModelDoc {
    pub fn from_model(model: &MeasurementModel) -> Self {
        Self {
            schema: SCHEMA.into(),
            label: model.label().to_owned(),
            state: state_doc(model.state()),
            observable: ObservableDoc::from_observable(model.observable()),
            convention: model
                .convention()
                .into_iter()
                .map(|(o, x)| ConventionEntry {
                    outcome: o.to_owned(),
                    eigenvalue: x,
                })
                .collect(),
        }
    }

    pub fn into_model(self, policy: &NumericPolicy) -> Result<MeasurementModel, FormatError> {
        check_schema(&self.schema)?;
        let state = state_from_doc(&self.state, policy)?;
        let observable = self.observable.to_observable(policy)?;
        let convention = self.convention.into_iter().map(|c| (c.outcome, c.eigenvalue)).collect();
        Ok(MeasurementModel::with_policy(self.label, state, observable, convention, policy)?)
    }
}

pub fn parse_model(text: &str, policy: &NumericPolicy) -> Result<MeasurementModel, FormatError> {
    serde_json::from_str::<ModelDoc>(text)?.into_model(policy)
}

pub fn model_to_json(model: &MeasurementModel) -> String {
    to_pretty(&ModelDoc::from_model(model))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadrupleDoc {
    pub schema: String,
    pub state: Vec<ComplexDoc>,
    pub observable: ObservableDoc,
    /// Eigenvalues in the event, matched to the spectrum within the cluster
    /// tolerance.
    pub event: Vec<f64>,
}

impl QuadrupleDoc {
    pub fn from_quadruple(q: &MeasurementQuadruple) -> Self {
        Self {
            schema: SCHEMA.into(),
            state: state_doc(q.state()),
            observable: ObservableDoc::from_observable(q.observable()),
            event: q.event_values(),
        }
    }

    pub fn into_quadruple(self, policy: &NumericPolicy) -> Result<MeasurementQuadruple, FormatError> {
        check_schema(&self.schema)?;
        let state = state_from_doc(&self.state, policy)?;
        let observable = self.observable.to_observable(policy)?;
        Ok(MeasurementQuadruple::with_policy(state, observable, &self.event, policy)?)
    }
}

pub fn parse_quadruple(text: &str, policy: &NumericPolicy) -> Result<MeasurementQuadruple, FormatError> {
    serde_json::from_str::<QuadrupleDoc>(text)?.into_quadruple(policy)
}

pub fn quadruple_to_json(q: &MeasurementQuadruple) -> String {
    to_pretty(&QuadrupleDoc::from_quadruple(q))
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
