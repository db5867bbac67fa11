use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::DecisionError;
use crate::rational::RationalWeight;

/// A measurement reduced to what the decision layer sees: outcome labels and
/// their exact weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedMeasurement {
    id: String,
    outcomes: Vec<String>,
    weights: Vec<RationalWeight>,
}

impl WeightedMeasurement {
    pub fn new(
        id: impl Into<String>,
        outcomes: Vec<String>,
        weights: Vec<RationalWeight>,
    ) -> Result<Self, DecisionError> {
        let id = id.into();
        if outcomes.is_empty() {
            return Err(DecisionError::EmptyMeasurement(id));
        }
        if outcomes.len() != weights.len() {
            return Err(DecisionError::LengthMismatch {
                id,
                outcomes: outcomes.len(),
                weights: weights.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for o in &outcomes {
            if !seen.insert(o.as_str()) {
                return Err(DecisionError::DuplicateOutcome {
                    id,
                    outcome: o.clone(),
                });
            }
        }
        let sum: BigRational = weights.iter().map(|w| w.value()).sum();
        if !sum.is_one() {
            return Err(DecisionError::WeightsDontSumToOne {
                id,
                sum: sum.to_string(),
            });
        }
        Ok(Self {
            id,
            outcomes,
            weights,
        })
    }

    /// Outcomes labelled `o1..on` with weights `num/den`.
    pub fn from_fractions(id: impl Into<String>, fractions: &[(u64, u64)]) -> Result<Self, DecisionError> {
        let outcomes = (1..=fractions.len()).map(|i| format!("o{i}")).collect();
        Self::from_labelled(id, outcomes, fractions)
    }

    pub fn from_labelled(
        id: impl Into<String>,
        outcomes: Vec<String>,
        fractions: &[(u64, u64)],
    ) -> Result<Self, DecisionError> {
        let id = id.into();
        let weights = fractions
            .iter()
            .map(|&(n, d)| {
                RationalWeight::from_ints(n, d)
                    .map_err(|e| DecisionError::InvalidArgument(format!("{id}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(id, outcomes, weights)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn weights(&self) -> &[RationalWeight] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == label)
    }

    /// Exact weight of the outcomes named in `labels`.
    pub fn weight_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<BigRational, DecisionError> {
        let mut total = BigRational::zero();
        let mut seen = BTreeSet::new();
        // Linear lookup is fine for small events; refinements can name millions.
        let index: Option<HashMap<&str, usize>> = (labels.len() > 32)
            .then(|| self.outcomes.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect());
        for l in labels {
            let l = l.as_ref();
            let found = match &index {
                Some(index) => index.get(l).copied(),
                None => self.outcome_index(l),
            };
            let i = found.ok_or_else(|| DecisionError::UnknownOutcome {
                measurement: self.id.clone(),
                outcome: l.to_owned(),
            })?;
            if seen.insert(i) {
                total += self.weights[i].value();
            }
        }
        Ok(total)
    }

    /// Weight of the event encoded as a bitmask over outcome positions.
    pub fn weight_of_mask(&self, mask: u64) -> BigRational {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, w)| w.value())
            .sum()
    }

    pub fn labels_of_mask(&self, mask: u64) -> Vec<String> {
        self.outcomes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, o)| o.clone())
            .collect()
    }

    /// Bitmask of the named outcomes.
    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<u64, DecisionError> {
        labels.iter().try_fold(0u64, |mask, l| {
            let l = l.as_ref();
            match self.outcome_index(l) {
                Some(i) if i < 64 => Ok(mask | 1 << i),
                _ => Err(DecisionError::UnknownOutcome {
                    measurement: self.id.clone(),
                    outcome: l.to_owned(),
                }),
            }
        })
    }

    /// Least common multiple of the weight denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()))
    }

    /// Number of outcomes with nonzero weight in `mask`.
    pub fn nonzero_count(&self, mask: u64) -> u32 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, w)| mask >> i & 1 == 1 && !w.is_zero())
            .count() as u32
    }
}

/// A finite set of measurements with unique ids, kept sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementFamily {
    measurements: Vec<WeightedMeasurement>,
}

impl MeasurementFamily {
    pub fn new(mut measurements: Vec<WeightedMeasurement>) -> Result<Self, DecisionError> {
        if measurements.is_empty() {
            return Err(DecisionError::EmptyFamily);
        }
        measurements.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = measurements.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(DecisionError::DuplicateMeasurement(w[0].id.clone()));
        }
        Ok(Self { measurements })
    }

    pub fn measurements(&self) -> &[WeightedMeasurement] {
        &self.measurements
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.measurements
            .binary_search_by(|m| m.id.as_str().cmp(id))
            .ok()
    }

    pub fn get(&self, id: &str) -> Option<&WeightedMeasurement> {
        self.index_of(id).map(|i| &self.measurements[i])
    }

    /// This family plus `extra`, skipping any whose id is already present.
    pub fn extended<I>(&self, extra: I) -> Result<Self, DecisionError>
    where
        I: IntoIterator<Item = WeightedMeasurement>,
    {
        let mut all = self.measurements.clone();
        for m in extra {
            if self.index_of(&m.id).is_none() && !all.iter().any(|x| x.id == m.id) {
                all.push(m);
            }
        }
        Self::new(all)
    }

    /// Same family with the measurement of the same id swapped for `m`.
    pub fn replaced(&self, m: WeightedMeasurement) -> Result<Self, DecisionError> {
        let idx = self
            .index_of(&m.id)
            .ok_or_else(|| DecisionError::UnknownMeasurement(m.id.clone()))?;
        let mut all = self.measurements.clone();
        all[idx] = m;
        Self::new(all)
    }

    pub fn denominator_lcm(&self) -> BigInt {
        self.measurements
            .iter()
            .fold(BigInt::one(), |acc, m| acc.lcm(&m.denominator_lcm()))
    }

    /// Whether the family contains a measurement with exactly `k` outcomes of
    /// weight `1/k` each.
    pub fn uniform_measurement(&self, k: u64) -> Option<usize> {
        let target = BigRational::new(BigInt::one(), BigInt::from(k));
        self.measurements.iter().position(|m| {
            m.len() as u64 == k && m.weights.iter().all(|w| *w.value() == target)
        })
    }
}
