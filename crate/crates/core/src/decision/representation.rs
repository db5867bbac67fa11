use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ordering::{dense_ranks, event_weights, DEFAULT_MAX_EVENTS};
use super::{
    check_all, DecisionError, EventIndex, EventRef, EventSpace, LikelihoodOrdering,
    MeasurementFamily, DEFAULT_WITNESS_LIMIT,
};

/// A candidate probability measure: one exact value per event of the family.
///
/// Values are arbitrary rationals so that broken candidates can be
/// represented and diagnosed; [`verify_representation`] decides whether the
/// boundary and additivity conditions actually hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityAssignment {
    family: Arc<MeasurementFamily>,
    space: EventSpace,
    values: Vec<BigRational>,
}

impl ProbabilityAssignment {
    /// Extends per-outcome values additively over every event.
    pub fn from_outcome_values(
        family: Arc<MeasurementFamily>,
        outcome_values: Vec<Vec<BigRational>>,
    ) -> Result<Self, DecisionError> {
        let space = EventSpace::new(&family, DEFAULT_MAX_EVENTS)?;
        if outcome_values.len() != family.len() {
            return Err(DecisionError::InvalidArgument(format!(
                "{} value lists for {} measurements",
                outcome_values.len(),
                family.len()
            )));
        }
        let mut values = Vec::with_capacity(space.len());
        for (m, vals) in family.measurements().iter().zip(&outcome_values) {
            if vals.len() != m.len() {
                return Err(DecisionError::LengthMismatch {
                    id: m.id().to_owned(),
                    outcomes: m.len(),
                    weights: vals.len(),
                });
            }
            let start = values.len();
            values.push(BigRational::zero());
            for mask in 1u64..1 << m.len() {
                let low = mask.trailing_zeros() as usize;
                let rest = values[start + (mask & (mask - 1)) as usize].clone();
                values.push(rest + &vals[low]);
            }
        }
        Ok(Self {
            family,
            space,
            values,
        })
    }

    /// Values given directly per event index, with no additivity imposed.
    pub fn from_event_values<F>(family: Arc<MeasurementFamily>, value: F) -> Result<Self, DecisionError>
    where
        F: Fn(EventIndex) -> BigRational,
    {
        let space = EventSpace::new(&family, DEFAULT_MAX_EVENTS)?;
        let values = (0..space.len()).map(value).collect();
        Ok(Self {
            family,
            space,
            values,
        })
    }

    /// `Pr(E|M) = W_M(E)`.
    pub fn from_weights(family: Arc<MeasurementFamily>) -> Result<Self, DecisionError> {
        let space = EventSpace::new(&family, DEFAULT_MAX_EVENTS)?;
        let values = event_weights(&family, &space);
        Ok(Self {
            family,
            space,
            values,
        })
    }

    pub fn family(&self) -> &MeasurementFamily {
        &self.family
    }

    pub fn space(&self) -> &EventSpace {
        &self.space
    }

    pub fn value(&self, index: EventIndex) -> &BigRational {
        &self.values[index]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn value_of(&self, event: &EventRef) -> Result<&BigRational, DecisionError> {
        Ok(&self.values[self.space.resolve(&self.family, event)?])
    }

    pub fn set(&mut self, index: EventIndex, value: BigRational) {
        self.values[index] = value;
    }

    /// Values of the singleton events of measurement `m`.
    pub fn outcome_values(&self, m: usize) -> Vec<BigRational> {
        (0..self.space.outcome_count(m))
            .map(|i| self.values[self.space.index(m, 1 << i)].clone())
            .collect()
    }

    /// Whether every value equals the weight of its event.
    pub fn equals_weights(&self) -> bool {
        event_weights(&self.family, &self.space) == self.values
    }
}

/// One failed representation condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepresentationWitness {
    /// `Pr(∅|M) ≠ 0` or `Pr(S_M|M) ≠ 1`.
    Boundary { event: EventRef, value: String },
    /// Disjoint `E`, `F` with `Pr(E ∪ F) ≠ Pr(E) + Pr(F)`.
    Additivity { left: EventRef, right: EventRef },
    /// `Pr(a) ≥ Pr(b)` disagrees with `a ⪰ b`.
    Order {
        left: EventRef,
        right: EventRef,
        ordering_holds: bool,
        left_value: String,
        right_value: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub represents: bool,
    pub boundary_violations: u64,
    pub additivity_violations: u64,
    pub order_violations: u64,
    /// Leading witnesses, boundary first, then additivity, then order, each
    /// in canonical event order.
    pub witnesses: Vec<RepresentationWitness>,
}

impl RepresentationReport {
    pub fn violation_count(&self) -> u64 {
        self.boundary_violations + self.additivity_violations + self.order_violations
    }
}

/// Checks that `pr` represents `ord`: boundary values, additivity on disjoint
/// events, and `Pr(a) ≥ Pr(b) ⇔ a ⪰ b` for every pair.
pub fn verify_representation(
    pr: &ProbabilityAssignment,
    ord: &LikelihoodOrdering,
) -> Result<RepresentationReport, DecisionError> {
    verify_representation_with(pr, ord, DEFAULT_WITNESS_LIMIT)
}

pub fn verify_representation_with(
    pr: &ProbabilityAssignment,
    ord: &LikelihoodOrdering,
    witness_limit: usize,
) -> Result<RepresentationReport, DecisionError> {
    if pr.family.as_ref() != ord.family() {
        return Err(DecisionError::FamilyMismatch);
    }
    let space = &pr.space;
    let mut witnesses = Vec::new();

    let mut boundary = 0u64;
    let one = BigRational::from_integer(1.into());
    for m in 0..space.measurement_count() {
        for (idx, target) in [(space.empty_event(m), BigRational::zero()), (space.full_event(m), one.clone())] {
            if pr.values[idx] != target {
                boundary += 1;
                if witnesses.len() < witness_limit {
                    witnesses.push(RepresentationWitness::Boundary {
                        event: ord.event_ref(idx),
                        value: pr.values[idx].to_string(),
                    });
                }
            }
        }
    }

    // Unordered disjoint pairs {E, F}, enumerated per union U with E < F.
    let per_m: Vec<(u64, Vec<(EventIndex, EventIndex)>)> = (0..space.measurement_count())
        .into_par_iter()
        .map(|m| {
            let n = space.outcome_count(m);
            let mut count = 0u64;
            let mut found = Vec::new();
            for u in 0u64..1 << n {
                let vu = &pr.values[space.index(m, u)];
                let mut e = u;
                loop {
                    let f = u & !e;
                    if e < f {
                        let (ie, jf) = (space.index(m, e), space.index(m, f));
                        if &pr.values[ie] + &pr.values[jf] != *vu {
                            count += 1;
                            if found.len() < witness_limit {
                                found.push((ie, jf));
                            }
                        }
                    }
                    if e == 0 {
                        break;
                    }
                    e = (e - 1) & u;
                }
            }
            found.sort_unstable();
            (count, found)
        })
        .collect();
    let additivity = per_m.iter().map(|(c, _)| c).sum();
    for (l, r) in per_m.into_iter().flat_map(|(_, w)| w) {
        if witnesses.len() >= witness_limit {
            break;
        }
        witnesses.push(RepresentationWitness::Additivity {
            left: ord.event_ref(l),
            right: ord.event_ref(r),
        });
    }

    let ranks = dense_ranks(&pr.values);
    let n = space.len();
    let per_a: Vec<(u64, Vec<EventIndex>)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut count = 0u64;
            let mut found = Vec::new();
            for b in 0..n {
                if (ranks[a] >= ranks[b]) != ord.holds(a, b) {
                    count += 1;
                    if found.len() < witness_limit {
                        found.push(b);
                    }
                }
            }
            (count, found)
        })
        .collect();
    let order = per_a.iter().map(|(c, _)| c).sum();
    'outer: for (a, (_, bs)) in per_a.iter().enumerate() {
        for &b in bs {
            if witnesses.len() >= witness_limit {
                break 'outer;
            }
            witnesses.push(RepresentationWitness::Order {
                left: ord.event_ref(a),
                right: ord.event_ref(b),
                ordering_holds: ord.holds(a, b),
                left_value: pr.values[a].to_string(),
                right_value: pr.values[b].to_string(),
            });
        }
    }

    Ok(RepresentationReport {
        represents: boundary == 0 && additivity == 0 && order == 0,
        boundary_violations: boundary,
        additivity_violations: additivity,
        order_violations: order,
        witnesses,
    })
}

/// Fails with [`DecisionError::NonconformingDenominator`] unless every weight
/// denominator divides `k`.
pub(crate) fn require_denominators_divide(family: &MeasurementFamily, k: u64) -> Result<(), DecisionError> {
    if k == 0 {
        return Err(DecisionError::ZeroK);
    }
    let k_big = BigInt::from(k);
    for m in family.measurements() {
        let d = m.denominator_lcm();
        if !k_big.is_multiple_of(&d) {
            return Err(DecisionError::NonconformingDenominator {
                measurement: m.id().to_owned(),
                denominator: d.to_string(),
                k,
            });
        }
    }
    Ok(())
}

/// Builds the representing measure from the ordering alone.
///
/// The uniform `K`-outcome measurement `U` supplies block events
/// `B_j = {u_1..u_j}|U`. Every outcome of every measurement is matched to the
/// block it is `≃` to, and gets `j/K`; events are then filled in additively.
/// Weights enter only through the precondition checks.
pub fn derive_representation(ord: &LikelihoodOrdering, k: u64) -> Result<ProbabilityAssignment, DecisionError> {
    if k == 0 {
        return Err(DecisionError::ZeroK);
    }
    if let Some(failed) = check_all(ord).into_iter().find(|r| !r.satisfied) {
        return Err(DecisionError::PreconditionViolated(failed.axiom));
    }
    let family = ord.family_arc().clone();
    require_denominators_divide(&family, k)?;
    let u = family
        .uniform_measurement(k)
        .ok_or(DecisionError::MissingUniformMeasurement(k))?;
    let space = ord.space();
    let blocks: Vec<EventIndex> = (0..=k)
        .map(|j| {
            let mask = if j == 64 { u64::MAX } else { (1u64 << j) - 1 };
            space.index(u, mask)
        })
        .collect();
    let k_big = BigInt::from(k);
    let mut outcome_values = Vec::with_capacity(family.len());
    for (m, meas) in family.measurements().iter().enumerate() {
        let mut vals = Vec::with_capacity(meas.len());
        for i in 0..meas.len() {
            let e = space.index(m, 1 << i);
            let j = blocks
                .iter()
                .position(|&b| ord.equivalent(e, b))
                .ok_or_else(|| DecisionError::NoEquivalentBlock(ord.event_ref(e).to_string()))?;
            vals.push(BigRational::new(BigInt::from(j), k_big.clone()));
        }
        outcome_values.push(vals);
    }
    ProbabilityAssignment::from_outcome_values(family, outcome_values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{
        generate_rich_family, induced_ordering, induced_ordering_arc, outcome_count_ordering,
        WeightedMeasurement,
    };
    use num_traits::One;

    fn family(ms: &[(&str, &[(u64, u64)])]) -> MeasurementFamily {
        MeasurementFamily::new(
            ms.iter()
                .map(|(id, w)| WeightedMeasurement::from_fractions(*id, w).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn weights_represent_induced_ordering() {
        let fam = family(&[("a", &[(1, 3), (2, 3)]), ("b", &[(1, 6), (1, 2), (1, 3)])]);
        let ord = induced_ordering(&fam).unwrap();
        let pr = ProbabilityAssignment::from_weights(ord.family_arc().clone()).unwrap();
        let report = verify_representation(&pr, &ord).unwrap();
        assert!(report.represents);
        assert!(report.witnesses.is_empty());
    }

    #[test]
    fn perturbed_value_gives_order_witness() {
        let fam = generate_rich_family(4, 4).unwrap();
        let ord = induced_ordering(&fam).unwrap();
        let mut pr = ProbabilityAssignment::from_weights(ord.family_arc().clone()).unwrap();
        let e = ord.resolve(&EventRef::new("k4:1-3", ["o1"])).unwrap();
        pr.set(e, q(2, 4));
        let report = verify_representation(&pr, &ord).unwrap();
        assert!(!report.represents);
        assert!(report.order_violations > 0);
        assert!(report
            .witnesses
            .iter()
            .any(|w| matches!(w, RepresentationWitness::Order { .. })));
        // The singleton no longer adds up with its complement either.
        assert!(report.additivity_violations > 0);
    }

    #[test]
    fn boundary_and_additivity_failures_are_counted() {
        let fam = Arc::new(family(&[("m", &[(1, 2), (1, 2)])]));
        let pr = ProbabilityAssignment::from_event_values(fam.clone(), |_| q(1, 2)).unwrap();
        let ord = induced_ordering_arc(fam).unwrap();
        let report = verify_representation(&pr, &ord).unwrap();
        assert_eq!(report.boundary_violations, 2);
        // Every disjoint pair sums to 1 while every union is valued 1/2.
        assert_eq!(report.additivity_violations, 4);
    }

    #[test]
    fn single_certain_measurement() {
        let fam = family(&[("m", &[(1, 1)])]);
        let ord = induced_ordering(&fam).unwrap();
        let pr = derive_representation(&ord, 1).unwrap();
        assert_eq!(pr.outcome_values(0), vec![BigRational::one()]);
        assert!(verify_representation(&pr, &ord).unwrap().represents);
    }

    #[test]
    fn derive_recovers_weights_on_rich_family() {
        let fam = generate_rich_family(4, 4).unwrap();
        let ord = induced_ordering(&fam).unwrap();
        let pr = derive_representation(&ord, 4).unwrap();
        assert!(pr.equals_weights());
        assert!(verify_representation(&pr, &ord).unwrap().represents);
    }

    #[test]
    fn derive_preconditions() {
        let fam = family(&[("a", &[(1, 2), (1, 2)]), ("b", &[(1, 2), (1, 4), (1, 4)])]);
        let bad = outcome_count_ordering(&fam).unwrap();
        assert_eq!(
            derive_representation(&bad, 4).unwrap_err(),
            DecisionError::PreconditionViolated(crate::decision::Axiom::Equivalence)
        );
        let ord = induced_ordering(&fam).unwrap();
        assert_eq!(
            derive_representation(&ord, 4).unwrap_err(),
            DecisionError::MissingUniformMeasurement(4)
        );
        assert!(matches!(
            derive_representation(&ord, 2).unwrap_err(),
            DecisionError::NonconformingDenominator { .. }
        ));
        assert_eq!(derive_representation(&ord, 0).unwrap_err(), DecisionError::ZeroK);
    }

    #[test]
    fn family_mismatch() {
        let a = induced_ordering(&family(&[("a", &[(1, 1)])])).unwrap();
        let b = induced_ordering(&family(&[("b", &[(1, 1)])])).unwrap();
        let pr = ProbabilityAssignment::from_weights(a.family_arc().clone()).unwrap();
        assert_eq!(verify_representation(&pr, &b).unwrap_err(), DecisionError::FamilyMismatch);
    }
}
