use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ordering::dense_ranks;
use super::{DecisionError, EventIndex, EventRef, LikelihoodOrdering, DEFAULT_WITNESS_LIMIT};
use crate::rational::RationalWeight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    Transitivity,
    Separation,
    Dominance,
    Equivalence,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [
        Axiom::Transitivity,
        Axiom::Separation,
        Axiom::Dominance,
        Axiom::Equivalence,
    ];
}

/// Which half of the dominance clause an `E ⊆ F` pair breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceFailure {
    /// `F|M ⪰ E|M` does not hold.
    SupersetNotAtLeastAsLikely,
    /// `F|M ≃ E|M` although `F∖E` is not null.
    TiedButDifferenceNotNull,
    /// `F∖E` is null but `F|M ≃ E|M` fails.
    DifferenceNullButNotTied,
}

/// A concrete violating instance. Replaying it against the ordering shows the
/// violation again.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `a ⪰ b` and `b ⪰ c` but not `a ⪰ c`.
    Transitivity { a: EventRef, b: EventRef, c: EventRef },
    /// A null event, listed when every event is null.
    Null { event: EventRef },
    Dominance {
        subset: EventRef,
        superset: EventRef,
        failure: DominanceFailure,
    },
    /// Two events of equal weight not judged `≃`.
    Equivalence {
        left: EventRef,
        right: EventRef,
        weight: RationalWeight,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub satisfied: bool,
    /// Exact number of violating instances.
    pub violation_count: u64,
    /// The first violating instances in canonical (measurement id, bitmask)
    /// order, at most the checker's witness limit.
    pub witnesses: Vec<Witness>,
}

impl AxiomReport {
    fn from_violations(axiom: Axiom, count: u64, witnesses: Vec<Witness>) -> Self {
        Self {
            axiom,
            satisfied: count == 0,
            violation_count: count,
            witnesses,
        }
    }

    /// Re-checks every witness against `ord`; true iff each still exhibits a
    /// violation.
    pub fn replay(&self, ord: &LikelihoodOrdering) -> Result<bool, DecisionError> {
        for w in &self.witnesses {
            let violated = match w {
                Witness::Transitivity { a, b, c } => {
                    let (a, b, c) = (ord.resolve(a)?, ord.resolve(b)?, ord.resolve(c)?);
                    ord.holds(a, b) && ord.holds(b, c) && !ord.holds(a, c)
                }
                Witness::Null { event } => ord.is_null(ord.resolve(event)?),
                Witness::Dominance {
                    subset,
                    superset,
                    failure,
                } => {
                    let e = ord.resolve(subset)?;
                    let f = ord.resolve(superset)?;
                    let (m, e_mask) = ord.space().locate(e);
                    let (m2, f_mask) = ord.space().locate(f);
                    if m != m2 || e_mask & !f_mask != 0 {
                        return Ok(false);
                    }
                    let diff_null = ord.is_null(ord.space().index(m, f_mask & !e_mask));
                    match failure {
                        DominanceFailure::SupersetNotAtLeastAsLikely => !ord.holds(f, e),
                        DominanceFailure::TiedButDifferenceNotNull => {
                            ord.equivalent(f, e) && !diff_null
                        }
                        DominanceFailure::DifferenceNullButNotTied => {
                            !ord.equivalent(f, e) && diff_null
                        }
                    }
                }
                Witness::Equivalence { left, right, .. } => {
                    let (l, r) = (ord.resolve(left)?, ord.resolve(right)?);
                    let weights = ord.event_weights();
                    weights[l] == weights[r] && !ord.equivalent(l, r)
                }
            };
            if !violated {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Violation count and witnesses found inside one measurement.
type MeasurementHits = (u64, Vec<(EventIndex, EventIndex, DominanceFailure)>);

/// Runs the axiom checks, keeping at most `witness_limit` witnesses each.
#[derive(Debug, Clone, Copy)]
pub struct AxiomChecker {
    pub witness_limit: usize,
}

impl Default for AxiomChecker {
    fn default() -> Self {
        Self {
            witness_limit: DEFAULT_WITNESS_LIMIT,
        }
    }
}

impl AxiomChecker {
    pub fn new(witness_limit: usize) -> Self {
        Self { witness_limit }
    }

    /// For all `a, b, c`: `a ⪰ b ∧ b ⪰ c ⇒ a ⪰ c`.
    ///
    /// Row `a` must contain row `b` whenever `a ⪰ b`; the violating `c` are
    /// the bits of `row(b) ∧ ¬row(a)`. Events with identical rows are grouped
    /// first, so the count costs one pass per pair of distinct rows.
    pub fn transitivity(&self, ord: &LikelihoodOrdering) -> AxiomReport {
        let n = ord.len();
        let words = n.div_ceil(64);
        let mut class_of = vec![0usize; n];
        let mut reps: Vec<EventIndex> = Vec::new();
        let mut index: HashMap<&[u64], usize> = HashMap::new();
        for (a, slot) in class_of.iter_mut().enumerate() {
            *slot = *index.entry(ord.row(a)).or_insert_with(|| {
                reps.push(a);
                reps.len() - 1
            });
        }
        let classes = reps.len();
        let mut members = vec![0u64; classes * words];
        let mut sizes = vec![0u64; classes];
        for (a, &c) in class_of.iter().enumerate() {
            members[c * words + a / 64] |= 1 << (a % 64);
            sizes[c] += 1;
        }
        let member_row = |c: usize| &members[c * words..(c + 1) * words];

        // bad[A][B] = |row(A) ∩ B| · |row(B) ∖ row(A)|.
        let bad: Vec<Vec<u64>> = (0..classes)
            .into_par_iter()
            .map(|ca| {
                let ra = ord.row(reps[ca]);
                (0..classes)
                    .map(|cb| {
                        let rb = ord.row(reps[cb]);
                        let hits: u64 = ra.iter().zip(member_row(cb)).map(|(x, m)| u64::from((x & m).count_ones())).sum();
                        if hits == 0 {
                            return 0;
                        }
                        let missing: u64 = rb.iter().zip(ra).map(|(y, x)| u64::from((y & !x).count_ones())).sum();
                        hits * missing
                    })
                    .collect()
            })
            .collect();
        let count = (0..classes)
            .map(|ca| sizes[ca] * bad[ca].iter().sum::<u64>())
            .sum();

        let mut witnesses = Vec::new();
        'scan: for a in 0..n {
            let ca = class_of[a];
            if bad[ca].iter().all(|&v| v == 0) {
                continue;
            }
            let row_a = ord.row(a);
            for b in (0..n).filter(|&b| ord.holds(a, b)) {
                if bad[ca][class_of[b]] == 0 {
                    continue;
                }
                for (w, (&rb, &ra)) in ord.row(b).iter().zip(row_a).enumerate() {
                    let mut missing = rb & !ra;
                    while missing != 0 {
                        if witnesses.len() >= self.witness_limit {
                            break 'scan;
                        }
                        let c = w * 64 + missing.trailing_zeros() as usize;
                        witnesses.push(Witness::Transitivity {
                            a: ord.event_ref(a),
                            b: ord.event_ref(b),
                            c: ord.event_ref(c),
                        });
                        missing &= missing - 1;
                    }
                }
            }
        }
        AxiomReport::from_violations(Axiom::Transitivity, count, witnesses)
    }

    /// Some event is not null.
    pub fn separation(&self, ord: &LikelihoodOrdering) -> AxiomReport {
        if (0..ord.len()).any(|a| !ord.is_null(a)) {
            return AxiomReport::from_violations(Axiom::Separation, 0, Vec::new());
        }
        let witnesses = (0..ord.len())
            .take(self.witness_limit)
            .map(|a| Witness::Null {
                event: ord.event_ref(a),
            })
            .collect();
        AxiomReport::from_violations(Axiom::Separation, ord.len() as u64, witnesses)
    }

    /// For `E ⊆ F ⊆ S_M`: `F|M ⪰ E|M`, with `F|M ≃ E|M` iff `F∖E` is null.
    pub fn dominance(&self, ord: &LikelihoodOrdering) -> AxiomReport {
        let space = ord.space();
        let per_m: Vec<MeasurementHits> = (0..space
            .measurement_count())
            .into_par_iter()
            .map(|m| {
                let n = space.outcome_count(m);
                let mut count = 0u64;
                let mut found = Vec::new();
                for f_mask in 0u64..1 << n {
                    let f = space.index(m, f_mask);
                    let mut e_mask = f_mask;
                    loop {
                        let e = space.index(m, e_mask);
                        let diff_null = ord.is_null(space.index(m, f_mask & !e_mask));
                        let failure = if !ord.holds(f, e) {
                            Some(DominanceFailure::SupersetNotAtLeastAsLikely)
                        } else if ord.holds(e, f) && !diff_null {
                            Some(DominanceFailure::TiedButDifferenceNotNull)
                        } else if !ord.holds(e, f) && diff_null {
                            Some(DominanceFailure::DifferenceNullButNotTied)
                        } else {
                            None
                        };
                        if let Some(failure) = failure {
                            count += 1;
                            found.push((e, f, failure));
                        }
                        if e_mask == 0 {
                            break;
                        }
                        e_mask = (e_mask - 1) & f_mask;
                    }
                }
                found.sort_by_key(|&(e, f, _)| (e, f));
                found.truncate(self.witness_limit);
                (count, found)
            })
            .collect();
        let count = per_m.iter().map(|(c, _)| c).sum();
        let witnesses = per_m
            .into_iter()
            .flat_map(|(_, w)| w)
            .take(self.witness_limit)
            .map(|(e, f, failure)| Witness::Dominance {
                subset: ord.event_ref(e),
                superset: ord.event_ref(f),
                failure,
            })
            .collect();
        AxiomReport::from_violations(Axiom::Dominance, count, witnesses)
    }

    /// Equal weight implies `≃`, across all measurements in the family.
    pub fn equivalence(&self, ord: &LikelihoodOrdering) -> AxiomReport {
        let weights = ord.event_weights();
        let ranks = dense_ranks(&weights);
        let mut by_rank: Vec<Vec<EventIndex>> = vec![Vec::new(); ranks.iter().max().map_or(0, |&r| r as usize + 1)];
        for (i, &r) in ranks.iter().enumerate() {
            by_rank[r as usize].push(i);
        }
        let mut pairs: Vec<(EventIndex, EventIndex)> = Vec::new();
        let mut count = 0u64;
        for class in &by_rank {
            for (k, &a) in class.iter().enumerate() {
                for &b in &class[k + 1..] {
                    if !ord.equivalent(a, b) {
                        count += 1;
                        pairs.push((a, b));
                    }
                }
            }
        }
        pairs.sort_unstable();
        let witnesses = pairs
            .into_iter()
            .take(self.witness_limit)
            .map(|(a, b)| Witness::Equivalence {
                left: ord.event_ref(a),
                right: ord.event_ref(b),
                weight: RationalWeight::new(weights[a].clone()).expect("event weights lie in [0,1]"),
            })
            .collect();
        AxiomReport::from_violations(Axiom::Equivalence, count, witnesses)
    }

    pub fn check(&self, axiom: Axiom, ord: &LikelihoodOrdering) -> AxiomReport {
        match axiom {
            Axiom::Transitivity => self.transitivity(ord),
            Axiom::Separation => self.separation(ord),
            Axiom::Dominance => self.dominance(ord),
            Axiom::Equivalence => self.equivalence(ord),
        }
    }

    pub fn check_all(&self, ord: &LikelihoodOrdering) -> Vec<AxiomReport> {
        Axiom::ALL.iter().map(|&a| self.check(a, ord)).collect()
    }
}

pub fn check_transitivity(ord: &LikelihoodOrdering) -> AxiomReport {
    AxiomChecker::default().transitivity(ord)
}

pub fn check_separation(ord: &LikelihoodOrdering) -> AxiomReport {
    AxiomChecker::default().separation(ord)
}

pub fn check_dominance(ord: &LikelihoodOrdering) -> AxiomReport {
    AxiomChecker::default().dominance(ord)
}

pub fn check_equivalence(ord: &LikelihoodOrdering) -> AxiomReport {
    AxiomChecker::default().equivalence(ord)
}

/// Transitivity, Separation, Dominance and Equivalence, in that order.
pub fn check_all(ord: &LikelihoodOrdering) -> Vec<AxiomReport> {
    AxiomChecker::default().check_all(ord)
}

/// Every `E|M` with `E|M ≃ ∅|M`, in canonical order.
pub fn null_events(ord: &LikelihoodOrdering) -> Vec<EventRef> {
    (0..ord.len())
        .filter(|&a| ord.is_null(a))
        .map(|a| ord.event_ref(a))
        .collect()
}
