use num_bigint::BigInt;
use num_rational::BigRational;

use super::representation::require_denominators_divide;
use super::{
    verify_representation, DecisionError, EventIndex, LikelihoodOrdering, ProbabilityAssignment,
};

/// Bounds on the brute-force search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_outcomes: usize,
    pub max_measurements: usize,
    /// More surviving assignments than this aborts the search.
    pub max_solutions: usize,
    /// Search-tree nodes visited before giving up.
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_outcomes: 12,
            max_measurements: 6,
            max_solutions: 4096,
            max_nodes: 200_000_000,
        }
    }
}

/// Every additive assignment with values in `{0, 1/K, …, 1}` that represents
/// `ord`, in lexicographic order of singleton numerators.
pub fn uniqueness_search(ord: &LikelihoodOrdering, k: u64) -> Result<Vec<ProbabilityAssignment>, DecisionError> {
    uniqueness_search_with(ord, k, &SearchLimits::default())
}

/// As [`uniqueness_search`] with explicit limits.
///
/// Measurements are filled in smallest first. Within one, singleton
/// numerators are chosen left to right and the last is forced by the total.
/// As soon as an event's value is known it is compared against every event
/// already valued, so partial assignments contradicting the ordering are cut
/// before they are extended.
pub fn uniqueness_search_with(
    ord: &LikelihoodOrdering,
    k: u64,
    limits: &SearchLimits,
) -> Result<Vec<ProbabilityAssignment>, DecisionError> {
    let family = ord.family_arc().clone();
    require_denominators_divide(&family, k)?;
    if family.len() > limits.max_measurements {
        return Err(DecisionError::SearchSpaceTooLarge(format!(
            "{} measurements, limit {}",
            family.len(),
            limits.max_measurements
        )));
    }
    if let Some(m) = family.measurements().iter().find(|m| m.len() > limits.max_outcomes) {
        return Err(DecisionError::SearchSpaceTooLarge(format!(
            "measurement `{}` has {} outcomes, limit {}",
            m.id(),
            m.len(),
            limits.max_outcomes
        )));
    }
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by_key(|&m| (family.measurements()[m].len(), m));

    let mut search = Search {
        ord,
        k: k as i64,
        order,
        values: vec![-1; ord.len()],
        valued: Vec::with_capacity(ord.len()),
        found: Vec::new(),
        nodes: 0,
        limits,
    };
    search.measurement(0)?;

    let k_big = BigInt::from(k);
    let mut out = Vec::with_capacity(search.found.len());
    for values in search.found {
        let pr = ProbabilityAssignment::from_event_values(family.clone(), |e| {
            BigRational::new(BigInt::from(values[e]), k_big.clone())
        })?;
        if verify_representation(&pr, ord)?.represents {
            out.push(pr);
        }
    }
    Ok(out)
}

struct Search<'a> {
    ord: &'a LikelihoodOrdering,
    k: i64,
    order: Vec<usize>,
    /// Numerator of each valued event, −1 while unknown.
    values: Vec<i64>,
    valued: Vec<EventIndex>,
    found: Vec<Vec<i64>>,
    nodes: u64,
    limits: &'a SearchLimits,
}

impl Search<'_> {
    fn consistent(&self, e: EventIndex) -> bool {
        let ve = self.values[e];
        if !self.ord.holds(e, e) {
            return false;
        }
        self.valued.iter().all(|&c| {
            let vc = self.values[c];
            (ve >= vc) == self.ord.holds(e, c) && (vc >= ve) == self.ord.holds(c, e)
        })
    }

    /// Values `e`, checks it, and records it; returns false (leaving nothing
    /// recorded) on conflict.
    fn push(&mut self, e: EventIndex, v: i64) -> bool {
        self.values[e] = v;
        if self.consistent(e) {
            self.valued.push(e);
            true
        } else {
            self.values[e] = -1;
            false
        }
    }

    fn pop_to(&mut self, len: usize) {
        for e in self.valued.drain(len..) {
            self.values[e] = -1;
        }
    }

    fn measurement(&mut self, pos: usize) -> Result<(), DecisionError> {
        if pos == self.order.len() {
            if self.found.len() == self.limits.max_solutions {
                return Err(DecisionError::SearchSpaceTooLarge(format!(
                    "more than {} representing assignments",
                    self.limits.max_solutions
                )));
            }
            self.found.push(self.values.clone());
            return Ok(());
        }
        let m = self.order[pos];
        let mark = self.valued.len();
        let empty = self.ord.space().empty_event(m);
        if self.push(empty, 0) {
            self.outcome(pos, m, 0, self.k)?;
        }
        self.pop_to(mark);
        Ok(())
    }

    fn outcome(&mut self, pos: usize, m: usize, i: usize, remaining: i64) -> Result<(), DecisionError> {
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            return Err(DecisionError::SearchSpaceTooLarge(format!(
                "more than {} search nodes",
                self.limits.max_nodes
            )));
        }
        let n = self.ord.space().outcome_count(m);
        if i == n {
            return self.measurement(pos + 1);
        }
        let choices = if i + 1 == n { remaining..=remaining } else { 0..=remaining };
        for v in choices {
            let mark = self.valued.len();
            if self.value_new_events(m, i, v) {
                self.outcome(pos, m, i + 1, remaining - v)?;
            }
            self.pop_to(mark);
        }
        Ok(())
    }

    /// Values every event whose highest outcome is `i`, given singleton value `v`.
    fn value_new_events(&mut self, m: usize, i: usize, v: i64) -> bool {
        let space = self.ord.space();
        let bit = 1u64 << i;
        for low in 0..bit {
            let e = space.index(m, bit | low);
            let base = self.values[space.index(m, low)];
            if !self.push(e, base + v) {
                return false;
            }
        }
        true
    }
}
