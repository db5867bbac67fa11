use std::sync::Arc;

use num_rational::BigRational;
use rayon::prelude::*;

use super::{DecisionError, EventIndex, EventRef, EventSpace, MeasurementFamily};

/// Default ceiling on the number of events an extensional ordering may span
/// (the relation itself takes `n²` bits).
pub const DEFAULT_MAX_EVENTS: usize = 1 << 14;

/// A likelihood relation `E|M ⪰ F|N`, stored extensionally as one bit row per
/// left-hand event.
///
/// Nothing about the relation is assumed: it may be non-total, intransitive,
/// or anything else. Axiom conformance is established by the checks in
/// [`crate::decision::check_all`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LikelihoodOrdering {
    family: Arc<MeasurementFamily>,
    space: EventSpace,
    words: usize,
    bits: Vec<u64>,
}

impl LikelihoodOrdering {
    /// Builds the relation by evaluating `holds(a, b)` on every ordered pair.
    pub fn from_fn<F>(family: Arc<MeasurementFamily>, holds: F) -> Result<Self, DecisionError>
    where
        F: Fn(EventIndex, EventIndex) -> bool + Sync,
    {
        let space = EventSpace::new(&family, DEFAULT_MAX_EVENTS)?;
        let n = space.len();
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        bits.par_chunks_mut(words).enumerate().for_each(|(a, row)| {
            for b in 0..n {
                if holds(a, b) {
                    row[b / 64] |= 1 << (b % 64);
                }
            }
        });
        Ok(Self {
            family,
            space,
            words,
            bits,
        })
    }

    /// The relation holding exactly on the listed pairs.
    pub fn from_pairs<'a, I>(family: Arc<MeasurementFamily>, pairs: I) -> Result<Self, DecisionError>
    where
        I: IntoIterator<Item = (&'a EventRef, &'a EventRef)>,
    {
        let mut ord = Self::from_fn(family, |_, _| false)?;
        for (a, b) in pairs {
            let a = ord.resolve(a)?;
            let b = ord.resolve(b)?;
            ord.set(a, b, true);
        }
        Ok(ord)
    }

    pub fn family(&self) -> &MeasurementFamily {
        &self.family
    }

    pub fn family_arc(&self) -> &Arc<MeasurementFamily> {
        &self.family
    }

    pub fn space(&self) -> &EventSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// `a ⪰ b`.
    #[inline]
    pub fn holds(&self, a: EventIndex, b: EventIndex) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    /// `a ≃ b`: both directions hold.
    #[inline]
    pub fn equivalent(&self, a: EventIndex, b: EventIndex) -> bool {
        self.holds(a, b) && self.holds(b, a)
    }

    /// `a ≻ b`: forward holds and `≃` fails.
    #[inline]
    pub fn strictly(&self, a: EventIndex, b: EventIndex) -> bool {
        self.holds(a, b) && !self.holds(b, a)
    }

    /// Whether `a` is null, i.e. `a ≃ ∅|M` for its own measurement.
    pub fn is_null(&self, a: EventIndex) -> bool {
        let (m, _) = self.space.locate(a);
        self.equivalent(a, self.space.empty_event(m))
    }

    pub fn set(&mut self, a: EventIndex, b: EventIndex, value: bool) {
        let word = &mut self.bits[a * self.words + b / 64];
        if value {
            *word |= 1 << (b % 64);
        } else {
            *word &= !(1 << (b % 64));
        }
    }

    pub(crate) fn row(&self, a: EventIndex) -> &[u64] {
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    pub fn resolve(&self, event: &EventRef) -> Result<EventIndex, DecisionError> {
        self.space.resolve(&self.family, event)
    }

    pub fn event_ref(&self, index: EventIndex) -> EventRef {
        self.space.event_ref(&self.family, index)
    }

    /// All pairs `(a, b)` with `a ⪰ b`, in index order.
    pub fn pairs(&self) -> impl Iterator<Item = (EventIndex, EventIndex)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |a| (0..n).filter(move |&b| self.holds(a, b)).map(move |b| (a, b)))
    }

    /// Exact weight of every event, indexed like the event space.
    pub fn event_weights(&self) -> Vec<BigRational> {
        event_weights(&self.family, &self.space)
    }
}

pub(crate) fn event_weights(family: &MeasurementFamily, space: &EventSpace) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(space.len());
    for m in family.measurements() {
        let start = out.len();
        out.push(BigRational::default());
        for mask in 1u64..1 << m.len() {
            let low = mask.trailing_zeros() as usize;
            let rest = out[start + (mask & (mask - 1)) as usize].clone();
            out.push(rest + m.weights()[low].value());
        }
    }
    out
}

/// Dense ranks: equal keys share a rank, larger keys get larger ranks.
pub(crate) fn dense_ranks<T: Ord>(keys: &[T]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0u32; keys.len()];
    let mut rank = 0u32;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && keys[order[pos - 1]] != keys[i] {
            rank += 1;
        }
        ranks[i] = rank;
    }
    ranks
}

/// `E|M ⪰ F|N` iff `W_M(E) ≥ W_N(F)`, compared exactly.
pub fn induced_ordering(family: &MeasurementFamily) -> Result<LikelihoodOrdering, DecisionError> {
    induced_ordering_arc(Arc::new(family.clone()))
}

pub fn induced_ordering_arc(family: Arc<MeasurementFamily>) -> Result<LikelihoodOrdering, DecisionError> {
    let space = EventSpace::new(&family, DEFAULT_MAX_EVENTS)?;
    let ranks = dense_ranks(&event_weights(&family, &space));
    LikelihoodOrdering::from_fn(family, |a, b| ranks[a] >= ranks[b])
}

/// Ranks `E|M` by how many nonzero-weight outcomes `E` contains. Total and
/// transitive, but blind to weight, so it breaks equivalence whenever two
/// equal-weight events differ in count.
pub fn outcome_count_ordering(family: &MeasurementFamily) -> Result<LikelihoodOrdering, DecisionError> {
    let family = Arc::new(family.clone());
    let space = EventSpace::new(&family, DEFAULT_MAX_EVENTS)?;
    let counts: Vec<u32> = family
        .measurements()
        .iter()
        .flat_map(|m| (0u64..1 << m.len()).map(move |mask| m.nonzero_count(mask)))
        .collect();
    debug_assert_eq!(counts.len(), space.len());
    LikelihoodOrdering::from_fn(family, |a, b| counts[a] >= counts[b])
}
