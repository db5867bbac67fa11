//! Reward games on branching states, erasure of result records, reachable
//! state sets, and refinement of measurements into finer branches.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{
    derive_representation, induced_ordering_arc, uniform_measurement, DecisionError, MeasurementFamily,
    WeightedMeasurement,
};
use crate::rational::RationalWeight;

/// Squared-amplitude tolerance for canonical state comparison.
pub const CANONICAL_TOL: f64 = 1e-12;

/// Default number of erasure microstates.
pub const DEFAULT_INDEX_RANGE: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErasureError {
    #[error("preparation has no results")]
    EmptyPreparation,
    #[error("preparation weights sum to {0}, not exactly 1")]
    WeightsDontSumToOne(String),
    #[error("weight of result `{0}` is not strictly positive")]
    NonpositiveWeight(String),
    #[error("result `{0}` appears twice")]
    DuplicateResult(String),
    #[error("game rewards result `{0}`, which the preparation does not produce")]
    UnknownRewardResult(String),
    #[error("branch state labels collide on {0}")]
    DuplicateLabel(String),
    #[error("branch state is not normalized: squared norm {0}")]
    NotNormalized(String),
    #[error("{given} values supplied for {branches} branches")]
    ChoiceLengthMismatch { given: usize, branches: usize },
    #[error("erasure index {index} outside 1..={range}")]
    IndexOutOfRange { index: u32, range: u32 },
    #[error("index range must be at least 1")]
    EmptyIndexRange,
    #[error("erasure would merge two branches into {0}")]
    ErasureCollision(String),
    #[error("w = {0} is outside (0, 1/2]")]
    WeightOutOfRange(String),
    #[error("measurement `{measurement}` has no outcome `{outcome}`")]
    UnknownOutcome { measurement: String, outcome: String },
    #[error("outcome `{0}` has weight zero and cannot be refined")]
    ZeroWeightRefinement(String),
    #[error("refinement needs at least one part")]
    InvalidParts,
    #[error(transparent)]
    Decision(#[from] DecisionError),
}

/// What a branch's record says.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchResult {
    Measured(String),
    /// Record destroyed; the index is the erasure microstate.
    Erased(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BranchLabel {
    pub result: BranchResult,
    pub reward: bool,
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reward = if self.reward { "reward" } else { "no reward" };
        match &self.result {
            BranchResult::Measured(r) => write!(f, "|'{r}'; {reward}⟩"),
            BranchResult::Erased(i) => write!(f, "|'erased({i})'; {reward}⟩"),
        }
    }
}

/// `Σ a_k |label_k⟩` with distinct labels and unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    branches: Vec<(BranchLabel, Complex64)>,
}

impl BranchState {
    pub fn new(branches: Vec<(BranchLabel, Complex64)>) -> Result<Self, ErasureError> {
        let mut seen = BTreeSet::new();
        for (label, _) in &branches {
            if !seen.insert(label) {
                return Err(ErasureError::DuplicateLabel(label.to_string()));
            }
        }
        let norm: f64 = branches.iter().map(|(_, a)| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > CANONICAL_TOL {
            return Err(ErasureError::NotNormalized(norm.to_string()));
        }
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[(BranchLabel, Complex64)] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Labels with squared amplitudes, sorted, zero branches dropped. Phase
    /// is discarded.
    pub fn canonical(&self) -> CanonicalState {
        let mut entries: Vec<(BranchLabel, f64)> = self
            .branches
            .iter()
            .map(|(l, a)| (l.clone(), a.norm_sqr()))
            .filter(|(_, w)| *w > CANONICAL_TOL)
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        CanonicalState { entries }
    }
}

impl fmt::Display for BranchState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .branches
            .iter()
            .map(|(l, a)| format!("({:.6}{:+.6}i){l}", a.re, a.im))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// A branch state up to per-branch phase and branch order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalState {
    pub entries: Vec<(BranchLabel, f64)>,
}

impl CanonicalState {
    /// Same labels, squared amplitudes within [`CANONICAL_TOL`].
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|((la, wa), (lb, wb))| la == lb && (wa - wb).abs() <= CANONICAL_TOL)
    }
}

impl fmt::Display for CanonicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .entries
            .iter()
            .map(|(l, w)| format!("√{w:.6}{l}"))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Which results pay out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub reward_results: BTreeSet<String>,
}

impl GameSpec {
    pub fn new<S: Into<String>>(rewards: impl IntoIterator<Item = S>) -> Self {
        Self {
            reward_results: rewards.into_iter().map(Into::into).collect(),
        }
    }

    /// Payoff iff the result is `up`.
    pub fn game1() -> Self {
        Self::new(["up"])
    }

    /// Payoff iff the result is `down`.
    pub fn game2() -> Self {
        Self::new(["down"])
    }
}

/// The state after measuring a preparation with the given result weights and
/// paying out per `game`: one branch per result, amplitude `√w`.
pub fn play_game(prep: &[(String, RationalWeight)], game: &GameSpec) -> Result<BranchState, ErasureError> {
    if prep.is_empty() {
        return Err(ErasureError::EmptyPreparation);
    }
    let mut seen = BTreeSet::new();
    for (r, w) in prep {
        if !seen.insert(r.as_str()) {
            return Err(ErasureError::DuplicateResult(r.clone()));
        }
        if w.is_zero() {
            return Err(ErasureError::NonpositiveWeight(r.clone()));
        }
    }
    let total: BigRational = prep.iter().map(|(_, w)| w.value()).sum();
    if !total.is_one() {
        return Err(ErasureError::WeightsDontSumToOne(total.to_string()));
    }
    if let Some(r) = game.reward_results.iter().find(|r| !seen.contains(r.as_str())) {
        return Err(ErasureError::UnknownRewardResult(r.clone()));
    }
    let branches = prep
        .iter()
        .map(|(r, w)| {
            let label = BranchLabel {
                result: BranchResult::Measured(r.clone()),
                reward: game.reward_results.contains(r),
            };
            (label, Complex64::new(w.to_f64().sqrt(), 0.0))
        })
        .collect();
    BranchState::new(branches)
}

/// Replaces each branch's record by `erased(choice[k])`, `choice[k]` in
/// `1..=index_range`. Choices that would give two branches the same label are
/// rejected, since the merge is not unitary.
pub fn erase(s: &BranchState, choice: &[u32], index_range: u32) -> Result<BranchState, ErasureError> {
    if index_range == 0 {
        return Err(ErasureError::EmptyIndexRange);
    }
    if choice.len() != s.len() {
        return Err(ErasureError::ChoiceLengthMismatch {
            given: choice.len(),
            branches: s.len(),
        });
    }
    let mut seen = BTreeSet::new();
    let mut branches = Vec::with_capacity(s.len());
    for ((label, amp), &i) in s.branches.iter().zip(choice) {
        if !(1..=index_range).contains(&i) {
            return Err(ErasureError::IndexOutOfRange {
                index: i,
                range: index_range,
            });
        }
        let erased = BranchLabel {
            result: BranchResult::Erased(i),
            reward: label.reward,
        };
        if !seen.insert(erased.clone()) {
            return Err(ErasureError::ErasureCollision(erased.to_string()));
        }
        branches.push((erased, *amp));
    }
    Ok(BranchState { branches })
}

/// Multiplies branch `k` by `e^{iθ_k}`.
pub fn apply_branch_phase(s: &BranchState, phases: &[f64]) -> Result<BranchState, ErasureError> {
    if phases.len() != s.len() {
        return Err(ErasureError::ChoiceLengthMismatch {
            given: phases.len(),
            branches: s.len(),
        });
    }
    let branches = s
        .branches
        .iter()
        .zip(phases)
        .map(|((l, a), &t)| (l.clone(), a * Complex64::from_polar(1.0, t)))
        .collect();
    Ok(BranchState { branches })
}

/// A finite set of canonical states, sorted and free of near-duplicates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReachableSet {
    pub states: Vec<CanonicalState>,
}

impl ReachableSet {
    pub fn from_states(states: impl IntoIterator<Item = CanonicalState>) -> Self {
        let mut out: Vec<CanonicalState> = Vec::new();
        for s in states {
            if !out.iter().any(|t| t.approx_eq(&s)) {
                out.push(s);
            }
        }
        out.sort_by(|a, b| {
            let ka = a.entries.iter().map(|(l, _)| l);
            let kb = b.entries.iter().map(|(l, _)| l);
            ka.cmp(kb).then_with(|| {
                let wa = a.entries.iter().map(|(_, w)| *w);
                let wb = b.entries.iter().map(|(_, w)| *w);
                wa.partial_cmp(wb).unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        Self { states: out }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, s: &CanonicalState) -> bool {
        self.states.iter().any(|t| t.approx_eq(s))
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.states.iter().filter(|s| other.contains(s)).count()
    }
}

/// Every erased state reachable from `play_game(prep, game)` over all
/// microstate choices in `1..=index_range`.
pub fn reachable_set(
    prep: &[(String, RationalWeight)],
    game: &GameSpec,
    index_range: u32,
) -> Result<ReachableSet, ErasureError> {
    if index_range == 0 {
        return Err(ErasureError::EmptyIndexRange);
    }
    let s = play_game(prep, game)?;
    Ok(ReachableSet::from_states(
        choices(s.len(), index_range)
            .filter_map(|c| erase(&s, &c, index_range).ok())
            .map(|e| e.canonical()),
    ))
}

/// All vectors in `{1..=range}^len`, lexicographic.
fn choices(len: usize, range: u32) -> impl Iterator<Item = Vec<u32>> {
    let total = (range as u64).pow(len as u32);
    (0..total).map(move |mut code| {
        let mut c = vec![1u32; len];
        for slot in c.iter_mut().rev() {
            *slot = 1 + (code % range as u64) as u32;
            code /= range as u64;
        }
        c
    })
}

/// Set equality under canonical state equality.
pub fn sets_equal(a: &ReachableSet, b: &ReachableSet) -> bool {
    a.states.iter().all(|s| b.contains(s)) && b.states.iter().all(|s| a.contains(s))
}

/// Two-outcome preparation `√p|up⟩ + √(1−p)|down⟩`.
pub fn two_outcome_prep(p: &RationalWeight) -> Vec<(String, RationalWeight)> {
    let q = RationalWeight::new(BigRational::one() - p.value()).expect("1 - p lies in [0,1]");
    vec![("up".into(), p.clone()), ("down".into(), q)]
}

/// `√w|+z⟩ + √w|−z⟩ + √(1−2w)|0_z⟩`, reward on `up` or `down` per `game`.
/// A zero third weight drops the branch.
pub fn three_outcome_game(w: &RationalWeight, game: &GameSpec, index_range: u32) -> Result<ReachableSet, ErasureError> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if w.is_zero() || *w.value() > half {
        return Err(ErasureError::WeightOutOfRange(w.to_string()));
    }
    let rest = BigRational::one() - w.value() - w.value();
    let mut prep = vec![("up".to_string(), w.clone()), ("down".to_string(), w.clone())];
    if !rest.is_zero() {
        prep.push(("zero".into(), RationalWeight::new(rest).expect("1 - 2w lies in [0,1]")));
    }
    reachable_set(&prep, game, index_range)
}

/// One row of the equality sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: RationalWeight,
    pub equal: bool,
}

/// For `p = k/den`, `k = 1..den−1`: whether games 1 and 2 reach the same set.
pub fn p_sweep(den: u64, index_range: u32) -> Result<Vec<SweepRow>, ErasureError> {
    (1..den)
        .map(|k| {
            let p = RationalWeight::from_ints(k, den).expect("0 < k < den");
            let prep = two_outcome_prep(&p);
            let a = reachable_set(&prep, &GameSpec::game1(), index_range)?;
            let b = reachable_set(&prep, &GameSpec::game2(), index_range)?;
            Ok(SweepRow {
                p,
                equal: sets_equal(&a, &b),
            })
        })
        .collect()
}

/// Label of the `k`-th (1-based) suboutcome of `outcome`.
pub fn suboutcome_label(outcome: &str, k: u64) -> String {
    format!("{outcome}_{k}")
}

/// Splits `outcome` into `parts` suboutcomes of weight `w/parts`, in place of
/// the original. `parts = 1` returns the measurement unchanged.
pub fn refine(m: &WeightedMeasurement, outcome: &str, parts: u64) -> Result<WeightedMeasurement, ErasureError> {
    let idx = m.outcome_index(outcome).ok_or_else(|| ErasureError::UnknownOutcome {
        measurement: m.id().to_owned(),
        outcome: outcome.to_owned(),
    })?;
    if parts == 0 {
        return Err(ErasureError::InvalidParts);
    }
    let w = &m.weights()[idx];
    if w.is_zero() {
        return Err(ErasureError::ZeroWeightRefinement(outcome.to_owned()));
    }
    if parts == 1 {
        return Ok(m.clone());
    }
    let part = RationalWeight::new(w.value() / BigInt::from(parts)).expect("w/parts lies in [0,1]");
    let n = m.len() + parts as usize - 1;
    let mut outcomes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (i, (o, wt)) in m.outcomes().iter().zip(m.weights()).enumerate() {
        if i == idx {
            for k in 1..=parts {
                outcomes.push(suboutcome_label(o, k));
                weights.push(part.clone());
            }
        } else {
            outcomes.push(o.clone());
            weights.push(wt.clone());
        }
    }
    Ok(WeightedMeasurement::new(m.id(), outcomes, weights)?)
}

/// Which outcome of which measurement to split, and how finely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementSpec {
    pub measurement: String,
    pub outcome: String,
    pub parts: u64,
}

/// Image of an outcome set under refinement: refined outcomes become all
/// their suboutcomes.
pub fn refined_image(spec: &RefinementSpec, event: &[String]) -> Vec<String> {
    event
        .iter()
        .flat_map(|o| {
            if *o == spec.outcome && spec.parts > 1 {
                (1..=spec.parts).map(|k| suboutcome_label(o, k)).collect()
            } else {
                vec![o.clone()]
            }
        })
        .collect()
}

fn with_uniform(family: &MeasurementFamily, k: u64) -> Result<MeasurementFamily, DecisionError> {
    if family.uniform_measurement(k).is_some() {
        return Ok(family.clone());
    }
    family.extended([uniform_measurement(format!("uniform-{k}"), k)?])
}

/// Derives the representation of the induced ordering before and after
/// refinement (with `K` scaled by `parts`, and the uniform measurements added
/// if missing), and compares every pre-refinement event with its image.
pub fn coarse_event_probability_invariance(
    family: &MeasurementFamily,
    spec: &RefinementSpec,
    k: u64,
) -> Result<bool, ErasureError> {
    let target = family
        .get(&spec.measurement)
        .ok_or_else(|| DecisionError::UnknownMeasurement(spec.measurement.clone()))?;
    let refined = refine(target, &spec.outcome, spec.parts)?;
    let k_after = k
        .checked_mul(spec.parts)
        .ok_or_else(|| DecisionError::InvalidArgument("K·parts overflows".into()))?;

    let before = Arc::new(with_uniform(family, k)?);
    let after = Arc::new(with_uniform(&with_uniform(family, k)?.replaced(refined)?, k_after)?);
    let ord_before = induced_ordering_arc(before.clone())?;
    let ord_after = induced_ordering_arc(after.clone())?;
    let pr_before = derive_representation(&ord_before, k)?;
    let pr_after = derive_representation(&ord_after, k_after)?;

    for m in family.measurements() {
        let mi = before.index_of(m.id()).expect("original measurement kept");
        for mask in 0u64..1 << m.len() {
            let labels = m.labels_of_mask(mask);
            let image = if m.id() == spec.measurement {
                refined_image(spec, &labels)
            } else {
                labels
            };
            let e_before = pr_before.value(ord_before.space().index(mi, mask));
            let image_ref = crate::decision::EventRef::new(m.id(), image);
            if pr_after.value_of(&image_ref)? != e_before {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact weight of the image of `event` after refinement; stays equal to the
/// coarse weight however large `parts` is.
pub fn refined_event_weight(
    m: &WeightedMeasurement,
    spec: &RefinementSpec,
    event: &[String],
) -> Result<BigRational, ErasureError> {
    let refined = refine(m, &spec.outcome, spec.parts)?;
    Ok(refined.weight_of(&refined_image(spec, event))?)
}
