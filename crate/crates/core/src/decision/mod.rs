//! Likelihood orderings over quantum events: axiom checks, the induced and
//! outcome-counting orderings, and constructive derivation and exhaustive
//! verification of the representing probability measure.

mod axioms;
mod event;
mod measurement;
mod ordering;
mod representation;
mod rich;
mod search;

use thiserror::Error;

pub use axioms::{
    check_all, check_dominance, check_equivalence, check_separation, check_transitivity,
    null_events, Axiom, AxiomChecker, AxiomReport, DominanceFailure, Witness,
};
pub use event::{EventIndex, EventRef, EventSpace, MAX_OUTCOMES_PER_MEASUREMENT};
pub use measurement::{MeasurementFamily, WeightedMeasurement};
pub use ordering::{
    induced_ordering, induced_ordering_arc, outcome_count_ordering, LikelihoodOrdering,
    DEFAULT_MAX_EVENTS,
};
pub use representation::{
    derive_representation, verify_representation, verify_representation_with, ProbabilityAssignment, RepresentationReport,
    RepresentationWitness,
};
pub use rich::{
    composition_count, generate_rich_family, generate_rich_family_with_cap, uniform_measurement,
    DEFAULT_FAMILY_CAP,
};
pub use search::{uniqueness_search, uniqueness_search_with, SearchLimits};

/// Default number of witnesses kept in a report; the total violation count is
/// always exact.
pub const DEFAULT_WITNESS_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("measurement `{0}` has no outcomes")]
    EmptyMeasurement(String),
    #[error("measurement `{id}`: {outcomes} outcomes but {weights} weights")]
    LengthMismatch {
        id: String,
        outcomes: usize,
        weights: usize,
    },
    #[error("measurement `{id}` repeats outcome `{outcome}`")]
    DuplicateOutcome { id: String, outcome: String },
    #[error("measurement `{id}` weights sum to {sum}, not exactly 1")]
    WeightsDontSumToOne { id: String, sum: String },
    #[error("family has no measurements")]
    EmptyFamily,
    #[error("measurement id `{0}` appears twice in the family")]
    DuplicateMeasurement(String),
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("measurement `{measurement}` has no outcome `{outcome}`")]
    UnknownOutcome { measurement: String, outcome: String },
    #[error("measurement `{id}` has {outcomes} outcomes; event spaces support at most {max}")]
    TooManyOutcomes { id: String, outcomes: usize, max: usize },
    #[error("family event space has {events} events; the limit is {max}")]
    EventSpaceTooLarge { events: usize, max: usize },
    #[error("family would hold {count} measurements; the cap is {cap}")]
    SizeLimitExceeded { count: String, cap: u64 },
    #[error("precondition violated: {0:?} fails")]
    PreconditionViolated(Axiom),
    #[error("family has no uniform {0}-outcome measurement")]
    MissingUniformMeasurement(u64),
    #[error("measurement `{measurement}` has weight denominator {denominator}, which does not divide {k}")]
    NonconformingDenominator {
        measurement: String,
        denominator: String,
        k: u64,
    },
    #[error("event {0} is not equivalent to any block of the uniform measurement")]
    NoEquivalentBlock(String),
    #[error("assignment and ordering are over different families")]
    FamilyMismatch,
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("K must be positive")]
    ZeroK,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
