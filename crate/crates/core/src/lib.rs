//! Verification kernel for the decision-theoretic route to quantum
//! probabilities.
//!
//! - [`quantum`]: states, observables, outcome conventions and the weight
//!   function `W_M(E) = Σ_{x ∈ C(E)} ⟨ψ|P(x)|ψ⟩`.
//! - [`decision`]: likelihood orderings over events, the rationality axioms,
//!   derivation of the representing measure and exhaustive uniqueness search.
//! - [`neutrality`]: unitary intertwining, relabeling and the two-dimensional
//!   canonical form of a measurement.
//! - [`erasure`]: reward games, erasure of records, reachable state sets and
//!   refinement of measurements.
//! - [`formats`] and [`cli`]: JSON documents and the `born-kernel` binary.
//!
//! Hilbert-space computations use `f64` under a [`numeric::NumericPolicy`];
//! everything on the decision side is exact rational arithmetic.

pub mod cli;
pub mod decision;
pub mod erasure;
pub mod formats;
pub mod neutrality;
pub mod numeric;
pub mod quantum;
pub mod rational;
pub mod sample;
