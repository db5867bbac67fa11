use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{DecisionError, MeasurementFamily, WeightedMeasurement};
use crate::rational::RationalWeight;

/// Default ceiling on the number of measurements [`generate_rich_family`]
/// will build.
pub const DEFAULT_FAMILY_CAP: u64 = 1_000_000;

/// Number of compositions of `k` into at most `max_parts` positive parts,
/// `Σ_{n ≤ max_parts} C(k−1, n−1)`.
pub fn composition_count(k: u64, max_parts: u64) -> BigUint {
    if k == 0 {
        return BigUint::zero();
    }
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    for n in 1..=max_parts.min(k) {
        total += &binom;
        // C(k−1, n) from C(k−1, n−1).
        binom = binom * BigUint::from(k - n) / BigUint::from(n);
    }
    total
}

/// Id used for the measurement with weights `parts / k`.
fn composition_id(k: u64, parts: &[u64]) -> String {
    let body: Vec<String> = parts.iter().map(u64::to_string).collect();
    format!("k{k}:{}", body.join("-"))
}

fn composition_measurement(k: u64, parts: &[u64]) -> Result<WeightedMeasurement, DecisionError> {
    let fractions: Vec<(u64, u64)> = parts.iter().map(|&p| (p, k)).collect();
    WeightedMeasurement::from_fractions(composition_id(k, parts), &fractions)
}

/// The measurement with `k` outcomes of weight `1/k`.
pub fn uniform_measurement(id: impl Into<String>, k: u64) -> Result<WeightedMeasurement, DecisionError> {
    if k == 0 {
        return Err(DecisionError::ZeroK);
    }
    let weights = vec![
        RationalWeight::from_ints(1, k).map_err(|e| DecisionError::InvalidArgument(e.to_string()))?;
        k as usize
    ];
    let outcomes = (1..=k).map(|i| format!("o{i}")).collect();
    WeightedMeasurement::new(id, outcomes, weights)
}

/// Every measurement with weights `(k_1/K, …, k_n/K)`, `k_i ≥ 1`,
/// `n ≤ max_outcomes`. Contains the uniform `K`-outcome measurement exactly
/// when `max_outcomes ≥ K`.
pub fn generate_rich_family(k: u64, max_outcomes: u64) -> Result<MeasurementFamily, DecisionError> {
    generate_rich_family_with_cap(k, max_outcomes, DEFAULT_FAMILY_CAP)
}

pub fn generate_rich_family_with_cap(
    k: u64,
    max_outcomes: u64,
    cap: u64,
) -> Result<MeasurementFamily, DecisionError> {
    if k == 0 {
        return Err(DecisionError::ZeroK);
    }
    if max_outcomes == 0 {
        return Err(DecisionError::InvalidArgument("max_outcomes must be positive".into()));
    }
    let count = composition_count(k, max_outcomes);
    if count.to_u64().is_none_or(|c| c > cap) {
        return Err(DecisionError::SizeLimitExceeded {
            count: count.to_string(),
            cap,
        });
    }
    let mut out = Vec::new();
    let mut parts = Vec::new();
    compositions(k, max_outcomes as usize, &mut parts, &mut |p| {
        out.push(composition_measurement(k, p))
    });
    MeasurementFamily::new(out.into_iter().collect::<Result<_, _>>()?)
}

fn compositions(remaining: u64, max_parts: usize, parts: &mut Vec<u64>, emit: &mut impl FnMut(&[u64])) {
    if remaining == 0 {
        emit(parts);
        return;
    }
    if parts.len() == max_parts {
        return;
    }
    for first in 1..=remaining {
        parts.push(first);
        compositions(remaining - first, max_parts, parts, emit);
        parts.pop();
    }
}
