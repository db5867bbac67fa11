//! Random instances for property tests and demos: weighted measurement
//! families, weight-level orderings, unitaries and measurement quadruples.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::decision::{
    generate_rich_family, DecisionError, EventIndex, LikelihoodOrdering, MeasurementFamily,
    WeightedMeasurement, DEFAULT_MAX_EVENTS,
};
use crate::neutrality::MeasurementQuadruple;
use crate::quantum::{CMatrix, Observable, SpectralPair, StateVector};
use crate::rational::lcm_of_denominators;
use num_traits::ToPrimitive;

/// Shape of a random family.
#[derive(Debug, Clone, Copy)]
pub struct FamilyShape {
    pub max_den: u64,
    pub max_outcomes: usize,
    pub max_measurements: usize,
    /// Chance that an outcome is forced to weight zero.
    pub zero_chance: f64,
}

impl Default for FamilyShape {
    fn default() -> Self {
        Self {
            max_den: 64,
            max_outcomes: 8,
            max_measurements: 5,
            zero_chance: 0.15,
        }
    }
}

/// `n` nonnegative integers summing to `total`, the positions flagged in
/// `zero` kept at 0 (one unflagged slot is always left).
fn random_parts<R: Rng + ?Sized>(rng: &mut R, total: u64, n: usize, zero_chance: f64) -> Vec<u64> {
    let mut live: Vec<bool> = (0..n).map(|_| !rng.random_bool(zero_chance)).collect();
    if !live.iter().any(|&l| l) {
        let i = rng.random_range(0..n);
        live[i] = true;
    }
    let mut parts = vec![0u64; n];
    let slots: Vec<usize> = (0..n).filter(|&i| live[i]).collect();
    for _ in 0..total {
        parts[slots[rng.random_range(0..slots.len())]] += 1;
    }
    parts
}

/// Measurement `id` with weights `parts[i] / den`.
fn measurement_from_parts(id: String, parts: &[u64], den: u64) -> WeightedMeasurement {
    let fractions: Vec<(u64, u64)> = parts.iter().map(|&p| (p, den)).collect();
    WeightedMeasurement::from_fractions(id, &fractions).expect("parts sum to den")
}

/// Up to `max_measurements` measurements `r1, r2, …`, each with its own
/// denominator in `1..=max_den`.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, shape: &FamilyShape) -> MeasurementFamily {
    let count = rng.random_range(1..=shape.max_measurements);
    let ms = (1..=count)
        .map(|i| {
            let den = rng.random_range(1..=shape.max_den);
            let n = rng.random_range(1..=shape.max_outcomes);
            let parts = random_parts(rng, den, n, shape.zero_chance);
            measurement_from_parts(format!("r{i}"), &parts, den)
        })
        .collect();
    MeasurementFamily::new(ms).expect("distinct ids")
}

/// As [`random_family`], but every weight is a multiple of `1/k`.
pub fn random_family_on_grid<R: Rng + ?Sized>(rng: &mut R, k: u64, shape: &FamilyShape) -> MeasurementFamily {
    let count = rng.random_range(1..=shape.max_measurements);
    let ms = (1..=count)
        .map(|i| {
            let n = rng.random_range(1..=shape.max_outcomes);
            let parts = random_parts(rng, k, n, shape.zero_chance);
            measurement_from_parts(format!("r{i}"), &parts, k)
        })
        .collect();
    MeasurementFamily::new(ms).expect("distinct ids")
}

/// Least common multiple of all weight denominators, as a machine integer.
pub fn family_k(family: &MeasurementFamily) -> u64 {
    let weights = family
        .measurements()
        .iter()
        .flat_map(|m| m.weights().iter().map(|w| w.value()));
    lcm_of_denominators(weights).to_u64().expect("denominator lcm fits in u64")
}

/// `family` plus every composition of `k` into at most three parts. This core
/// already pins the representation down uniquely; the random measurements
/// then have to fit into it.
pub fn with_rich_core(family: &MeasurementFamily, k: u64) -> Result<MeasurementFamily, DecisionError> {
    family.extended(generate_rich_family(k, 3)?.measurements().iter().cloned())
}

/// The ordering `a ⪰ b` iff `level[w(a)] ≥ level[w(b)]`, where `w` ranks the
/// distinct event weights (0 for the smallest) and `level` remaps those ranks
/// arbitrarily. The identity remapping gives the induced ordering.
pub fn level_ordering(family: Arc<MeasurementFamily>, level: &[u32]) -> Result<LikelihoodOrdering, DecisionError> {
    let ranks = weight_ranks(&family)?;
    LikelihoodOrdering::from_fn(family, |a: EventIndex, b: EventIndex| {
        level[ranks[a] as usize] >= level[ranks[b] as usize]
    })
}

/// Dense rank of each event's weight, and the number of distinct weights.
pub fn weight_ranks(family: &MeasurementFamily) -> Result<Vec<u32>, DecisionError> {
    let ord_space = crate::decision::EventSpace::new(family, DEFAULT_MAX_EVENTS)?;
    let mut weights = Vec::with_capacity(ord_space.len());
    for m in family.measurements() {
        for mask in 0u64..1 << m.len() {
            weights.push(m.weight_of_mask(mask));
        }
    }
    let mut distinct = weights.clone();
    distinct.sort();
    distinct.dedup();
    Ok(weights
        .iter()
        .map(|w| distinct.binary_search(w).expect("present") as u32)
        .collect())
}

/// Perturbations of the identity level map on `levels` weight levels:
/// random total preorders, adjacent merges and adjacent swaps.
pub fn level_perturbations<R: Rng + ?Sized>(rng: &mut R, levels: usize, random: usize) -> Vec<Vec<u32>> {
    let identity: Vec<u32> = (0..levels as u32).collect();
    let mut out = vec![identity.clone()];
    for i in 0..levels.saturating_sub(1) {
        let mut merged = identity.clone();
        for l in merged.iter_mut().skip(i + 1) {
            *l -= 1;
        }
        out.push(merged);
        let mut swapped = identity.clone();
        swapped.swap(i, i + 1);
        out.push(swapped);
    }
    for _ in 0..random {
        let buckets = rng.random_range(1..=levels.max(1)) as u32;
        out.push((0..levels).map(|_| rng.random_range(0..buckets)).collect());
    }
    out
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    StateVector::normalized((0..dim).map(|_| gaussian_complex(rng)).collect()).expect("nonzero Gaussian vector")
}

/// Observable `U diag(x) U†` with eigenvalues drawn from a few integers so
/// degenerate eigenspaces occur.
pub fn random_observable<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Observable {
    let values: Vec<f64> = (0..dim).map(|_| rng.random_range(-3..=3) as f64).collect();
    let u = random_unitary(rng, dim);
    Observable::diagonal(&values)
        .expect("diagonal observable")
        .conjugated_by(&u)
}

/// State, observable and event drawn at random; `dim` in `1..=max_dim`.
pub fn random_quadruple<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> MeasurementQuadruple {
    let dim = rng.random_range(1..=max_dim);
    let obs = random_observable(rng, dim);
    let n = obs.spectral_pairs().len();
    let event: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
    MeasurementQuadruple::from_indices(random_state(rng, dim), obs, event).expect("consistent dimensions")
}

/// A random isometry `U: H → H'` with `dim H' = dim H + extra` and an
/// observable `X'` on `H'` such that `U·X = X'·U`.
///
/// `U = W·(V ⊕ 0)·B` where `B` is unitary inside each eigenspace of `X` (so it
/// commutes with `X`), `V` embeds `H` into `H'` and `W` is a Haar unitary on
/// `H'`. The complement of the image gets an eigenvalue of its own or one of
/// `X`'s.
pub fn random_intertwiner<R: Rng + ?Sized>(rng: &mut R, x: &Observable, extra: usize) -> (CMatrix, Observable) {
    let dim = x.dim();
    let big = dim + extra;

    // B: random unitary on each eigenspace, built from an orthonormal basis of
    // the range of each projector.
    let mut b = CMatrix::zeros(dim, dim);
    for p in x.spectral_pairs() {
        let eig = p.projector.clone().symmetric_eigen();
        let basis: Vec<_> = (0..dim)
            .filter(|&j| eig.eigenvalues[j] > 0.5)
            .map(|j| eig.eigenvectors.column(j).into_owned())
            .collect();
        let k = basis.len();
        let local = random_unitary(rng, k);
        for (i, bi) in basis.iter().enumerate() {
            for (j, bj) in basis.iter().enumerate() {
                b += bi * bj.adjoint() * local[(i, j)];
            }
        }
    }

    let w = random_unitary(rng, big);
    let mut embed = CMatrix::zeros(big, dim);
    for i in 0..dim {
        embed[(i, i)] = Complex64::new(1.0, 0.0);
    }
    let u = &w * &embed * &b;

    let mut pairs: Vec<SpectralPair> = x
        .spectral_pairs()
        .iter()
        .map(|p| SpectralPair {
            eigenvalue: p.eigenvalue,
            projector: &u * &p.projector * u.adjoint(),
        })
        .collect();
    if extra > 0 {
        let complement = CMatrix::identity(big, big) - &u * u.adjoint();
        let eigenvalues = x.eigenvalues();
        let reuse = rng.random_bool(0.5);
        if reuse {
            let slot = rng.random_range(0..pairs.len());
            pairs[slot].projector += complement;
        } else {
            let fresh = eigenvalues.last().copied().unwrap_or(0.0) + 1.0 + rng.random_range(0..3) as f64;
            pairs.push(SpectralPair {
                eigenvalue: fresh,
                projector: complement,
            });
        }
    }
    let obs = Observable::new(big, pairs).expect("conjugated spectral family is valid");
    (u, obs)
}

/// A random relabeling `f` of `σ(X)` with `f⁻¹(f(E)) = E`: event and
/// non-event eigenvalues are sent to disjoint value sets, merging freely
/// within each side.
pub fn random_event_preserving_relabeling<R: Rng + ?Sized>(
    rng: &mut R,
    q: &MeasurementQuadruple,
) -> Vec<(f64, f64)> {
    let pairs = q.observable().spectral_pairs();
    let mut targets: Vec<i32> = (0..10).collect();
    targets.shuffle(rng);
    let (event_targets, other_targets) = targets.split_at(5);
    (0..pairs.len())
        .map(|i| {
            let pool = if q.event_indices().contains(&i) { event_targets } else { other_targets };
            let y = pool[rng.random_range(0..pool.len())] as f64 * 0.5;
            (pairs[i].eigenvalue, y)
        })
        .collect()
}

/// Looks up `x` in a table built by [`random_event_preserving_relabeling`].
pub fn apply_table(table: &[(f64, f64)], x: f64) -> f64 {
    table
        .iter()
        .find(|(from, _)| *from == x)
        .map(|(_, to)| *to)
        .unwrap_or(x)
}
