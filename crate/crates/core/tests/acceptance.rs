//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p born-kernel --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use num_integer::Integer;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use born_kernel::decision::{
    check_all, check_equivalence, generate_rich_family, induced_ordering, induced_ordering_arc, null_events,
    outcome_count_ordering, uniqueness_search_with, verify_representation, EventRef, MeasurementFamily,
    ProbabilityAssignment, SearchLimits, WeightedMeasurement,
};
use born_kernel::erasure::{
    coarse_event_probability_invariance, reachable_set, refined_event_weight, sets_equal, three_outcome_game,
    two_outcome_prep, GameSpec, RefinementSpec,
};
use born_kernel::neutrality::{canonical_form, relabel, same_equivalence_class, unitary_transform, MeasurementQuadruple};
use born_kernel::quantum::{spectral_decompose, weight, CMatrix, MeasurementModel, StateVector};
use born_kernel::formats::ordering_to_json;
use born_kernel::rational::RationalWeight;
use born_kernel::sample::{
    apply_table, family_k, level_ordering, level_perturbations, random_event_preserving_relabeling, random_family,
    random_family_on_grid, random_intertwiner, random_quadruple, weight_ranks, with_rich_core, FamilyShape,
};

type Criterion = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("representation-forward", representation_forward),
        ("representation-uniqueness", representation_uniqueness),
        ("null-events-have-zero-weight", null_events_zero_weight),
        ("outcome-count-negative-control", negative_control),
        ("stern-gerlach-weight", stern_gerlach_weight),
        ("neutrality-canonical-form", neutrality_invariance),
        ("erasure-reachable-sets", erasure_sets),
        ("branching-indifference", branching_indifference),
        ("rational-sandwich-monotonicity", rational_sandwich),
        ("cli-contract", cli_contract),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn forward_families() -> Vec<MeasurementFamily> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let shape = FamilyShape {
        max_den: 64,
        max_outcomes: 8,
        max_measurements: 5,
        zero_chance: 0.15,
    };
    (0..200).map(|_| random_family(&mut rng, &shape)).collect()
}

/// Random families on a grid `1/K`, `K ≤ 16`, at most 6 outcomes each, joined
/// with every composition of `K` into at most three parts.
fn uniqueness_families() -> Vec<(MeasurementFamily, u64)> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let shape = FamilyShape {
        max_den: 16,
        max_outcomes: 6,
        max_measurements: 4,
        zero_chance: 0.15,
    };
    (0..50)
        .map(|_| {
            let grid = rng.random_range(1..=16);
            let base = random_family_on_grid(&mut rng, grid, &shape);
            let k = family_k(&base);
            (with_rich_core(&base, k).expect("core fits"), k)
        })
        .collect()
}

fn search_limits() -> SearchLimits {
    SearchLimits {
        max_outcomes: 6,
        max_measurements: 1024,
        ..SearchLimits::default()
    }
}

fn representation_forward() -> Result<String, String> {
    let families = forward_families();
    let mut events = 0;
    for (i, fam) in families.iter().enumerate() {
        let ord = induced_ordering(fam).map_err(|e| e.to_string())?;
        events += ord.len();
        for r in check_all(&ord) {
            ensure!(r.satisfied && r.witnesses.is_empty(), "family {i}: {:?} fails", r.axiom);
        }
        let pr = ProbabilityAssignment::from_weights(ord.family_arc().clone()).map_err(|e| e.to_string())?;
        let rep = verify_representation(&pr, &ord).map_err(|e| e.to_string())?;
        ensure!(
            rep.represents && rep.witnesses.is_empty(),
            "family {i}: weights do not represent the induced ordering ({} violations)",
            rep.violation_count()
        );
    }
    Ok(format!("{} families, {events} events, all four axioms and the representation hold", families.len()))
}

fn representation_uniqueness() -> Result<String, String> {
    let families = uniqueness_families();
    for (i, (fam, k)) in families.iter().enumerate() {
        let ord = induced_ordering(fam).map_err(|e| e.to_string())?;
        let found = uniqueness_search_with(&ord, *k, &search_limits()).map_err(|e| format!("family {i}: {e}"))?;
        ensure!(found.len() == 1, "family {i} (K={k}): {} assignments", found.len());
        ensure!(found[0].equals_weights(), "family {i}: the only assignment is not the weights");
    }
    let ks: BTreeSet<u64> = families.iter().map(|(_, k)| *k).collect();
    Ok(format!(
        "{} families, K in {:?}: exactly one assignment each, equal to the weights",
        families.len(),
        ks
    ))
}

fn zero_weight_events(fam: &MeasurementFamily) -> Vec<EventRef> {
    fam.measurements()
        .iter()
        .flat_map(|m| {
            (0u64..1 << m.len())
                .filter(|&mask| m.weight_of_mask(mask) == BigRational::from_integer(0.into()))
                .map(move |mask| EventRef {
                    measurement: m.id().to_owned(),
                    event: m.labels_of_mask(mask),
                })
        })
        .collect()
}

/// All total preorders on `levels` points, as maps onto `0..b`.
fn all_total_preorders(levels: usize) -> Vec<Vec<u32>> {
    let total = levels.pow(levels as u32);
    (0..total)
        .filter_map(|mut code| {
            let mut f = vec![0u32; levels];
            for slot in f.iter_mut() {
                *slot = (code % levels) as u32;
                code /= levels;
            }
            let used: BTreeSet<u32> = f.iter().copied().collect();
            (used.len() as u32 == *used.iter().max().unwrap() + 1).then_some(f)
        })
        .collect()
}

fn null_events_zero_weight() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let mut conforming = 0;
    let mut tried = 0;
    for (i, (fam, _)) in uniqueness_families().into_iter().enumerate() {
        let fam = Arc::new(fam);
        let induced = induced_ordering_arc(fam.clone()).map_err(|e| e.to_string())?;
        let zero = zero_weight_events(&fam);
        let levels = *weight_ranks(&fam).map_err(|e| e.to_string())?.iter().max().unwrap() as usize + 1;
        for level in level_perturbations(&mut rng, levels, 20) {
            tried += 1;
            let ord = level_ordering(fam.clone(), &level).map_err(|e| e.to_string())?;
            if check_all(&ord).iter().all(|r| r.satisfied) {
                conforming += 1;
                ensure!(null_events(&ord) == zero, "family {i}: null events differ from zero-weight events");
                ensure!(ord == induced, "family {i}: a conforming ordering differs from the induced one");
            }
        }
    }
    // The identity and any order-isomorphic random remap always survive.
    ensure!(conforming >= 50, "expected at least one conforming ordering per family, found {conforming}");

    // Exhaustive over every weight-level preorder of the rich family for small K.
    let mut exhaustive = 0;
    for k in 1..=6u64 {
        let fam = Arc::new(generate_rich_family(k, 3).map_err(|e| e.to_string())?);
        let induced = induced_ordering_arc(fam.clone()).map_err(|e| e.to_string())?;
        let zero = zero_weight_events(&fam);
        let preorders = all_total_preorders(k as usize + 1);
        exhaustive += preorders.len();
        let survivors: Vec<_> = preorders
            .par_iter()
            .filter_map(|level| {
                let ord = level_ordering(fam.clone(), level).expect("small family");
                check_all(&ord).iter().all(|r| r.satisfied).then_some(ord)
            })
            .collect();
        ensure!(survivors.len() == 1, "K={k}: {} conforming orderings", survivors.len());
        ensure!(survivors[0] == induced && null_events(&survivors[0]) == zero, "K={k}: wrong survivor");
    }
    Ok(format!(
        "{tried} perturbed orderings over 50 families, {conforming} conforming, all with null = zero weight; \
         {exhaustive} preorders for K ≤ 6 leave only the induced ordering"
    ))
}

fn has_equal_weight_different_count(fam: &MeasurementFamily) -> bool {
    let mut counts: BTreeMap<BigRational, BTreeSet<u32>> = BTreeMap::new();
    for m in fam.measurements() {
        for mask in 0u64..1 << m.len() {
            counts.entry(m.weight_of_mask(mask)).or_default().insert(m.nonzero_count(mask));
        }
    }
    counts.values().any(|c| c.len() > 1)
}

fn negative_control() -> Result<String, String> {
    let mut flagged = 0;
    let forward = forward_families();
    let rich = uniqueness_families();
    let all: Vec<&MeasurementFamily> = forward.iter().chain(rich.iter().map(|(f, _)| f)).collect();
    for (i, fam) in all.iter().enumerate() {
        let ord = outcome_count_ordering(fam).map_err(|e| e.to_string())?;
        let report = check_equivalence(&ord);
        let expected = has_equal_weight_different_count(fam);
        flagged += usize::from(expected);
        ensure!(
            report.satisfied != expected,
            "family {i}: equivalence satisfied = {} but equal-weight different-count pair present = {expected}",
            report.satisfied
        );
        ensure!(report.replay(&ord).map_err(|e| e.to_string())?, "family {i}: witnesses do not replay");
    }
    let mut searched = 0;
    for (i, (fam, k)) in rich.iter().enumerate() {
        if !has_equal_weight_different_count(fam) {
            continue;
        }
        searched += 1;
        let ord = outcome_count_ordering(fam).map_err(|e| e.to_string())?;
        let found = uniqueness_search_with(&ord, *k, &search_limits()).map_err(|e| e.to_string())?;
        ensure!(found.is_empty(), "rich family {i}: {} assignments represent the counting rule", found.len());
    }
    Ok(format!(
        "{} families, {flagged} with equal-weight different-count events, all flagged; \
         {searched} rich families searched, none representable",
        all.len()
    ))
}

fn stern_gerlach_weight() -> Result<String, String> {
    let c = |re: f64| num_complex::Complex64::new(re, 0.0);
    let sigma_z = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let z = spectral_decompose(&sigma_z, 1e-9).map_err(|e| e.to_string())?;
    let plus_x = StateVector::from_real(&[std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2])
        .map_err(|e| e.to_string())?;
    let model = MeasurementModel::new("stern-gerlach", plus_x, z, vec![("up".into(), 1.0), ("down".into(), -1.0)])
        .map_err(|e| e.to_string())?;
    let w = weight(&model, ["up"]).map_err(|e| e.to_string())?;
    ensure!((w - 0.5).abs() <= 1e-12, "weight(up) = {w}");
    Ok(format!("weight(up) = {w}"))
}

fn neutrality_invariance() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let tol = 1e-10;
    let mut quads: Vec<(usize, MeasurementQuadruple)> = Vec::new();
    for i in 0..100 {
        let q = random_quadruple(&mut rng, 6);
        let extra = rng.random_range(0..=2);
        let (u, x2) = random_intertwiner(&mut rng, q.observable(), extra);
        let moved = unitary_transform(&q, &u, &x2).map_err(|e| format!("quadruple {i}: {e}"))?;
        let table = random_event_preserving_relabeling(&mut rng, &moved);
        let relabeled = relabel(&moved, |x| apply_table(&table, x)).map_err(|e| format!("quadruple {i}: {e}"))?;
        let base = canonical_form(&q);
        for (what, other) in [("transform", &moved), ("relabel", &relabeled)] {
            let f = canonical_form(other);
            ensure!(
                (f.weight_value - base.weight_value).abs() <= tol
                    && (f.c - base.c).abs() <= tol
                    && (f.d - base.d).abs() <= tol,
                "quadruple {i}: {what} moves the canonical form from {base:?} to {f:?}"
            );
        }
        let canon = base.quadruple();
        quads.extend([(i, q), (i, moved), (i, relabeled), (i, canon)]);
    }
    let mut matched = 0;
    for (a, qa) in &quads {
        for (b, qb) in &quads {
            let same_weight = (qa.weight() - qb.weight()).abs() <= tol;
            let (fa, fb) = (canonical_form(qa), canonical_form(qb));
            let same_form = (fa.weight_value - fb.weight_value).abs() <= tol
                && (fa.c - fb.c).abs() <= tol
                && (fa.d - fb.d).abs() <= tol;
            ensure!(
                same_form == same_weight && same_equivalence_class(qa, qb) == same_weight,
                "quadruples {a}/{b}: identical canonical form {same_form}, matching weight {same_weight}"
            );
            matched += usize::from(same_weight && a != b);
        }
    }
    Ok(format!(
        "100 quadruples with random intertwiners and relabelings invariant within {tol:e}; \
         {} pairs classified, {matched} cross-matches all by equal weight",
        quads.len() * quads.len()
    ))
}

fn erasure_sets() -> Result<String, String> {
    let mut checked = 0;
    for range in 1..=4u32 {
        for k in 1..16u64 {
            let p = RationalWeight::from_ints(k, 16).unwrap();
            let prep = two_outcome_prep(&p);
            let a = reachable_set(&prep, &GameSpec::game1(), range).map_err(|e| e.to_string())?;
            let b = reachable_set(&prep, &GameSpec::game2(), range).map_err(|e| e.to_string())?;
            ensure!(sets_equal(&a, &b) == (k == 8), "p = {p}, range {range}: equality {}", sets_equal(&a, &b));
            checked += 1;
        }
    }
    let mut vacuous = 0;
    for range in 1..=4u32 {
        for k in 1..=8u64 {
            let w = RationalWeight::from_ints(k, 16).unwrap();
            let a = three_outcome_game(&w, &GameSpec::game1(), range).map_err(|e| e.to_string())?;
            let b = three_outcome_game(&w, &GameSpec::game2(), range).map_err(|e| e.to_string())?;
            ensure!(sets_equal(&a, &b), "three-outcome w = {w}, range {range}: sets differ");
            vacuous += usize::from(a.is_empty());
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} comparisons: two-outcome sets equal only at p = 1/2, three-outcome sets always equal \
         ({vacuous} empty at index range 1)"
    ))
}

fn branching_indifference() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let shape = FamilyShape {
        max_den: 6,
        max_outcomes: 4,
        max_measurements: 3,
        zero_chance: 0.2,
    };
    let mut parts_seen = BTreeSet::new();
    for i in 0..50 {
        let k = rng.random_range(1..=6u64);
        let parts = rng.random_range(2..=(12 / k).min(8));
        let fam = random_family_on_grid(&mut rng, k, &shape);
        let m = &fam.measurements()[rng.random_range(0..fam.len())];
        let live: Vec<&String> = m.outcomes().iter().zip(m.weights()).filter(|(_, w)| !w.is_zero()).map(|(o, _)| o).collect();
        let outcome = live[rng.random_range(0..live.len())].clone();
        let spec = RefinementSpec {
            measurement: m.id().to_owned(),
            outcome,
            parts,
        };
        parts_seen.insert(parts);
        let ok = coarse_event_probability_invariance(&fam, &spec, k).map_err(|e| format!("pair {i}: {e}"))?;
        ensure!(ok, "pair {i}: refining {spec:?} with K={k} changes a coarse probability");
    }
    let coin = WeightedMeasurement::from_labelled("coin", vec!["heads".into(), "tails".into()], &[(1, 2), (1, 2)])
        .unwrap();
    let spec = RefinementSpec {
        measurement: "coin".into(),
        outcome: "heads".into(),
        parts: 1_000_000,
    };
    let heads = refined_event_weight(&coin, &spec, &["heads".to_string()]).map_err(|e| e.to_string())?;
    ensure!(heads == BigRational::new(1.into(), 2.into()), "million-fold heads weight {heads}");
    Ok(format!(
        "50 refinements with parts in {parts_seen:?} leave every coarse probability unchanged; \
         a 10^6-fold split of heads keeps weight {heads}"
    ))
}

/// Reduced fractions in (0, 1) with denominator at most `n`, ascending.
fn farey_interior(n: u64) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = (2..=n)
        .flat_map(|d| (1..d).filter(move |&k| k.gcd(&d) == 1).map(move |k| (k, d)))
        .collect();
    out.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    out
}

fn rational_sandwich() -> Result<String, String> {
    let farey = farey_interior(32);
    let mut ms = vec![WeightedMeasurement::from_fractions("one", &[(1, 1)]).unwrap()];
    let mut binaries = BTreeSet::new();
    let mut add_binary = |ms: &mut Vec<WeightedMeasurement>, n: u64, d: u64| {
        if binaries.insert((n, d)) {
            ms.push(WeightedMeasurement::from_fractions(format!("b:{n}/{d}"), &[(n, d), (d - n, d)]).unwrap());
        }
    };
    for &(n, d) in &farey {
        add_binary(&mut ms, n, d);
    }
    for w in farey.windows(2) {
        let ((a, b), (c, d)) = (w[0], w[1]);
        // Neighbours satisfy c·b − a·d = 1, so q − p = 1/(b·d).
        let den = b * d;
        let (p, q) = (a * d, c * b);
        ms.push(
            WeightedMeasurement::from_fractions(format!("t:{a}/{b}:{c}/{d}"), &[(p, den), (q - p, den), (den - q, den)])
                .unwrap(),
        );
        add_binary(&mut ms, 1, den);
    }
    let fam = Arc::new(MeasurementFamily::new(ms).map_err(|e| e.to_string())?);
    let ord = induced_ordering_arc(fam.clone()).map_err(|e| e.to_string())?;
    for r in check_all(&ord) {
        ensure!(r.satisfied, "the weight ordering fails {:?}", r.axiom);
    }
    let event = |n: u64, d: u64| ord.resolve(&EventRef::new(format!("b:{n}/{d}"), ["o1"])).expect("binary present");
    let idx: Vec<usize> = farey.iter().map(|&(n, d)| event(n, d)).collect();
    let mut pairs = 0;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            ensure!(ord.strictly(idx[j], idx[i]), "{:?} not strictly above {:?}", farey[j], farey[i]);
            pairs += 1;
        }
    }

    // Level perturbations: whichever pass the axioms must keep every Farey
    // pair strict.
    let ranks = weight_ranks(&fam).map_err(|e| e.to_string())?;
    let levels = *ranks.iter().max().unwrap() as usize + 1;
    let farey_levels: Vec<usize> = idx.iter().map(|&e| ranks[e] as usize).collect();
    let mut rng = StdRng::seed_from_u64(0x5eed_0009);
    let mut perturbations = Vec::new();
    for _ in 0..120 {
        let i = rng.random_range(0..levels - 1);
        let mut level: Vec<u32> = (0..levels as u32).collect();
        if rng.random_bool(0.5) {
            level.swap(i, i + 1);
        } else {
            for l in level.iter_mut().skip(i + 1) {
                *l -= 1;
            }
        }
        perturbations.push(level);
    }
    perturbations.extend(level_perturbations(&mut rng, levels, 20).into_iter().skip(1 + 2 * (levels - 1)));
    let results: Vec<(bool, bool)> = perturbations
        .par_iter()
        .map(|level| {
            let o = level_ordering(fam.clone(), level).expect("family fits");
            let conforming = check_all(&o).iter().all(|r| r.satisfied);
            let strict = farey_levels.windows(2).all(|w| level[w[0]] < level[w[1]]);
            (conforming, strict)
        })
        .collect();
    let conforming = results.iter().filter(|(c, _)| *c).count();
    ensure!(
        results.iter().all(|&(c, s)| !c || s),
        "a conforming perturbation ties or reverses two Farey weights"
    );
    Ok(format!(
        "{} Farey weights, {pairs} pairs strictly ordered by the weight ordering; \
         {} perturbations, {conforming} conforming, none breaking a pair",
        farey.len(),
        results.len()
    ))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_born-kernel"))
}

fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = bin().args(args).env_remove("BORN_KERNEL_CAP").output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_contract() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).display().to_string();
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let fx = |name: &str| format!("{fixtures}/{name}");

    let (fam, ord) = (p("rich.json"), p("rich.ordering.json"));
    let count_ord = p("count.ordering.json");
    let rich = generate_rich_family(4, 4).map_err(|e| e.to_string())?;
    let counting = outcome_count_ordering(&rich).map_err(|e| e.to_string())?;
    std::fs::write(&count_ord, ordering_to_json(&counting)).map_err(|e| e.to_string())?;
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["gen-rich", "-K", "4", "--max-outcomes", "4", "--out", &fam].into_iter().map(String::from).collect(), 0),
        (vec!["gen-rich", "-K", "64", "--max-outcomes", "12", "--out", &p("big.json")].into_iter().map(String::from).collect(), 1),
        (vec!["check", "--family", &fam, "--ordering", &ord].into_iter().map(String::from).collect(), 0),
        (vec!["check", "--family", &fam, "--ordering", &count_ord].into_iter().map(String::from).collect(), 1),
        (vec!["check", "--family", &fx("truncated.json"), "--ordering", &ord].into_iter().map(String::from).collect(), 2),
        (vec!["derive", "--family", &fam, "--ordering", &ord, "-K", "4", "--out", &p("pr.json")].into_iter().map(String::from).collect(), 0),
        (vec!["derive", "--family", &fam, "--ordering", &ord, "-K", "3"].into_iter().map(String::from).collect(), 1),
        (vec!["demo-erasure", "--p-num", "1", "--p-den", "2"].into_iter().map(String::from).collect(), 0),
        (vec!["demo-erasure", "--p-num", "1", "--p-den", "4"].into_iter().map(String::from).collect(), 0),
        (vec!["demo-erasure", "--p-num", "1", "--p-den", "1"].into_iter().map(String::from).collect(), 2),
        (vec!["canon", "--quad", &fx("quad_half.json")].into_iter().map(String::from).collect(), 0),
        (vec!["canon", "--quad", &fx("truncated.json")].into_iter().map(String::from).collect(), 2),
    ];
    for (args, want) in &cases {
        let mut json_args = vec!["--json"];
        json_args.extend(args.iter().map(String::as_str));
        let (code, first) = run(&json_args);
        ensure!(code == *want, "{args:?}: exit {code}, expected {want}");
        let (code2, second) = run(&json_args);
        ensure!(code2 == code && first == second, "{args:?}: reports differ between runs");
        if args[0] == "demo-erasure" && code == 0 {
            let report: serde_json::Value = serde_json::from_slice(&first).map_err(|e| e.to_string())?;
            let equal = report["artifacts"]["equal"].as_bool();
            ensure!(equal == Some(args[4] == "2"), "{args:?}: equality verdict {equal:?}");
        }
    }

    // Derived assignment equals the family weights field for field.
    let family: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&fam).unwrap()).unwrap();
    let assignment: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p("pr.json")).unwrap()).unwrap();
    for (m, a) in family["measurements"].as_array().unwrap().iter().zip(assignment["measurements"].as_array().unwrap()) {
        ensure!(m["id"] == a["id"] && m["weights"] == a["probabilities"], "assignment for {} differs", m["id"]);
    }
    let (_, canon) = run(&["canon", "--quad", &fx("quad_half.json")]);
    let canon = String::from_utf8_lossy(&canon);
    ensure!(canon.contains("c 0.707106781187\n") && canon.contains("d 0.707106781187\n"), "canon output: {canon}");
    Ok(format!("{} invocations across all five subcommands, exit codes and repeat reports as expected", cases.len() * 2))
}
