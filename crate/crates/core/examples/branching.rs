//! Splitting an outcome into many equal suboutcomes leaves every coarse
//! event's probability where it was.
//!
//! ```bash
//! cargo run --example branching
//! ```

use born_kernel::decision::{MeasurementFamily, WeightedMeasurement};
use born_kernel::erasure::{coarse_event_probability_invariance, refined_event_weight, RefinementSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = MeasurementFamily::new(vec![WeightedMeasurement::from_fractions("m", &[(1, 3), (2, 3)])?])?;
    for parts in [2, 3, 4] {
        let spec = RefinementSpec {
            measurement: "m".into(),
            outcome: "o2".into(),
            parts,
        };
        let same = coarse_event_probability_invariance(&family, &spec, 3)?;
        println!("o2 split into {parts}: coarse probabilities unchanged = {same}");
    }

    let coin = WeightedMeasurement::from_fractions("coin", &[(1, 2), (1, 2)])?;
    let spec = RefinementSpec {
        measurement: "coin".into(),
        outcome: "o1".into(),
        parts: 1_000_000,
    };
    println!("heads after a 10^6-fold split: {}", refined_event_weight(&coin, &spec, &["o1".to_string()])?);
    Ok(())
}
