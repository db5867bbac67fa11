//! Checks the four axioms on the weight ordering and on the outcome-count
//! ordering of the same family.
//!
//! ```bash
//! cargo run --example axioms
//! ```

use born_kernel::decision::{check_all, induced_ordering, outcome_count_ordering, MeasurementFamily, WeightedMeasurement};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = MeasurementFamily::new(vec![
        WeightedMeasurement::from_fractions("coin", &[(1, 2), (1, 2)])?,
        WeightedMeasurement::from_fractions("die", &[(1, 2), (1, 4), (1, 4)])?,
    ])?;

    for (name, ord) in [("weights", induced_ordering(&family)?), ("outcome count", outcome_count_ordering(&family)?)] {
        println!("{name}: {} events", ord.len());
        for report in check_all(&ord) {
            println!(
                "  {:<12} {}  ({} violations)",
                format!("{:?}", report.axiom),
                if report.satisfied { "ok" } else { "FAILS" },
                report.violation_count
            );
            if let Some(w) = report.witnesses.first() {
                println!("    e.g. {}", serde_json::to_string(w)?);
            }
        }
    }
    Ok(())
}
