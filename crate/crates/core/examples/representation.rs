//! Derives the probability assignment from a rich family's ordering, then
//! searches for any other assignment that also represents it.
//!
//! ```bash
//! cargo run --example representation -- 6
//! ```

use born_kernel::decision::{derive_representation, generate_rich_family, induced_ordering, uniqueness_search_with, verify_representation, SearchLimits};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let family = generate_rich_family(k, k.min(4))?;
    let ord = induced_ordering(&family)?;
    println!("K = {k}: {} measurements, {} events", family.len(), ord.len());

    let pr = derive_representation(&ord, k)?;
    let report = verify_representation(&pr, &ord)?;
    println!("derived assignment represents the ordering: {}", report.represents);
    for (i, m) in family.measurements().iter().enumerate().take(5) {
        let values: Vec<String> = pr.outcome_values(i).iter().map(ToString::to_string).collect();
        println!("  {:<12} {}", m.id(), values.join(" "));
    }

    let limits = SearchLimits {
        max_measurements: family.len(),
        ..SearchLimits::default()
    };
    let all = uniqueness_search_with(&ord, k, &limits)?;
    println!("assignments with denominators dividing {k}: {}", all.len());
    Ok(())
}
