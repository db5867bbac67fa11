//! Reachable states of the two reward games under erasure, for a range of
//! preparation weights.
//!
//! ```bash
//! cargo run --example erasure -- 3
//! ```

use born_kernel::erasure::{p_sweep, reachable_set, two_outcome_prep, GameSpec};
use born_kernel::rational::RationalWeight;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let range: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2);

    let p = RationalWeight::from_ints(1, 2)?;
    let prep = two_outcome_prep(&p);
    for (name, game) in [("game 1", GameSpec::game1()), ("game 2", GameSpec::game2())] {
        let set = reachable_set(&prep, &game, range)?;
        println!("{name} at p = {p}: {} reachable states", set.len());
        for s in &set.states {
            println!("  {s}");
        }
    }

    println!("p       equal");
    for row in p_sweep(8, range)? {
        println!("{:<7} {}", row.p.to_string(), row.equal);
    }
    Ok(())
}
