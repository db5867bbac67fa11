//! Canonical form of a measurement quadruple, before and after a random
//! intertwining isometry and an event-preserving relabeling.
//!
//! ```bash
//! cargo run --example neutrality
//! ```

use born_kernel::neutrality::{canonical_form, relabel, same_equivalence_class, unitary_transform};
use born_kernel::sample::{apply_table, random_event_preserving_relabeling, random_intertwiner, random_quadruple};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = StdRng::seed_from_u64(1);
    let q = random_quadruple(&mut rng, 4);
    println!("dim {}, eigenvalues {:?}, event {:?}", q.dim(), q.observable().eigenvalues(), q.event_values());

    let (u, x2) = random_intertwiner(&mut rng, q.observable(), 2);
    let moved = unitary_transform(&q, &u, &x2)?;
    let table = random_event_preserving_relabeling(&mut rng, &moved);
    let relabeled = relabel(&moved, |x| apply_table(&table, x))?;

    for (name, quad) in [("original", &q), ("transformed", &moved), ("relabeled", &relabeled)] {
        let f = canonical_form(quad);
        println!("{name:<12} dim {}  W = {:.12}  c = {:.12}  d = {:.12}", quad.dim(), f.weight_value, f.c, f.d);
    }
    println!("same class: {}", same_equivalence_class(&q, &relabeled));
    Ok(())
}
