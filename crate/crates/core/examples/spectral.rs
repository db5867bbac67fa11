//! Spectral decomposition of a Hermitian matrix with a degenerate eigenvalue.
//!
//! ```bash
//! cargo run --example spectral
//! ```

use born_kernel::quantum::{max_abs_diff, spectral_decompose, CMatrix};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = |x: f64| Complex64::new(x, 0.0);
    // Eigenvalues 1, 1, 3.
    let m = CMatrix::from_row_slice(
        3,
        3,
        &[r(2.0), r(1.0), r(0.0), r(1.0), r(2.0), r(0.0), r(0.0), r(0.0), r(1.0)],
    );
    let obs = spectral_decompose(&m, 1e-9)?;
    for pair in obs.spectral_pairs() {
        let rank = pair.projector.trace().re.round();
        println!("eigenvalue {:+.6}  projector rank {rank}", pair.eigenvalue);
    }
    println!("reconstruction error {:.2e}", max_abs_diff(&obs.matrix(), &m));
    Ok(())
}
