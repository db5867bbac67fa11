//! Weights of outcome events for a spin-1/2 measured along z, prepared along x.
//!
//! ```bash
//! cargo run --example quantum_weights
//! ```

use std::f64::consts::FRAC_1_SQRT_2;

use born_kernel::quantum::{rational_weight, spectral_decompose, weight, CMatrix, MeasurementModel, StateVector};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = |re: f64| Complex64::new(re, 0.0);
    let sigma_z = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let plus_x = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])?;
    let model = MeasurementModel::new(
        "stern-gerlach",
        plus_x,
        spectral_decompose(&sigma_z, 1e-9)?,
        vec![("up".into(), 1.0), ("down".into(), -1.0)],
    )?;

    for event in [vec![], vec!["up"], vec!["down"], vec!["up", "down"]] {
        println!("W({event:?}) = {:.12}", weight(&model, &event)?);
    }
    println!("W(up) as a fraction: {}", rational_weight(&model, ["up"], 16)?);
    Ok(())
}
