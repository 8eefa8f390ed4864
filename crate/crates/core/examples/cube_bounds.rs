//! Cube susceptibility bounds in each form, across ℓp norms.
//!
//! `cargo run --example cube_bounds`

use advbounds::bounds::{cube_susceptibility_bound, ClassStats, CubeForm};
use advbounds::NormOrder;

fn main() -> advbounds::Result<()> {
    // A 28×28 image class occupying 10% of the cube with density bound 1.
    let stats = ClassStats::new(784, 0.1, 1.0)?;
    for norm in [
        NormOrder::Finite(1.0),
        NormOrder::Finite(2.0),
        NormOrder::Infinity,
    ] {
        println!("p = {norm}");
        for eps in [0.01, 0.1, 0.5, 1.0, 2.0] {
            let tight = cube_susceptibility_bound(&stats, norm, eps, CubeForm::Tight)?;
            let mills = cube_susceptibility_bound(&stats, norm, eps, CubeForm::SimpleMills)?;
            let refined = cube_susceptibility_bound(&stats, norm, eps, CubeForm::LinfRefined)
                .map(|b| format!("{:.6}", b.value()))
                .unwrap_or_else(|e| format!("n/a ({e})"));
            println!(
                "  eps {eps:<5} tight {:.6}  mills {:.6}  linf-refined {refined}",
                tight.value(),
                mills.value()
            );
        }
    }
    Ok(())
}
