//! Monte Carlo estimate of a Gaussian half-space expansion next to its closed form.
//!
//! `cargo run --release --example gaussian_isoperimetry`

use advbounds::geometry::{
    gaussian_halfspace_expansion_exact, mc_expansion_measure, Metric, SetDescriptor,
};
use advbounds::{specfun, NormOrder};

fn main() -> advbounds::Result<()> {
    let (n, mass, samples, seed) = (50, 0.3, 1_000_000, 17);
    let set = SetDescriptor::GaussianHalfspace {
        offset: specfun::quantile(mass),
    };
    for eps in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let est = mc_expansion_measure(
            &set,
            n,
            Metric::Lp(NormOrder::Finite(2.0)),
            eps,
            samples,
            seed,
        )?;
        let exact = gaussian_halfspace_expansion_exact(mass, eps)?.get();
        println!(
            "eps {eps:<4} exact {exact:.6}  mc {:.6} ± {:.6}",
            est.estimate.get(),
            est.stderr
        );
    }
    Ok(())
}
