//! Sparse (ℓ0) susceptibility and the support-volume threshold for existence
//! of adversarial examples.
//!
//! `cargo run --example sparse_and_existence`

use advbounds::bounds::{
    existence_check, existence_support_threshold, sparse_susceptibility_bound, ClassStats,
};
use advbounds::NormOrder;

fn main() -> advbounds::Result<()> {
    let stats = ClassStats::new(784, 0.5, 1.0)?;
    for pixels in [14, 28, 42, 56, 70] {
        let b = sparse_susceptibility_bound(&stats, pixels)?;
        println!(
            "change {pixels:>2} of 784 pixels: susceptibility >= {:.6}",
            b.value()
        );
    }

    let t = existence_support_threshold(NormOrder::Finite(2.0), 784, 1.0)?;
    println!(
        "l2, eps = 1: adversarial examples exist once the class support exceeds {:.6}",
        t.threshold.get()
    );
    for support in [0.01, 0.05] {
        println!(
            "  support {support}: {}",
            existence_check(support, NormOrder::Finite(2.0), 784, 1.0)?
        );
    }

    // ℓ0 needs ε ≥ √(n ln 2 / 2) before the estimate says anything.
    for eps in [10.0, 16.0, 20.0, 25.0] {
        let t = existence_support_threshold(NormOrder::Zero, 784, eps)?;
        println!(
            "l0, eps = {eps}: threshold {:.3e} (valid: {})",
            t.threshold.get(),
            t.valid
        );
    }
    Ok(())
}
