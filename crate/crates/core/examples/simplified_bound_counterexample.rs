//! The simplified cube expansion bound as printed exceeds the exact expansion of
//! a slab, so it cannot be a lower bound; the Mills form stays below.
//!
//! `cargo run --example simplified_bound_counterexample`

use advbounds::bounds::{cube_expansion_bound_simple, SimpleVariant};
use advbounds::geometry::slab_expansion_exact;
use advbounds::NormOrder;

fn main() -> advbounds::Result<()> {
    let p2 = NormOrder::Finite(2.0);
    println!("half-volume slab in [0,1]^100, l2");
    println!(
        "{:>5} {:>10} {:>10} {:>10}",
        "eps", "exact", "printed", "mills"
    );
    for eps in [0.05, 0.1, 0.2, 0.3] {
        let exact = slab_expansion_exact(0.5, eps, p2)?.get();
        let printed = cube_expansion_bound_simple(p2, 100, eps, SimpleVariant::AsPrinted)?;
        let mills = cube_expansion_bound_simple(p2, 100, eps, SimpleVariant::Mills)?;
        let flag = if printed.value() > exact {
            "  <- exceeds exact"
        } else {
            ""
        };
        println!(
            "{eps:>5} {exact:>10.4} {:>10.4} {:>10.4}{flag}",
            printed.value(),
            mills.value()
        );
    }
    Ok(())
}
