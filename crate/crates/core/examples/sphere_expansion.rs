//! Exact geodesic expansion of a half sphere against its concentration bound.
//!
//! `cargo run --example sphere_expansion`

use advbounds::bounds::half_sphere_expansion_bound;
use advbounds::geometry::half_sphere_expansion_exact;

fn main() -> advbounds::Result<()> {
    println!("{:>6} {:>6} {:>12} {:>12}", "n", "eps", "exact", "bound");
    for n in [10, 100, 1000, 5000] {
        for eps in [0.05, 0.1, 0.2, 0.3, 0.5] {
            let exact = half_sphere_expansion_exact(n, eps)?.get();
            let bound = half_sphere_expansion_bound(n, eps)?.value();
            println!("{n:>6} {eps:>6} {exact:>12.8} {bound:>12.8}");
        }
    }
    Ok(())
}
