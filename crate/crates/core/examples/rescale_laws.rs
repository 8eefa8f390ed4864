//! Block upsampling scales ℓ2 distances by b and ℓ0 by b², leaves ℓ∞ alone,
//! and downsampling undoes it exactly.
//!
//! `cargo run --example rescale_laws`

use advbounds::bounds::{mnist_rescale_transfer, RescaleDirection};
use advbounds::rescale::{
    check_laws, downsample, l0_distance, l2_distance, linf_distance, upsample, ImageGrid,
};

fn main() -> advbounds::Result<()> {
    let x = ImageGrid::new(2, 2, vec![0.1, 0.9, 0.4, 0.6])?;
    let y = ImageGrid::new(2, 2, vec![0.2, 0.9, 0.1, 0.6])?;
    for b in 1..=4 {
        let (ux, uy) = (upsample(&x, b)?, upsample(&y, b)?);
        println!(
            "b={b}: l2 {:.4} -> {:.4}, l0 {} -> {}, linf {:.2} -> {:.2}, round trip {}",
            l2_distance(&x, &y)?,
            l2_distance(&ux, &uy)?,
            l0_distance(&x, &y)?,
            l0_distance(&ux, &uy)?,
            linf_distance(&x, &y)?,
            linf_distance(&ux, &uy)?,
            downsample(&ux, b)? == x
        );
        assert!(check_laws(&x, &y, b, 1e-12)?.is_empty());
    }

    let t = mnist_rescale_transfer(1.5, 0.8, 4, RescaleDirection::Up)?;
    println!(
        "fooling 80% at eps 1.5 on 28x28 means fooling 80% at eps {} on 112x112",
        t.eps
    );
    Ok(())
}
