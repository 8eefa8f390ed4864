//! Pushing Gaussian samples through Φ gives uniform points in the cube, with
//! a Lipschitz constant that depends on the target norm.
//!
//! `cargo run --example transport`

use advbounds::geometry::{gauss_to_cube_transport, transport_lipschitz};
use advbounds::rng::stream_rng;
use advbounds::NormOrder;
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> advbounds::Result<()> {
    let mut rng = stream_rng(1, 0);
    let z: Vec<f64> = (0..6).map(|_| rng.sample(StandardNormal)).collect();
    println!("z    = {z:.3?}");
    println!("T(z) = {:.3?}", gauss_to_cube_transport(&z)?.0);

    for norm in [
        NormOrder::Finite(1.0),
        NormOrder::Finite(2.0),
        NormOrder::Infinity,
    ] {
        let consts: Vec<String> = [2, 10, 100, 784]
            .iter()
            .map(|&n| Ok(format!("n={n}: {:.4}", transport_lipschitz(norm, n)?)))
            .collect::<advbounds::Result<_>>()?;
        println!("Lipschitz l2 -> l{norm}: {}", consts.join(", "));
    }
    Ok(())
}
