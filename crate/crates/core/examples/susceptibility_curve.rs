//! Trains a linear classifier on synthetic data and traces its ℓ2 susceptibility
//! curve with PGD, for a concentrated and a diffuse dataset.
//!
//! `cargo run --release --example susceptibility_curve`

use advbounds::attack::{
    linear_margin_distance, susceptibility_curve, train_linear, PgdConfig, SyntheticTask,
};
use advbounds::NormOrder;

fn main() -> advbounds::Result<()> {
    let grid: Vec<f64> = (0..=30).map(|i| 0.02 * i as f64).collect();
    for spread in [0.02, 0.2] {
        let task = SyntheticTask::new(100, 2, spread, 7)?;
        let model = train_linear(&task.sample(400, 0), 200, 0.5, 7)?;
        let test = task.sample(400, 1);
        let curve = susceptibility_curve(
            &model,
            &test,
            NormOrder::Finite(2.0),
            &grid,
            &PgdConfig::default(),
        )?;

        let mut margins: Vec<f64> = test
            .points
            .iter()
            .zip(&test.labels)
            .map(|(x, &y)| linear_margin_distance(&model, x, y))
            .collect();
        margins.sort_by(f64::total_cmp);
        println!(
            "spread {spread}: median margin {:.3}, 10-90% rise width {:?}",
            margins[margins.len() / 2],
            curve.rise_width()
        );
        for p in curve.points.iter().step_by(5) {
            println!("  eps {:.2}  fooled {:.3}", p.eps, p.fooled_fraction.get());
        }
    }
    Ok(())
}
