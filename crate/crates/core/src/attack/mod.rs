//! Desk-scale adversarial attacks on synthetic classifiers.
//!
//! Models implement [`Classifier`] with analytic input gradients. PGD ascends the
//! margin loss (runner-up score minus true score) under an ℓp budget intersected
//! with the unit cube.

mod curve;
mod data;
mod model;
mod pgd;
mod train;

pub use curve::{linear_margin_distance, susceptibility_curve, CurvePoint, SusceptibilityCurve};
pub use data::{synth_dataset, Dataset, SyntheticTask};
pub use model::{margin_and_gradient, Classifier, LinearModel, Mlp1Model};
pub use pgd::{
    is_feasible, pgd_attack, pgd_attack_from, PgdConfig, PgdOutcome, DEFAULT_STEPS,
    FEASIBILITY_SLACK, STEP_FACTOR,
};
pub use train::{train_linear, train_linear_logged, train_mlp, TrainLog};
