//! Fundamental lower bounds on adversarial susceptibility from concentration
//! of measure, together with the exact and Monte Carlo oracles that check them.
//!
//! * [`specfun`]: standard-normal cdf, tail, quantile and the Mills bound.
//! * [`bounds`]: closed-form expansion and susceptibility bounds on the
//!   sphere and the cube, sparse and existence variants.
//! * [`geometry`]: exact expansion oracles (cap measure, slabs, sub-cubes,
//!   Gaussian half-spaces) and a seeded, thread-count-independent MC estimator.
//! * [`rescale`]: block upsampling/downsampling of images and their norm laws.
//! * [`attack`]: synthetic classifiers, PGD in ℓ0/ℓ2/ℓ∞ and susceptibility curves.
//! * [`cli`]: the `advbounds` command-line surface.

pub mod attack;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod norm;
pub mod quad;
pub mod rescale;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
pub use norm::NormOrder;
pub use specfun::{Probability, ZScore};
