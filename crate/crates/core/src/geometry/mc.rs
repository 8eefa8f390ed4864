use rayon::prelude::*;

use super::{fill_cube, fill_gaussian, fill_sphere, Ambient, Metric, SetDescriptor};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::specfun::Probability;

/// Samples per shard. Shards are the unit of parallel work; fixing their size
/// makes estimates independent of the worker count.
pub const SHARD_SIZE: u64 = 16_384;

/// Monte Carlo estimate of an expansion measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionEstimate {
    pub estimate: Probability,
    /// Bernoulli standard error `√(p(1-p)/samples)`.
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl ExpansionEstimate {
    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.estimate.get() - value).abs() <= k * self.stderr
    }
}

/// Estimates the measure of `set(ε, metric)` by sampling from the set's ambient
/// measure and testing the closed-form point-to-set distance.
pub fn mc_expansion_measure(
    set: &SetDescriptor,
    n: usize,
    metric: Metric,
    eps: f64,
    samples: u64,
    seed: u64,
) -> Result<ExpansionEstimate> {
    if samples == 0 {
        return Err(Error::Invalid("samples must be at least 1".into()));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::domain(format!(
            "ε must be finite and >= 0, got {eps}"
        )));
    }
    set.validate(n)?;
    set.check_metric(metric)?;
    let ambient = set.ambient()?;

    let shards = samples.div_ceil(SHARD_SIZE);
    let hits: u64 = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
            let mut rng = stream_rng(seed, shard);
            let mut buf = vec![0.0; n];
            let mut hits = 0u64;
            for _ in 0..count {
                match ambient {
                    Ambient::Sphere => fill_sphere(&mut buf, &mut rng),
                    Ambient::Cube => fill_cube(&mut buf, &mut rng),
                    Ambient::Gaussian => fill_gaussian(&mut buf, &mut rng),
                }
                if set.distance_unchecked(&buf, metric) <= eps {
                    hits += 1;
                }
            }
            hits
        })
        .sum();

    let p = hits as f64 / samples as f64;
    Ok(ExpansionEstimate {
        estimate: Probability::clamped(p),
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    })
}
