//! Synthetic labeled point clouds in the unit cube.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::fill_sphere;
use crate::rng::stream_rng;

/// Labeled points in `[0,1]ⁿ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch(points.len(), labels.len()));
        }
        if let Some(first) = points.first() {
            if points.iter().any(|p| p.len() != first.len()) {
                return Err(Error::Invalid("points must share one dimension".into()));
            }
        }
        Ok(Dataset { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(Vec::len)
    }

    /// Number of classes, taken as one past the largest label.
    pub fn n_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }
}

/// Class centers `0.5 + 0.25·u_k` with random unit directions `u_k`, and Gaussian
/// noise of standard deviation `spread` clipped to the cube.
#[derive(Debug, Clone)]
pub struct SyntheticTask {
    spread: f64,
    seed: u64,
    centers: Vec<Vec<f64>>,
}

const CENTER_RADIUS: f64 = 0.25;
const MIN_DIRECTION_GAP: f64 = 0.5;
const MAX_REJECTIONS: usize = 1000;

impl SyntheticTask {
    pub fn new(n: usize, m: usize, spread: f64, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Invalid(
                "dimension and class count must be positive".into(),
            ));
        }
        if !(spread >= 0.0 && spread.is_finite()) {
            return Err(Error::Invalid(format!(
                "spread must be finite and nonnegative, got {spread}"
            )));
        }
        let mut rng = stream_rng(seed, 0);
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut u = vec![0.0; n];
        for k in 0..m {
            if m == 2 && k == 1 {
                dirs.push(dirs[0].iter().map(|v| -v).collect());
                continue;
            }
            for _ in 0..MAX_REJECTIONS {
                fill_sphere(&mut u, &mut rng);
                let far = dirs.iter().all(|d| {
                    d.iter()
                        .zip(&u)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt()
                        >= MIN_DIRECTION_GAP
                });
                if far {
                    break;
                }
            }
            dirs.push(u.clone());
        }
        let centers = dirs
            .into_iter()
            .map(|d| d.into_iter().map(|v| 0.5 + CENTER_RADIUS * v).collect())
            .collect();
        Ok(SyntheticTask {
            spread,
            seed,
            centers,
        })
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    /// Draws `count` points with labels cycling through the classes. Distinct
    /// `stream` values give independent samples (e.g. train vs test).
    pub fn sample(&self, count: usize, stream: u64) -> Dataset {
        let mut rng = stream_rng(self.seed, stream.wrapping_add(1));
        let m = self.centers.len();
        let mut points = Vec::with_capacity(count);
        let mut labels = Vec::with_capacity(count);
        for i in 0..count {
            let c = &self.centers[i % m];
            points.push(
                c.iter()
                    .map(|&ci| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        (ci + self.spread * z).clamp(0.0, 1.0)
                    })
                    .collect(),
            );
            labels.push(i % m);
        }
        Dataset { points, labels }
    }
}

/// `SyntheticTask::new(n, m, spread, seed)?.sample(count, 0)`.
pub fn synth_dataset(n: usize, m: usize, spread: f64, count: usize, seed: u64) -> Result<Dataset> {
    Ok(SyntheticTask::new(n, m, spread, seed)?.sample(count, 0))
}
