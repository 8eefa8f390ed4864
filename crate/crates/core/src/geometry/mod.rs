//! Exact oracles and Monte Carlo estimators for ε-expansions on the sphere,
//! the unit cube, and Gaussian space.

mod mc;
mod oracles;
mod sets;

use std::fmt;
use std::ops::{Deref, DerefMut};
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::norm::NormOrder;
use crate::specfun;

pub use mc::{mc_expansion_measure, ExpansionEstimate, SHARD_SIZE};
pub use oracles::{
    cap_measure, gaussian_halfspace_expansion_exact, half_sphere_expansion_exact, log_cap_measure,
    slab_expansion_exact, subcube_hamming_expansion_exact,
};
pub use sets::{Ambient, SetDescriptor};

/// Tolerance on `‖x‖₂ = 1` for points treated as lying on the sphere.
pub const SPHERE_TOL: f64 = 1e-9;

/// A point in `ℝⁿ`, the cube, or on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// Distance used to measure perturbations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    /// Great-circle arc length; sphere points only.
    Geodesic,
    Lp(NormOrder),
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Geodesic => write!(f, "geodesic"),
            Metric::Lp(p) => write!(f, "l{p}"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "geodesic" | "g" => Ok(Metric::Geodesic),
            other => Ok(Metric::Lp(other.parse()?)),
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn require_unit(x: &[f64]) -> Result<()> {
    let r = norm2(x);
    if (r - 1.0).abs() <= SPHERE_TOL {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "geodesic distance needs unit vectors, got ‖x‖₂ = {r}"
        )))
    }
}

/// Angle between two unit vectors, `2·atan2(‖x-y‖, ‖x+y‖)`; accurate for
/// nearly equal and nearly antipodal pairs alike.
pub(crate) fn angle_between(x: &[f64], y: &[f64]) -> f64 {
    let (mut d, mut s) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        d += (a - b) * (a - b);
        s += (a + b) * (a + b);
    }
    2.0 * d.sqrt().atan2(s.sqrt())
}

/// Distance between two points of equal dimension.
pub fn distance(x: &[f64], y: &[f64], metric: Metric) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    match metric {
        Metric::Geodesic => {
            require_unit(x)?;
            require_unit(y)?;
            Ok(angle_between(x, y))
        }
        Metric::Lp(norm) => {
            let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            Ok(norm.norm(&diff))
        }
    }
}

/// `Σ |x_i - y_i|^p`, the additive form of the ℓp distance (for `p = 0`, the
/// number of differing coordinates).
pub fn lp_power_distance(x: &[f64], y: &[f64], norm: NormOrder) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    match norm {
        NormOrder::Zero => Ok(x.iter().zip(y).filter(|(a, b)| a != b).count() as f64),
        NormOrder::Finite(p) => Ok(x.iter().zip(y).map(|(a, b)| (a - b).abs().powf(p)).sum()),
        NormOrder::Infinity => Err(Error::domain("ℓ∞ has no additive power form")),
    }
}

/// Uniform point on `S^{n-1} ⊂ ℝⁿ` by normalizing a Gaussian vector.
pub fn sample_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Point> {
    if n < 2 {
        return Err(Error::domain(format!(
            "sphere sampling requires n >= 2, got {n}"
        )));
    }
    let mut p = Point::zeros(n);
    fill_sphere(&mut p, rng);
    Ok(p)
}

pub(crate) fn fill_sphere<R: Rng + ?Sized>(buf: &mut [f64], rng: &mut R) {
    loop {
        fill_gaussian(buf, rng);
        let r = norm2(buf);
        if r > 1e-150 {
            buf.iter_mut().for_each(|x| *x /= r);
            return;
        }
    }
}

pub(crate) fn fill_gaussian<R: Rng + ?Sized>(buf: &mut [f64], rng: &mut R) {
    for x in buf.iter_mut() {
        *x = StandardNormal.sample(rng);
    }
}

pub(crate) fn fill_cube<R: Rng + ?Sized>(buf: &mut [f64], rng: &mut R) {
    for x in buf.iter_mut() {
        *x = rng.random::<f64>();
    }
}

/// Coordinatewise `Φ`: pushes the standard Gaussian on `ℝⁿ` forward to the
/// uniform measure on `[0,1]ⁿ`.
pub fn gauss_to_cube_transport(z: &[f64]) -> Result<Point> {
    if let Some(bad) = z.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite coordinate {bad}")));
    }
    Ok(Point(z.iter().map(|&v| specfun::cdf(v)).collect()))
}

/// Lipschitz constant of the transport from `(ℝⁿ, ℓ2)` to `([0,1]ⁿ, ℓp)`:
/// `n^{1/p*} / √(2πn)`.
pub fn transport_lipschitz(norm: NormOrder, n: usize) -> Result<f64> {
    let p_star = norm
        .p_star()
        .ok_or_else(|| Error::domain("transport bound needs p > 0"))?;
    let nf = n as f64;
    Ok(nf.powf(1.0 / p_star) / (2.0 * std::f64::consts::PI * nf).sqrt())
}
