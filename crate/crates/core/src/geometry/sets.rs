use super::{angle_between, Metric, Point, SPHERE_TOL};
use crate::error::{Error, Result};
use crate::norm::NormOrder;
use crate::specfun;

/// The space a set lives in, and the measure Monte Carlo samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    /// Uniform measure on `S^{n-1}`.
    Sphere,
    /// Uniform measure on `[0,1]ⁿ`.
    Cube,
    /// Standard Gaussian on `ℝⁿ`.
    Gaussian,
}

/// A parametric subset with a closed-form point-to-set distance.
#[derive(Debug, Clone, PartialEq)]
pub enum SetDescriptor {
    /// `{x ∈ S^{n-1} : angle(x, axis) ≤ angle}`.
    SphereCap {
        axis: Point,
        angle: f64,
    },
    /// `{x ∈ [0,1]ⁿ : x_coord ≤ width}`.
    CubeSlab {
        coord: usize,
        width: f64,
    },
    /// `[0, side]ⁿ`.
    SubCube {
        side: f64,
    },
    /// `{z ∈ ℝⁿ : z₁ ≤ offset}`.
    GaussianHalfspace {
        offset: f64,
    },
    FiniteUnion(Vec<SetDescriptor>),
}

impl SetDescriptor {
    /// Half sphere `{x₁ ≥ 0}` in `S^{n-1}`.
    pub fn half_sphere(n: usize) -> Self {
        let mut axis = Point::zeros(n);
        axis[0] = 1.0;
        SetDescriptor::SphereCap {
            axis,
            angle: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn ambient(&self) -> Result<Ambient> {
        match self {
            SetDescriptor::SphereCap { .. } => Ok(Ambient::Sphere),
            SetDescriptor::CubeSlab { .. } | SetDescriptor::SubCube { .. } => Ok(Ambient::Cube),
            SetDescriptor::GaussianHalfspace { .. } => Ok(Ambient::Gaussian),
            SetDescriptor::FiniteUnion(parts) => {
                let first = parts
                    .first()
                    .ok_or_else(|| Error::Invalid("empty union".into()))?
                    .ambient()?;
                for p in &parts[1..] {
                    if p.ambient()? != first {
                        return Err(Error::Invalid(
                            "union members live in different spaces".into(),
                        ));
                    }
                }
                Ok(first)
            }
        }
    }

    /// Checks parameters against dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            SetDescriptor::SphereCap { axis, angle } => {
                if n < 2 {
                    return Err(Error::domain("sphere sets require n >= 2"));
                }
                if axis.dim() != n {
                    return Err(Error::DimensionMismatch(axis.dim(), n));
                }
                let r = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (r - 1.0).abs() > SPHERE_TOL {
                    return Err(Error::domain(format!(
                        "cap axis must be a unit vector, ‖axis‖ = {r}"
                    )));
                }
                if !(0.0..=std::f64::consts::PI).contains(angle) {
                    return Err(Error::domain(format!(
                        "cap angle must lie in [0, π], got {angle}"
                    )));
                }
            }
            SetDescriptor::CubeSlab { coord, width } => {
                if *coord >= n {
                    return Err(Error::domain(format!(
                        "slab coordinate {coord} out of range for n = {n}"
                    )));
                }
                if !(*width > 0.0 && *width < 1.0) {
                    return Err(Error::domain(format!(
                        "slab width must lie in (0, 1), got {width}"
                    )));
                }
            }
            SetDescriptor::SubCube { side } => {
                if !(*side > 0.0 && *side < 1.0) {
                    return Err(Error::domain(format!(
                        "sub-cube side must lie in (0, 1), got {side}"
                    )));
                }
            }
            SetDescriptor::GaussianHalfspace { offset } => {
                if !offset.is_finite() {
                    return Err(Error::domain("half-space offset must be finite"));
                }
            }
            SetDescriptor::FiniteUnion(parts) => {
                self.ambient()?;
                for p in parts {
                    p.validate(n)?;
                }
            }
        }
        if n == 0 {
            return Err(Error::domain("dimension n must be at least 1"));
        }
        Ok(())
    }

    /// Exact measure of the set itself, where it has a closed form.
    pub fn measure(&self, n: usize) -> Result<f64> {
        match self {
            SetDescriptor::SphereCap { angle, .. } => Ok(super::cap_measure(n, *angle)?.get()),
            SetDescriptor::CubeSlab { width, .. } => Ok(*width),
            SetDescriptor::SubCube { side } => Ok(side.powi(n as i32)),
            SetDescriptor::GaussianHalfspace { offset } => Ok(specfun::cdf(*offset)),
            SetDescriptor::FiniteUnion(_) => Err(Error::Capability(
                "no closed-form measure for a union".into(),
            )),
        }
    }

    /// Fails with a capability error when no closed-form distance exists for `metric`.
    pub fn check_metric(&self, metric: Metric) -> Result<()> {
        let ok = match self {
            SetDescriptor::SphereCap { .. } => {
                metric == Metric::Geodesic || metric == Metric::Lp(NormOrder::Finite(2.0))
            }
            SetDescriptor::CubeSlab { .. }
            | SetDescriptor::SubCube { .. }
            | SetDescriptor::GaussianHalfspace { .. } => matches!(metric, Metric::Lp(_)),
            SetDescriptor::FiniteUnion(parts) => {
                return parts.iter().try_for_each(|p| p.check_metric(metric));
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Capability(format!(
                "no closed-form distance from {} to this set in metric {metric}",
                self.kind_name()
            )))
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SetDescriptor::SphereCap { .. } => "sphere_cap",
            SetDescriptor::CubeSlab { .. } => "cube_slab",
            SetDescriptor::SubCube { .. } => "sub_cube",
            SetDescriptor::GaussianHalfspace { .. } => "gaussian_halfspace",
            SetDescriptor::FiniteUnion(_) => "finite_union",
        }
    }

    /// Distance from `x` to the set. Call [`check_metric`](Self::check_metric) first;
    /// unsupported pairs return a capability error here too.
    pub fn distance_to(&self, x: &[f64], metric: Metric) -> Result<f64> {
        self.check_metric(metric)?;
        Ok(self.distance_unchecked(x, metric))
    }

    pub(crate) fn distance_unchecked(&self, x: &[f64], metric: Metric) -> f64 {
        match self {
            SetDescriptor::SphereCap { axis, angle } => {
                let gap = (angle_between(x, axis) - angle).max(0.0);
                match metric {
                    Metric::Geodesic => gap,
                    // chord length of the shortest arc
                    Metric::Lp(_) => 2.0 * (0.5 * gap).sin(),
                }
            }
            SetDescriptor::CubeSlab { coord, width } => {
                single_coordinate_excess(x[*coord] - width, metric)
            }
            SetDescriptor::GaussianHalfspace { offset } => {
                single_coordinate_excess(x[0] - offset, metric)
            }
            SetDescriptor::SubCube { side } => {
                let Metric::Lp(norm) = metric else {
                    unreachable!("checked by check_metric")
                };
                match norm {
                    NormOrder::Zero => x.iter().filter(|v| **v > *side).count() as f64,
                    NormOrder::Infinity => x.iter().fold(0.0, |m, v| m.max(v - side)),
                    NormOrder::Finite(2.0) => x
                        .iter()
                        .map(|v| (v - side).max(0.0).powi(2))
                        .sum::<f64>()
                        .sqrt(),
                    NormOrder::Finite(p) => x
                        .iter()
                        .map(|v| (v - side).max(0.0).powf(p))
                        .sum::<f64>()
                        .powf(1.0 / p),
                }
            }
            SetDescriptor::FiniteUnion(parts) => parts
                .iter()
                .map(|p| p.distance_unchecked(x, metric))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

fn single_coordinate_excess(excess: f64, metric: Metric) -> f64 {
    match metric {
        Metric::Lp(NormOrder::Zero) => {
            if excess > 0.0 {
                1.0
            } else {
                0.0
            }
        }
        _ => excess.max(0.0),
    }
}
