use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which `ℓp` geometry is in force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormOrder {
    /// Sparse metric: number of differing coordinates.
    Zero,
    /// Finite `p > 0`.
    Finite(f64),
    Infinity,
}

impl NormOrder {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 {
            Ok(NormOrder::Finite(p))
        } else {
            Err(Error::domain(format!(
                "norm order must be a finite p > 0, got {p}"
            )))
        }
    }

    /// `p* = min(p, 2)`; `None` for the sparse metric.
    pub fn p_star(&self) -> Option<f64> {
        match *self {
            NormOrder::Zero => None,
            NormOrder::Finite(p) => Some(p.min(2.0)),
            NormOrder::Infinity => Some(2.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NormOrder::Zero)
    }

    /// Norm (quasi-norm for `p < 1`) of a vector.
    pub fn norm(&self, v: &[f64]) -> f64 {
        match *self {
            NormOrder::Zero => v.iter().filter(|x| **x != 0.0).count() as f64,
            NormOrder::Infinity => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            NormOrder::Finite(2.0) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormOrder::Finite(1.0) => v.iter().map(|x| x.abs()).sum(),
            NormOrder::Finite(p) => v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOrder::Zero => write!(f, "0"),
            NormOrder::Finite(p) => write!(f, "{p}"),
            NormOrder::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for NormOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "inf" | "infinity" | "linf" => Ok(NormOrder::Infinity),
            "0" | "l0" => Ok(NormOrder::Zero),
            _ => {
                let digits = t.strip_prefix('l').unwrap_or(&t);
                let p: f64 = digits
                    .parse()
                    .map_err(|_| Error::Invalid(format!("cannot parse norm order {s:?}")))?;
                if p == 0.0 {
                    Ok(NormOrder::Zero)
                } else {
                    NormOrder::finite(p)
                }
            }
        }
    }
}
