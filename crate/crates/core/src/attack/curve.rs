//! Susceptibility curves: fooled fraction of a test set as a function of ε.

use rayon::prelude::*;

use super::data::Dataset;
use super::model::{Classifier, LinearModel};
use super::pgd::{pgd_attack_from, PgdConfig};
use crate::error::{Error, Result};
use crate::norm::NormOrder;
use crate::specfun::Probability;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub eps: f64,
    pub fooled_fraction: Probability,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityCurve {
    pub points: Vec<CurvePoint>,
}

impl SusceptibilityCurve {
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| {
            w[0].eps < w[1].eps && w[0].fooled_fraction.get() <= w[1].fooled_fraction.get()
        })
    }

    /// Smallest ε at which the fooled fraction reaches `level`, linearly
    /// interpolated between grid points.
    pub fn eps_at(&self, level: f64) -> Option<f64> {
        let first = self.points.first()?;
        if first.fooled_fraction.get() >= level {
            return Some(first.eps);
        }
        self.points.windows(2).find_map(|w| {
            let (f0, f1) = (w[0].fooled_fraction.get(), w[1].fooled_fraction.get());
            (f1 >= level).then(|| w[0].eps + (w[1].eps - w[0].eps) * (level - f0) / (f1 - f0))
        })
    }

    /// ε-width of the rise from 10% to 90% fooled.
    pub fn rise_width(&self) -> Option<f64> {
        Some(self.eps_at(0.9)? - self.eps_at(0.1)?)
    }
}

fn check_grid(eps_grid: &[f64]) -> Result<()> {
    if eps_grid.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
        return Err(Error::domain(
            "eps grid values must be finite and nonnegative",
        ));
    }
    if eps_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("eps grid must be strictly increasing"));
    }
    Ok(())
}

/// Per point and per ε: misclassified already, or PGD finds an adversarial
/// point. Each ε warm-starts from the previous ε's final iterate, and a point
/// once fooled stays fooled.
pub fn susceptibility_curve<C: Classifier + ?Sized>(
    model: &C,
    data: &Dataset,
    norm: NormOrder,
    eps_grid: &[f64],
    cfg: &PgdConfig,
) -> Result<SusceptibilityCurve> {
    check_grid(eps_grid)?;
    if let Some(d) = data.dim() {
        if d != model.dim() {
            return Err(Error::DimensionMismatch(model.dim(), d));
        }
    }
    let per_point: Vec<Vec<bool>> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let x = &data.points[i];
            let label = data.labels[i];
            let mut out = vec![false; eps_grid.len()];
            if model.predict(x) != label {
                out.fill(true);
                return Ok(out);
            }
            let mut state = x.clone();
            for (k, &eps) in eps_grid.iter().enumerate() {
                let point_cfg = PgdConfig {
                    seed: cfg.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                    ..*cfg
                };
                let res = pgd_attack_from(model, x, &state, label, norm, eps, &point_cfg)?;
                if res.success {
                    out[k..].fill(true);
                    break;
                }
                state = res.last.into_inner();
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let total = data.len();
    let points = eps_grid
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let fooled = per_point.iter().filter(|v| v[k]).count();
            let frac = if total == 0 {
                0.0
            } else {
                fooled as f64 / total as f64
            };
            CurvePoint {
                eps,
                fooled_fraction: Probability::clamped(frac),
                n_points: total,
            }
        })
        .collect();
    Ok(SusceptibilityCurve { points })
}

/// Exact ℓ2 distance from `x` to the decision boundary of `label`, ignoring
/// the box: `min_{j≠label} (s_label − s_j)/‖w_label − w_j‖₂`. Zero when `x` is
/// misclassified; infinite if no other class can ever win.
pub fn linear_margin_distance(model: &LinearModel, x: &[f64], label: usize) -> f64 {
    if model.predict(x) != label {
        return 0.0;
    }
    let s = model.scores(x);
    let wl = model.weight_row(label);
    (0..model.n_classes())
        .filter(|&j| j != label)
        .map(|j| {
            let dw = wl
                .iter()
                .zip(model.weight_row(j))
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>();
            if dw == 0.0 {
                f64::INFINITY
            } else {
                ((s[label] - s[j]) / dw.sqrt()).max(0.0)
            }
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::data::{synth_dataset, SyntheticTask};
    use crate::attack::train::train_linear;

    #[test]
    fn one_dimensional_margin() {
        let m = LinearModel::new(vec![vec![1.0], vec![-1.0]], vec![0.0, 0.0]).unwrap();
        assert!((linear_margin_distance(&m, &[0.3], 0) - 0.3).abs() < 1e-15);
        assert_eq!(linear_margin_distance(&m, &[0.3], 1), 0.0);
        assert_eq!(linear_margin_distance(&m, &[0.0], 0), 0.0);
        // Line search on the boundary.
        let t = (0..=4000)
            .map(|i| i as f64 * 1e-4)
            .find(|t| m.predict(&[0.3 - t]) != 0)
            .unwrap();
        assert!((t - 0.3).abs() <= 1e-4 + 1e-12);
    }

    #[test]
    fn margin_is_scale_invariant() {
        let rows = vec![
            vec![0.3, -1.2, 0.5],
            vec![-0.7, 0.4, 0.1],
            vec![0.2, 0.2, -0.9],
        ];
        let b = vec![0.1, -0.2, 0.05];
        let m = LinearModel::new(rows.clone(), b.clone()).unwrap();
        let x = [0.2, 0.1, 0.3];
        let label = m.predict(&x);
        let lam = 7.5;
        let scaled = LinearModel::new(
            rows.iter()
                .map(|r| r.iter().map(|v| v * lam).collect())
                .collect(),
            b.iter().map(|v| v * lam).collect(),
        )
        .unwrap();
        let d0 = linear_margin_distance(&m, &x, label);
        let d1 = linear_margin_distance(&scaled, &x, label);
        assert!((d0 - d1).abs() <= 1e-14 * d0);
    }

    #[test]
    fn curve_is_monotone_and_starts_at_test_error() {
        let task = SyntheticTask::new(10, 3, 0.15, 8).unwrap();
        let model = train_linear(&task.sample(300, 0), 100, 0.5, 0).unwrap();
        let test = task.sample(120, 1);
        let err = test
            .points
            .iter()
            .zip(&test.labels)
            .filter(|(x, &y)| model.predict(x) != y)
            .count();
        let grid: Vec<f64> = (0..12).map(|i| i as f64 * 0.05).collect();
        for norm in [NormOrder::Infinity, NormOrder::Finite(2.0), NormOrder::Zero] {
            let c =
                susceptibility_curve(&model, &test, norm, &grid, &PgdConfig::default()).unwrap();
            assert!(c.is_monotone());
            assert_eq!(c.points[0].fooled_fraction.get(), err as f64 / 120.0);
        }
    }

    #[test]
    fn grid_must_increase() {
        let m = LinearModel::zeros(2, 2);
        let d = synth_dataset(2, 2, 0.1, 4, 0).unwrap();
        let cfg = PgdConfig::default();
        assert!(susceptibility_curve(&m, &d, NormOrder::Infinity, &[0.1, 0.1], &cfg).is_err());
        assert!(susceptibility_curve(&m, &d, NormOrder::Infinity, &[-0.1, 0.1], &cfg).is_err());
    }

    #[test]
    fn rise_width_interpolates() {
        let mk = |f: &[f64]| SusceptibilityCurve {
            points: f
                .iter()
                .enumerate()
                .map(|(i, &v)| CurvePoint {
                    eps: i as f64,
                    fooled_fraction: Probability::clamped(v),
                    n_points: 10,
                })
                .collect(),
        };
        assert_eq!(mk(&[0.0, 0.5, 1.0]).rise_width(), Some(1.6));
        assert_eq!(mk(&[0.0, 0.5]).rise_width(), None);
    }
}
