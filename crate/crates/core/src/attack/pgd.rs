//! Projected gradient ascent on the margin loss inside `{‖δ‖_p ≤ ε} ∩ [0,1]ⁿ`.

use rand::Rng;

use super::model::{margin_and_gradient, Classifier};
use crate::error::{Error, Result};
use crate::geometry::{fill_sphere, Point};
use crate::norm::NormOrder;
use crate::rng::stream_rng;

pub const DEFAULT_STEPS: usize = 100;
/// Default step size is `STEP_FACTOR · ε / steps`.
pub const STEP_FACTOR: f64 = 2.5;
const PROJECTION_ROUNDS: usize = 10;
/// Slack allowed on the ball constraint.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgdConfig {
    pub steps: usize,
    /// `None` selects `STEP_FACTOR · ε / steps`.
    pub step_size: Option<f64>,
    pub seed: u64,
}

impl Default for PgdConfig {
    fn default() -> Self {
        PgdConfig {
            steps: DEFAULT_STEPS,
            step_size: None,
            seed: 0,
        }
    }
}

impl PgdConfig {
    pub fn step_for(&self, eps: f64) -> f64 {
        self.step_size
            .unwrap_or(STEP_FACTOR * eps / self.steps as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgdOutcome {
    /// The misclassified point, when the attack succeeds.
    pub adversarial: Option<Point>,
    pub success: bool,
    /// Final iterate, feasible either way.
    pub last: Point,
}

fn in_cube(x: &[f64]) -> bool {
    x.iter().all(|v| (0.0..=1.0).contains(v))
}

/// `true` if `y` lies in the ε-ball around `x` (with slack) and in the cube.
pub fn is_feasible(x: &[f64], y: &[f64], norm: NormOrder, eps: f64) -> bool {
    let delta: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    in_cube(y) && norm.norm(&delta) <= eps * (1.0 + FEASIBILITY_SLACK)
}

/// Euclidean projection onto the ℓ1 ball of radius `r` (sort-based).
fn project_l1(delta: &mut [f64], r: f64) {
    let l1: f64 = delta.iter().map(|v| v.abs()).sum();
    if l1 <= r {
        return;
    }
    let mut mags: Vec<f64> = delta.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in mags.iter().enumerate() {
        cum += u;
        let t = (cum - r) / (i + 1) as f64;
        if u > t {
            theta = t;
        } else {
            break;
        }
    }
    for v in delta.iter_mut() {
        *v = v.signum() * (v.abs() - theta).max(0.0);
    }
}

/// Maps `y` into `{‖y-x‖_p ≤ ε} ∩ [0,1]ⁿ` by alternating ball and box steps.
fn project(x: &[f64], y: &mut [f64], norm: NormOrder, eps: f64) {
    for _ in 0..PROJECTION_ROUNDS {
        let mut delta: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        match norm {
            NormOrder::Infinity => delta.iter_mut().for_each(|d| *d = d.clamp(-eps, eps)),
            NormOrder::Finite(1.0) => project_l1(&mut delta, eps),
            _ => {
                let len = norm.norm(&delta);
                if len > eps {
                    let s = eps / len;
                    delta.iter_mut().for_each(|d| *d *= s);
                }
            }
        }
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&delta) {
            *yi = (xi + d).clamp(0.0, 1.0);
        }
        if is_feasible(x, y, norm, eps) {
            return;
        }
    }
    // The box step only shrinks |δ_i|, so this is unreachable for p ≥ 1;
    // fall back to the unperturbed point to keep the contract.
    if !is_feasible(x, y, norm, eps) {
        y.copy_from_slice(x);
    }
}

/// Steepest-ascent direction for the dual of the ℓp norm.
fn ascent_direction(g: &[f64], norm: NormOrder) -> Vec<f64> {
    match norm {
        NormOrder::Infinity => g.iter().map(|v| sign(*v)).collect(),
        NormOrder::Finite(1.0) => {
            let mut d = vec![0.0; g.len()];
            let k = (0..g.len()).fold(
                0,
                |best, i| if g[i].abs() > g[best].abs() { i } else { best },
            );
            d[k] = sign(g[k]);
            d
        }
        NormOrder::Finite(p) => {
            // Maximizer of ⟨g, d⟩ over ‖d‖_p = 1 is |g|^{q-1} sign(g), normalized.
            let q = p / (p - 1.0);
            let d: Vec<f64> = g.iter().map(|v| sign(*v) * v.abs().powf(q - 1.0)).collect();
            let len = norm.norm(&d);
            d.into_iter().map(|v| v / len).collect()
        }
        NormOrder::Zero => unreachable!("ℓ0 uses its own update"),
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn validate<C: Classifier + ?Sized>(
    model: &C,
    x: &[f64],
    label: usize,
    norm: NormOrder,
    eps: f64,
    cfg: &PgdConfig,
) -> Result<()> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch(model.dim(), x.len()));
    }
    if !in_cube(x) {
        return Err(Error::domain("attack origin must lie in [0,1]ⁿ"));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!(
            "eps must be finite and nonnegative, got {eps}"
        )));
    }
    if cfg.steps == 0 {
        return Err(Error::domain("steps must be at least 1"));
    }
    if let Some(s) = cfg.step_size {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::domain(format!(
                "step size must be positive, got {s}"
            )));
        }
    }
    if label >= model.n_classes() {
        return Err(Error::domain(format!("label {label} out of range")));
    }
    if let NormOrder::Finite(p) = norm {
        if p < 1.0 {
            return Err(Error::Capability(format!(
                "PGD needs a convex ball; ℓ{p} with p < 1 is unsupported"
            )));
        }
    }
    Ok(())
}

/// Attacks `x` (true class `label`) starting from `x` itself.
pub fn pgd_attack<C: Classifier + ?Sized>(
    model: &C,
    x: &[f64],
    label: usize,
    norm: NormOrder,
    eps: f64,
    cfg: &PgdConfig,
) -> Result<PgdOutcome> {
    pgd_attack_from(model, x, x, label, norm, eps, cfg)
}

/// Same as [`pgd_attack`] but starts from `start`, which is first projected into
/// the feasible set.
pub fn pgd_attack_from<C: Classifier + ?Sized>(
    model: &C,
    x: &[f64],
    start: &[f64],
    label: usize,
    norm: NormOrder,
    eps: f64,
    cfg: &PgdConfig,
) -> Result<PgdOutcome> {
    validate(model, x, label, norm, eps, cfg)?;
    if start.len() != x.len() {
        return Err(Error::DimensionMismatch(x.len(), start.len()));
    }
    let finish = |cur: Vec<f64>| {
        let success = model.predict(&cur) != label;
        let last = Point::new(cur);
        PgdOutcome {
            adversarial: success.then(|| last.clone()),
            success,
            last,
        }
    };
    if eps == 0.0 {
        return Ok(finish(x.to_vec()));
    }
    if norm.is_zero() {
        return Ok(finish(l0_attack(model, x, start, label, eps, cfg)));
    }

    let start = {
        let mut s = start.to_vec();
        project(x, &mut s, norm, eps);
        s
    };
    let mut cur = ascend(model, x, &start, label, None, norm, eps, cfg);
    // The untargeted margin follows whichever class is currently runner-up and
    // can stall at a local maximum; with three or more classes, retry aiming at
    // each wrong class in turn.
    if model.predict(&cur) == label && model.n_classes() > 2 {
        for target in (0..model.n_classes()).filter(|&j| j != label) {
            let tried = ascend(model, x, &start, label, Some(target), norm, eps, cfg);
            if model.predict(&tried) != label {
                cur = tried;
                break;
            }
        }
    }
    Ok(finish(cur))
}

#[allow(clippy::too_many_arguments)]
fn ascend<C: Classifier + ?Sized>(
    model: &C,
    x: &[f64],
    start: &[f64],
    label: usize,
    target: Option<usize>,
    norm: NormOrder,
    eps: f64,
    cfg: &PgdConfig,
) -> Vec<f64> {
    let alpha = cfg.step_for(eps);
    let mut cur = start.to_vec();
    let mut rng = stream_rng(cfg.seed, target.map_or(0, |t| t as u64 + 1));
    let mut noise = vec![0.0; x.len()];
    for _ in 0..cfg.steps {
        if model.predict(&cur) != label {
            break;
        }
        let g = match target {
            None => margin_and_gradient(model, &cur, label).1,
            Some(t) => {
                let gt = model.score_gradient(&cur, t);
                let gl = model.score_gradient(&cur, label);
                gt.iter().zip(&gl).map(|(a, b)| a - b).collect()
            }
        };
        if g.iter().all(|v| *v == 0.0) {
            // Flat spot: random restart inside the ball.
            fill_sphere(&mut noise, &mut rng);
            let r = eps * rng.random::<f64>();
            for ((c, xi), u) in cur.iter_mut().zip(x).zip(&noise) {
                *c = xi + r * u;
            }
        } else {
            let d = ascent_direction(&g, norm);
            for (c, di) in cur.iter_mut().zip(&d) {
                *c += alpha * di;
            }
        }
        project(x, &mut cur, norm, eps);
    }
    cur
}

/// Moves the `⌊ε⌋` coordinates with the largest `|∂ margin|` to their
/// loss-increasing box extreme, re-linearizing until the support stops changing.
fn l0_attack<C: Classifier + ?Sized>(
    model: &C,
    x: &[f64],
    start: &[f64],
    label: usize,
    eps: f64,
    cfg: &PgdConfig,
) -> Vec<f64> {
    let k = (eps.floor() as usize).min(x.len());
    let mut cur = if NormOrder::Zero
        .norm(&start.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>())
        <= eps
        && in_cube(start)
    {
        start.to_vec()
    } else {
        x.to_vec()
    };
    if k == 0 {
        return x.to_vec();
    }
    for _ in 0..cfg.steps {
        if model.predict(&cur) != label {
            break;
        }
        let (_, g) = margin_and_gradient(model, &cur, label);
        let mut order: Vec<usize> = (0..x.len()).filter(|&i| g[i] != 0.0).collect();
        order.sort_by(|&a, &b| g[b].abs().total_cmp(&g[a].abs()).then(a.cmp(&b)));
        let mut next = x.to_vec();
        for &i in order.iter().take(k) {
            next[i] = if g[i] > 0.0 { 1.0 } else { 0.0 };
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::model::{LinearModel, Mlp1Model};

    fn two_class(w: Vec<f64>, b: f64) -> LinearModel {
        let neg: Vec<f64> = w.iter().map(|v| -v).collect();
        LinearModel::new(vec![w, neg], vec![b, -b]).unwrap()
    }

    #[test]
    fn l1_projection_lands_on_ball() {
        let mut d = vec![3.0, -1.0, 0.5];
        project_l1(&mut d, 2.0);
        assert!((d.iter().map(|v| v.abs()).sum::<f64>() - 2.0).abs() < 1e-12);
        assert_eq!(d, vec![2.0, 0.0, 0.0]);
    }

    #[test]
    fn iterates_stay_feasible() {
        let model = Mlp1Model::random(8, 6, 3, 4).unwrap();
        let x = vec![0.05, 0.5, 0.95, 0.3, 0.7, 0.0, 1.0, 0.5];
        let label = model.predict(&x);
        for norm in [
            NormOrder::Infinity,
            NormOrder::Finite(2.0),
            NormOrder::Finite(1.0),
            NormOrder::Finite(3.0),
            NormOrder::Zero,
        ] {
            for eps in [0.01, 0.3, 2.0] {
                for steps in [1, 5, 40] {
                    let cfg = PgdConfig {
                        steps,
                        ..Default::default()
                    };
                    let out = pgd_attack(&model, &x, label, norm, eps, &cfg).unwrap();
                    assert!(
                        is_feasible(&x, &out.last, norm, eps),
                        "{norm} {eps} {steps}"
                    );
                    assert_eq!(out.success, out.adversarial.is_some());
                }
            }
        }
    }

    #[test]
    fn zero_eps_succeeds_only_when_misclassified() {
        let m = two_class(vec![1.0], -0.5);
        let cfg = PgdConfig::default();
        assert!(
            !pgd_attack(&m, &[0.8], 0, NormOrder::Infinity, 0.0, &cfg)
                .unwrap()
                .success
        );
        assert!(
            pgd_attack(&m, &[0.8], 1, NormOrder::Infinity, 0.0, &cfg)
                .unwrap()
                .success
        );
    }

    #[test]
    fn l2_success_matches_hyperplane_distance() {
        // Boundary at x₀ = 0.5; distance from 0.8 is 0.3.
        let m = two_class(vec![1.0, 0.0], -0.5);
        let cfg = PgdConfig::default();
        let x = [0.8, 0.5];
        assert!(
            !pgd_attack(&m, &x, 0, NormOrder::Finite(2.0), 0.29, &cfg)
                .unwrap()
                .success
        );
        assert!(
            pgd_attack(&m, &x, 0, NormOrder::Finite(2.0), 0.31, &cfg)
                .unwrap()
                .success
        );
    }

    #[test]
    fn linf_unit_ball_matches_vertex_enumeration() {
        let cfg = PgdConfig::default();
        let mut rng = stream_rng(21, 0);
        for trial in 0..200 {
            let n = 1 + trial % 6;
            let m = 2 + trial % 3;
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
                .collect();
            let biases: Vec<f64> = (0..m).map(|_| 0.3 * (rng.random::<f64>() - 0.5)).collect();
            let model = LinearModel::new(rows, biases).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let label = model.predict(&x);
            // Affine score differences are extremized at vertices.
            let reachable = (0..1u32 << n).any(|mask| {
                let v: Vec<f64> = (0..n).map(|i| f64::from((mask >> i) & 1)).collect();
                let s = model.scores(&v);
                (0..m).any(|j| j != label && s[j] > s[label])
            });
            let out = pgd_attack(&model, &x, label, NormOrder::Infinity, 1.0, &cfg).unwrap();
            assert_eq!(out.success, reachable, "trial {trial}");
        }
    }

    #[test]
    fn l0_flips_strongest_coordinate() {
        let m = LinearModel::new(vec![vec![1.0, 0.1], vec![0.0, 0.0]], vec![-0.2, 0.0]).unwrap();
        let x = [0.5, 0.5];
        let cfg = PgdConfig::default();
        let out = pgd_attack(&m, &x, 0, NormOrder::Zero, 1.0, &cfg).unwrap();
        assert!(out.success);
        assert_eq!(out.last.0, vec![0.0, 0.5]);
        assert!(
            !pgd_attack(&m, &x, 0, NormOrder::Zero, 0.5, &cfg)
                .unwrap()
                .success
        );
    }

    #[test]
    fn infeasible_inputs_are_errors() {
        let m = two_class(vec![1.0], 0.0);
        let cfg = PgdConfig::default();
        assert!(pgd_attack(&m, &[1.5], 0, NormOrder::Infinity, 0.1, &cfg).is_err());
        assert!(pgd_attack(&m, &[0.5], 0, NormOrder::Infinity, -0.1, &cfg).is_err());
        assert!(pgd_attack(&m, &[0.5], 5, NormOrder::Infinity, 0.1, &cfg).is_err());
        assert!(pgd_attack(&m, &[0.5, 0.5], 0, NormOrder::Infinity, 0.1, &cfg).is_err());
        let zero_steps = PgdConfig { steps: 0, ..cfg };
        assert!(pgd_attack(&m, &[0.5], 0, NormOrder::Infinity, 0.1, &zero_steps).is_err());
        assert!(pgd_attack(&m, &[0.5], 0, NormOrder::Finite(0.5), 0.1, &cfg).is_err());
    }
}
