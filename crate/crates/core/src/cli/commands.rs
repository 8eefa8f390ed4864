use std::f64::consts::FRAC_PI_2;
use std::fmt::Debug;

use clap::ValueEnum;
use rand::Rng;
use rayon::prelude::*;

use super::*;
use crate::attack::{
    susceptibility_curve, train_linear, train_mlp, Classifier, PgdConfig, SyntheticTask,
};
use crate::bounds::{
    cube_expansion_bound_simple, cube_expansion_bound_tight, cube_susceptibility_bound,
    existence_check, existence_support_threshold, half_sphere_expansion_bound,
    mnist_rescale_transfer, small_p_expansion_bound, small_p_expansion_bound_tight,
    sparse_susceptibility_bound, sphere_susceptibility_bound, BoundValue, ClassStats, CubeForm,
    RescaleDirection, SimpleVariant,
};
use crate::geometry::{
    gaussian_halfspace_expansion_exact, half_sphere_expansion_exact, mc_expansion_measure,
    slab_expansion_exact, subcube_hamming_expansion_exact, SetDescriptor,
};
use crate::rescale::{check_laws_with, upsample, ImageGrid};
use crate::rng::stream_rng;
use crate::specfun;

/// Relative tolerance for the ℓ2 scaling and contraction laws.
const LAW_TOL: f64 = 1e-12;
/// Slack before a bound is flagged as exceeding the exact measure.
const DOMINANCE_SLACK: f64 = 1e-12;
const MAX_DUMPED_VIOLATIONS: usize = 20;

pub(super) struct Report {
    pub code: i32,
    pub csv: String,
    pub diagnostics: String,
}

impl Report {
    fn ok(csv: String) -> Self {
        Report {
            code: EXIT_OK,
            csv,
            diagnostics: String::new(),
        }
    }
}

pub(super) fn execute(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Bound(a) => cmd_bound(a),
        Command::Expand(a) => cmd_expand(a),
        Command::Curve(a) => cmd_curve(a),
        Command::RescaleCheck(a) => cmd_rescale_check(a),
    }
}

fn header(
    command: &str,
    config: &impl Debug,
    seed: Option<u64>,
    extra: &[(&str, String)],
) -> String {
    let mut h = format!(
        "# advbounds {}\n# command: {command}\n# config: {config:?}\n",
        env!("CARGO_PKG_VERSION")
    );
    h += &match seed {
        Some(s) => format!("# seed: {s}\n"),
        None => "# seed: none\n".to_string(),
    };
    for (k, v) in extra {
        h += &format!("# {k}: {v}\n");
    }
    h
}

fn table(columns: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(columns).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn name_of<V: ValueEnum>(v: &V) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn join_notes<'a>(notes: impl IntoIterator<Item = &'a str>) -> String {
    notes
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("; ")
}

// ---- bound ----

fn bound_eps(a: &BoundArgs) -> Result<Vec<f64>> {
    match (&a.eps_grid, a.eps) {
        (Some(g), _) => parse_eps_grid(g),
        (None, Some(e)) => Ok(vec![e]),
        (None, None) => Err(Error::Invalid(
            "one of --eps or --eps-grid is required".into(),
        )),
    }
}

/// The dimension, or `None` when the theorem does not depend on it at this `p`.
fn bound_dimension(a: &BoundArgs) -> Result<Option<usize>> {
    let n_free = match a.theorem {
        Theorem::RescaleTransfer => true,
        Theorem::Cube | Theorem::CubeExpansion | Theorem::CubeSimple | Theorem::Existence => {
            a.p.p_star() == Some(2.0)
        }
        _ => false,
    };
    match a.n {
        Some(n) => Ok(Some(n)),
        None if n_free => Ok(None),
        None => Err(Error::Invalid(format!(
            "--n is required for theorem {}",
            name_of(&a.theorem)
        ))),
    }
}

fn sparse_radius(eps: f64) -> Result<u64> {
    if eps >= 0.0 && eps.fract() == 0.0 && eps < u64::MAX as f64 {
        Ok(eps as u64)
    } else {
        Err(Error::domain(format!(
            "sparse radius must be a nonnegative integer, got {eps}"
        )))
    }
}

fn bound_row(a: &BoundArgs, n: usize, eps: f64) -> Result<BoundValue> {
    let simple = |v: VariantArg| match v {
        VariantArg::Mills => SimpleVariant::Mills,
        VariantArg::AsPrinted => SimpleVariant::AsPrinted,
    };
    match a.theorem {
        Theorem::HalfSphere => half_sphere_expansion_bound(n, eps),
        Theorem::Sphere => sphere_susceptibility_bound(&ClassStats::new(n, a.fc, a.vc)?, eps),
        Theorem::Cube => {
            let form = match a.form {
                FormArg::Tight => CubeForm::Tight,
                FormArg::SimpleMills => CubeForm::SimpleMills,
                FormArg::SimpleAsPrinted => CubeForm::SimpleAsPrinted,
                FormArg::LinfRefined => CubeForm::LinfRefined,
            };
            cube_susceptibility_bound(&ClassStats::new(n, a.fc, a.uc)?, a.p, eps, form)
        }
        Theorem::CubeExpansion => cube_expansion_bound_tight(a.vol, a.p, n, eps),
        Theorem::CubeSimple => cube_expansion_bound_simple(a.p, n, eps, simple(a.variant)),
        Theorem::Sparse => {
            sparse_susceptibility_bound(&ClassStats::new(n, a.fc, a.uc)?, sparse_radius(eps)?)
        }
        Theorem::SmallP => small_p_expansion_bound(a.vol, a.p, n, eps),
        Theorem::SmallPTight => small_p_expansion_bound_tight(a.vol, a.p, n, eps),
        Theorem::Existence => {
            let t = existence_support_threshold(a.p, n, eps)?;
            let mut note = if t.valid {
                String::new()
            } else {
                "below activation edge".to_string()
            };
            if let Some(sv) = a.support_vol {
                let exists = existence_check(sv, a.p, n, eps)?;
                note = format!("support volume {sv}: adversarial examples exist = {exists}");
            }
            Ok(BoundValue {
                probability: t.threshold,
                valid: t.valid,
                note,
            })
        }
        Theorem::RescaleTransfer => {
            let dir = match a.direction {
                DirectionArg::Up => RescaleDirection::Up,
                DirectionArg::Down => RescaleDirection::Down,
            };
            let t = mnist_rescale_transfer(eps, a.p_fool, a.b, dir)?;
            Ok(BoundValue {
                probability: t.p_fool,
                valid: true,
                note: format!(
                    "eps maps to {} at b = {} ({})",
                    t.eps,
                    a.b,
                    name_of(&a.direction)
                ),
            })
        }
    }
}

fn cmd_bound(a: &BoundArgs) -> Result<Report> {
    let grid = bound_eps(a)?;
    let n = bound_dimension(a)?;
    let rows = grid
        .iter()
        .map(|&eps| {
            let v = bound_row(a, n.unwrap_or(1), eps)?;
            Ok(vec![
                name_of(&a.theorem),
                n.map(|n| n.to_string()).unwrap_or_default(),
                a.p.to_string(),
                eps.to_string(),
                v.value().to_string(),
                v.valid.to_string(),
                v.note,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let csv = table(
        &["theorem", "n", "p", "eps", "value", "valid", "note"],
        &rows,
    )?;
    Ok(Report::ok(header("bound", a, None, &[]) + &csv))
}

// ---- expand ----

struct ExpandRow {
    bound: Option<BoundValue>,
    exact: Option<f64>,
    note: String,
}

fn cube_bound(a: &ExpandArgs, vol: f64, norm: NormOrder, eps: f64) -> Result<ExpandRow> {
    if norm.is_zero() {
        let b = small_p_expansion_bound(vol, norm, a.n, eps)?;
        return Ok(ExpandRow {
            bound: Some(b),
            exact: None,
            note: String::new(),
        });
    }
    let variant = match a.variant {
        ExpandBound::Tight => {
            return Ok(ExpandRow {
                bound: Some(cube_expansion_bound_tight(vol, norm, a.n, eps)?),
                exact: None,
                note: String::new(),
            })
        }
        ExpandBound::Mills => SimpleVariant::Mills,
        ExpandBound::AsPrinted => SimpleVariant::AsPrinted,
    };
    if eps == 0.0 {
        return Ok(ExpandRow {
            bound: None,
            exact: None,
            note: "simplified bound undefined at eps = 0".into(),
        });
    }
    let b = cube_expansion_bound_simple(norm, a.n, eps, variant)?;
    Ok(ExpandRow {
        bound: Some(b),
        exact: None,
        note: String::new(),
    })
}

fn expand_set(a: &ExpandArgs) -> Result<(SetDescriptor, Metric)> {
    let default_metric = match a.set {
        SetArg::SphereHalf => Metric::Geodesic,
        SetArg::Subcube => Metric::Lp(NormOrder::Zero),
        _ => Metric::Lp(NormOrder::Finite(2.0)),
    };
    let metric = a.metric.unwrap_or(default_metric);
    let set = match a.set {
        SetArg::SphereHalf => SetDescriptor::half_sphere(a.n),
        SetArg::Slab => SetDescriptor::CubeSlab {
            coord: 0,
            width: a.a,
        },
        SetArg::Subcube => SetDescriptor::SubCube { side: a.a },
        SetArg::GaussianHalfspace => {
            if !(a.a > 0.0 && a.a < 1.0) {
                return Err(Error::domain(format!(
                    "half-space mass must lie in (0, 1), got {}",
                    a.a
                )));
            }
            SetDescriptor::GaussianHalfspace {
                offset: specfun::quantile(a.a),
            }
        }
    };
    set.validate(a.n)?;
    set.check_metric(metric)?;
    Ok((set, metric))
}

fn expand_row(a: &ExpandArgs, metric: Metric, eps: f64) -> Result<ExpandRow> {
    match (a.set, metric) {
        (SetArg::SphereHalf, m) => {
            // ℓ2 on the sphere is the chord; convert to the geodesic angle.
            let theta = match m {
                Metric::Geodesic => eps,
                _ => 2.0 * (eps / 2.0).min(1.0).asin(),
            };
            let exact = if theta >= FRAC_PI_2 {
                1.0
            } else {
                half_sphere_expansion_exact(a.n, theta)?.get()
            };
            let bound = half_sphere_expansion_bound(a.n, theta)?;
            Ok(ExpandRow {
                bound: Some(bound),
                exact: Some(exact),
                note: String::new(),
            })
        }
        (SetArg::Slab, Metric::Lp(norm)) => {
            let mut row = cube_bound(a, a.a, norm, eps)?;
            row.exact = Some(slab_expansion_exact(a.a, eps, norm)?.get());
            Ok(row)
        }
        (SetArg::Subcube, Metric::Lp(norm)) => {
            let vol = a.a.powi(a.n as i32);
            let mut row = cube_bound(a, vol, norm, eps)?;
            if norm.is_zero() {
                row.exact =
                    Some(subcube_hamming_expansion_exact(a.a, a.n, eps.floor() as u64)?.get());
            }
            Ok(row)
        }
        (SetArg::GaussianHalfspace, Metric::Lp(_)) => {
            let exact = gaussian_halfspace_expansion_exact(a.a, eps)?;
            let bound = BoundValue {
                probability: exact,
                valid: true,
                note: "half-spaces attain the Gaussian isoperimetric bound".into(),
            };
            Ok(ExpandRow {
                bound: Some(bound),
                exact: Some(exact.get()),
                note: String::new(),
            })
        }
        (_, Metric::Geodesic) => Err(Error::Capability(
            "geodesic metric is defined on the sphere only".into(),
        )),
    }
}

fn cmd_expand(a: &ExpandArgs) -> Result<Report> {
    let grid = parse_eps_grid(&a.eps_grid)?;
    if grid.iter().any(|e| *e < 0.0) {
        return Err(Error::domain("eps grid values must be nonnegative"));
    }
    let (set, metric) = expand_set(a)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &eps in &grid {
        let row = expand_row(a, metric, eps)?;
        let mc = if a.samples > 0 {
            Some(mc_expansion_measure(
                &set, a.n, metric, eps, a.samples, a.seed,
            )?)
        } else {
            None
        };
        let bound = row.bound.as_ref().map(BoundValue::value);
        let exceeds = match (bound, row.exact) {
            (Some(b), Some(e)) if b > e + DOMINANCE_SLACK => "bound exceeds exact measure",
            _ => "",
        };
        let bound_note = row.bound.as_ref().map_or("", |b| b.note.as_str());
        rows.push(vec![
            eps.to_string(),
            fmt_opt(bound),
            fmt_opt(row.exact),
            fmt_opt(mc.map(|m| m.estimate.get())),
            fmt_opt(mc.map(|m| m.stderr)),
            join_notes([exceeds, bound_note, row.note.as_str()]),
        ]);
    }
    let csv = table(
        &[
            "eps",
            "bound",
            "oracle_exact",
            "mc_estimate",
            "mc_stderr",
            "note",
        ],
        &rows,
    )?;
    let extra = [
        ("metric", metric.to_string()),
        ("set_volume", set.measure(a.n)?.to_string()),
    ];
    Ok(Report::ok(header("expand", a, Some(a.seed), &extra) + &csv))
}

// ---- curve ----

fn cmd_curve(a: &CurveArgs) -> Result<Report> {
    let grid = parse_eps_grid(&a.eps_grid)?;
    let task = SyntheticTask::new(a.n, a.classes, a.spread, a.seed)?;
    let train = task.sample(a.train_count, 0);
    let test = task.sample(a.test_count, 1);
    let cfg = PgdConfig {
        steps: a.steps,
        step_size: a.step_size,
        seed: a.seed,
    };
    let model: Box<dyn Classifier> = match a.model {
        ModelArg::Linear => Box::new(train_linear(&train, a.epochs, a.lr, a.seed)?),
        ModelArg::Mlp => Box::new(train_mlp(&train, a.hidden, a.epochs, a.lr, a.seed)?.0),
    };
    let curve = susceptibility_curve(model.as_ref(), &test, a.norm, &grid, &cfg)?;
    let errors = test
        .points
        .iter()
        .zip(&test.labels)
        .filter(|(x, &y)| model.predict(x) != y)
        .count();
    let rows: Vec<Vec<String>> = curve
        .points
        .iter()
        .map(|p| {
            vec![
                p.eps.to_string(),
                p.fooled_fraction.get().to_string(),
                p.n_points.to_string(),
            ]
        })
        .collect();
    let extra = [
        ("test_errors", format!("{errors}/{}", test.len())),
        ("rise_width_10_90", fmt_opt(curve.rise_width())),
    ];
    let csv = table(&["eps", "fooled_fraction", "n_points"], &rows)?;
    Ok(Report::ok(header("curve", a, Some(a.seed), &extra) + &csv))
}

// ---- rescale-check ----

fn faulty_upsample(img: &ImageGrid, b: usize) -> Result<ImageGrid> {
    let mut up = upsample(img, b)?;
    let w = up.width();
    for r in 0..b {
        for c in 0..b {
            up.pixels_mut()[r * w + c] *= 0.5;
        }
    }
    Ok(up)
}

fn random_image(h: usize, w: usize, rng: &mut impl Rng) -> Result<ImageGrid> {
    ImageGrid::new(h, w, (0..h * w).map(|_| rng.random::<f64>()).collect())
}

fn cmd_rescale_check(a: &RescaleArgs) -> Result<Report> {
    if a.b == 0 {
        return Err(Error::domain("block factor b must be >= 1"));
    }
    let failures: Vec<_> = (0..a.pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(a.seed, i as u64);
            let x = random_image(a.height, a.width, &mut rng)?;
            let y = random_image(a.height, a.width, &mut rng)?;
            let v = if a.inject_fault {
                check_laws_with(&x, &y, a.b, LAW_TOL, faulty_upsample)?
            } else {
                check_laws_with(&x, &y, a.b, LAW_TOL, upsample)?
            };
            Ok((!v.is_empty()).then_some((i, v, x, y)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let n_violations: usize = failures.iter().map(|f| f.1.len()).sum();
    let status = if n_violations == 0 { "pass" } else { "fail" };
    let rows = vec![vec![
        a.b.to_string(),
        a.pairs.to_string(),
        a.height.to_string(),
        a.width.to_string(),
        n_violations.to_string(),
        status.to_string(),
    ]];
    let csv = table(
        &["b", "pairs", "height", "width", "violations", "status"],
        &rows,
    )?;
    let mut diagnostics = String::new();
    for (i, v, _, _) in &failures {
        for law in v {
            if diagnostics.lines().count() >= MAX_DUMPED_VIOLATIONS {
                break;
            }
            diagnostics += &format!(
                "pair {i}: {} violated: lhs = {} rhs = {}\n",
                law.law, law.lhs, law.rhs
            );
        }
    }
    if let Some((i, _, x, y)) = failures.first() {
        let mut buf = Vec::new();
        x.write_csv(&mut buf)?;
        diagnostics += &format!("# pair {i} image x\n{}", String::from_utf8_lossy(&buf));
        buf.clear();
        y.write_csv(&mut buf)?;
        diagnostics += &format!("# pair {i} image y\n{}", String::from_utf8_lossy(&buf));
    }
    Ok(Report {
        code: if n_violations == 0 {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        },
        csv: header("rescale-check", a, Some(a.seed), &[]) + &csv,
        diagnostics,
    })
}
