//! Acceptance suite. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line even when it passes; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use advbounds::attack::{
    linear_margin_distance, margin_and_gradient, pgd_attack, susceptibility_curve, train_linear,
    train_mlp, Classifier, LinearModel, Mlp1Model, PgdConfig, SyntheticTask,
};
use advbounds::bounds::{
    cube_expansion_bound_simple, cube_expansion_bound_tight, cube_susceptibility_bound,
    existence_support_threshold, half_sphere_expansion_bound, small_p_expansion_bound,
    small_p_expansion_bound_tight, sparse_susceptibility_bound, ClassStats, CubeForm,
    SimpleVariant,
};
use advbounds::geometry::{
    gauss_to_cube_transport, gaussian_halfspace_expansion_exact, half_sphere_expansion_exact,
    mc_expansion_measure, slab_expansion_exact, subcube_hamming_expansion_exact,
    transport_lipschitz, Metric, SetDescriptor,
};
use advbounds::rescale::{check_laws, ImageGrid};
use advbounds::rng::stream_rng;
use advbounds::{cli, specfun, NormOrder};
use rand::Rng;
use rand_distr::StandardNormal;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!(
            "{what} took {:.2}s, limit {limit_s}s",
            elapsed.as_secs_f64()
        )
    })
}

// ---- 1. special functions ----

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_k.
fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    (1..=k)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (k as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=k {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `Φ̂(z) = φ(z) ∫₀^∞ exp(-zs - s²/2) ds`, by composite 20-point Gauss–Legendre.
fn sf_oracle(z: f64, rule: &[(f64, f64)]) -> f64 {
    let upper = (-z).max(0.0) + 40.0;
    let panels = (upper / 0.25).ceil() as usize;
    let h = upper / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        let part: f64 = rule
            .iter()
            .map(|(x, w)| {
                let s = mid + 0.5 * h * x;
                w * (-z * s - 0.5 * s * s - 0.5 * z * z).exp()
            })
            .sum();
        total += 0.5 * h * part;
    }
    total / (2.0 * PI).sqrt()
}

fn criterion_1() -> Verdict {
    let rule = gauss_legendre(20);
    let zs: Vec<f64> = (0..=320).map(|i| -8.0 + 0.05 * i as f64).collect();
    let oracle: Vec<f64> = zs.iter().map(|&z| sf_oracle(z, &rule)).collect();
    let mirrored: Vec<f64> = zs.iter().map(|&z| sf_oracle(-z, &rule)).collect();
    let ps: Vec<f64> = (1..2000)
        .map(|i| i as f64 / 2000.0)
        .chain((1..=300).map(|k| 10f64.powi(-k)))
        .collect();

    let t = Instant::now();
    let sf: Vec<f64> = zs.iter().map(|&z| specfun::sf(z)).collect();
    let cdf: Vec<f64> = zs.iter().map(|&z| specfun::cdf(z)).collect();
    let q: Vec<f64> = ps.iter().map(|&p| specfun::quantile(p)).collect();
    let zq: Vec<f64> = zs
        .iter()
        .filter(|z| **z <= 5.0)
        .map(|&z| specfun::quantile(specfun::cdf(z)))
        .collect();
    let elapsed = t.elapsed();

    let mut worst = 0.0f64;
    for i in 0..zs.len() {
        worst = worst.max((sf[i] - oracle[i]).abs() / oracle[i]);
        worst = worst.max((cdf[i] - mirrored[i]).abs() / mirrored[i]);
    }
    ensure(worst <= 1e-12, || {
        format!("cdf/sf relative error {worst:e} on [-8, 8]")
    })?;
    let mut worst_rt = 0.0f64;
    for (p, z) in ps.iter().zip(&q) {
        worst_rt = worst_rt.max((specfun::cdf(*z) - p).abs());
    }
    for (z, back) in zs.iter().zip(&zq) {
        worst_rt = worst_rt.max((z - back).abs());
    }
    ensure(worst_rt <= 1e-10, || {
        format!("quantile round trip error {worst_rt:e}")
    })?;
    within(elapsed, 1.0, "evaluation grid")?;
    Ok(format!(
        "max rel err {worst:.1e}, round trip {worst_rt:.1e}, {:.1} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

// ---- 2. sphere expansion ----

fn eps_for_level(n: usize, level: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, PI / 2.0 - 1e-12);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if half_sphere_expansion_exact(n, mid).unwrap().get() >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let ns = [10usize, 100, 1000, 5000];
    let grid: Vec<f64> = (1..=20).map(|i| 0.025 * i as f64).collect();
    for &n in &ns {
        let mut prev = (0.0, 0.0);
        for &eps in &grid {
            let exact = half_sphere_expansion_exact(n, eps)
                .map_err(|e| e.to_string())?
                .get();
            let bound = half_sphere_expansion_bound(n, eps)
                .map_err(|e| e.to_string())?
                .value();
            ensure(exact >= bound, || {
                format!("n={n} eps={eps}: exact {exact} < bound {bound}")
            })?;
            ensure(exact >= prev.0 && bound >= prev.1, || {
                format!("n={n}: curves not increasing")
            })?;
            prev = (exact, bound);
        }
        if n >= 100 {
            ensure(prev.0 > 0.99 && prev.1 > 0.99, || {
                format!("n={n}: curves do not approach 1")
            })?;
        }
    }
    let at = half_sphere_expansion_exact(1000, 0.1).unwrap().get();
    ensure(at > 0.995756, || format!("exact(1000, 0.1) = {at}"))?;
    let needed: Vec<f64> = ns.iter().map(|&n| eps_for_level(n, 0.99)).collect();
    ensure(needed.windows(2).all(|w| w[1] < w[0]), || {
        format!("eps for 0.99: {needed:?}")
    })?;
    within(t.elapsed(), 10.0, "sphere grid")?;
    Ok(format!(
        "exact(1000, 0.1) = {at:.7}; eps to 0.99 = {needed:.4?}"
    ))
}

// ---- 3. dominance ----

fn criterion_3() -> Verdict {
    let norms = [
        NormOrder::Finite(0.5),
        NormOrder::Finite(1.0),
        NormOrder::Finite(2.0),
        NormOrder::Finite(3.0),
        NormOrder::Infinity,
    ];
    let mut triples = 0;
    for &a in &[0.1, 0.3, 0.5, 0.7, 0.9] {
        for &eps in &[0.05, 0.2] {
            for &norm in &norms {
                triples += 1;
                let exact = slab_expansion_exact(a, eps, norm).unwrap().get();
                for n in [1usize, 10, 100, 1000] {
                    let b = cube_expansion_bound_tight(a, norm, n, eps).unwrap().value();
                    ensure(b <= exact + 1e-12, || {
                        format!("tight bound {b} > slab {exact} at a={a} eps={eps} p={norm} n={n}")
                    })?;
                }
            }
        }
    }
    let mut checked = 0;
    for n in 1..=30usize {
        for &a in &[0.05f64, 0.2, 0.4, 0.5, 0.6, 0.8, 0.95] {
            let vol = a.powi(n as i32);
            for eps in 0..=n as u64 {
                let exact = subcube_hamming_expansion_exact(a, n, eps).unwrap().get();
                let small_p = small_p_expansion_bound(vol, NormOrder::Zero, n, eps as f64)
                    .unwrap()
                    .value();
                ensure(small_p <= exact + 1e-12, || {
                    format!("small-p bound {small_p} > tail {exact} at n={n} a={a} eps={eps}")
                })?;
                let tight =
                    small_p_expansion_bound_tight(vol, NormOrder::Zero, n, eps as f64).unwrap();
                if tight.valid {
                    ensure(tight.value() <= exact + 1e-12, || {
                        format!(
                            "super-tight {} > tail {exact} at n={n} a={a} eps={eps}",
                            tight.value()
                        )
                    })?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{triples} slab triples x 4 dimensions, {checked} sub-cube cases, 0 violations"
    ))
}

// ---- 4. simplified-bound counterexample ----

fn criterion_4() -> Verdict {
    let p2 = NormOrder::Finite(2.0);
    let printed = cube_expansion_bound_simple(p2, 100, 0.2, SimpleVariant::AsPrinted)
        .unwrap()
        .value();
    let mills = cube_expansion_bound_simple(p2, 100, 0.2, SimpleVariant::Mills)
        .unwrap()
        .value();
    let slab = slab_expansion_exact(0.5, 0.2, p2).unwrap().get();
    ensure((printed - 0.8596).abs() < 5e-5, || {
        format!("as printed {printed}")
    })?;
    ensure((mills - 0.2982).abs() < 5e-5, || format!("mills {mills}"))?;
    ensure((slab - 0.7).abs() < 1e-15, || format!("slab {slab}"))?;
    ensure(printed > slab && slab >= mills, || {
        "ordering violated".into()
    })?;
    Ok(format!(
        "as printed {printed:.4} > slab {slab} >= mills {mills:.4}"
    ))
}

// ---- 5. Gaussian isoperimetry by Monte Carlo ----

fn criterion_5() -> Verdict {
    let t = Instant::now();
    let n = 50;
    let mut parts = Vec::new();
    for mass in [0.5, 0.1] {
        let set = SetDescriptor::GaussianHalfspace {
            offset: specfun::quantile(mass),
        };
        for eps in [0.5, 1.0] {
            let est = mc_expansion_measure(
                &set,
                n,
                Metric::Lp(NormOrder::Finite(2.0)),
                eps,
                1_000_000,
                2024,
            )
            .map_err(|e| e.to_string())?;
            let exact = gaussian_halfspace_expansion_exact(mass, eps).unwrap().get();
            let z = (est.estimate.get() - exact) / est.stderr;
            ensure(est.agrees_with(exact, 4.0), || {
                format!("mass {mass} eps {eps}: z = {z:.2}")
            })?;
            parts.push(format!("{z:+.2}"));
        }
    }
    within(t.elapsed(), 30.0, "Monte Carlo")?;
    Ok(format!("z-scores {}", parts.join(" ")))
}

// ---- 6. Gaussian-to-cube transport ----

fn criterion_6() -> Verdict {
    let (samples, n) = (100_000usize, 5usize);
    let mut rng = stream_rng(606, 0);
    let mut cols = vec![Vec::with_capacity(samples); n];
    for _ in 0..samples {
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let u = gauss_to_cube_transport(&z).unwrap();
        for (c, v) in cols.iter_mut().zip(u.iter()) {
            c.push(*v);
        }
    }
    let critical = 1.628 / (samples as f64).sqrt();
    let mut worst_ks = 0.0f64;
    for col in &mut cols {
        col.sort_by(f64::total_cmp);
        let m = col.len() as f64;
        let d = col
            .iter()
            .enumerate()
            .map(|(i, &u)| ((i + 1) as f64 / m - u).max(u - i as f64 / m))
            .fold(0.0, f64::max);
        worst_ks = worst_ks.max(d);
    }
    ensure(worst_ks < critical, || {
        format!("KS {worst_ks} >= {critical}")
    })?;

    let mut pairs = 0usize;
    for norm in [
        NormOrder::Finite(1.0),
        NormOrder::Finite(2.0),
        NormOrder::Infinity,
    ] {
        for dim in [2usize, 10, 100] {
            let lip = transport_lipschitz(norm, dim).unwrap();
            let mut rng = stream_rng(607, dim as u64);
            for k in 0..100_000 {
                let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                // Alternate far pairs with nearby ones, where the bound is tightest.
                let scale = if k % 2 == 0 { 1.0 } else { 1e-3 };
                let w: Vec<f64> = z
                    .iter()
                    .map(|v| v + scale * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let (tz, tw) = (
                    gauss_to_cube_transport(&z).unwrap(),
                    gauss_to_cube_transport(&w).unwrap(),
                );
                let diff: Vec<f64> = tz.iter().zip(tw.iter()).map(|(a, b)| a - b).collect();
                let dz: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
                let lhs = norm.norm(&diff);
                let rhs = lip * NormOrder::Finite(2.0).norm(&dz);
                ensure(lhs <= rhs * (1.0 + 1e-12), || {
                    format!("pullback violated at p={norm} n={dim}: {lhs} > {rhs}")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "KS max {worst_ks:.5} < {critical:.5}; {pairs} Lipschitz pairs, 0 violations"
    ))
}

// ---- 7. closed-form spot values ----

fn criterion_7() -> Verdict {
    let sparse = sparse_susceptibility_bound(&ClassStats::new(784, 0.5, 1.0).unwrap(), 56)
        .unwrap()
        .value();
    ensure((sparse - 0.963369).abs() <= 1e-6, || {
        format!("sparse {sparse}")
    })?;
    let p2 = NormOrder::Finite(2.0);
    let exist = existence_support_threshold(p2, 784, 1.0)
        .unwrap()
        .threshold
        .get();
    ensure((exist - 0.021607).abs() <= 1e-6, || {
        format!("existence {exist}")
    })?;
    let eq5 = |n: usize, form: CubeForm| {
        cube_susceptibility_bound(&ClassStats::new(n, 0.5, 1.0).unwrap(), p2, 1.0, form)
            .unwrap()
            .value()
    };
    let simple = eq5(784, CubeForm::SimpleAsPrinted);
    ensure((simple - 0.993123).abs() <= 1e-6, || {
        format!("simplified cube bound {simple}")
    })?;
    ensure(simple == eq5(784, CubeForm::SimpleMills), || {
        "forms differ at eps = 1".into()
    })?;
    for n in [1usize, 2, 10, 784, 100_000, 10_000_000] {
        let t = existence_support_threshold(p2, n, 1.0)
            .unwrap()
            .threshold
            .get();
        ensure(t == exist, || {
            format!("existence threshold depends on n at p = 2: n={n} gives {t}")
        })?;
        ensure(eq5(n, CubeForm::SimpleAsPrinted) == simple, || {
            format!("cube bound depends on n={n}")
        })?;
    }
    Ok(format!(
        "sparse {sparse:.6}, existence {exist:.6}, simplified {simple:.6}, p=2 n-free"
    ))
}

// ---- 8. rescaling laws ----

fn criterion_8() -> Verdict {
    let mut total = 0;
    for b in 1..=4usize {
        let mut rng = stream_rng(808, b as u64);
        for k in 0..10_000 {
            let (h, w) = if k % 2 == 0 {
                (b * rng.random_range(1..=4), b * rng.random_range(1..=4))
            } else {
                (rng.random_range(1..=9), rng.random_range(1..=9))
            };
            let mut img =
                || ImageGrid::new(h, w, (0..h * w).map(|_| rng.random::<f64>()).collect()).unwrap();
            let (x, y) = (img(), img());
            let v = check_laws(&x, &y, b, 1e-12).map_err(|e| e.to_string())?;
            ensure(v.is_empty(), || format!("b={b} pair {k}: {v:?}"))?;
            total += 1;
        }
    }
    Ok(format!("{total} image pairs across b = 1..4, 0 violations"))
}

// ---- 9. attacks ----

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    num / a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12)
}

fn central_diff(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let h = 1e-5;
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let fp = f(&y);
            y[i] = x[i] - h;
            let fm = f(&y);
            y[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

fn criterion_9() -> Verdict {
    // Gradient checks on random draws.
    let mut rng = stream_rng(909, 0);
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let mlp = Mlp1Model::random(12, 7, 3, seed).unwrap();
        let x: Vec<f64> = (0..12).map(|_| rng.random()).collect();
        for k in 0..3 {
            worst = worst.max(rel_err(
                &mlp.score_gradient(&x, k),
                &central_diff(|z| mlp.scores(z)[k], &x),
            ));
        }
        let label = (seed % 3) as usize;
        let (_, g) = margin_and_gradient(&mlp, &x, label);
        let margin = |z: &[f64]| {
            let s = mlp.scores(z);
            let best = (0..3)
                .filter(|&j| j != label)
                .map(|j| s[j])
                .fold(f64::NEG_INFINITY, f64::max);
            best - s[label]
        };
        worst = worst.max(rel_err(&g, &central_diff(margin, &x)));

        let points: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..12).map(|_| rng.random()).collect())
            .collect();
        let labels: Vec<usize> = (0..6).map(|i| i % 3).collect();
        let (_, g) = mlp.loss_and_param_gradient(&points, &labels);
        let fd = central_diff(
            |p| {
                let mut m = mlp.clone();
                m.set_params(p);
                m.loss_and_param_gradient(&points, &labels).0
            },
            &mlp.params(),
        );
        worst = worst.max(rel_err(&g, &fd));

        let mut lin = LinearModel::zeros(12, 3);
        let p0: Vec<f64> = (0..39).map(|_| rng.random::<f64>() - 0.5).collect();
        lin.set_params(&p0);
        let (_, g) = lin.loss_and_param_gradient(&points, &labels);
        let fd = central_diff(
            |p| {
                let mut m = lin.clone();
                m.set_params(p);
                m.loss_and_param_gradient(&points, &labels).0
            },
            &p0,
        );
        worst = worst.max(rel_err(&g, &fd));
    }
    ensure(worst <= 1e-5, || {
        format!("gradient relative error {worst:e}")
    })?;

    // PGD-ℓ2 against the hyperplane-distance oracle.
    let task = SyntheticTask::new(20, 2, 0.05, 99).unwrap();
    let model = train_linear(&task.sample(500, 0), 200, 0.5, 99).unwrap();
    let test = task.sample(1000, 1);
    let cfg = PgdConfig {
        steps: 100,
        step_size: None,
        seed: 99,
    };
    let (mut interior, mut agree) = (0usize, 0usize);
    for (x, &y) in test.points.iter().zip(&test.labels) {
        let d = linear_margin_distance(&model, x, y);
        let to_face = x
            .iter()
            .map(|v| v.min(1.0 - v))
            .fold(f64::INFINITY, f64::min);
        for eps in [0.5 * d, 0.9 * d, 1.1 * d, 1.5 * d] {
            // The whole ε-ball lies in the cube, so the box never binds.
            if eps <= 0.0 || eps >= to_face {
                continue;
            }
            interior += 1;
            let out = pgd_attack(&model, x, y, NormOrder::Finite(2.0), eps, &cfg).unwrap();
            if out.success == (d <= eps) {
                agree += 1;
            }
        }
    }
    let rate = agree as f64 / interior.max(1) as f64;
    ensure(interior >= 1000, || {
        format!("only {interior} interior cases")
    })?;
    ensure(rate >= 0.99, || {
        format!("oracle agreement {rate} on {interior} cases")
    })?;

    // Curves.
    let grid: Vec<f64> = (0..16).map(|i| 0.04 * i as f64).collect();
    let task3 = SyntheticTask::new(10, 3, 0.15, 5).unwrap();
    let train3 = task3.sample(300, 0);
    let test3 = task3.sample(200, 1);
    let lin3 = train_linear(&train3, 100, 0.5, 5).unwrap();
    let (mlp3, _) = train_mlp(&train3, 8, 100, 1.0, 5).unwrap();
    let models: [(&str, &dyn Classifier); 2] = [("linear", &lin3), ("mlp", &mlp3)];
    let mut curves = 0;
    for (name, m) in models {
        let errors = test3
            .points
            .iter()
            .zip(&test3.labels)
            .filter(|(x, &y)| m.predict(x) != y)
            .count();
        let test_error = errors as f64 / test3.len() as f64;
        for norm in [
            NormOrder::Finite(2.0),
            NormOrder::Infinity,
            NormOrder::Zero,
            NormOrder::Finite(1.0),
        ] {
            let g: Vec<f64> = if norm.is_zero() {
                (0..6).map(f64::from).collect()
            } else {
                grid.clone()
            };
            let c = susceptibility_curve(m, &test3, norm, &g, &PgdConfig::default()).unwrap();
            ensure(c.is_monotone(), || {
                format!("{name} curve under {norm} not monotone")
            })?;
            let first = c.points[0].fooled_fraction.get();
            ensure(first == test_error, || {
                format!("{name} {norm}: eps=0 gives {first}, test error {test_error}")
            })?;
            curves += 1;
        }
    }
    Ok(format!(
        "grad err {worst:.1e}; PGD/oracle agreement {:.2}% on {interior} interior cases; {curves} curves monotone",
        100.0 * rate
    ))
}

// ---- 10. CLI determinism ----

fn criterion_10() -> Verdict {
    let commands: [&[&str]; 6] = [
        &[
            "bound",
            "--theorem",
            "cube",
            "--n",
            "784",
            "--p",
            "inf",
            "--eps-grid",
            "0:0.1:11",
            "--fc",
            "0.1",
        ],
        &[
            "expand",
            "--set",
            "sphere-half",
            "--n",
            "200",
            "--eps-grid",
            "0:0.3:4",
            "--samples",
            "50000",
            "--seed",
            "7",
        ],
        &[
            "expand",
            "--set",
            "subcube",
            "--n",
            "12",
            "--a",
            "0.8",
            "--eps-grid",
            "0:4:5",
            "--samples",
            "40000",
            "--seed",
            "8",
        ],
        &[
            "curve",
            "--n",
            "15",
            "--classes",
            "3",
            "--train-count",
            "150",
            "--test-count",
            "120",
            "--eps-grid",
            "0:0.4:6",
            "--seed",
            "3",
        ],
        &[
            "curve",
            "--model",
            "mlp",
            "--hidden",
            "6",
            "--n",
            "8",
            "--epochs",
            "50",
            "--train-count",
            "100",
            "--test-count",
            "80",
            "--norm",
            "inf",
            "--eps-grid",
            "0:0.2:5",
            "--seed",
            "4",
        ],
        &[
            "rescale-check",
            "--b",
            "3",
            "--pairs",
            "300",
            "--height",
            "6",
            "--width",
            "9",
            "--seed",
            "11",
        ],
    ];
    for args in commands {
        let mut bodies = Vec::new();
        for threads in ["1", "2", "4", "7"] {
            let argv = ["advbounds", "--threads", threads]
                .into_iter()
                .chain(args.iter().copied());
            let out = cli::run(argv);
            ensure(out.code == 0, || {
                format!("{args:?} exited {}: {}", out.code, out.stderr)
            })?;
            bodies.push(out.stdout);
        }
        ensure(bodies.windows(2).all(|w| w[0] == w[1]), || {
            format!("{} output varies with --threads", args[0])
        })?;
    }
    Ok(format!(
        "{} commands byte-identical across --threads 1, 2, 4, 7",
        commands.len()
    ))
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        ("special functions vs quadrature oracle", criterion_1),
        ("half-sphere expansion exact vs bound", criterion_2),
        ("bound dominance over exact oracles", criterion_3),
        ("simplified cube bound counterexample ordering", criterion_4),
        ("Gaussian half-space Monte Carlo", criterion_5),
        ("Gaussian-to-cube transport", criterion_6),
        ("closed-form spot values", criterion_7),
        ("rescaling norm laws", criterion_8),
        ("attack validity", criterion_9),
        ("CLI determinism across thread counts", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!(
                "PASS criterion {:>2}: {name} ({detail}) [{secs:.2}s]",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
