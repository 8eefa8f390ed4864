//! Exact expansion measures for sets whose expansions stay in the same family.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::norm::NormOrder;
use crate::quad;
use crate::specfun::{self, Probability};

const QUAD_REL_TOL: f64 = 1e-12;

/// Beyond this dimension the cap measure uses the Gaussian limit of `x₁`.
const GAUSSIAN_CAP_DIM: usize = 1_000_000;

/// `ln ∫₀^{π/2} sin^m t dt`.
fn ln_half_wallis(m: f64) -> f64 {
    if m == 0.0 {
        return FRAC_PI_2.ln();
    }
    quad::integrate(
        |u| (m * u.cos().ln()).exp(),
        0.0,
        FRAC_PI_2,
        QUAD_REL_TOL,
        0.0,
    )
    .value
    .ln()
}

/// `ln ∫₀^θ sin^m t dt` for `0 < θ ≤ π/2`, with the integrand scaled by its
/// peak `sin^m θ` so nothing underflows.
fn ln_partial_sine_power(m: f64, theta: f64) -> f64 {
    if m == 0.0 {
        return theta.ln();
    }
    let ln_peak = theta.sin().ln();
    let scaled = quad::integrate(
        |t| (m * (t.sin().ln() - ln_peak)).exp(),
        0.0,
        theta,
        QUAD_REL_TOL,
        0.0,
    );
    m * ln_peak + scaled.value.ln()
}

fn check_cap_args(n: usize, theta: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!(
            "cap measure requires n >= 2, got {n}"
        )));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!(
            "polar angle must lie in [0, π], got {theta}"
        )));
    }
    Ok(())
}

/// Log of the normalized measure of a polar cap of angle `θ ≤ π/2` in `S^{n-1}`.
fn ln_small_cap(n: usize, theta: f64) -> f64 {
    if theta == 0.0 {
        return f64::NEG_INFINITY;
    }
    if n > GAUSSIAN_CAP_DIM {
        return specfun::log_sf((n as f64).sqrt() * theta.cos());
    }
    let m = (n - 2) as f64;
    ln_partial_sine_power(m, theta) - std::f64::consts::LN_2 - ln_half_wallis(m)
}

/// Natural log of [`cap_measure`].
pub fn log_cap_measure(n: usize, theta: f64) -> Result<f64> {
    check_cap_args(n, theta)?;
    if theta <= FRAC_PI_2 {
        Ok(ln_small_cap(n, theta))
    } else {
        Ok((-ln_small_cap(n, PI - theta).exp()).ln_1p())
    }
}

/// Normalized measure `∫₀^θ sin^{n-2} t dt / ∫₀^π sin^{n-2} t dt` of the polar
/// cap `{x : angle(x, e₁) ≤ θ}` in `S^{n-1}`.
pub fn cap_measure(n: usize, theta: f64) -> Result<Probability> {
    check_cap_args(n, theta)?;
    if theta == FRAC_PI_2 {
        return Ok(Probability::HALF);
    }
    let v = if theta < FRAC_PI_2 {
        ln_small_cap(n, theta).exp()
    } else {
        // the complement is a small cap; no cancellation in 1 - small
        -ln_small_cap(n, PI - theta).exp_m1()
    };
    Ok(Probability::clamped(v))
}

/// Normalized measure of the geodesic ε-expansion of a half sphere.
pub fn half_sphere_expansion_exact(n: usize, eps: f64) -> Result<Probability> {
    if !(0.0..=FRAC_PI_2).contains(&eps) {
        return Err(Error::domain(format!("ε must lie in [0, π/2], got {eps}")));
    }
    cap_measure(n, FRAC_PI_2 + eps)
}

/// ε-expansion of the slab `{x ∈ [0,1]ⁿ : x₁ ≤ a}` in any ℓp with `p > 0`:
/// the nearest slab point differs in one coordinate, so the expansion is the
/// slab of width `min(1, a + ε)`.
pub fn slab_expansion_exact(a: f64, eps: f64, norm: NormOrder) -> Result<Probability> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!(
            "slab width must lie in (0, 1), got {a}"
        )));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::domain(format!(
            "ε must be finite and >= 0, got {eps}"
        )));
    }
    if norm.is_zero() {
        return Err(Error::domain(
            "slab oracle needs p > 0; use the sub-cube oracle for ℓ0",
        ));
    }
    Ok(Probability::clamped((a + eps).min(1.0)))
}

/// Hamming (ℓ0) ε-expansion of the sub-cube `[0,a]ⁿ`:
/// `Σ_{k ≤ ε} C(n,k) (1-a)^k a^{n-k}`, summed in log space.
pub fn subcube_hamming_expansion_exact(a: f64, n: usize, eps: u64) -> Result<Probability> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!(
            "sub-cube side must lie in (0, 1), got {a}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("dimension n must be at least 1"));
    }
    if eps as usize >= n {
        return Ok(Probability::ONE);
    }
    let ratio = ((1.0 - a) / a).ln();
    let mut log_term = n as f64 * a.ln();
    let mut terms = Vec::with_capacity(eps as usize + 1);
    terms.push(log_term);
    for k in 0..eps as usize {
        log_term += ((n - k) as f64 / (k + 1) as f64).ln() + ratio;
        terms.push(log_term);
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    Ok(Probability::clamped((max + sum.ln()).exp()))
}

/// ℓ2 ε-expansion of a Gaussian half-space of mass `mass`: `Φ(Φ⁻¹(mass) + ε)`.
/// A lower bound for every other set of the same Gaussian mass.
pub fn gaussian_halfspace_expansion_exact(mass: f64, eps: f64) -> Result<Probability> {
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::domain(format!(
            "mass must lie strictly inside (0, 1), got {mass}"
        )));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::domain(format!(
            "ε must be finite and >= 0, got {eps}"
        )));
    }
    Ok(Probability::clamped(specfun::cdf(
        specfun::quantile(mass) + eps,
    )))
}
