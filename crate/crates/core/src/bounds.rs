//! Closed-form lower bounds on ε-expansions and on adversarial susceptibility.
//!
//! Every formula is assembled in log space and exponentiated once, so the
//! operations stay finite for `n` up to 10⁶ and beyond. A bound whose formula
//! goes negative is still a true (vacuous) statement: it is clamped to 0 and
//! returned with `valid = true` and a note. Only violated hypotheses are errors.
//!
//! # The simplified cube bound
//!
//! Bounding the Gaussian tail in the tight cube bound with the Mills ratio
//! `Φ̂(z) ≤ e^{-z²/2}/(√(2π) z)` at `vol = 1/2` gives
//!
//! ```text
//! 1 - exp(-π n^{1-2/p*} ε²) / (2π n^{1/2-1/p*} ε)
//! ```
//!
//! The commonly quoted form omits the trailing `ε` in the denominator. That form
//! is not a valid lower bound: for the slab `{x₁ ≤ 1/2}` at `n = 100`, `p = 2`,
//! `ε = 0.2` it gives 0.8596 while the exact expansion is 0.7. Both are exposed
//! through [`SimpleVariant`]; [`SimpleVariant::Mills`] is the default.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::norm::NormOrder;
use crate::specfun::{self, Probability};

/// `ln √(π/8)`
const LN_SQRT_PI_OVER_8: f64 = -0.467_355_827_915_217_9;

const FC_HYPOTHESIS: &str = "f_c ≤ 1/2";

/// Scalars a susceptibility bound consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassStats {
    /// Ambient dimension.
    pub n: usize,
    /// Fraction of the domain the classifier labels as the class.
    pub f_c: Probability,
    /// `U_c` on the cube (density supremum) or `V_c` on the sphere
    /// (density supremum relative to the uniform density).
    pub density_sup: f64,
}

impl ClassStats {
    pub fn new(n: usize, f_c: f64, density_sup: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension n must be at least 1"));
        }
        let f_c = Probability::new(f_c)?;
        if !(density_sup.is_finite() && density_sup >= 1.0) {
            return Err(Error::domain(format!(
                "density supremum must be finite and >= 1, got {density_sup}"
            )));
        }
        Ok(ClassStats {
            n,
            f_c,
            density_sup,
        })
    }

    fn require_half_or_less(&self) -> Result<()> {
        if self.f_c.get() <= 0.5 {
            Ok(())
        } else {
            Err(Error::precondition(
                FC_HYPOTHESIS,
                format!("class fraction f_c = {}", self.f_c.get()),
            ))
        }
    }
}

/// A lower bound on a probability.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub probability: Probability,
    /// False when the formula was evaluated outside the regime where it is proven.
    pub valid: bool,
    pub note: String,
}

impl BoundValue {
    fn from_raw(raw: f64) -> Self {
        let note = if raw <= 0.0 {
            "vacuous: formula is non-positive, clamped to 0".to_string()
        } else {
            String::new()
        };
        BoundValue {
            probability: Probability::clamped(raw),
            valid: true,
            note,
        }
    }

    /// `1 - exp(log_deficit)`, clamped.
    fn one_minus_exp(log_deficit: f64) -> Self {
        let raw = if log_deficit >= 0.0 {
            1.0 - log_deficit.exp()
        } else {
            -log_deficit.exp_m1()
        };
        Self::from_raw(raw)
    }

    fn with_note(mut self, note: &str) -> Self {
        if self.note.is_empty() {
            self.note = note.to_string();
        } else {
            self.note = format!("{}; {note}", self.note);
        }
        self
    }

    pub fn value(&self) -> f64 {
        self.probability.get()
    }
}

/// Which simplified cube expansion bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimpleVariant {
    /// Without the `ε` factor in the denominator. Not a valid bound in general.
    AsPrinted,
    /// Mills-ratio form with the `ε` factor. Valid.
    #[default]
    Mills,
}

/// Which form of the cube susceptibility bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CubeForm {
    /// `1 - U_c Φ̂(Φ⁻¹(1-f_c) + √(2πn) n^{-1/p*} ε)`.
    #[default]
    Tight,
    SimpleMills,
    SimpleAsPrinted,
    /// `1 - U_c Φ̂(Φ⁻¹(1-f_c) + √(2π) ε)` for `p ≥ 2`; meaningful for small `ε` and `f_c`.
    LinfRefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RescaleDirection {
    Up,
    Down,
}

/// A condition on `vol[supp ρ_c]` sufficient for adversarial examples to exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceThreshold {
    pub threshold: Probability,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaleTransfer {
    pub eps: f64,
    pub p_fool: Probability,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "radius must be finite and >= 0, got {eps}"
        )))
    }
}

fn check_integer_eps(eps: f64) -> Result<()> {
    check_eps(eps)?;
    if eps.fract() != 0.0 {
        return Err(Error::domain(format!(
            "sparse radius counts coordinates and must be an integer, got {eps}"
        )));
    }
    Ok(())
}

fn positive_p_star(norm: NormOrder) -> Result<f64> {
    norm.p_star()
        .ok_or_else(|| Error::domain("this bound requires an ℓp norm with p > 0"))
}

/// `ln(√(2πn) · n^{-1/p*})`, the log of the Gaussian-to-cube radius factor.
fn ln_radius_factor(n: usize, p_star: f64) -> f64 {
    0.5 * (2.0 * PI).ln() + (0.5 - 1.0 / p_star) * (n as f64).ln()
}

/// Geodesic ε-expansion of a half sphere in `S^{n-1} ⊂ ℝⁿ`:
/// `1 - √(π/8) exp(-(n-1) ε²/2)`.
pub fn half_sphere_expansion_bound(n: usize, eps: f64) -> Result<BoundValue> {
    if n < 2 {
        return Err(Error::domain(format!(
            "sphere bound requires n >= 2, got {n}"
        )));
    }
    check_eps(eps)?;
    let log_deficit = LN_SQRT_PI_OVER_8 - 0.5 * (n - 1) as f64 * eps * eps;
    Ok(BoundValue::one_minus_exp(log_deficit))
}

/// Probability that a point of class `c` on the sphere is misclassified or has a
/// geodesic ε-adversarial example: `1 - V_c √(π/8) exp(-(n-1) ε²/2)`.
pub fn sphere_susceptibility_bound(stats: &ClassStats, eps: f64) -> Result<BoundValue> {
    stats.require_half_or_less()?;
    if stats.n < 2 {
        return Err(Error::domain(format!(
            "sphere bound requires n >= 2, got {}",
            stats.n
        )));
    }
    check_eps(eps)?;
    let log_deficit =
        stats.density_sup.ln() + LN_SQRT_PI_OVER_8 - 0.5 * (stats.n - 1) as f64 * eps * eps;
    Ok(BoundValue::one_minus_exp(log_deficit))
}

/// `vol[A(ε, d_p)] ≥ Φ(Φ⁻¹(vol[A]) + √(2πn) n^{-1/p*} ε)`.
pub fn cube_expansion_bound_tight(
    vol: f64,
    norm: NormOrder,
    n: usize,
    eps: f64,
) -> Result<BoundValue> {
    let p_star = positive_p_star(norm)?;
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::domain("dimension n must be at least 1"));
    }
    if !(vol > 0.0 && vol < 1.0) {
        return Err(Error::domain(format!(
            "set volume must lie strictly inside (0, 1), got {vol}"
        )));
    }
    let alpha = specfun::quantile(vol);
    if eps == 0.0 {
        return Ok(BoundValue::from_raw(vol));
    }
    let shift = (ln_radius_factor(n, p_star)).exp() * eps;
    Ok(BoundValue::from_raw(specfun::cdf(alpha + shift)))
}

/// Log of the deficit `δ` in the simplified bound `1 - δ` for a set with `vol ≥ 1/2`.
fn ln_simple_deficit(p_star: f64, n: usize, eps: f64, variant: SimpleVariant) -> f64 {
    let nf = n as f64;
    let base = -PI * nf.powf(1.0 - 2.0 / p_star) * eps * eps
        - (2.0 * PI).ln()
        - (0.5 - 1.0 / p_star) * nf.ln();
    match variant {
        SimpleVariant::AsPrinted => base,
        SimpleVariant::Mills => base - eps.ln(),
    }
}

/// Simplified expansion bound for sets with `vol[A] ≥ 1/2` (the caller's obligation).
pub fn cube_expansion_bound_simple(
    norm: NormOrder,
    n: usize,
    eps: f64,
    variant: SimpleVariant,
) -> Result<BoundValue> {
    let p_star = positive_p_star(norm)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::domain(format!("radius must be > 0, got {eps}")));
    }
    if n == 0 {
        return Err(Error::domain("dimension n must be at least 1"));
    }
    let bound = BoundValue::one_minus_exp(ln_simple_deficit(p_star, n, eps, variant));
    Ok(match variant {
        SimpleVariant::Mills => bound,
        SimpleVariant::AsPrinted => {
            bound.with_note("as-printed form without the ε denominator; not a valid lower bound")
        }
    })
}

/// Probability that a point of class `c` in the cube is misclassified or has an
/// ℓp ε-adversarial example.
pub fn cube_susceptibility_bound(
    stats: &ClassStats,
    norm: NormOrder,
    eps: f64,
    form: CubeForm,
) -> Result<BoundValue> {
    stats.require_half_or_less()?;
    let p_star = positive_p_star(norm)?;
    check_eps(eps)?;
    let ln_u = stats.density_sup.ln();
    let f_c = stats.f_c.get();

    let tail_bound = |shift: f64| {
        if f_c == 0.0 {
            return BoundValue::from_raw(1.0)
                .with_note("f_c = 0: every class point is misclassified");
        }
        let alpha = specfun::quantile(1.0 - f_c);
        BoundValue::one_minus_exp(ln_u + specfun::log_sf(alpha + shift))
    };

    match form {
        CubeForm::Tight => {
            let shift = ln_radius_factor(stats.n, p_star).exp() * eps;
            Ok(tail_bound(shift))
        }
        CubeForm::LinfRefined => {
            if f_c >= 0.5 {
                return Err(Error::precondition(
                    "f_c < 1/2",
                    format!("class fraction f_c = {f_c}"),
                ));
            }
            let large_p = match norm {
                NormOrder::Infinity => true,
                NormOrder::Finite(p) => p >= 2.0,
                NormOrder::Zero => false,
            };
            if !large_p {
                return Err(Error::precondition("p ≥ 2", format!("norm order {norm}")));
            }
            Ok(tail_bound((2.0 * PI).sqrt() * eps))
        }
        CubeForm::SimpleMills | CubeForm::SimpleAsPrinted => {
            if eps <= 0.0 {
                return Err(Error::domain("simplified bounds require ε > 0"));
            }
            let variant = if form == CubeForm::SimpleMills {
                SimpleVariant::Mills
            } else {
                SimpleVariant::AsPrinted
            };
            let bound =
                BoundValue::one_minus_exp(ln_u + ln_simple_deficit(p_star, stats.n, eps, variant));
            Ok(match variant {
                SimpleVariant::Mills => bound,
                SimpleVariant::AsPrinted => bound.with_note(
                    "as-printed form without the ε denominator; not a valid lower bound",
                ),
            })
        }
    }
}

/// Expansion bound for small `p`, including the sparse metric:
/// `1 - exp(-ε^{2p}/n)/vol` for `p > 0` and `1 - exp(-ε²/n)/vol` for `p = 0`.
pub fn small_p_expansion_bound(
    vol: f64,
    norm: NormOrder,
    n: usize,
    eps: f64,
) -> Result<BoundValue> {
    if !(vol > 0.0 && vol <= 1.0) {
        return Err(Error::domain(format!(
            "set volume must lie in (0, 1], got {vol}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("dimension n must be at least 1"));
    }
    let nf = n as f64;
    let exponent = match norm {
        NormOrder::Zero => {
            check_integer_eps(eps)?;
            if eps >= nf {
                return Ok(BoundValue::from_raw(1.0));
            }
            eps * eps / nf
        }
        NormOrder::Finite(p) => {
            check_eps(eps)?;
            eps.powf(2.0 * p) / nf
        }
        NormOrder::Infinity => {
            return Err(Error::domain("small-p bound is defined for finite p only"));
        }
    };
    Ok(BoundValue::one_minus_exp(-exponent - vol.ln()))
}

/// The optimized small-p bound
/// `1 - exp(-(2/n)(ε^p - √(n ln(1/vol)/2))²)`, proven when `ε^p ≥ √(n ln(1/vol)/2)`.
/// For the sparse metric `ε^p` is read as `ε`.
pub fn small_p_expansion_bound_tight(
    vol: f64,
    norm: NormOrder,
    n: usize,
    eps: f64,
) -> Result<BoundValue> {
    if !(vol > 0.0 && vol <= 1.0) {
        return Err(Error::domain(format!(
            "set volume must lie in (0, 1], got {vol}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("dimension n must be at least 1"));
    }
    let radius = match norm {
        NormOrder::Zero => {
            check_integer_eps(eps)?;
            eps
        }
        NormOrder::Finite(p) => {
            check_eps(eps)?;
            eps.powf(p)
        }
        NormOrder::Infinity => {
            return Err(Error::domain("small-p bound is defined for finite p only"));
        }
    };
    let nf = n as f64;
    let threshold = (nf * (1.0 / vol).ln() / 2.0).sqrt();
    let gap = radius - threshold;
    let bound = BoundValue::one_minus_exp(-2.0 / nf * gap * gap);
    if gap < 0.0 {
        Ok(BoundValue {
            valid: false,
            note: format!("outside proven regime: ε^p = {radius} < √(n ln(1/vol)/2) = {threshold}"),
            ..bound
        })
    } else {
        Ok(bound)
    }
}

/// Probability that a point of class `c` is misclassified or can be fooled by
/// changing at most `eps` coordinates: `1 - 2 U_c exp(-ε²/n)`.
pub fn sparse_susceptibility_bound(stats: &ClassStats, eps: u64) -> Result<BoundValue> {
    stats.require_half_or_less()?;
    let e = eps as f64;
    let log_deficit = std::f64::consts::LN_2 + stats.density_sup.ln() - e * e / stats.n as f64;
    Ok(BoundValue::one_minus_exp(log_deficit))
}

/// Support-volume threshold above which some class point admits an ε-adversarial example.
pub fn existence_support_threshold(
    norm: NormOrder,
    n: usize,
    eps: f64,
) -> Result<ExistenceThreshold> {
    if n == 0 {
        return Err(Error::domain("dimension n must be at least 1"));
    }
    let nf = n as f64;
    match norm.p_star() {
        Some(p_star) => {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::domain(format!("radius must be > 0, got {eps}")));
            }
            let log_t = -std::f64::consts::LN_2 - PI * eps * eps * nf.powf(1.0 - 2.0 / p_star);
            Ok(ExistenceThreshold {
                threshold: Probability::clamped(log_t.exp()),
                valid: true,
            })
        }
        None => {
            check_integer_eps(eps)?;
            let edge = (nf * std::f64::consts::LN_2 / 2.0).sqrt();
            let gap = eps - edge;
            Ok(ExistenceThreshold {
                threshold: Probability::clamped((-2.0 * gap * gap / nf).exp()),
                valid: eps >= edge,
            })
        }
    }
}

/// True when a support of volume `support_vol` is large enough to force an
/// ε-adversarial example.
pub fn existence_check(support_vol: f64, norm: NormOrder, n: usize, eps: f64) -> Result<bool> {
    let support = Probability::new(support_vol)?;
    let t = existence_support_threshold(norm, n, eps)?;
    if !t.valid {
        return Err(Error::precondition(
            "ε ≥ √(n log 2 / 2)",
            format!("sparse radius {eps} below activation edge at n = {n}"),
        ));
    }
    Ok(support.get() >= t.threshold.get())
}

/// Transfers an ℓ2 susceptibility statement between an image distribution and its
/// `b`-fold upsampled version. Up maps `(ε, p)` to `(bε, p)`; down maps `(bε, p)` to `(ε, p)`.
pub fn mnist_rescale_transfer(
    eps: f64,
    p_fool: f64,
    b: u32,
    direction: RescaleDirection,
) -> Result<RescaleTransfer> {
    if b < 1 {
        return Err(Error::domain("block factor b must be >= 1"));
    }
    check_eps(eps)?;
    let p_fool = Probability::new(p_fool)?;
    let eps = match direction {
        RescaleDirection::Up => eps * b as f64,
        RescaleDirection::Down => eps / b as f64,
    };
    Ok(RescaleTransfer { eps, p_fool })
}
