//! Standard-normal special functions.
//!
//! The tail `Φ̂(z) = P(Z > z)` is evaluated directly from a complementary
//! error function, never as `1 - Φ(z)`, and every tail has a log-space
//! companion so that bounds at large `n` do not underflow.
//!
//! The density used throughout is the standard `(2π)^{-n/2} exp(-‖x‖²/2)`;
//! this is the form under which the coordinatewise `Φ` map is measure preserving.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);
    pub const HALF: Probability = Probability(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(format!("probability {value} outside [0, 1]")))
        }
    }

    /// Clamps into `[0, 1]`; NaN maps to 0.
    pub fn clamped(value: f64) -> Self {
        if value.is_nan() {
            Probability(0.0)
        } else {
            Probability(value.clamp(0.0, 1.0))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// A finite standard-normal quantile.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ZScore(f64);

impl ZScore {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(ZScore(value))
        } else {
            Err(Error::domain(format!("z-score {value} is not finite")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

fn check_finite(z: f64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("argument {z} is not finite")))
    }
}

/// `Φ(z)`.
pub fn std_normal_cdf(z: f64) -> Result<Probability> {
    check_finite(z)?;
    Ok(Probability(cdf(z)))
}

/// `Φ̂(z) = 1 - Φ(z)`, computed without cancellation.
pub fn std_normal_sf(z: f64) -> Result<Probability> {
    check_finite(z)?;
    Ok(Probability(sf(z)))
}

/// `Φ⁻¹(p)` for `0 < p < 1`.
pub fn std_normal_quantile(p: f64) -> Result<ZScore> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "quantile requires 0 < p < 1, got {p}"
        )));
    }
    Ok(ZScore(quantile(p)))
}

/// Mills-ratio upper bound on the Gaussian tail, `e^{-z²/2} / (√(2π) z)`, for `z > 0`.
pub fn mills_sf_upper(z: f64) -> Result<f64> {
    check_finite(z)?;
    if z <= 0.0 {
        return Err(Error::domain(format!(
            "Mills bound requires z > 0, got {z}"
        )));
    }
    Ok(log_mills_sf_upper(z).exp())
}

pub(crate) fn log_mills_sf_upper(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI - z.ln()
}

/// Standard normal density.
pub fn pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn log_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

/// Unchecked `Φ(z)`.
pub fn cdf(z: f64) -> f64 {
    sf(-z)
}

/// Unchecked `Φ̂(z)`.
pub fn sf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// `ln Φ(z)`.
pub fn log_cdf(z: f64) -> f64 {
    log_sf(-z)
}

/// `ln Φ̂(z)`, accurate far into the upper tail where `Φ̂` underflows.
pub fn log_sf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 5.0 {
        return sf(z).ln();
    }
    let x = z * FRAC_1_SQRT_2;
    if x < 28.0 {
        // log of the msun tail representation erfc(x) = exp(-x²-0.5625+R/S)/x
        let (r, s) = tail_rational(x);
        let hi = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
        return -hi * hi - 0.5625 + (hi - x) * (hi + x) + r / s - x.ln() - std::f64::consts::LN_2;
    }
    let w = 1.0 / (z * z);
    let series = 1.0 - w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w * (1.0 - 9.0 * w))));
    -0.5 * z * z - z.ln() - LN_SQRT_2PI + series.ln()
}

/// Unchecked `Φ⁻¹(p)`; `p` must lie strictly inside `(0, 1)`.
pub fn quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        // exact for p >= 1/2
        return -lower_quantile(1.0 - p);
    }
    lower_quantile(p)
}

/// Solves `Φ(z) = p` for `p < 1/2` by safeguarded Newton on `ln Φ`.
fn lower_quantile(p: f64) -> f64 {
    let target = p.ln();
    let t = (-2.0 * target).sqrt();
    // rational starting point, |error| < 4.5e-4
    let mut z = -(t
        - (2.515517 + 0.802853 * t + 0.010328 * t * t)
            / (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t));

    let mut lo = z - 1.0;
    while log_cdf(lo) > target {
        lo -= 1.0;
    }
    let mut hi = (z + 1.0).min(0.0);
    while log_cdf(hi) < target {
        hi += 1.0;
    }

    for _ in 0..100 {
        let lc = log_cdf(z);
        let h = lc - target;
        if h == 0.0 {
            return z;
        }
        if h > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        // d/dz ln Φ(z) = φ(z)/Φ(z)
        let slope = (log_pdf(z) - lc).exp();
        let mut next = z - h / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - z).abs() <= 4.0 * f64::EPSILON * z.abs().max(1.0) {
            return next;
        }
        z = next;
    }
    z
}

/// `2/√π ∫_x^∞ e^{-t²} dt`.
pub fn erfc(x: f64) -> f64 {
    erfc_msun(x)
}

// ---------------------------------------------------------------------------
// Complementary error function.
//
// Ported from FreeBSD /usr/src/lib/msun/src/s_erf.c via the Go standard
// library (and the russell crate's Rust transcription).
//
// Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
// Developed at SunPro, a Sun Microsystems, Inc. business.
// Permission to use, copy, modify, and distribute this software is freely
// granted, provided that this notice is preserved.
// ---------------------------------------------------------------------------

const ERX: f64 = 8.450_629_115_104_675e-1;

const PP0: f64 = 1.283_791_670_955_125_6e-1;
const PP1: f64 = -3.250_421_072_470_015e-1;
const PP2: f64 = -2.848_174_957_559_851e-2;
const PP3: f64 = -5.770_270_296_489_442e-3;
const PP4: f64 = -2.376_301_665_665_016_3e-5;
const QQ1: f64 = 3.979_172_239_591_553_5e-1;
const QQ2: f64 = 6.502_224_998_876_73e-2;
const QQ3: f64 = 5.081_306_281_875_766e-3;
const QQ4: f64 = 1.324_947_380_043_216_4e-4;
const QQ5: f64 = -3.960_228_278_775_368e-6;

const PA0: f64 = -2.362_118_560_752_659_4e-3;
const PA1: f64 = 4.148_561_186_837_483_3e-1;
const PA2: f64 = -3.722_078_760_357_013e-1;
const PA3: f64 = 3.183_466_199_011_617_5e-1;
const PA4: f64 = -1.108_946_942_823_966_8e-1;
const PA5: f64 = 3.547_830_432_561_823_6e-2;
const PA6: f64 = -2.166_375_594_868_791e-3;
const QA1: f64 = 1.064_208_804_008_442_3e-1;
const QA2: f64 = 5.403_979_177_021_71e-1;
const QA3: f64 = 7.182_865_441_419_627e-2;
const QA4: f64 = 1.261_712_198_087_616_4e-1;
const QA5: f64 = 1.363_708_391_202_905e-2;
const QA6: f64 = 1.198_449_984_679_910_7e-2;

const RA0: f64 = -9.864_944_034_847_148e-3;
const RA1: f64 = -6.938_585_727_071_818e-1;
const RA2: f64 = -1.055_862_622_532_329_1e1;
const RA3: f64 = -6.237_533_245_032_600_6e1;
const RA4: f64 = -1.623_966_694_625_734_7e2;
const RA5: f64 = -1.846_050_929_067_110_4e2;
const RA6: f64 = -8.128_743_550_630_66e1;
const RA7: f64 = -9.814_329_344_169_145;
const SA1: f64 = 1.965_127_166_743_925_7e1;
const SA2: f64 = 1.376_577_541_435_190_4e2;
const SA3: f64 = 4.345_658_774_752_292_3e2;
const SA4: f64 = 6.453_872_717_332_679e2;
const SA5: f64 = 4.290_081_400_275_678_3e2;
const SA6: f64 = 1.086_350_055_417_794_4e2;
const SA7: f64 = 6.570_249_770_319_282;
const SA8: f64 = -6.042_441_521_485_81e-2;

const RB0: f64 = -9.864_942_924_700_1e-3;
const RB1: f64 = -7.992_832_376_805_23e-1;
const RB2: f64 = -1.775_795_491_775_475_2e1;
const RB3: f64 = -1.606_363_848_558_219_2e2;
const RB4: f64 = -6.375_664_433_683_896e2;
const RB5: f64 = -1.025_095_131_611_077_2e3;
const RB6: f64 = -4.835_191_916_086_514e2;
const SB1: f64 = 3.033_806_074_348_246e1;
const SB2: f64 = 3.257_925_129_965_739e2;
const SB3: f64 = 1.536_729_586_084_437e3;
const SB4: f64 = 3.199_858_219_508_595_5e3;
const SB5: f64 = 2.553_050_406_433_164_4e3;
const SB6: f64 = 4.745_285_412_069_553_7e2;
const SB7: f64 = -2.244_095_244_658_582e1;

const TINY: f64 = 1.3877787807814456755295395851135253906250000000000e-17;

/// Rational correction `R/S` of the tail form, valid for `1.25 <= x < 28`.
fn tail_rational(x: f64) -> (f64, f64) {
    let s = 1.0 / (x * x);
    if x < 1.0 / 0.35 {
        let r =
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
        let q = 1.0
            + s * (SA1
                + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
        (r, q)
    } else {
        let r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
        let q =
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
        (r, q)
    }
}

fn erfc_msun(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let negative = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < TINY {
            x
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if x < 0.25 {
                x + x * y
            } else {
                0.5 + (x * y + (x - 0.5))
            }
        };
        return if negative { 1.0 + temp } else { 1.0 - temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if negative {
            1.0 + ERX + p / q
        } else {
            1.0 - ERX - p / q
        };
    }
    if x < 28.0 {
        if negative && x > 6.0 {
            return 2.0;
        }
        let (r, s) = tail_rational(x);
        // split x so that -x² is formed without rounding error
        let hi = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
        let t = (-hi * hi - 0.5625).exp() * ((hi - x) * (hi + x) + r / s).exp();
        return if negative { 2.0 - t / x } else { t / x };
    }
    if negative {
        2.0
    } else {
        0.0
    }
}
