//! Log-space evaluation of `prod_{k=m+1}^{n} (1 - a_k / lambda)` and the
//! numeric check that `|prod| * n^{alpha chi}` stays in a bounded band, with
//! `alpha = Re(1/lambda)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{dyadic_probes, ls_slope, CompensatedSum};
use crate::sequences::SequenceSpec;

/// `Re(1/lambda)`.
pub fn alpha(lambda: Complex64) -> Result<f64> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::AlphaUndefinedAtZero);
    }
    Ok(lambda.re / lambda.norm_sqr())
}

/// `1/lambda`, computed once per product.
fn inverse(lambda: Complex64) -> Complex64 {
    lambda.conj() / lambda.norm_sqr()
}

/// Relative distance below which a factor is flagged as nearly singular.
pub const NEAR_SINGULAR_TOL: f64 = 1e-12;

/// One factor `1 - a/lambda` as `(ln|z|, arg z, |lambda - a|/|lambda|)`, or
/// `None` when `lambda == a` exactly.
#[inline]
pub(crate) fn log_factor(
    a_k: f64,
    lambda: Complex64,
    inv_lambda: Complex64,
) -> Option<(f64, f64, f64)> {
    if lambda.im == 0.0 && lambda.re == a_k {
        return None;
    }
    let w = inv_lambda * a_k;
    let z = Complex64::new(1.0, 0.0) - w;
    // ln|1 - w| = 0.5 ln(1 - 2 Re w + |w|^2), accurate when w is small
    let ln_mag = 0.5 * (w.norm_sqr() - 2.0 * w.re).ln_1p();
    Some((
        ln_mag,
        z.im.atan2(z.re),
        (lambda - a_k).norm() / lambda.norm(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogProduct {
    /// `ln |prod|`; `-inf` when `exact_zero`.
    pub log_magnitude: f64,
    /// Sum of the principal arguments of the factors (not reduced mod 2 pi).
    pub argument: f64,
    pub m: usize,
    pub n: usize,
    pub exact_zero: bool,
    pub near_singular: bool,
}

impl LogProduct {
    pub fn value(&self) -> Complex64 {
        if self.exact_zero {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.log_magnitude.exp(), self.argument)
        }
    }
}

/// `prod_{k=m+1}^{n} (1 - a_k / lambda)` in log space.
pub fn log_product(a: &SequenceSpec, lambda: Complex64, m: usize, n: usize) -> Result<LogProduct> {
    if m >= n {
        return Err(Error::InvalidInput(format!(
            "product range needs m < n, got m = {m}, n = {n}"
        )));
    }
    let inv = inverse(lambda);
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::AlphaUndefinedAtZero);
    }
    let mut mag = CompensatedSum::new();
    let mut arg = CompensatedSum::new();
    let mut exact_zero = false;
    let mut near_singular = false;
    for k in m + 1..=n {
        match log_factor(a.eval(k)?, lambda, inv) {
            None => exact_zero = true,
            Some((lm, th, abs)) => {
                if abs < NEAR_SINGULAR_TOL {
                    near_singular = true;
                }
                mag.add(lm);
                arg.add(th);
            }
        }
    }
    Ok(LogProduct {
        log_magnitude: if exact_zero {
            f64::NEG_INFINITY
        } else {
            mag.value()
        },
        argument: arg.value(),
        m,
        n,
        exact_zero,
        near_singular,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandVerdict {
    BoundedBand,
    Drifting,
    Degenerate,
}

/// Thresholds for [`ratio_band`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandConfig {
    /// Largest `|slope|` of `ln(P_n n^{alpha chi})` against `ln n` still called bounded.
    pub slope_tol: f64,
    /// Largest `max/min` ratio over the probes still called bounded.
    pub band_ratio: f64,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self {
            slope_tol: 0.02,
            band_ratio: 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    /// `(n, P_n n^{exponent})` at the dyadic probes.
    pub ratios: Vec<(usize, f64)>,
    pub band: (f64, f64),
    pub log_log_slope: f64,
    pub exponent: f64,
    pub verdict: BandVerdict,
}

/// Check `prod_{k<=n} |1 - a_k/lambda| ~ n^{-alpha chi}` over dyadic `n` in `n_range`.
pub fn ratio_band(
    a: &SequenceSpec,
    lambda: Complex64,
    chi: f64,
    n_range: (usize, usize),
) -> Result<BandReport> {
    if chi.is_nan() || chi <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "chi must be positive, got {chi}"
        )));
    }
    let exponent = alpha(lambda)? * chi;
    ratio_band_with_exponent(a, lambda, exponent, n_range, &BandConfig::default())
}

/// [`ratio_band`] with an explicit exponent, e.g. to confirm that a wrong
/// exponent shows up as drift.
pub fn ratio_band_with_exponent(
    a: &SequenceSpec,
    lambda: Complex64,
    exponent: f64,
    n_range: (usize, usize),
    cfg: &BandConfig,
) -> Result<BandReport> {
    let (lo, hi) = n_range;
    if lo < 1 || hi < lo {
        return Err(Error::InvalidInput(format!("invalid range [{lo}, {hi}]")));
    }
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::AlphaUndefinedAtZero);
    }
    let inv = inverse(lambda);
    let probes = dyadic_probes(lo, hi);
    let mut next = 0;
    let mut acc = CompensatedSum::new();
    let mut ln_ratios = Vec::with_capacity(probes.len());
    for k in 1..=hi {
        match log_factor(a.eval(k)?, lambda, inv) {
            None => return Err(Error::LambdaInS(k)),
            Some((lm, _, _)) => acc.add(lm),
        }
        if next < probes.len() && probes[next] == k {
            ln_ratios.push(acc.value() + exponent * (k as f64).ln());
            next += 1;
        }
    }
    let ln_n: Vec<f64> = probes.iter().map(|&n| (n as f64).ln()).collect();
    let ratios: Vec<(usize, f64)> = probes
        .iter()
        .zip(&ln_ratios)
        .map(|(&n, l)| (n, l.exp()))
        .collect();
    let lmin = ln_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let lmax = ln_ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slope = ls_slope(&ln_n, &ln_ratios);
    let verdict =
        if probes.len() < 3 || !slope.is_finite() || !lmin.is_finite() || !lmax.is_finite() {
            BandVerdict::Degenerate
        } else if slope.abs() < cfg.slope_tol && (lmax - lmin) < cfg.band_ratio.ln() {
            BandVerdict::BoundedBand
        } else {
            BandVerdict::Drifting
        };
    Ok(BandReport {
        ratios,
        band: (lmin.exp(), lmax.exp()),
        log_log_slope: slope,
        exponent,
        verdict,
    })
}
