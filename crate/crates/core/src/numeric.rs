//! Small numeric helpers shared across modules.

use serde::{Deserialize, Serialize};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Three-valued outcome used wherever a limit can only be suggested numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriState {
    Yes,
    No,
    Inconclusive,
}

impl TriState {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TriState::Yes
        } else {
            TriState::No
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TriState::Yes => "yes",
            TriState::No => "no",
            TriState::Inconclusive => "inconclusive",
        }
    }
}

/// Powers of two in `[lo, hi]`, with `lo` and `hi` themselves included.
pub fn dyadic_probes(lo: usize, hi: usize) -> Vec<usize> {
    let lo = lo.max(1);
    let mut out = vec![lo];
    let mut p = lo.next_power_of_two();
    if p == lo {
        p *= 2;
    }
    while p < hi {
        out.push(p);
        p = match p.checked_mul(2) {
            Some(v) => v,
            None => break,
        };
    }
    if hi > lo {
        out.push(hi);
    }
    out
}

/// Snap exponents that are within `1e-9` of a six-decimal grid point, e.g.
/// `chi / a_m` computed as `3.0000000000000004`.
pub fn snap_exponent(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Classify a positive sampled sequence by its behaviour across the last
/// few probes: settling to a nonzero value, decaying, or growing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Decaying,
    Stable,
    Growing,
    Ambiguous,
}

/// Trend of positive values sampled at geometrically spaced indices.
///
/// Uses the last three consecutive ratios: all below `1 - tol` means decay,
/// all above `1 + tol` means growth, all within `tol` of 1 means stable.
pub fn sampled_trend(values: &[f64], tol: f64) -> Trend {
    let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.len() < 2 {
        return Trend::Ambiguous;
    }
    if v.last().copied().unwrap_or(0.0) == 0.0 {
        return Trend::Decaying;
    }
    let ratios: Vec<f64> = v.windows(2).map(|w| w[1] / w[0]).collect();
    let tail = &ratios[ratios.len().saturating_sub(3)..];
    if tail.iter().all(|r| *r < 1.0 - tol) {
        Trend::Decaying
    } else if tail.iter().all(|r| *r > 1.0 + tol) {
        Trend::Growing
    } else if tail.iter().all(|r| (r - 1.0).abs() <= tol) {
        Trend::Stable
    } else {
        Trend::Ambiguous
    }
}

/// Decide `x_n -> 0` from `ln x_n` sampled at dyadic indices.
///
/// The last three log-steps all below `-tol` give `Yes`, all above `tol`
/// give `No`, and small steps give `No` unless they all point downwards,
/// in which case slow (logarithmic) decay cannot be ruled out.
pub fn limit_zero_from_logs(logs: &[f64], tol: f64) -> TriState {
    if logs.last() == Some(&f64::NEG_INFINITY) {
        return TriState::Yes;
    }
    if logs.len() < 2 || logs.iter().any(|l| l.is_nan()) {
        return TriState::Inconclusive;
    }
    if logs.last() == Some(&f64::INFINITY) {
        return TriState::No;
    }
    let steps: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &steps[steps.len().saturating_sub(3)..];
    if tail.iter().all(|d| *d < -tol) {
        TriState::Yes
    } else if tail.iter().all(|d| *d > tol) {
        TriState::No
    } else if tail.iter().all(|d| d.abs() <= tol) {
        if tail.iter().all(|d| *d < 0.0) {
            TriState::Inconclusive
        } else {
            TriState::No
        }
    } else {
        TriState::Inconclusive
    }
}
