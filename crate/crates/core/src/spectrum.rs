//! Fine-spectrum classification of `R_a` on `c_0(s)` under the standing
//! hypothesis `n a_n -> chi > 0`, with `S = {a_n}` and `alpha = Re(1/lambda)`:
//!
//! * point spectrum `A_1 = {lambda in S : a_n s_n n^{alpha chi} -> 0}`,
//! * adjoint point spectrum `A_2 ∪ S` with
//!   `A_2 = {lambda not in S ∪ {0} : sum 1/(s_n n^{alpha chi}) < inf}`,
//! * residual spectrum `(A_2 ∪ S) \ A_1`,
//! * for decreasing `s`, everything outside the closed disk
//!   `|lambda - chi/2| <= chi/2` and off the closure of `S` is resolvent,
//!   and `0` is in the continuous spectrum.
//!
//! Also builds eigenvectors, adjoint eigenvectors and explicit resolvent
//! sections, and a dense pseudospectrum diagnostic.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticClass, LimitClass, SumVerdict};
use crate::error::{Error, Result};
use crate::numeric::{
    dyadic_probes, limit_zero_from_logs, snap_exponent, CompensatedSum, TriState,
};
use crate::operator::{FiniteSection, Method, SectionKind};
use crate::products::{alpha, log_factor};
use crate::sequences::{verify_weight, SequenceSpec};

/// Tolerances and scan depths for the spectral routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    /// Relative tolerance for snapping `lambda` onto a diagonal value `a_k`.
    pub snap_tol: f64,
    /// Relative tolerance for the disk boundary.
    pub boundary_tol: f64,
    /// How many diagonal entries are scanned for membership and distance.
    pub scan_limit: usize,
    /// Deepest index probed by numeric limit and series fallbacks.
    pub probe_limit: usize,
    /// Below this distance to the closure of `S` resolvent verification is not claimed.
    pub min_verify_distance: f64,
    /// Largest section handled by dense SVD.
    pub dense_cap: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            snap_tol: 1e-13,
            boundary_tol: 1e-12,
            scan_limit: 1 << 16,
            probe_limit: 1 << 20,
            min_verify_distance: 0.1,
            dense_cap: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskPosition {
    Interior,
    Boundary,
    Exterior,
}

impl DiskPosition {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiskPosition::Interior => "interior",
            DiskPosition::Boundary => "boundary",
            DiskPosition::Exterior => "exterior",
        }
    }
}

/// Position of `lambda` relative to the disk `|lambda - chi/2| < chi/2`.
///
/// Computed both geometrically and through `Re(1/lambda) - 1/chi`; any
/// disagreement, or either test within tolerance of zero, gives `Boundary`.
/// `lambda = 0` lies on the circle and is reported as `Boundary`.
pub fn disk_position(lambda: Complex64, chi: f64) -> DiskPosition {
    disk_position_with_tol(lambda, chi, SpectralConfig::default().boundary_tol)
}

pub fn disk_position_with_tol(lambda: Complex64, chi: f64, tol: f64) -> DiskPosition {
    if lambda == Complex64::new(0.0, 0.0) {
        return DiskPosition::Boundary;
    }
    let radius = chi / 2.0;
    let geo = (lambda - radius).norm() - radius;
    let geo_pos = if geo.abs() <= tol * radius {
        DiskPosition::Boundary
    } else if geo < 0.0 {
        DiskPosition::Interior
    } else {
        DiskPosition::Exterior
    };
    let al = lambda.re / lambda.norm_sqr() - 1.0 / chi;
    let alpha_pos = if al.abs() <= tol / chi {
        DiskPosition::Boundary
    } else if al > 0.0 {
        DiskPosition::Interior
    } else {
        DiskPosition::Exterior
    };
    if geo_pos == alpha_pos {
        geo_pos
    } else {
        DiskPosition::Boundary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum Nearest {
    Index(usize),
    /// The accumulation point 0 of `S`.
    AccumulationPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistToS {
    pub distance: f64,
    pub nearest: Nearest,
}

/// `dist(lambda, closure(S))` over `a_1..a_{n_max}` and the accumulation point 0.
pub fn dist_to_s(lambda: Complex64, a: &SequenceSpec, n_max: usize) -> Result<DistToS> {
    let monotone = a.known_nonincreasing();
    let mut best = DistToS {
        distance: lambda.norm(),
        nearest: Nearest::AccumulationPoint,
    };
    if monotone && lambda.re <= 0.0 {
        return Ok(best);
    }
    for k in 1..=a.max_index(n_max.max(1)) {
        let ak = a.eval(k)?;
        let d = (lambda - ak).norm();
        if d < best.distance || (d == best.distance && best.nearest == Nearest::AccumulationPoint) {
            best = DistToS {
                distance: d,
                nearest: Nearest::Index(k),
            };
        }
        // later entries are smaller still and only move away from lambda
        if monotone && ak <= lambda.re {
            break;
        }
    }
    Ok(best)
}

/// First `k <= scan_limit` with `a_k` equal to `lambda` up to the snap tolerance.
pub fn find_in_s(
    lambda: Complex64,
    a: &SequenceSpec,
    cfg: &SpectralConfig,
) -> Result<Option<usize>> {
    let mag = lambda.norm();
    if mag == 0.0 || lambda.re <= 0.0 || lambda.im.abs() > cfg.snap_tol * mag {
        return Ok(None);
    }
    let monotone = a.known_nonincreasing();
    for k in 1..=a.max_index(cfg.scan_limit) {
        let ak = a.eval(k)?;
        if (lambda - ak).norm() <= cfg.snap_tol * ak {
            return Ok(Some(k));
        }
        if monotone && ak < lambda.re * (1.0 - 2.0 * cfg.snap_tol) {
            break;
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTest {
    pub verdict: TriState,
    /// `m` with `lambda = a_m`.
    pub index: Option<usize>,
    pub alpha_chi: Option<f64>,
    pub method: Option<Method>,
    /// Decided by the `lambda > chi` shortcut.
    pub shortcut: bool,
    pub diagnostic: String,
}

/// Numeric `lim x_n = 0` test from `ln x_n` sampled at dyadic `n`.
pub(crate) fn numeric_limit_zero(
    ln_term: impl Fn(usize) -> Result<f64>,
    n_max: usize,
) -> Result<(TriState, String)> {
    let probes: Vec<usize> = dyadic_probes(8, n_max)
        .into_iter()
        .filter(|n| n.is_power_of_two())
        .collect();
    let logs = probes
        .iter()
        .map(|&n| ln_term(n))
        .collect::<Result<Vec<_>>>()?;
    let verdict = limit_zero_from_logs(&logs, 0.05);
    let last = logs.last().copied().unwrap_or(f64::NAN);
    Ok((
        verdict,
        format!(
            "numeric: ln term at n = {} is {last:.4}",
            probes.last().copied().unwrap_or(0)
        ),
    ))
}

/// Numeric `sum x_n < inf` test from dyadic block sums of `x_n = exp(ln_term(n))`.
fn numeric_series(
    ln_term: impl Fn(usize) -> Result<f64>,
    n_max: usize,
) -> Result<(TriState, String)> {
    let mut blocks = Vec::new();
    let mut acc = CompensatedSum::new();
    let mut edge = 2usize;
    for n in 1..=n_max {
        acc.add(ln_term(n)?.exp());
        if n + 1 == edge {
            blocks.push(acc.value());
            acc = CompensatedSum::new();
            edge *= 2;
        }
    }
    let ratios: Vec<f64> = blocks.windows(2).skip(3).map(|w| w[1] / w[0]).collect();
    let tail = &ratios[ratios.len().saturating_sub(3)..];
    let verdict = if tail.is_empty() {
        TriState::Inconclusive
    } else if tail.iter().all(|r| *r < 0.9) {
        TriState::Yes
    } else if tail.iter().all(|r| *r >= 1.0 - 1e-3 || !r.is_finite()) {
        TriState::No
    } else {
        TriState::Inconclusive
    };
    Ok((verdict, format!("numeric: dyadic block ratios {tail:?}")))
}

/// Precomputed context for repeated classification against fixed `a`, `s`, `chi`.
#[derive(Debug, Clone)]
pub struct SpectralContext {
    a: SequenceSpec,
    s: SequenceSpec,
    chi: f64,
    cfg: SpectralConfig,
    s_decreasing: bool,
}

impl SpectralContext {
    pub fn new(a: &SequenceSpec, s: &SequenceSpec, chi: f64, cfg: SpectralConfig) -> Result<Self> {
        if !(chi > 0.0 && chi.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "chi must be positive, got {chi}"
            )));
        }
        let flags = verify_weight(s, s.max_index(cfg.scan_limit.max(2)))?;
        if !flags.bounded {
            return Err(Error::InvalidInput("the weight s must be bounded".into()));
        }
        Ok(Self {
            a: a.clone(),
            s: s.clone(),
            chi,
            cfg,
            s_decreasing: flags.decreasing,
        })
    }

    pub fn config(&self) -> &SpectralConfig {
        &self.cfg
    }

    pub fn s_decreasing(&self) -> bool {
        self.s_decreasing
    }

    pub fn point_spectrum_test(&self, lambda: Complex64) -> Result<PointTest> {
        let Some(m) = find_in_s(lambda, &self.a, &self.cfg)? else {
            return Ok(PointTest {
                verdict: TriState::No,
                index: None,
                alpha_chi: None,
                method: None,
                shortcut: false,
                diagnostic: "lambda is not a diagonal value".into(),
            });
        };
        let lam = self.a.eval(m)?;
        let alpha_chi = snap_exponent(self.chi / lam);
        if lam > self.chi {
            return Ok(PointTest {
                verdict: TriState::Yes,
                index: Some(m),
                alpha_chi: Some(alpha_chi),
                method: Some(Method::Analytic),
                shortcut: true,
                diagnostic: "lambda > chi".into(),
            });
        }
        if let (Some(ca), Some(cs)) = (self.a.asym(), self.s.asym()) {
            if let Ok(class) = ca
                .mul(cs)
                .and_then(|c| c.mul(&AsymptoticClass::power_law(1.0, alpha_chi)))
            {
                let lim = class.limit_class();
                return Ok(PointTest {
                    verdict: TriState::from_bool(lim == LimitClass::Zero),
                    index: Some(m),
                    alpha_chi: Some(alpha_chi),
                    method: Some(Method::Analytic),
                    shortcut: false,
                    diagnostic: format!(
                        "a_n s_n n^(alpha chi) ~ n^{} (log n)^{}: {lim:?}",
                        class.power, class.log_power
                    ),
                });
            }
        }
        let n_max = self.a.max_index(self.s.max_index(self.cfg.probe_limit));
        let (verdict, diagnostic) = numeric_limit_zero(
            |n| Ok(self.a.ln_eval(n)? + self.s.ln_eval(n)? + alpha_chi * (n as f64).ln()),
            n_max,
        )?;
        Ok(PointTest {
            verdict,
            index: Some(m),
            alpha_chi: Some(alpha_chi),
            method: Some(Method::Numeric),
            shortcut: false,
            diagnostic,
        })
    }

    pub fn adjoint_point_test(&self, lambda: Complex64) -> Result<AdjointTest> {
        if lambda == Complex64::new(0.0, 0.0) {
            return Ok(AdjointTest::new(
                TriState::No,
                AdjointReason::Zero,
                None,
                "0 is not an adjoint eigenvalue",
            ));
        }
        if let Some(m) = find_in_s(lambda, &self.a, &self.cfg)? {
            return Ok(AdjointTest::new(
                TriState::Yes,
                AdjointReason::InS(m),
                None,
                "lambda in S",
            ));
        }
        if lambda.norm() <= self.cfg.snap_tol {
            return Err(Error::ClosureBoundaryUnsupported);
        }
        let alpha_chi = snap_exponent(alpha(lambda)? * self.chi);
        match disk_position_with_tol(lambda, self.chi, self.cfg.boundary_tol) {
            DiskPosition::Interior => {}
            pos => {
                return Ok(AdjointTest::new(
                    TriState::No,
                    AdjointReason::OutsideOpenDisk,
                    Some(alpha_chi),
                    format!("disk position {}", pos.as_str()),
                ))
            }
        }
        if let Some(cs) = self.s.asym() {
            if let Ok(term) = cs
                .reciprocal()
                .mul(&AsymptoticClass::power_law(1.0, -alpha_chi))
            {
                match term.partial_sum().verdict {
                    SumVerdict::Convergent => {
                        return Ok(AdjointTest::new(
                            TriState::Yes,
                            AdjointReason::SeriesConvergent,
                            Some(alpha_chi),
                            format!("1/(s_n n^(alpha chi)) ~ n^{}: convergent", term.power),
                        ))
                    }
                    SumVerdict::Divergent => {
                        return Ok(AdjointTest::new(
                            TriState::No,
                            AdjointReason::SeriesDivergent,
                            Some(alpha_chi),
                            format!("1/(s_n n^(alpha chi)) ~ n^{}: divergent", term.power),
                        ))
                    }
                    SumVerdict::UndecidedBoundary => {}
                }
            }
        }
        let n_max = self.s.max_index(self.cfg.probe_limit);
        let (verdict, diag) = numeric_series(
            |n| Ok(-self.s.ln_eval(n)? - alpha_chi * (n as f64).ln()),
            n_max,
        )?;
        let reason = match verdict {
            TriState::Yes => AdjointReason::SeriesConvergent,
            TriState::No => AdjointReason::SeriesDivergent,
            TriState::Inconclusive => AdjointReason::Undecided,
        };
        Ok(AdjointTest::new(verdict, reason, Some(alpha_chi), diag))
    }

    pub fn classify(&self, lambda: Complex64) -> Result<SpectralPoint> {
        let dist = dist_to_s(lambda, &self.a, self.cfg.scan_limit)?;
        if lambda == Complex64::new(0.0, 0.0) {
            return Ok(SpectralPoint {
                lambda,
                label: SpectralLabel::ContinuousCandidate,
                evidence: Evidence {
                    alpha: None,
                    alpha_chi: None,
                    disk_position: DiskPosition::Boundary,
                    origin: true,
                    in_s: false,
                    s_index: None,
                    dist_to_s: dist.distance,
                    nearest: dist.nearest,
                    a1: TriState::No,
                    a2: TriState::No,
                    limit_diag: None,
                    series_diag: Some("0 is not an adjoint eigenvalue".into()),
                    error: None,
                },
            });
        }
        let al = alpha(lambda)?;
        let alpha_chi = snap_exponent(al * self.chi);
        let disk = disk_position_with_tol(lambda, self.chi, self.cfg.boundary_tol);
        let point = self.point_spectrum_test(lambda)?;
        let mut evidence = Evidence {
            alpha: Some(al),
            alpha_chi: Some(alpha_chi),
            disk_position: disk,
            origin: false,
            in_s: point.index.is_some(),
            s_index: point.index,
            dist_to_s: dist.distance,
            nearest: dist.nearest,
            a1: TriState::No,
            a2: TriState::No,
            limit_diag: None,
            series_diag: None,
            error: None,
        };
        let label = if point.index.is_some() {
            evidence.a1 = point.verdict;
            evidence.limit_diag = Some(point.diagnostic);
            match point.verdict {
                TriState::Yes => SpectralLabel::Point,
                TriState::No => SpectralLabel::Residual,
                TriState::Inconclusive => SpectralLabel::BoundaryUnknown,
            }
        } else {
            match self.adjoint_point_test(lambda) {
                Err(e) => {
                    evidence.a2 = TriState::Inconclusive;
                    evidence.error = Some(e.code().to_string());
                    SpectralLabel::BoundaryUnknown
                }
                Ok(adj) => {
                    evidence.a2 = adj.verdict;
                    evidence.series_diag = Some(adj.diagnostic);
                    match (adj.verdict, disk) {
                        (TriState::Yes, _) => SpectralLabel::Residual,
                        (TriState::Inconclusive, _) => SpectralLabel::BoundaryUnknown,
                        (TriState::No, DiskPosition::Exterior) if self.s_decreasing => {
                            SpectralLabel::Resolvent
                        }
                        (TriState::No, DiskPosition::Exterior) => SpectralLabel::BoundaryUnknown,
                        (TriState::No, DiskPosition::Boundary) => SpectralLabel::BoundaryUnknown,
                        (TriState::No, DiskPosition::Interior) => {
                            SpectralLabel::ContinuousCandidate
                        }
                    }
                }
            }
        };
        Ok(SpectralPoint {
            lambda,
            label,
            evidence,
        })
    }
}

/// Tests `lambda in sigma_p(R_a, c_0(s))`.
pub fn point_spectrum_test(
    lambda: Complex64,
    a: &SequenceSpec,
    s: &SequenceSpec,
    chi: f64,
) -> Result<PointTest> {
    SpectralContext::new(a, s, chi, SpectralConfig::default())?.point_spectrum_test(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum AdjointReason {
    InS(usize),
    Zero,
    OutsideOpenDisk,
    SeriesConvergent,
    SeriesDivergent,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointTest {
    pub verdict: TriState,
    pub reason: AdjointReason,
    pub alpha_chi: Option<f64>,
    pub diagnostic: String,
}

impl AdjointTest {
    fn new(
        verdict: TriState,
        reason: AdjointReason,
        alpha_chi: Option<f64>,
        diagnostic: impl Into<String>,
    ) -> Self {
        Self {
            verdict,
            reason,
            alpha_chi,
            diagnostic: diagnostic.into(),
        }
    }
}

/// Tests `lambda in sigma_p(R_a^*, c_0(s)^*)`.
pub fn adjoint_point_test(
    lambda: Complex64,
    a: &SequenceSpec,
    s: &SequenceSpec,
    chi: f64,
) -> Result<AdjointTest> {
    SpectralContext::new(a, s, chi, SpectralConfig::default())?.adjoint_point_test(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralLabel {
    Resolvent,
    Point,
    Residual,
    ContinuousCandidate,
    BoundaryUnknown,
}

impl SpectralLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectralLabel::Resolvent => "resolvent",
            SpectralLabel::Point => "point",
            SpectralLabel::Residual => "residual",
            SpectralLabel::ContinuousCandidate => "continuous_candidate",
            SpectralLabel::BoundaryUnknown => "boundary_unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub alpha: Option<f64>,
    pub alpha_chi: Option<f64>,
    pub disk_position: DiskPosition,
    /// `lambda = 0`.
    pub origin: bool,
    pub in_s: bool,
    pub s_index: Option<usize>,
    pub dist_to_s: f64,
    pub nearest: Nearest,
    pub a1: TriState,
    pub a2: TriState,
    pub limit_diag: Option<String>,
    pub series_diag: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub label: SpectralLabel,
    pub evidence: Evidence,
}

pub fn classify_point(
    lambda: Complex64,
    a: &SequenceSpec,
    s: &SequenceSpec,
    chi: f64,
) -> Result<SpectralPoint> {
    SpectralContext::new(a, s, chi, SpectralConfig::default())?.classify(lambda)
}

/// Solution of `R_a x = lambda x` for `lambda = a_m`: `x_k = 0` for `k < m`,
/// `x_m = 1`, and `x_n = (a_n/a_m) / prod_{j=m+1}^{n} (1 - a_j/lambda)`.
pub fn eigenvector(lambda: Complex64, a: &SequenceSpec, n: usize) -> Result<Vec<Complex64>> {
    let cfg = SpectralConfig {
        scan_limit: a.max_index(n),
        ..SpectralConfig::default()
    };
    let m = find_in_s(lambda, a, &cfg)?
        .filter(|m| *m <= n)
        .ok_or(Error::NotAnEigencandidate(n))?;
    let lam = Complex64::new(a.eval(m)?, 0.0);
    let inv = lam.inv();
    let ln_am = a.ln_eval(m)?;
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[m - 1] = Complex64::new(1.0, 0.0);
    let mut mag = CompensatedSum::new();
    let mut arg = CompensatedSum::new();
    for j in m + 1..=n {
        let aj = a.eval(j)?;
        let (lm, th, _) = log_factor(aj, lam, inv).ok_or(Error::RepeatedDiagonalUnsupported {
            first: m,
            repeat: j,
        })?;
        mag.add(lm);
        arg.add(th);
        x[j - 1] = Complex64::from_polar((a.ln_eval(j)? - ln_am - mag.value()).exp(), -arg.value());
    }
    Ok(x)
}

/// Solution of `R_a^* x = lambda x` with `x_1 = 1`:
/// `x_n = prod_{j=1}^{n-1} (1 - a_j/lambda)`, exactly zero past `l` when `lambda = a_l`.
pub fn adjoint_eigvector(lambda: Complex64, a: &SequenceSpec, n: usize) -> Result<Vec<Complex64>> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroNotAdjointEigenvalue);
    }
    let inv = lambda.inv();
    let mut x = Vec::with_capacity(n);
    let mut mag = CompensatedSum::new();
    let mut arg = CompensatedSum::new();
    let mut zero = false;
    for k in 1..=n {
        if k > 1 && !zero {
            match log_factor(a.eval(k - 1)?, lambda, inv) {
                None => zero = true,
                Some((lm, th, _)) => {
                    mag.add(lm);
                    arg.add(th);
                }
            }
        }
        x.push(if zero {
            Complex64::new(0.0, 0.0)
        } else if k == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(mag.value().exp(), arg.value())
        });
    }
    Ok(x)
}

/// Explicit `N x N` section of `(R_a - lambda I)^{-1}`:
/// `b_nn = 1/(a_n - lambda)`, `b_nk = -a_n / (lambda^2 prod_{j=k}^{n} (1 - a_j/lambda))` for `k < n`.
pub fn resolvent_section(lambda: Complex64, a: &SequenceSpec, n: usize) -> Result<FiniteSection> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::ResolventUndefinedAtZero);
    }
    if n == 0 {
        return Err(Error::InvalidInput(
            "section dimension must be at least 1".into(),
        ));
    }
    let inv = lambda.inv();
    let diag = (1..=n).map(|k| a.eval(k)).collect::<Result<Vec<_>>>()?;
    // prefix[j] = sum_{i<=j} ln(1 - a_i/lambda), prefix[0] = 0
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(Complex64::new(0.0, 0.0));
    let mut mag = CompensatedSum::new();
    let mut arg = CompensatedSum::new();
    for (k, &ak) in diag.iter().enumerate() {
        let (lm, th, _) = log_factor(ak, lambda, inv).ok_or(Error::LambdaInS(k + 1))?;
        mag.add(lm);
        arg.add(th);
        prefix.push(Complex64::new(mag.value(), arg.value()));
    }
    let inv_sq = inv * inv;
    FiniteSection::from_fn(n, SectionKind::Resolvent, |i, k| {
        Ok(if i == k {
            (Complex64::new(diag[i], 0.0) - lambda).inv()
        } else {
            -inv_sq * diag[i] * (prefix[k] - prefix[i + 1]).exp()
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventCheck {
    pub n: usize,
    /// `max |((R_N - lambda I) B_N - I)_{ij}|`.
    pub left_residual: f64,
    /// `max |(B_N (R_N - lambda I) - I)_{ij}|`.
    pub right_residual: f64,
    pub max_residual: f64,
    pub tol: f64,
    pub passed: bool,
    pub d_lambda: f64,
    /// False when `lambda` is too close to the closure of `S` for the check to be meaningful.
    pub verification_claimed: bool,
}

pub fn verify_resolvent(
    lambda: Complex64,
    a: &SequenceSpec,
    n: usize,
    tol: f64,
) -> Result<ResolventCheck> {
    let cfg = SpectralConfig::default();
    let b = resolvent_section(lambda, a, n)?.to_dense();
    let shifted = crate::operator::build_section(a, n)?
        .shifted(lambda)
        .to_dense();
    let identity = nalgebra::DMatrix::<Complex64>::identity(n, n);
    let max_abs = |m: nalgebra::DMatrix<Complex64>| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let left = max_abs(&shifted * &b - &identity);
    let right = max_abs(&b * &shifted - &identity);
    let d = dist_to_s(lambda, a, cfg.scan_limit)?.distance;
    let max_residual = left.max(right);
    Ok(ResolventCheck {
        n,
        left_residual: left,
        right_residual: right,
        max_residual,
        tol,
        passed: max_residual <= tol,
        d_lambda: d,
        verification_claimed: d >= cfg.min_verify_distance,
    })
}

/// Rectangular grid of complex nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    /// Nodes per axis `(re, im)`.
    pub resolution: (usize, usize),
}

impl GridSpec {
    /// Nodes in row-major order: imaginary part outer, real part inner, both ascending.
    pub fn nodes(&self) -> Result<Vec<Complex64>> {
        let (nx, ny) = self.resolution;
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes per axis, got {nx}x{ny}"
            )));
        }
        let (rl, rh) = self.re_range;
        let (il, ih) = self.im_range;
        if !(rl < rh && il < ih) {
            return Err(Error::InvalidGrid("ranges must be increasing".into()));
        }
        let at = |lo: f64, hi: f64, j: usize, n: usize| {
            let v = lo + (hi - lo) * j as f64 / (n - 1) as f64;
            if v.abs() < 1e-14 * (hi - lo) {
                0.0
            } else {
                v
            }
        };
        Ok((0..ny)
            .flat_map(|iy| {
                (0..nx).map(move |ix| Complex64::new(at(rl, rh, ix, nx), at(il, ih, iy, ny)))
            })
            .collect())
    }
}

/// Classify every node of `grid`. Nodes are evaluated in parallel on the
/// current rayon pool; output order is row-major regardless.
pub fn spectrum_grid(
    a: &SequenceSpec,
    s: &SequenceSpec,
    chi: f64,
    grid: &GridSpec,
    cfg: SpectralConfig,
) -> Result<Vec<SpectralPoint>> {
    let ctx = SpectralContext::new(a, s, chi, cfg)?;
    let nodes = grid.nodes()?;
    Ok(nodes
        .into_par_iter()
        .map(|lambda| {
            ctx.classify(lambda).unwrap_or_else(|e| SpectralPoint {
                lambda,
                label: SpectralLabel::BoundaryUnknown,
                evidence: Evidence {
                    alpha: alpha(lambda).ok(),
                    alpha_chi: None,
                    disk_position: disk_position(lambda, chi),
                    origin: lambda == Complex64::new(0.0, 0.0),
                    in_s: false,
                    s_index: None,
                    dist_to_s: f64::NAN,
                    nearest: Nearest::AccumulationPoint,
                    a1: TriState::Inconclusive,
                    a2: TriState::Inconclusive,
                    limit_diag: None,
                    series_diag: None,
                    error: Some(e.code().to_string()),
                },
            })
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoNode {
    pub lambda: Complex64,
    pub sigma_min: f64,
    /// `sigma_min < eps` for each requested epsilon.
    pub within: Vec<bool>,
}

/// `sigma_min(A_N - lambda I)` at every node, via dense SVD.
pub fn pseudospectrum_grid(
    sec: &FiniteSection,
    grid: &GridSpec,
    epsilons: &[f64],
    dense_cap: usize,
) -> Result<Vec<PseudoNode>> {
    if sec.dim() > dense_cap {
        return Err(Error::SectionTooLarge {
            n: sec.dim(),
            cap: dense_cap,
        });
    }
    let nodes = grid.nodes()?;
    Ok(nodes
        .into_par_iter()
        .map(|lambda| {
            let sigma_min = smallest_singular_value(sec, lambda);
            PseudoNode {
                lambda,
                sigma_min,
                within: epsilons.iter().map(|e| sigma_min < *e).collect(),
            }
        })
        .collect())
}

/// `sigma_min(A_N - lambda I)`.
pub fn smallest_singular_value(sec: &FiniteSection, lambda: Complex64) -> f64 {
    let m = sec.shifted(lambda).to_dense();
    m.singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
