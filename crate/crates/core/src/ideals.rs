//! s-number machinery: the s-type class `chi_{c_0(r)}^{(s)}`, the quasi-norm
//! `Q^(s)(phi) = sup_i |a_i sum_{j<=i} s_j(phi)| r_i`, the preconditions of
//! the ideal results, and trial checks of the quasi-norm axioms.
//!
//! s-numbers are realised as singular values of finite sections. A sequence
//! without an asymptotic class is read as finitely supported, so its partial
//! sums are constant past the last stored value.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticClass, LimitClass};
use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, TriState};
use crate::operator::{conjugate_section, FiniteSection, Method};
use crate::sequences::SequenceSpec;
use crate::spectrum::numeric_limit_zero;

/// Deepest index used by numeric limit probes and sup scans.
pub const PROBE_LIMIT: usize = 1 << 20;
/// Tolerance on `sup a_i r_i = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SNumberSource {
    SvdOfSection,
    Synthetic,
    User,
}

/// Non-increasing, non-negative s-numbers `s_1 >= s_2 >= ... >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SNumberSequence {
    values: Vec<f64>,
    source: SNumberSource,
    asym: Option<AsymptoticClass>,
}

impl SNumberSequence {
    pub fn new(
        values: Vec<f64>,
        source: SNumberSource,
        asym: Option<AsymptoticClass>,
    ) -> Result<Self> {
        for (j, v) in values.iter().enumerate() {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "s-number s_{} = {v} is not a non-negative real",
                    j + 1
                )));
            }
            if j > 0 && *v > values[j - 1] {
                return Err(Error::InvalidInput(format!(
                    "s-numbers increase at index {}",
                    j + 1
                )));
            }
        }
        Ok(Self {
            values,
            source,
            asym,
        })
    }

    pub fn synthetic(values: Vec<f64>, asym: Option<AsymptoticClass>) -> Result<Self> {
        Self::new(values, SNumberSource::Synthetic, asym)
    }

    pub fn user(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SNumberSource::User, None)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> SNumberSource {
        self.source
    }

    pub fn asym(&self) -> Option<&AsymptoticClass> {
        self.asym.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `c * s` for `c >= 0`; the class constant is scaled along.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "scale must be non-negative, got {c}"
            )));
        }
        let asym = match (self.asym, c > 0.0) {
            (Some(k), true) => Some(AsymptoticClass {
                constant: k.constant * c,
                ..k
            }),
            _ => None,
        };
        Ok(Self {
            values: self.values.iter().map(|v| v * c).collect(),
            source: self.source,
            asym,
        })
    }
}

fn sorted_singular_values(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Singular values of `diag(s) sec diag(1/r)`, largest first.
pub fn snumbers_from_section(
    sec: &FiniteSection,
    r: &SequenceSpec,
    s: &SequenceSpec,
    dense_cap: usize,
) -> Result<SNumberSequence> {
    if sec.dim() > dense_cap {
        return Err(Error::SectionTooLarge {
            n: sec.dim(),
            cap: dense_cap,
        });
    }
    let conj = conjugate_section(sec, r, s)?;
    SNumberSequence::new(
        sorted_singular_values(conj.to_dense()),
        SNumberSource::SvdOfSection,
        None,
    )
}

/// `|a_i x| r_i`.
fn weighted(a: &SequenceSpec, r: &SequenceSpec, i: usize, x: f64) -> Result<f64> {
    r.mul_term(i, a.mul_term(i, x)?.abs())
}

fn ln_ar(a: &SequenceSpec, r: &SequenceSpec, i: usize) -> Result<f64> {
    Ok(a.ln_eval(i)? + r.ln_eval(i)?)
}

fn class_ar(a: &SequenceSpec, r: &SequenceSpec) -> Option<AsymptoticClass> {
    a.asym()?.mul(r.asym()?).ok()
}

/// Outcome of a tri-state membership decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub verdict: TriState,
    pub method: Method,
    pub diagnostic: String,
}

impl Membership {
    fn analytic(verdict: TriState, diagnostic: impl Into<String>) -> Self {
        Self {
            verdict,
            method: Method::Analytic,
            diagnostic: diagnostic.into(),
        }
    }
}

/// `lim_i T a_i r_i = 0` for a constant `T >= 0`.
fn constant_times_ar(total: f64, a: &SequenceSpec, r: &SequenceSpec) -> Result<Membership> {
    if total == 0.0 {
        return Ok(Membership::analytic(TriState::Yes, "partial sums vanish"));
    }
    if let Some(k) = class_ar(a, r) {
        let lim = k.limit_class();
        return Ok(Membership::analytic(
            TriState::from_bool(lim == LimitClass::Zero),
            format!("a_i r_i -> {lim:?}"),
        ));
    }
    let n_max = a.max_index(r.max_index(PROBE_LIMIT));
    let (verdict, diagnostic) = numeric_limit_zero(|i| ln_ar(a, r, i), n_max)?;
    Ok(Membership {
        verdict,
        method: Method::Numeric,
        diagnostic,
    })
}

/// Whether `lim_i a_i (sum_{j<=i} s_j) r_i = 0`.
pub fn stype_membership(
    snum: &SNumberSequence,
    a: &SequenceSpec,
    r: &SequenceSpec,
) -> Result<Membership> {
    let Some(ks) = snum.asym() else {
        let total: f64 = snum
            .values
            .iter()
            .copied()
            .fold(CompensatedSum::new(), |mut acc, v| {
                acc.add(v);
                acc
            })
            .value();
        return constant_times_ar(total, a, r);
    };
    if let (Some(kar), Some(ps)) = (class_ar(a, r), ks.partial_sum_growth()) {
        if let Ok(k) = kar.mul(&ps) {
            let lim = k.limit_class();
            return Ok(Membership::analytic(
                TriState::from_bool(lim == LimitClass::Zero),
                format!(
                    "a_i r_i sum s_j ~ n^{} (log n)^{}: {lim:?}",
                    k.power, k.log_power
                ),
            ));
        }
    }
    // numeric: stored values followed by the class tail
    let n_max = a.max_index(r.max_index(PROBE_LIMIT));
    let mut sums = Vec::with_capacity(n_max);
    let mut acc = CompensatedSum::new();
    for j in 1..=n_max {
        acc.add(
            snum.values
                .get(j - 1)
                .copied()
                .unwrap_or_else(|| ks.value(j)),
        );
        sums.push(acc.value());
    }
    let (verdict, diagnostic) =
        numeric_limit_zero(|i| Ok(ln_ar(a, r, i)? + sums[i - 1].ln()), n_max)?;
    Ok(Membership {
        verdict,
        method: Method::Numeric,
        diagnostic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailStatus {
    /// Finitely supported; a scan past the prefix never exceeds the value.
    Negligible,
    /// The supremum may be attained beyond the prefix.
    DominantPossible,
    /// The composed class tends to zero and the prefix is decreasing past the argmax.
    AnalyticZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNormResult {
    pub value: f64,
    /// 1-based index of the first maximiser.
    pub argmax_index: usize,
    pub truncation_n: usize,
    pub tail_status: TailStatus,
}

/// `max_{i<=N} |a_i sum_{j<=i} s_j| r_i`, a lower bound for `Q^(s)`.
pub fn quasi_norm(
    snum: &SNumberSequence,
    a: &SequenceSpec,
    r: &SequenceSpec,
) -> Result<QuasiNormResult> {
    if snum.is_empty() {
        return Err(Error::InvalidInput("empty s-number sequence".into()));
    }
    let n = snum.len();
    let mut acc = CompensatedSum::new();
    let mut terms = Vec::with_capacity(n);
    for (j, v) in snum.values.iter().enumerate() {
        acc.add(*v);
        terms.push(weighted(a, r, j + 1, acc.value())?);
    }
    let (mut argmax, mut value) = (0, terms[0]);
    for (i, t) in terms.iter().enumerate() {
        if *t > value {
            argmax = i;
            value = *t;
        }
    }
    let decreasing_after = terms[argmax..].windows(2).all(|w| w[1] <= w[0]);
    let tail_status = match snum.asym() {
        Some(ks) => {
            let zero = class_ar(a, r)
                .zip(ks.partial_sum_growth())
                .and_then(|(kar, ps)| kar.mul(&ps).ok())
                .is_some_and(|k| k.limit_class() == LimitClass::Zero);
            if zero && decreasing_after {
                TailStatus::AnalyticZero
            } else {
                TailStatus::DominantPossible
            }
        }
        None => {
            let total = acc.value();
            let bounded = class_ar(a, r).is_none_or(|k| k.limit_class() != LimitClass::Infinite);
            let limit = a.max_index(r.max_index(n + (1 << 16)));
            let mut ok = bounded;
            let mut i = n + 1;
            while ok && i <= limit {
                ok = weighted(a, r, i, total)? <= value;
                i += 1;
            }
            if ok {
                TailStatus::Negligible
            } else {
                TailStatus::DominantPossible
            }
        }
    };
    Ok(QuasiNormResult {
        value,
        argmax_index: argmax + 1,
        truncation_n: n,
        tail_status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealFlags {
    /// `lim a_n r_n = 0`.
    pub ideal_ok: TriState,
    /// `lim n a_n r_n = 0`.
    pub closed_ok: TriState,
    /// `sup_i a_i r_i = 1`.
    pub qnorm_normalized: TriState,
    pub sampled_sup: f64,
    pub sampled_argsup: usize,
}

pub fn ideal_preconditions(a: &SequenceSpec, r: &SequenceSpec) -> Result<IdealFlags> {
    let ideal_ok = constant_times_ar(1.0, a, r)?.verdict;
    let closed_ok =
        match class_ar(a, r).and_then(|k| k.mul(&AsymptoticClass::power_law(1.0, 1.0)).ok()) {
            Some(k) => TriState::from_bool(k.limit_class() == LimitClass::Zero),
            None => {
                let n_max = a.max_index(r.max_index(PROBE_LIMIT));
                numeric_limit_zero(|i| Ok(ln_ar(a, r, i)? + (i as f64).ln()), n_max)?.0
            }
        };
    let limit = a.max_index(r.max_index(1 << 16));
    let (mut sup, mut arg) = (f64::NEG_INFINITY, 0);
    for i in 1..=limit {
        let v = weighted(a, r, i, 1.0)?;
        if v > sup {
            sup = v;
            arg = i;
        }
    }
    let lim = class_ar(a, r).map(|k| (k.limit_class(), k.constant));
    let qnorm_normalized = match lim {
        Some((LimitClass::Infinite, _)) => TriState::No,
        _ if sup > 1.0 + NORMALIZATION_TOL => TriState::No,
        Some((LimitClass::FiniteNonzero, c)) if c > 1.0 + NORMALIZATION_TOL => TriState::No,
        _ if (sup - 1.0).abs() <= NORMALIZATION_TOL => TriState::Yes,
        Some((LimitClass::Zero, _)) => TriState::No,
        Some((LimitClass::FiniteNonzero, c)) if (c - 1.0).abs() <= NORMALIZATION_TOL => {
            TriState::Inconclusive
        }
        Some((LimitClass::FiniteNonzero, _)) => TriState::No,
        _ if a.table_len().is_some() || r.table_len().is_some() => TriState::No,
        _ => TriState::Inconclusive,
    };
    Ok(IdealFlags {
        ideal_ok,
        closed_ok,
        qnorm_normalized,
        sampled_sup: sup,
        sampled_argsup: arg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomConfig {
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    /// Absolute slack added to every inequality.
    pub slack: f64,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            dim: 8,
            seed: 0,
            slack: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violations {
    pub quasi_triangle: usize,
    pub lower_bound: usize,
    pub lipschitz: usize,
    pub composition: usize,
    pub rank: usize,
    pub additive: usize,
    pub multiplicative: usize,
}

impl Violations {
    pub fn total(&self) -> usize {
        self.quasi_triangle
            + self.lower_bound
            + self.lipschitz
            + self.composition
            + self.rank
            + self.additive
            + self.multiplicative
    }

    fn merge(self, o: Self) -> Self {
        Self {
            quasi_triangle: self.quasi_triangle + o.quasi_triangle,
            lower_bound: self.lower_bound + o.lower_bound,
            lipschitz: self.lipschitz + o.lipschitz,
            composition: self.composition + o.composition,
            rank: self.rank + o.rank,
            additive: self.additive + o.additive,
            multiplicative: self.multiplicative + o.multiplicative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    pub violations: Violations,
    pub qnorm_normalized: TriState,
    pub warnings: Vec<String>,
}

fn real_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..=1.0))
}

fn q_of(sv: &[f64], a: &SequenceSpec, r: &SequenceSpec) -> Result<f64> {
    Ok(quasi_norm(
        &SNumberSequence::new(sv.to_vec(), SNumberSource::SvdOfSection, None)?,
        a,
        r,
    )?
    .value)
}

fn one_trial(
    trial: usize,
    cfg: &AxiomConfig,
    a: &SequenceSpec,
    r: &SequenceSpec,
) -> Result<Violations> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let n = cfg.dim;
    let eps = cfg.slack;
    let phi = random_matrix(&mut rng, n, n);
    let psi = random_matrix(&mut rng, n, n);
    let zeta = random_matrix(&mut rng, n, n);
    let eta = random_matrix(&mut rng, n, n);
    let k = rng.gen_range(1..n.max(2));
    let low_rank = random_matrix(&mut rng, n, k) * random_matrix(&mut rng, k, n);

    let s_phi = real_singular_values(&phi);
    let s_psi = real_singular_values(&psi);
    let s_sum = real_singular_values(&(&phi + &psi));
    let s_prod = real_singular_values(&(&phi * &psi));
    let q_phi = q_of(&s_phi, a, r)?;
    let q_psi = q_of(&s_psi, a, r)?;
    let mut v = Violations::default();

    if q_of(&s_sum, a, r)? > 2.0 * (q_phi + q_psi) + eps {
        v.quasi_triangle += 1;
    }
    if s_phi[0] > q_phi + eps {
        v.lower_bound += 1;
    }
    let diff_norm = real_singular_values(&(&phi - &psi))[0];
    if s_phi
        .iter()
        .zip(&s_psi)
        .any(|(x, y)| (x - y).abs() > diff_norm + eps)
    {
        v.lipschitz += 1;
    }
    let s_zeta = real_singular_values(&zeta)[0];
    let s_eta = real_singular_values(&eta)[0];
    let composed = q_of(&real_singular_values(&(&zeta * &phi * &eta)), a, r)?;
    if composed > s_zeta * q_phi * s_eta + eps {
        v.composition += 1;
    }
    let s_low = real_singular_values(&low_rank);
    if s_low.iter().skip(k).any(|x| *x > 1e-10 * s_low[0]) {
        v.rank += 1;
    }
    let mut additive = false;
    let mut multiplicative = false;
    for m in 1..=n {
        for l in 1..=n + 1 - m {
            let idx = m + l - 2;
            additive |= s_sum[idx] > s_phi[m - 1] + s_psi[l - 1] + eps;
            multiplicative |= s_prod[idx] > s_phi[m - 1] * s_psi[l - 1] + eps;
        }
    }
    v.additive += additive as usize;
    v.multiplicative += multiplicative as usize;
    Ok(v)
}

/// Seeded random trials of the quasi-norm and s-number inequalities on
/// `dim x dim` real matrices with entries uniform in `[-1, 1]`. Trial `t`
/// draws from stream `t` of a ChaCha generator seeded with `seed`, so the
/// counts do not depend on how trials are scheduled.
pub fn check_quasinorm_axioms(
    cfg: &AxiomConfig,
    a: &SequenceSpec,
    r: &SequenceSpec,
) -> Result<AxiomReport> {
    if cfg.dim == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let flags = ideal_preconditions(a, r)?;
    let mut warnings = Vec::new();
    if flags.qnorm_normalized != TriState::Yes {
        warnings.push(format!(
            "sup a_i r_i is not 1 (sampled sup {:.6e}); the lower bound may fail",
            flags.sampled_sup
        ));
    }
    let violations = (0..cfg.trials)
        .into_par_iter()
        .map(|t| one_trial(t, cfg, a, r))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(Violations::default(), Violations::merge);
    Ok(AxiomReport {
        trials: cfg.trials,
        dim: cfg.dim,
        seed: cfg.seed,
        violations,
        qnorm_normalized: flags.qnorm_normalized,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub samples: usize,
    pub t_members: usize,
    pub r_members: usize,
    /// Indices of samples in the `t`-class but not the `r`-class.
    pub counterexamples: Vec<usize>,
    pub undecided: Vec<usize>,
}

/// Checks that every `t`-member among `samples` is an `r`-member, after
/// verifying `r_n <= t_n` for `n <= n_max`.
pub fn inclusion_check(
    r: &SequenceSpec,
    t: &SequenceSpec,
    samples: &[SNumberSequence],
    a: &SequenceSpec,
    n_max: usize,
) -> Result<InclusionReport> {
    for n in 1..=r.max_index(t.max_index(n_max)) {
        if r.eval(n)? > t.eval(n)? {
            return Err(Error::WeightsNotOrdered(n));
        }
    }
    let mut report = InclusionReport {
        samples: samples.len(),
        t_members: 0,
        r_members: 0,
        counterexamples: Vec::new(),
        undecided: Vec::new(),
    };
    for (idx, snum) in samples.iter().enumerate() {
        let in_t = stype_membership(snum, a, t)?.verdict;
        let in_r = stype_membership(snum, a, r)?.verdict;
        report.t_members += (in_t == TriState::Yes) as usize;
        report.r_members += (in_r == TriState::Yes) as usize;
        match (in_t, in_r) {
            (TriState::Yes, TriState::No) => report.counterexamples.push(idx),
            (TriState::Yes, TriState::Inconclusive) => report.undecided.push(idx),
            _ => {}
        }
    }
    Ok(report)
}

/// Argument of [`chi_space_membership`].
#[derive(Debug, Clone)]
pub enum ChiVector {
    /// Finitely supported vector `(v_1, ..., v_N, 0, 0, ...)`.
    Finite(Vec<Complex64>),
    Sequence(SequenceSpec),
}

/// Whether `R_a v in c_0(r)`, i.e. `lim r_i a_i sum_{j<=i} v_j = 0`.
pub fn chi_space_membership(
    v: &ChiVector,
    a: &SequenceSpec,
    r: &SequenceSpec,
) -> Result<Membership> {
    match v {
        ChiVector::Finite(values) => {
            let mut re = CompensatedSum::new();
            let mut im = CompensatedSum::new();
            for z in values {
                re.add(z.re);
                im.add(z.im);
            }
            constant_times_ar(Complex64::new(re.value(), im.value()).norm(), a, r)
        }
        ChiVector::Sequence(seq) => {
            if let (Some(kar), Some(ps)) = (
                class_ar(a, r),
                seq.asym().and_then(|k| k.partial_sum_growth()),
            ) {
                if let Ok(k) = kar.mul(&ps) {
                    let lim = k.limit_class();
                    return Ok(Membership::analytic(
                        TriState::from_bool(lim == LimitClass::Zero),
                        format!("a_i r_i sum v_j -> {lim:?}"),
                    ));
                }
            }
            let n_max = a.max_index(r.max_index(seq.max_index(PROBE_LIMIT)));
            let mut sums = Vec::with_capacity(n_max);
            let mut acc = CompensatedSum::new();
            for j in 1..=n_max {
                acc.add(seq.eval(j)?);
                sums.push(acc.value());
            }
            let (verdict, diagnostic) =
                numeric_limit_zero(|i| Ok(ln_ar(a, r, i)? + sums[i - 1].ln()), n_max)?;
            Ok(Membership {
                verdict,
                method: Method::Numeric,
                diagnostic,
            })
        }
    }
}
