//! Finite sections of `R_a` and the weighted boundedness/compactness criterion.
//!
//! `R_a : c_0(r) -> c_0(s)` is bounded iff `c_n = s_n a_n sum_{k<=n} 1/r_k`
//! is bounded, compact iff `c_n -> 0`, and in the bounded case the operator
//! norm is `sup_n c_n`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticClass, LimitClass};
use crate::error::{Error, Result};
use crate::numeric::{dyadic_probes, sampled_trend, CompensatedSum, Trend, TriState};
use crate::sequences::{verify_weight, SequenceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionKind {
    Rhaly,
    Resolvent,
    General,
}

/// Leading `n x n` block of a lower-triangular infinite matrix.
///
/// Entries are stored as packed rows; indices are zero-based.
#[derive(Debug, Clone)]
pub struct FiniteSection {
    n: usize,
    entries: Vec<Complex64>,
    kind: SectionKind,
    weights: Option<(SequenceSpec, SequenceSpec)>,
}

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl FiniteSection {
    /// Build from an entry function `f(i, k)` evaluated for `k <= i` (zero-based).
    pub fn from_fn(
        n: usize,
        kind: SectionKind,
        mut f: impl FnMut(usize, usize) -> Result<Complex64>,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(row_start(n));
        for i in 0..n {
            for k in 0..=i {
                entries.push(f(i, k)?);
            }
        }
        Ok(Self {
            n,
            entries,
            kind,
            weights: None,
        })
    }

    /// Take the lower triangle of a dense square matrix.
    pub fn from_dense_lower(m: &DMatrix<Complex64>, kind: SectionKind) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        Self::from_fn(m.nrows(), kind, |i, k| Ok(m[(i, k)]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SectionKind {
        self.kind
    }

    /// `(r, s)` when the section was conjugated by weights.
    pub fn weights(&self) -> Option<&(SequenceSpec, SequenceSpec)> {
        self.weights.as_ref()
    }

    /// Entry `(i, k)`; zero above the diagonal.
    pub fn get(&self, i: usize, k: usize) -> Complex64 {
        assert!(
            i < self.n && k < self.n,
            "index ({i}, {k}) outside a {0}x{0} section",
            self.n
        );
        if k > i {
            Complex64::new(0.0, 0.0)
        } else {
            self.entries[row_start(i) + k]
        }
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[row_start(i)..row_start(i + 1)]
    }

    /// Leading `m x m` block.
    pub fn leading(&self, m: usize) -> FiniteSection {
        let m = m.min(self.n);
        Self {
            n: m,
            entries: self.entries[..row_start(m)].to_vec(),
            kind: self.kind,
            weights: self.weights.clone(),
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, k| self.get(i, k))
    }

    /// `self - lambda I`.
    pub fn shifted(&self, lambda: Complex64) -> FiniteSection {
        let mut out = self.clone();
        out.kind = SectionKind::General;
        for i in 0..self.n {
            out.entries[row_start(i) + i] -= lambda;
        }
        out
    }
}

/// The `n x n` section of `R_a`: entry `(i, k) = a_i` for `k <= i`.
pub fn build_section(a: &SequenceSpec, n: usize) -> Result<FiniteSection> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "section dimension must be at least 1".into(),
        ));
    }
    let diag = (1..=n).map(|i| a.eval(i)).collect::<Result<Vec<_>>>()?;
    FiniteSection::from_fn(n, SectionKind::Rhaly, |i, _| {
        Ok(Complex64::new(diag[i], 0.0))
    })
}

/// `D_s A D_r^{-1}`: entry `(i, k) -> s_i * entry / r_k`.
pub fn conjugate_section(
    sec: &FiniteSection,
    r: &SequenceSpec,
    s: &SequenceSpec,
) -> Result<FiniteSection> {
    let n = sec.dim();
    let ln_r = (1..=n).map(|k| r.ln_eval(k)).collect::<Result<Vec<_>>>()?;
    let ln_s = (1..=n).map(|k| s.ln_eval(k)).collect::<Result<Vec<_>>>()?;
    for (k, v) in ln_r.iter().chain(&ln_s).enumerate() {
        if !v.is_finite() {
            return Err(Error::WeightNotPositive(k % n + 1));
        }
    }
    let mut out = FiniteSection::from_fn(n, sec.kind(), |i, k| {
        let e = sec.get(i, k);
        let scale = ln_s[i] - ln_r[k];
        Ok(if scale == 0.0 { e } else { e * scale.exp() })
    })?;
    out.weights = Some((r.clone(), s.clone()));
    Ok(out)
}

/// Running `sum_{k<=n} 1/r_k` that moves to log space when the linear sum
/// would overflow (geometrically decaying weights).
#[derive(Debug, Clone)]
enum ReciprocalSum {
    Linear(CompensatedSum),
    Log(f64),
}

const LINEAR_LIMIT: f64 = 1e300;

impl ReciprocalSum {
    fn add_ln(&mut self, ln_term: f64) {
        match self {
            ReciprocalSum::Linear(acc) => {
                let term = ln_term.exp();
                let next = acc.value() + term;
                if term.is_finite() && next < LINEAR_LIMIT {
                    acc.add(term);
                } else {
                    let ln_acc = acc.value().ln();
                    *self = ReciprocalSum::Log(ln_acc);
                    self.add_ln(ln_term);
                }
            }
            ReciprocalSum::Log(ls) => {
                let (hi, lo) = if ln_term > *ls {
                    (ln_term, *ls)
                } else {
                    (*ls, ln_term)
                };
                *ls = hi + (lo - hi).exp().ln_1p();
            }
        }
    }

    fn ln_value(&self) -> f64 {
        match self {
            ReciprocalSum::Linear(acc) => acc.value().ln(),
            ReciprocalSum::Log(ls) => *ls,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSequence {
    /// `(n, c_n)` at every `n <= 1000` and at powers of two (and `n_max`) beyond.
    pub samples: Vec<(usize, f64)>,
    /// The reciprocal-weight sum switched to log-space accumulation.
    pub log_space: bool,
    /// `c_n` left the representable range and sampling stopped early.
    pub truncated: bool,
}

impl CriterionSequence {
    pub fn sup(&self) -> f64 {
        self.samples.iter().map(|(_, c)| *c).fold(0.0, f64::max)
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.samples
            .binary_search_by_key(&n, |(k, _)| *k)
            .ok()
            .map(|i| self.samples[i].1)
    }
}

const DENSE_SAMPLE_LIMIT: usize = 1000;

/// `c_n = s_n a_n sum_{k<=n} 1/r_k`, recorded for every `n <= 1000` and at
/// powers of two and `n_max` beyond.
pub fn criterion_sequence(
    a: &SequenceSpec,
    r: &SequenceSpec,
    s: &SequenceSpec,
    n_max: usize,
) -> Result<CriterionSequence> {
    sampled_criterion(a, r, s, n_max, DENSE_SAMPLE_LIMIT)
}

/// [`criterion_sequence`] recorded at every `n <= n_max`.
pub fn criterion_sequence_dense(
    a: &SequenceSpec,
    r: &SequenceSpec,
    s: &SequenceSpec,
    n_max: usize,
) -> Result<CriterionSequence> {
    sampled_criterion(a, r, s, n_max, n_max)
}

fn sampled_criterion(
    a: &SequenceSpec,
    r: &SequenceSpec,
    s: &SequenceSpec,
    n_max: usize,
    dense_limit: usize,
) -> Result<CriterionSequence> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let n_max = a.max_index(r.max_index(s.max_index(n_max)));
    let mut sum = ReciprocalSum::Linear(CompensatedSum::new());
    let mut samples = Vec::new();
    let mut log_space = false;
    let mut truncated = false;
    let mut next_dyadic = dense_limit.max(1).next_power_of_two();
    for n in 1..=n_max {
        let ln_r = r.ln_eval(n)?;
        if !ln_r.is_finite() {
            return Err(Error::WeightNotPositive(n));
        }
        sum.add_ln(-ln_r);
        let sampled = n <= dense_limit || n == next_dyadic || n == n_max;
        if n == next_dyadic {
            next_dyadic = next_dyadic.saturating_mul(2);
        }
        if !sampled {
            continue;
        }
        let linear = match &sum {
            ReciprocalSum::Linear(acc) => Some(a.mul_term(n, s.mul_term(n, acc.value())?)?),
            ReciprocalSum::Log(_) => None,
        };
        let c = match linear {
            Some(v) if v.is_finite() && v >= f64::MIN_POSITIVE => v,
            _ => {
                log_space = true;
                let ln_c = a.ln_eval(n)? + s.ln_eval(n)? + sum.ln_value();
                if ln_c >= f64::MAX.ln() {
                    truncated = true;
                    break;
                }
                ln_c.exp()
            }
        };
        if matches!(sum, ReciprocalSum::Log(_)) {
            log_space = true;
        }
        samples.push((n, c));
    }
    Ok(CriterionSequence {
        samples,
        log_space,
        truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub criterion_samples: Vec<(usize, f64)>,
    pub sup_estimate: f64,
    pub bounded: TriState,
    pub compact: TriState,
    /// `sup_n c_n`, reported only when bounded.
    pub norm: Option<f64>,
    /// `lim c_n` from the class algebra when it is finite and its constant is known.
    pub analytic_limit: Option<f64>,
    pub criterion_class: Option<AsymptoticClass>,
    pub method: Method,
    pub log_space: bool,
    pub truncated: bool,
}

/// Default sampling depth for [`classify_boundedness`].
pub const DEFAULT_CLASSIFY_N_MAX: usize = 1 << 16;

pub fn classify_boundedness(
    a: &SequenceSpec,
    r: &SequenceSpec,
    s: &SequenceSpec,
) -> Result<BoundednessReport> {
    classify_boundedness_with(a, r, s, DEFAULT_CLASSIFY_N_MAX)
}

/// Class of `c_n`, when every input carries one and the reciprocal-weight sum is decidable.
fn criterion_class(
    a: &SequenceSpec,
    r: &SequenceSpec,
    s: &SequenceSpec,
) -> Option<(AsymptoticClass, bool)> {
    let (ca, cr, cs) = (a.asym()?, r.asym()?, s.asym()?);
    let recip = cr.reciprocal();
    let sum_known_constant =
        recip.partial_sum().verdict == crate::asymptotics::SumVerdict::Divergent;
    let growth = recip.partial_sum_growth()?;
    let class = ca.mul(cs).ok()?.mul(&growth).ok()?;
    Some((class, sum_known_constant))
}

pub fn classify_boundedness_with(
    a: &SequenceSpec,
    r: &SequenceSpec,
    s: &SequenceSpec,
    n_max: usize,
) -> Result<BoundednessReport> {
    let seq = criterion_sequence(a, r, s, n_max)?;
    let sup = seq.sup();
    let (bounded, compact, analytic_limit, class, method) = match criterion_class(a, r, s) {
        Some((class, exact_constant)) => {
            let (b, c, lim) = match class.limit_class() {
                LimitClass::Infinite => (TriState::No, TriState::No, None),
                LimitClass::Zero => (TriState::Yes, TriState::Yes, Some(0.0)),
                LimitClass::FiniteNonzero => (
                    TriState::Yes,
                    TriState::No,
                    exact_constant.then_some(class.constant),
                ),
            };
            (b, c, lim, Some(class), Method::Analytic)
        }
        None => {
            let probes: Vec<f64> = seq
                .samples
                .iter()
                .filter(|(n, _)| n.is_power_of_two() && *n >= 8)
                .map(|(_, c)| *c)
                .collect();
            let (b, c) = if seq.truncated {
                (TriState::Inconclusive, TriState::Inconclusive)
            } else {
                match sampled_trend(&probes, 0.05) {
                    Trend::Growing => (TriState::No, TriState::No),
                    Trend::Decaying => (TriState::Yes, TriState::Yes),
                    Trend::Stable => (TriState::Yes, TriState::No),
                    Trend::Ambiguous => (TriState::Inconclusive, TriState::Inconclusive),
                }
            };
            (b, c, None, None, Method::Numeric)
        }
    };
    let norm = (bounded == TriState::Yes).then(|| analytic_limit.map_or(sup, |l| sup.max(l)));
    Ok(BoundednessReport {
        criterion_samples: seq.samples,
        sup_estimate: sup,
        bounded,
        compact,
        norm,
        analytic_limit,
        criterion_class: class,
        method,
        log_space: seq.log_space,
        truncated: seq.truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    /// `sup_n a_n` on the sampled range.
    pub lower: f64,
    /// `sup_n n a_n` on the sampled range.
    pub upper: f64,
    /// The class of `n a_n` is unbounded, so `upper` is only a sampled value.
    pub upper_unbounded: bool,
}

/// Bounds `sup a_n <= ||R_a||_s <= sup n a_n`, valid for decreasing `s`.
pub fn operator_norm_bounds(
    a: &SequenceSpec,
    s: &SequenceSpec,
    n_max: usize,
) -> Result<NormBounds> {
    let n_max = a.max_index(n_max.max(1));
    let s_scan = s.max_index(n_max.max(2));
    if s_scan >= 2 && !verify_weight(s, s_scan)?.decreasing {
        let first = (1..s_scan)
            .find(|&n| s.ln_eval(n + 1).unwrap_or(f64::NAN) > s.ln_eval(n).unwrap_or(f64::NAN))
            .unwrap_or(1);
        return Err(Error::WeightNotDecreasing(first));
    }
    let mut lower = 0.0f64;
    let mut upper = 0.0f64;
    for n in 1..=n_max {
        lower = lower.max(a.eval(n)?);
        upper = upper.max(a.mul_term(n, n as f64)?);
    }
    let upper_unbounded = a
        .asym()
        .and_then(|c| c.mul(&AsymptoticClass::power_law(1.0, 1.0)).ok())
        .is_some_and(|c| c.limit_class() == LimitClass::Infinite);
    Ok(NormBounds {
        lower,
        upper,
        upper_unbounded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixTestReport {
    pub verdict: MatrixVerdict,
    /// `(n, s_n sum_k |a_nk| / r_k)`.
    pub row_sums: Vec<(usize, f64)>,
    pub row_sup: f64,
    /// `(k, s_n |a_nk|)` at the largest probe `n`, for the first few columns.
    pub column_tails: Vec<(usize, f64)>,
    pub columns_decay: bool,
    pub row_trend: Trend,
}

pub const COLUMN_DECAY_TOL: f64 = 1e-8;
const MATRIX_DENSE_ROWS: usize = 256;

/// Boundedness test for a general lower-triangular matrix between `c_0(r)`
/// and `c_0(s)`: bounded weighted row sums and vanishing weighted columns.
/// `entry(n, k)` is one-based.
pub fn matrix_bounded_test(
    entry: &dyn Fn(usize, usize) -> Complex64,
    r: &SequenceSpec,
    s: &SequenceSpec,
    n_max: usize,
) -> Result<MatrixTestReport> {
    let n_max = r.max_index(s.max_index(n_max.max(2)));
    let ln_r = (1..=n_max)
        .map(|k| r.ln_eval(k))
        .collect::<Result<Vec<_>>>()?;
    let ln_s = (1..=n_max)
        .map(|k| s.ln_eval(k))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<usize> = (1..=n_max.min(MATRIX_DENSE_ROWS)).collect();
    rows.extend(
        dyadic_probes(1, n_max)
            .into_iter()
            .filter(|n| *n > MATRIX_DENSE_ROWS),
    );
    let mut row_sums = Vec::with_capacity(rows.len());
    for &n in &rows {
        let mut acc = CompensatedSum::new();
        for k in 1..=n {
            let e = entry(n, k).norm();
            if e != 0.0 {
                acc.add(e * (ln_s[n - 1] - ln_r[k - 1]).exp());
            }
        }
        row_sums.push((n, acc.value()));
    }
    let row_sup = row_sums.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let probe_rows: Vec<f64> = row_sums
        .iter()
        .filter(|(n, _)| n.is_power_of_two() && *n >= 8)
        .map(|(_, v)| *v)
        .collect();
    let row_trend = if probe_rows.iter().any(|v| !v.is_finite()) {
        Trend::Growing
    } else {
        sampled_trend(&probe_rows, 0.05)
    };

    let columns: Vec<usize> = [1usize, 2, 3].into_iter().filter(|k| *k <= n_max).collect();
    let mut column_tails = Vec::new();
    let mut columns_decay = true;
    for &k in &columns {
        let probes: Vec<usize> = dyadic_probes(k, n_max)
            .into_iter()
            .filter(|n| *n >= k.max(8))
            .collect();
        let vals: Vec<f64> = probes
            .iter()
            .map(|&n| entry(n, k).norm() * ln_s[n - 1].exp())
            .collect();
        let last = vals.last().copied().unwrap_or(0.0);
        column_tails.push((k, last));
        let decays = last <= COLUMN_DECAY_TOL || sampled_trend(&vals, 0.05) == Trend::Decaying;
        columns_decay &= decays;
    }
    let verdict = match row_trend {
        Trend::Growing => MatrixVerdict::Fail,
        Trend::Ambiguous => MatrixVerdict::Inconclusive,
        Trend::Stable | Trend::Decaying if columns_decay => MatrixVerdict::Pass,
        Trend::Stable | Trend::Decaying => MatrixVerdict::Fail,
    };
    Ok(MatrixTestReport {
        verdict,
        row_sums,
        row_sup,
        column_tails,
        columns_decay,
        row_trend,
    })
}

/// Entry function of `R_a` for [`matrix_bounded_test`].
pub fn rhaly_entry(a: &SequenceSpec) -> impl Fn(usize, usize) -> Complex64 + '_ {
    move |n, k| {
        if k <= n {
            Complex64::new(a.eval(n).unwrap_or(f64::NAN), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn dense_rows(sec: &FiniteSection) -> Vec<Vec<f64>> {
        (0..sec.dim())
            .map(|i| (0..sec.dim()).map(|k| sec.get(i, k).re).collect())
            .collect()
    }

    #[test]
    fn build_examples() {
        let sec = build_section(&SequenceSpec::cesaro_scaled(1.0).unwrap(), 2).unwrap();
        assert_eq!(dense_rows(&sec), vec![vec![1.0, 0.0], vec![0.5, 0.5]]);
        let t = build_section(&SequenceSpec::table(vec![1.0, 0.5]).unwrap(), 2).unwrap();
        assert_eq!(dense_rows(&t), dense_rows(&sec));
        let c2 = build_section(&SequenceSpec::cesaro_scaled(2.0).unwrap(), 3).unwrap();
        assert_eq!(c2.row(2), &[c(2.0 / 3.0); 3]);
        assert_eq!(c2.kind(), SectionKind::Rhaly);
    }

    #[test]
    fn apply_examples() {
        let sec = build_section(&SequenceSpec::cesaro_scaled(1.0).unwrap(), 3).unwrap();
        let ones = sec.apply(&[c(1.0); 3]).unwrap();
        for (y, want) in ones.iter().zip([1.0, 1.0, 1.0]) {
            assert!((y.re - want).abs() < 1e-15 && y.im == 0.0);
        }
        let e1 = sec.apply(&[c(1.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(e1, vec![c(1.0), c(0.5), c(1.0 / 3.0)]);
        let rh =
            build_section(&SequenceSpec::table(vec![2.0, 1.0, 2.0 / 3.0]).unwrap(), 3).unwrap();
        let y = rh.apply(&[c(1.0); 3]).unwrap();
        for v in y {
            assert!((v.re - 2.0).abs() < 1e-15);
        }
        assert_eq!(
            sec.apply(&[c(1.0)]).unwrap_err(),
            Error::DimensionMismatch {
                expected: 3,
                got: 1
            }
        );
    }

    #[test]
    fn conjugation_examples() {
        let one = SequenceSpec::constant(1.0).unwrap();
        let sec = build_section(&SequenceSpec::cesaro_scaled(1.0).unwrap(), 4).unwrap();
        let same = conjugate_section(&sec, &one, &one).unwrap();
        for i in 0..4 {
            assert_eq!(same.row(i), sec.row(i));
        }
        let s = SequenceSpec::table(vec![1.0, 0.5]).unwrap();
        let two = build_section(&SequenceSpec::cesaro_scaled(1.0).unwrap(), 2).unwrap();
        let scaled = conjugate_section(&two, &one, &s).unwrap();
        assert_eq!(dense_rows(&scaled), vec![vec![1.0, 0.0], vec![0.25, 0.25]]);
        let a = build_section(&SequenceSpec::table(vec![1.0, 0.5]).unwrap(), 2).unwrap();
        let r = SequenceSpec::table(vec![1.0, 0.5]).unwrap();
        let row2 = conjugate_section(&a, &r, &one).unwrap();
        assert_eq!(dense_rows(&row2)[1], vec![0.5, 1.0]);
    }

    #[test]
    fn criterion_examples() {
        let one = SequenceSpec::constant(1.0).unwrap();
        let ces = criterion_sequence(&SequenceSpec::cesaro_scaled(1.0).unwrap(), &one, &one, 2000)
            .unwrap();
        assert!(ces.samples.iter().all(|(_, c)| *c == 1.0));
        assert_eq!(ces.samples.len(), 1001 + 1);
        let t = criterion_sequence(&SequenceSpec::table(vec![2.0, 1.0]).unwrap(), &one, &one, 2)
            .unwrap();
        assert_eq!(t.get(2), Some(2.0));
    }

    #[test]
    fn criterion_switches_to_log_space() {
        let g = SequenceSpec::geometric(0.5).unwrap();
        let a = SequenceSpec::log_reciprocal();
        let seq = criterion_sequence(&a, &g, &g, 1 << 12).unwrap();
        assert!(seq.log_space && !seq.truncated);
        // c_n -> 2 / log(n + 1)
        let c4096 = seq.get(4096).unwrap();
        assert!((c4096 - 2.0 / 4097f64.ln()).abs() < 1e-9, "{c4096}");
        let one = SequenceSpec::constant(1.0).unwrap();
        let blowup = criterion_sequence(&a, &g, &one, 1 << 12).unwrap();
        assert!(blowup.truncated);
    }

    #[test]
    fn classify_examples() {
        let one = SequenceSpec::constant(1.0).unwrap();
        let rep =
            classify_boundedness(&SequenceSpec::cesaro_scaled(1.0).unwrap(), &one, &one).unwrap();
        assert_eq!(
            (rep.bounded, rep.compact, rep.norm),
            (TriState::Yes, TriState::No, Some(1.0))
        );
        assert_eq!(rep.method, Method::Analytic);
        let g = SequenceSpec::geometric(0.5).unwrap();
        let rep = classify_boundedness(&SequenceSpec::log_reciprocal(), &g, &g).unwrap();
        assert_eq!(rep.compact, TriState::Yes);
        let rep = classify_boundedness(&SequenceSpec::log_reciprocal(), &one, &one).unwrap();
        assert_eq!(rep.bounded, TriState::No);
        assert!(rep.norm.is_none());
    }

    #[test]
    fn numeric_fallback() {
        let one = SequenceSpec::constant(1.0).unwrap();
        let a = SequenceSpec::cesaro_scaled(1.0).unwrap().with_asym(None);
        let rep = classify_boundedness_with(&a, &one, &one, 1 << 14).unwrap();
        assert_eq!(
            (rep.method, rep.bounded, rep.compact),
            (Method::Numeric, TriState::Yes, TriState::No)
        );
        let l = SequenceSpec::log_reciprocal().with_asym(None);
        let rep = classify_boundedness_with(&l, &one, &one, 1 << 14).unwrap();
        assert_eq!(rep.bounded, TriState::No);
        let p = SequenceSpec::power_weight(2.0).unwrap().with_asym(None);
        let rep = classify_boundedness_with(&p, &one, &one, 1 << 14).unwrap();
        assert_eq!(rep.compact, TriState::Yes);
    }

    #[test]
    fn norm_bound_examples() {
        let one = SequenceSpec::constant(1.0).unwrap();
        let b =
            operator_norm_bounds(&SequenceSpec::cesaro_scaled(1.0).unwrap(), &one, 1000).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        let g = SequenceSpec::geometric(0.5).unwrap();
        let b = operator_norm_bounds(&SequenceSpec::cesaro_scaled(2.0).unwrap(), &g, 1000).unwrap();
        assert_eq!((b.lower, b.upper), (2.0, 2.0));
        let b = operator_norm_bounds(
            &SequenceSpec::table(vec![0.5, 1.0, 0.1]).unwrap(),
            &one,
            1000,
        )
        .unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 2.0));
        let up = SequenceSpec::power_weight(-1.0).unwrap();
        assert_eq!(
            operator_norm_bounds(&SequenceSpec::cesaro_scaled(1.0).unwrap(), &up, 10)
                .unwrap_err()
                .code(),
            "weight-not-decreasing"
        );
        let b = operator_norm_bounds(&SequenceSpec::log_reciprocal(), &one, 100).unwrap();
        assert!(b.upper_unbounded);
    }

    #[test]
    fn matrix_test_examples() {
        let one = SequenceSpec::constant(1.0).unwrap();
        let identity = |n: usize, k: usize| if n == k { c(1.0) } else { c(0.0) };
        let rep = matrix_bounded_test(&identity, &one, &one, 4096).unwrap();
        assert_eq!(rep.verdict, MatrixVerdict::Pass);
        assert_eq!(rep.row_sup, 1.0);
        let ces = SequenceSpec::cesaro_scaled(1.0).unwrap();
        let rep = matrix_bounded_test(&rhaly_entry(&ces), &one, &one, 4096).unwrap();
        assert_eq!(rep.verdict, MatrixVerdict::Pass);
        assert!((rep.row_sup - 1.0).abs() < 1e-12);
        let l = SequenceSpec::log_reciprocal();
        let rep = matrix_bounded_test(&rhaly_entry(&l), &one, &one, 4096).unwrap();
        assert_eq!(rep.verdict, MatrixVerdict::Fail);
    }

    #[test]
    fn shifted_and_leading() {
        let sec = build_section(&SequenceSpec::cesaro_scaled(1.0).unwrap(), 3).unwrap();
        let sh = sec.shifted(c(3.0));
        assert_eq!(sh.get(0, 0), c(-2.0));
        assert_eq!(sh.get(1, 0), c(0.5));
        assert_eq!(sec.leading(2).dim(), 2);
        assert_eq!(sec.leading(2).row(1), sec.row(1));
    }
}
