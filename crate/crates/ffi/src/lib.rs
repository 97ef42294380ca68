//! C ABI over `terraspec`.
//!
//! Sequences and resolvent sections cross the boundary as opaque handles
//! owned by the caller and released with the matching `*_free`. Every
//! fallible call returns a [`TsStatus`]; on failure the message and the
//! stable error code of the last error on the calling thread are available
//! from [`ts_last_error_message`] and [`ts_last_error_code`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use terraspec::ideals::{quasi_norm, SNumberSequence};
use terraspec::operator::classify_boundedness;
use terraspec::products::{ratio_band, BandVerdict};
use terraspec::spectrum::{classify_point, resolvent_section, verify_resolvent};
use terraspec::{Error, FiniteSection, SequenceSpec, SpectralLabel, TriState};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad parameter, dimension, index or grid.
    InvalidArgument = 2,
    /// `lambda` outside the domain of the requested quantity.
    Domain = 3,
    /// A numeric procedure could not reach a decision.
    Numeric = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsFamily {
    /// `param / n`
    CesaroScaled = 0,
    /// `n^{-param}`
    PCesaro = 1,
    /// `1 / ln(n + 1)`; `param` is ignored.
    LogReciprocal = 2,
    /// `n^{-param}` used as a weight
    PowerWeight = 3,
    /// `param^n`
    Geometric = 4,
    Constant = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsTriState {
    Yes = 0,
    No = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsSpectralLabel {
    Resolvent = 0,
    Point = 1,
    Residual = 2,
    ContinuousCandidate = 3,
    BoundaryUnknown = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsBandVerdict {
    BoundedBand = 0,
    Drifting = 1,
    Degenerate = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsBoundedness {
    pub bounded: TsTriState,
    pub compact: TsTriState,
    /// `NaN` unless `bounded` is `Yes`.
    pub norm: f64,
    pub sup_estimate: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsResolventCheck {
    pub max_residual: f64,
    pub d_lambda: f64,
    pub passed: bool,
    pub verification_claimed: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsBand {
    pub log_log_slope: f64,
    pub band_lo: f64,
    pub band_hi: f64,
    pub exponent: f64,
    pub verdict: TsBandVerdict,
}

/// Opaque sequence handle.
pub struct TsSequence(SequenceSpec);

/// Opaque finite-section handle.
pub struct TsSection(FiniteSection);

struct LastError {
    code: CString,
    message: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn set_error(code: &str, message: &str) {
    let clean = |s: &str| CString::new(s.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = Some(LastError {
            code: clean(code),
            message: clean(message),
        })
    });
}

fn status_of(e: &Error) -> TsStatus {
    match e {
        Error::AlphaUndefinedAtZero
        | Error::LambdaInS(_)
        | Error::NotAnEigencandidate(_)
        | Error::RepeatedDiagonalUnsupported { .. }
        | Error::ZeroNotAdjointEigenvalue
        | Error::ClosureBoundaryUnsupported
        | Error::ResolventUndefinedAtZero => TsStatus::Domain,
        Error::ClassOverflow
        | Error::ChiNotConvergent { .. }
        | Error::ChiZero(_)
        | Error::WeightNotPositive(_)
        | Error::WeightNotDecreasing(_) => TsStatus::Numeric,
        _ => TsStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), TsStatus>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic", "panic inside terraspec");
            TsStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, TsStatus>;
}

impl<T> OrStatus<T> for terraspec::Result<T> {
    fn or_status(self) -> Result<T, TsStatus> {
        self.map_err(|e| {
            set_error(e.code(), &e.to_string());
            status_of(&e)
        })
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, TsStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null-pointer", &format!("`{what}` is null"));
        TsStatus::NullPointer
    })
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), TsStatus> {
    if p.is_null() {
        set_error("null-pointer", &format!("`{what}` is null"));
        return Err(TsStatus::NullPointer);
    }
    p.write(v);
    Ok(())
}

fn check_out<T>(p: *mut T) -> Result<(), TsStatus> {
    if p.is_null() {
        set_error("null-pointer", "`out` is null");
        return Err(TsStatus::NullPointer);
    }
    Ok(())
}

fn tri(t: TriState) -> TsTriState {
    match t {
        TriState::Yes => TsTriState::Yes,
        TriState::No => TsTriState::No,
        TriState::Inconclusive => TsTriState::Inconclusive,
    }
}

/// Message of the last error on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null(), |l| l.message.as_ptr())
    })
}

/// Kebab-case code of the last error on this thread, or null.
#[no_mangle]
pub extern "C" fn ts_last_error_code() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |l| l.code.as_ptr()))
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ts_sequence_new(
    family: TsFamily,
    param: f64,
    out: *mut *mut TsSequence,
) -> TsStatus {
    guard(|| {
        check_out(out)?;
        let spec = match family {
            TsFamily::CesaroScaled => SequenceSpec::cesaro_scaled(param),
            TsFamily::PCesaro => SequenceSpec::p_cesaro(param),
            TsFamily::LogReciprocal => Ok(SequenceSpec::log_reciprocal()),
            TsFamily::PowerWeight => SequenceSpec::power_weight(param),
            TsFamily::Geometric => SequenceSpec::geometric(param),
            TsFamily::Constant => SequenceSpec::constant(param),
        }
        .or_status()?;
        out.write(Box::into_raw(Box::new(TsSequence(spec))));
        Ok(())
    })
}

/// Finite sequence `values[0..len]`, indexed from 1.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ts_sequence_table(
    values: *const f64,
    len: usize,
    out: *mut *mut TsSequence,
) -> TsStatus {
    guard(|| {
        deref(values, "values")?;
        check_out(out)?;
        let v = std::slice::from_raw_parts(values, len).to_vec();
        let spec = SequenceSpec::table(v).or_status()?;
        out.write(Box::into_raw(Box::new(TsSequence(spec))));
        Ok(())
    })
}

/// # Safety
/// `seq` must be null or a handle from `ts_sequence_new`/`ts_sequence_table` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ts_sequence_free(seq: *mut TsSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// # Safety
/// `seq` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ts_sequence_eval(
    seq: *const TsSequence,
    n: usize,
    out: *mut f64,
) -> TsStatus {
    guard(|| {
        let v = deref(seq, "seq")?.0.eval(n).or_status()?;
        write(out, v, "out")
    })
}

/// # Safety
/// `a`, `r`, `s` must be live handles and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ts_classify_boundedness(
    a: *const TsSequence,
    r: *const TsSequence,
    s: *const TsSequence,
    out: *mut TsBoundedness,
) -> TsStatus {
    guard(|| {
        let rep = classify_boundedness(&deref(a, "a")?.0, &deref(r, "r")?.0, &deref(s, "s")?.0)
            .or_status()?;
        write(
            out,
            TsBoundedness {
                bounded: tri(rep.bounded),
                compact: tri(rep.compact),
                norm: rep.norm.unwrap_or(f64::NAN),
                sup_estimate: rep.sup_estimate,
            },
            "out",
        )
    })
}

/// # Safety
/// `a`, `s` must be live handles and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ts_classify_point(
    re: f64,
    im: f64,
    a: *const TsSequence,
    s: *const TsSequence,
    chi: f64,
    out: *mut TsSpectralLabel,
) -> TsStatus {
    guard(|| {
        let p = classify_point(
            Complex64::new(re, im),
            &deref(a, "a")?.0,
            &deref(s, "s")?.0,
            chi,
        )
        .or_status()?;
        let label = match p.label {
            SpectralLabel::Resolvent => TsSpectralLabel::Resolvent,
            SpectralLabel::Point => TsSpectralLabel::Point,
            SpectralLabel::Residual => TsSpectralLabel::Residual,
            SpectralLabel::ContinuousCandidate => TsSpectralLabel::ContinuousCandidate,
            SpectralLabel::BoundaryUnknown => TsSpectralLabel::BoundaryUnknown,
        };
        write(out, label, "out")
    })
}

/// `n x n` section of `(R_a - lambda I)^{-1}`.
///
/// # Safety
/// `a` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ts_resolvent_section(
    re: f64,
    im: f64,
    a: *const TsSequence,
    n: usize,
    out: *mut *mut TsSection,
) -> TsStatus {
    guard(|| {
        check_out(out)?;
        let sec = resolvent_section(Complex64::new(re, im), &deref(a, "a")?.0, n).or_status()?;
        out.write(Box::into_raw(Box::new(TsSection(sec))));
        Ok(())
    })
}

/// # Safety
/// `sec` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ts_section_dim(sec: *const TsSection) -> usize {
    sec.as_ref().map_or(0, |s| s.0.dim())
}

/// Entry `(i, k)`, 0-based.
///
/// # Safety
/// `sec` must be a live handle; `out_re`, `out_im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_section_entry(
    sec: *const TsSection,
    i: usize,
    k: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TsStatus {
    guard(|| {
        let s = &deref(sec, "sec")?.0;
        if i >= s.dim() || k >= s.dim() {
            set_error(
                "index-out-of-range",
                &format!("({i}, {k}) outside a {0}x{0} section", s.dim()),
            );
            return Err(TsStatus::InvalidArgument);
        }
        let z = s.get(i, k);
        write(out_re, z.re, "out_re")?;
        write(out_im, z.im, "out_im")
    })
}

/// # Safety
/// `sec` must be null or a handle from `ts_resolvent_section` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ts_section_free(sec: *mut TsSection) {
    if !sec.is_null() {
        drop(Box::from_raw(sec));
    }
}

/// # Safety
/// `a` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ts_verify_resolvent(
    re: f64,
    im: f64,
    a: *const TsSequence,
    n: usize,
    tol: f64,
    out: *mut TsResolventCheck,
) -> TsStatus {
    guard(|| {
        let c = verify_resolvent(Complex64::new(re, im), &deref(a, "a")?.0, n, tol).or_status()?;
        write(
            out,
            TsResolventCheck {
                max_residual: c.max_residual,
                d_lambda: c.d_lambda,
                passed: c.passed,
                verification_claimed: c.verification_claimed,
            },
            "out",
        )
    })
}

/// # Safety
/// `a` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ts_ratio_band(
    a: *const TsSequence,
    re: f64,
    im: f64,
    chi: f64,
    n_lo: usize,
    n_hi: usize,
    out: *mut TsBand,
) -> TsStatus {
    guard(|| {
        let rep =
            ratio_band(&deref(a, "a")?.0, Complex64::new(re, im), chi, (n_lo, n_hi)).or_status()?;
        let verdict = match rep.verdict {
            BandVerdict::BoundedBand => TsBandVerdict::BoundedBand,
            BandVerdict::Drifting => TsBandVerdict::Drifting,
            BandVerdict::Degenerate => TsBandVerdict::Degenerate,
        };
        write(
            out,
            TsBand {
                log_log_slope: rep.log_log_slope,
                band_lo: rep.band.0,
                band_hi: rep.band.1,
                exponent: rep.exponent,
                verdict,
            },
            "out",
        )
    })
}

/// Quasi-norm of finitely supported s-numbers `values[0..len]` (non-increasing).
///
/// # Safety
/// `values` must point to `len` readable doubles, `a`, `r` must be live
/// handles, `out_value` valid for a write, and `out_argmax` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ts_quasi_norm(
    values: *const f64,
    len: usize,
    a: *const TsSequence,
    r: *const TsSequence,
    out_value: *mut f64,
    out_argmax: *mut usize,
) -> TsStatus {
    guard(|| {
        deref(values, "values")?;
        let v = std::slice::from_raw_parts(values, len).to_vec();
        let snum = SNumberSequence::user(v).or_status()?;
        let q = quasi_norm(&snum, &deref(a, "a")?.0, &deref(r, "r")?.0).or_status()?;
        write(out_value, q.value, "out_value")?;
        if !out_argmax.is_null() {
            out_argmax.write(q.argmax_index);
        }
        Ok(())
    })
}
