//! C ABI over `expriesz`. Objects are opaque heap handles released with the
//! matching `*_free`; every fallible call returns an [`ExprieszStatus`] and
//! leaves a message for [`expriesz_last_error`] on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use expriesz::fourier;
use expriesz::gram::{self, GramReport, ScanConfig, Verdict};
use expriesz::{Error, IntervalUnion, Rational, SpectrumSpec, Window};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprieszStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parse = 3,
    Hypothesis = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprieszVerdict {
    RieszStable = 0,
    Degenerating = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprieszClass {
    Frame = 0,
    RieszSequence = 1,
    RieszBasis = 2,
    Neither = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExprieszWkl {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rank: usize,
    pub certificate: f64,
    pub system_class: ExprieszClass,
}

pub struct ExprieszDomain(IntervalUnion);

pub struct ExprieszSpectrum(SpectrumSpec);

pub struct ExprieszScan(GramReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

static VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ExprieszStatus {
    if e.is_hypothesis_gate() {
        ExprieszStatus::Hypothesis
    } else if e.is_numerical() {
        ExprieszStatus::Numerical
    } else if matches!(e, Error::Parse(_)) {
        ExprieszStatus::Parse
    } else {
        ExprieszStatus::InvalidInput
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (ExprieszStatus, String)>) -> ExprieszStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ExprieszStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ExprieszStatus::Internal
        }
    }
}

fn lib<T>(r: expriesz::error::Result<T>) -> Result<T, (ExprieszStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (ExprieszStatus, String) {
    (ExprieszStatus::NullPointer, format!("{what} is null"))
}

unsafe fn json_arg<'a>(s: *const c_char) -> Result<&'a str, (ExprieszStatus, String)> {
    if s.is_null() {
        return Err(null("json"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| (ExprieszStatus::Parse, e.to_string()))
}

fn parse<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, (ExprieszStatus, String)> {
    serde_json::from_str(s).map_err(|e| (ExprieszStatus::Parse, e.to_string()))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (ExprieszStatus, String)> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn expriesz_version() -> *const c_char {
    VERSION.as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn expriesz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses `{"intervals": [["a", "b"], ...]}` with rational endpoints.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expriesz_domain_from_json(json: *const c_char, out: *mut *mut ExprieszDomain) -> ExprieszStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d: IntervalUnion = parse(json_arg(json)?)?;
        *out = Box::into_raw(Box::new(ExprieszDomain(d)));
        Ok(())
    })
}

/// # Safety
/// `d` must come from [`expriesz_domain_from_json`] and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn expriesz_domain_measure(d: *const ExprieszDomain, out: *mut f64) -> ExprieszStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("domain"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lib(d.0.measure())?.to_f64();
        Ok(())
    })
}

/// # Safety
/// `d` must be null or come from [`expriesz_domain_from_json`].
#[no_mangle]
pub unsafe extern "C" fn expriesz_domain_free(d: *mut ExprieszDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Parses a spectrum description such as
/// `{"cosets": {"period": "4", "offsets": ["0", "1"]}}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expriesz_spectrum_from_json(json: *const c_char, out: *mut *mut ExprieszSpectrum) -> ExprieszStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s: SpectrumSpec = parse(json_arg(json)?)?;
        *out = Box::into_raw(Box::new(ExprieszSpectrum(s)));
        Ok(())
    })
}

/// Writes the points in `[-t, t]` to `buf`. `len` receives the count; when
/// it exceeds `cap` nothing is written and `BufferTooSmall` is returned.
///
/// # Safety
/// `s` must be a live handle, `buf` valid for `cap` writes, `len` valid.
#[no_mangle]
pub unsafe extern "C" fn expriesz_spectrum_window(s: *const ExprieszSpectrum, t: f64, buf: *mut f64, cap: usize, len: *mut usize) -> ExprieszStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("spectrum"))?;
        if len.is_null() {
            return Err(null("len"));
        }
        let pts = lib(s.0.window(lib(Window::new(t))?))?;
        *len = pts.len();
        if pts.len() > cap {
            return Err((ExprieszStatus::BufferTooSmall, format!("need {} slots, got {cap}", pts.len())));
        }
        if !pts.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(pts.as_ptr(), buf, pts.len());
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be null or come from [`expriesz_spectrum_from_json`].
#[no_mangle]
pub unsafe extern "C" fn expriesz_spectrum_free(s: *mut ExprieszSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Gram scan over the window half-widths in `schedule` with default thresholds.
///
/// # Safety
/// Handles must be live, `schedule` valid for `len` reads, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn expriesz_riesz_scan(
    s: *const ExprieszSpectrum,
    d: *const ExprieszDomain,
    schedule: *const f64,
    len: usize,
    out: *mut *mut ExprieszScan,
) -> ExprieszStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("spectrum"))?;
        let d = d.as_ref().ok_or_else(|| null("domain"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ws = slice(schedule, len, "schedule")?.iter().map(|&t| Window::new(t)).collect::<Result<Vec<_>, _>>();
        let report = lib(gram::riesz_bound_scan(&s.0, &d.0, &lib(ws)?, &ScanConfig::default()))?;
        *out = Box::into_raw(Box::new(ExprieszScan(report)));
        Ok(())
    })
}

/// # Safety
/// `scan` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn expriesz_scan_len(scan: *const ExprieszScan) -> usize {
    scan.as_ref().map_or(0, |s| s.0.rows.len())
}

/// # Safety
/// `scan` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn expriesz_scan_verdict(scan: *const ExprieszScan, out: *mut ExprieszVerdict) -> ExprieszStatus {
    guard(|| {
        let scan = scan.as_ref().ok_or_else(|| null("scan"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = match scan.0.verdict {
            Verdict::RieszStable => ExprieszVerdict::RieszStable,
            Verdict::Degenerating => ExprieszVerdict::Degenerating,
            Verdict::Inconclusive => ExprieszVerdict::Inconclusive,
        };
        Ok(())
    })
}

/// Row `i` of the scan: window half-width, point count and extreme eigenvalues.
///
/// # Safety
/// `scan` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn expriesz_scan_row(
    scan: *const ExprieszScan,
    i: usize,
    window_t: *mut f64,
    num_points: *mut usize,
    lambda_min: *mut f64,
    lambda_max: *mut f64,
) -> ExprieszStatus {
    guard(|| {
        let scan = scan.as_ref().ok_or_else(|| null("scan"))?;
        if window_t.is_null() || num_points.is_null() || lambda_min.is_null() || lambda_max.is_null() {
            return Err(null("out"));
        }
        let row = scan.0.rows.get(i).ok_or_else(|| (ExprieszStatus::InvalidInput, format!("row {i} out of range")))?;
        *window_t = row.window_t;
        *num_points = row.num_points;
        *lambda_min = row.lambda_min;
        *lambda_max = row.lambda_max;
        Ok(())
    })
}

/// # Safety
/// `scan` must be null or come from [`expriesz_riesz_scan`].
#[no_mangle]
pub unsafe extern "C" fn expriesz_scan_free(scan: *mut ExprieszScan) {
    if !scan.is_null() {
        drop(Box::from_raw(scan));
    }
}

fn rational(num: i64, den: i64) -> Result<Rational, (ExprieszStatus, String)> {
    lib(Rational::new(num, den))
}

/// Singular values of the coset/cell matrix for period `n_num/n_den`,
/// offsets `off_num[k]/off_den[k]` and integer columns.
///
/// # Safety
/// Arrays must be valid for the given lengths and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn expriesz_wkl_analyze(
    n_num: i64,
    n_den: i64,
    off_num: *const i64,
    off_den: *const i64,
    k: usize,
    columns: *const i64,
    l: usize,
    base_bound: f64,
    out: *mut ExprieszWkl,
) -> ExprieszStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = rational(n_num, n_den)?;
        let (nums, dens) = (slice(off_num, k, "off_num")?, slice(off_den, k, "off_den")?);
        let offsets = nums.iter().zip(dens).map(|(&a, &b)| rational(a, b)).collect::<Result<Vec<_>, _>>()?;
        let w = lib(fourier::build_wkl(n, &offsets, slice(columns, l, "columns")?))?;
        let a = lib(fourier::analyze(&w, base_bound))?;
        let system_class = match fourier::SystemClass::from_analysis(&a) {
            fourier::SystemClass::Frame => ExprieszClass::Frame,
            fourier::SystemClass::RieszSequence => ExprieszClass::RieszSequence,
            fourier::SystemClass::RieszBasis => ExprieszClass::RieszBasis,
            fourier::SystemClass::Neither => ExprieszClass::Neither,
        };
        *out = ExprieszWkl { sigma_min: a.sigma_min, sigma_max: a.sigma_max, rank: a.rank, certificate: a.certificate, system_class };
        Ok(())
    })
}

/// Smallest `|det|` over the square minors of the `p x p` Fourier matrix.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn expriesz_chebotarev_min(p: u64, allow_composite: bool, out: *mut f64) -> ExprieszStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lib(fourier::chebotarev_scan(p, allow_composite))?.min_abs_det;
        Ok(())
    })
}
