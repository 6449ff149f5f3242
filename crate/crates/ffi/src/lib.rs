//! C ABI over `symprop`.
//!
//! Samples are passed around as opaque `SpFingerprint` handles. Every fallible
//! call returns an [`SpStatus`] and writes its value through an out pointer;
//! on failure the message is available from [`sp_last_error`] on the same
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use symprop::distinct::{estimate_distinct, DistinctConfig};
use symprop::entropy::{empirical_entropy, estimate_entropy, miller_madow, EntropyConfig};
use symprop::fingerprint::{parse_input, Fingerprint, InputFormat};
use symprop::support::{
    chao1_support, chebyshev_support, chebyshev_support_adaptive, good_turing_support, plugin_support,
    SupportConfig,
};
use symprop::Error;

/// Opaque fingerprint handle.
pub struct SpFingerprint(Fingerprint);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Bounds = 3,
    Convergence = 4,
    Numerical = 5,
    Undefined = 6,
    Parse = 7,
    Input = 8,
    Io = 9,
    Panic = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpStatus {
    match e {
        Error::Domain(_) => SpStatus::Domain,
        Error::Bounds { .. } => SpStatus::Bounds,
        Error::Convergence { .. } => SpStatus::Convergence,
        Error::Numerical { .. } => SpStatus::Numerical,
        Error::Undefined(_) => SpStatus::Undefined,
        Error::Parse { .. } => SpStatus::Parse,
        Error::Input(_) => SpStatus::Input,
        Error::Io(_) => SpStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, stores its value in `*out`, and converts errors and panics.
fn guard<T, F>(out: *mut T, f: F) -> SpStatus
where
    F: FnOnce() -> Result<T, Fail>,
{
    if out.is_null() {
        set_error("output pointer is null".into());
        return SpStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null; the caller guarantees it is writable.
            unsafe { out.write(v) };
            SpStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            SpStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            SpStatus::Panic
        }
    }
}

fn handle<'a>(fp: *const SpFingerprint) -> Result<&'a Fingerprint, Fail> {
    // SAFETY: non-null handles come from `Box::into_raw` in this crate.
    unsafe { fp.as_ref() }.map(|h| &h.0).ok_or(Fail::Null("fingerprint handle"))
}

fn slice<'a>(p: *const u64, len: usize, what: &'static str) -> Result<&'a [u64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    // SAFETY: the caller guarantees `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn boxed(f: Fingerprint) -> *mut SpFingerprint {
    Box::into_raw(Box::new(SpFingerprint(f)))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a fingerprint from per-symbol counts; zero counts are ignored.
///
/// # Safety
/// `counts` must point to `len` readable values (or be NULL with `len == 0`),
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_fingerprint_from_counts(
    counts: *const u64,
    len: usize,
    out: *mut *mut SpFingerprint,
) -> SpStatus {
    guard(out, || {
        let counts = slice(counts, len, "counts")?;
        Ok(boxed(Fingerprint::from_counts(counts.iter().copied())))
    })
}

/// Builds a fingerprint from `(j, Φ_j)` pairs given as two parallel arrays.
///
/// # Safety
/// `js` and `phis` must each point to `len` readable values, and `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_fingerprint_from_entries(
    js: *const u64,
    phis: *const u64,
    len: usize,
    out: *mut *mut SpFingerprint,
) -> SpStatus {
    guard(out, || {
        let js = slice(js, len, "js")?;
        let phis = slice(phis, len, "phis")?;
        let f = Fingerprint::from_entries(js.iter().copied().zip(phis.iter().copied()))?;
        Ok(boxed(f))
    })
}

/// Parses `text` in the named format (`counts`, `fingerprint` or `text`).
///
/// # Safety
/// `text` and `format` must be NUL-terminated strings, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_fingerprint_parse(
    text: *const c_char,
    format: *const c_char,
    out: *mut *mut SpFingerprint,
) -> SpStatus {
    guard(out, || {
        if text.is_null() {
            return Err(Fail::Null("text"));
        }
        if format.is_null() {
            return Err(Fail::Null("format"));
        }
        // SAFETY: both checked non-null; the caller guarantees termination.
        let (text, format) = unsafe { (CStr::from_ptr(text), CStr::from_ptr(format)) };
        let format: InputFormat = format
            .to_str()
            .map_err(|_| Error::Input("format is not UTF-8".into()))?
            .parse()?;
        Ok(boxed(parse_input(text.to_bytes(), format, None)?))
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `fp` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_fingerprint_free(fp: *mut SpFingerprint) {
    if !fp.is_null() {
        // SAFETY: produced by `Box::into_raw` and not freed before.
        drop(unsafe { Box::from_raw(fp) });
    }
}

/// Sample size, or 0 for NULL.
///
/// # Safety
/// `fp` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_fingerprint_n(fp: *const SpFingerprint) -> u64 {
    handle(fp).map_or(0, |f| f.n())
}

/// `Φ_j`, or 0 for NULL.
///
/// # Safety
/// `fp` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_fingerprint_get(fp: *const SpFingerprint, j: u64) -> u64 {
    handle(fp).map_or(0, |f| f.get(j))
}

/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_support_plugin(fp: *const SpFingerprint, out: *mut f64) -> SpStatus {
    guard(out, || Ok(plugin_support(handle(fp)?) as f64))
}

/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_support_chebyshev(
    fp: *const SpFingerprint,
    k: u64,
    c0: f64,
    c1: f64,
    out: *mut f64,
) -> SpStatus {
    guard(out, || {
        let cfg = SupportConfig { k, c0, c1 };
        Ok(chebyshev_support(handle(fp)?, &cfg)?.estimate)
    })
}

/// `k == 0` means no upper clamp.
///
/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_support_chebyshev_adaptive(
    fp: *const SpFingerprint,
    eps: f64,
    c0: f64,
    c1: f64,
    k: u64,
    out: *mut f64,
) -> SpStatus {
    guard(out, || {
        let k = (k > 0).then_some(k);
        Ok(chebyshev_support_adaptive(handle(fp)?, eps, c0, c1, k)?.estimate)
    })
}

/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_support_good_turing(fp: *const SpFingerprint, out: *mut f64) -> SpStatus {
    guard(out, || Ok(good_turing_support(handle(fp)?)?.estimate))
}

/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_support_chao1(fp: *const SpFingerprint, out: *mut f64) -> SpStatus {
    guard(out, || Ok(chao1_support(handle(fp)?).estimate))
}

/// `n == 0` uses the fingerprint's own sample size.
///
/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_distinct(
    fp: *const SpFingerprint,
    k: u64,
    n: u64,
    alpha: f64,
    beta: f64,
    out: *mut f64,
) -> SpStatus {
    guard(out, || {
        let f = handle(fp)?;
        let n = if n == 0 { f.n() } else { n };
        Ok(estimate_distinct(f, &DistinctConfig { k, n, alpha, beta })?.estimate)
    })
}

/// Polynomial entropy estimate in nats. `k` is ignored when `adaptive`.
///
/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn sp_entropy_polynomial(
    fp: *const SpFingerprint,
    k: u64,
    c0: f64,
    c1: f64,
    c2: f64,
    adaptive: bool,
    split: bool,
    seed: u64,
    out: *mut f64,
) -> SpStatus {
    guard(out, || {
        let cfg = EntropyConfig {
            k: (!adaptive).then_some(k),
            c0,
            c1,
            c2,
            split,
            adaptive,
        };
        let h = handle(fp)?.to_histogram();
        Ok(estimate_entropy(&h, &cfg, Some(seed))?.estimate)
    })
}

/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_entropy_empirical(fp: *const SpFingerprint, out: *mut f64) -> SpStatus {
    guard(out, || Ok(empirical_entropy(&handle(fp)?.to_histogram())?))
}

/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_entropy_miller_madow(fp: *const SpFingerprint, out: *mut f64) -> SpStatus {
    guard(out, || Ok(miller_madow(&handle(fp)?.to_histogram())?))
}
