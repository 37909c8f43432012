// SPDX-License-Identifier: Apache-2.0

//! C interface.
//!
//! Every entry point returns a [`WentroStatus`]. On failure a description is
//! available from [`wentro_last_error`] on the same thread until the next call.
//! Factor pairs are opaque handles owned by the caller and released with
//! [`wentro_pair_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wentro::carpets::{carpet_dimension, CarpetSpec};
use wentro::cover::{growth_limit_bounds, weighted_partition_sum, CoverOptions, LowerKind, Potential};
use wentro::io::parse_system;
use wentro::symbolic::{Alphabet, BlockCode, FactorPair, Sft};
use wentro::{Error, Limits};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WentroStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    InvalidInput = 2,
    CapExceeded = 3,
    Numerical = 4,
    /// The library panicked; this is a bug.
    Internal = 5,
}

/// Opaque factor pair.
pub struct WentroPair {
    pair: FactorPair,
}

/// Enclosure of the weighted pressure, in nats.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WentroBounds {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    /// 1 when `lower` is a proven bound, 0 when it is an estimate.
    pub lower_certified: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> WentroStatus {
    match e {
        Error::CapExceeded { .. } => WentroStatus::CapExceeded,
        Error::NonConvergence { .. } | Error::NonFinite(_) => WentroStatus::Numerical,
        _ => WentroStatus::InvalidInput,
    }
}

fn guard(body: impl FnOnce() -> Result<(), (WentroStatus, String)>) -> WentroStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => WentroStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            WentroStatus::Internal
        }
    }
}

fn lib<T>(r: wentro::Result<T>) -> Result<T, (WentroStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (WentroStatus, String) {
    (WentroStatus::NullArgument, format!("`{what}` is null"))
}

/// Reads `n` values or returns the zero potential for a null pointer.
unsafe fn potential_from(values: *const f64, n: usize) -> Potential {
    if values.is_null() {
        Potential::zero()
    } else {
        Potential::symbolwise(std::slice::from_raw_parts(values, n))
    }
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn wentro_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a pair from a system-file JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wentro_pair_from_json(json: *const c_char, out: *mut *mut WentroPair) -> WentroStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| (WentroStatus::InvalidInput, "json is not UTF-8".to_string()))?;
        let system = lib(parse_system(text, &Limits::from_env()))?;
        *out = Box::into_raw(Box::new(WentroPair { pair: system.pair }));
        Ok(())
    })
}

/// Builds a pair from an `n x n` row-major 0/1 transition matrix and a code
/// table of `n` labels.
///
/// # Safety
/// `transitions` must hold `n * n` bytes, `code` `n` entries, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wentro_pair_new(
    n: usize,
    transitions: *const u8,
    code: *const usize,
    out: *mut *mut WentroPair,
) -> WentroStatus {
    guard(|| {
        if transitions.is_null() {
            return Err(null("transitions"));
        }
        if code.is_null() {
            return Err(null("code"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n
            .checked_mul(n)
            .ok_or((WentroStatus::InvalidInput, "n is too large".to_string()))?;
        let t = std::slice::from_raw_parts(transitions, len);
        let rows = t.chunks(n.max(1)).map(|r| r.iter().map(|&b| b != 0).collect()).collect();
        let table = std::slice::from_raw_parts(code, n).to_vec();
        let labels = table.iter().max().map_or(1, |m| m + 1);
        let x = lib(Alphabet::new(n).and_then(|a| Sft::new(a, rows)))?;
        if x.size() != n {
            return Err((WentroStatus::InvalidInput, "transitions have non-essential symbols".into()));
        }
        let code = lib(Alphabet::new(labels).and_then(|a| BlockCode::new(n, a, table)))?;
        let pair = lib(FactorPair::new(x, code, &Limits::from_env()))?;
        *out = Box::into_raw(Box::new(WentroPair { pair }));
        Ok(())
    })
}

/// Releases a pair. Null is ignored.
///
/// # Safety
/// `pair` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wentro_pair_free(pair: *mut WentroPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Number of upstairs symbols after pruning; potentials are indexed by them.
///
/// # Safety
/// `pair` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn wentro_pair_x_size(pair: *const WentroPair) -> usize {
    pair.as_ref().map_or(0, |p| p.pair.x().size())
}

/// `log Z_N` for weight `w` and a per-symbol potential (null for zero).
///
/// # Safety
/// `pair` live, `potential` null or of length `wentro_pair_x_size(pair)`, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wentro_partition_sum(
    pair: *const WentroPair,
    w: f64,
    potential: *const f64,
    n: usize,
    out: *mut f64,
) -> WentroStatus {
    guard(|| {
        let p = pair.as_ref().ok_or_else(|| null("pair"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = potential_from(potential, p.pair.x().size());
        *out = lib(weighted_partition_sum(&p.pair, w, &f, n, &CoverOptions::default()))?;
        Ok(())
    })
}

/// Certified enclosure of the weighted pressure from `N = 1 ..= n_max`.
///
/// # Safety
/// As for [`wentro_partition_sum`].
#[no_mangle]
pub unsafe extern "C" fn wentro_growth_bounds(
    pair: *const WentroPair,
    w: f64,
    potential: *const f64,
    n_max: usize,
    out: *mut WentroBounds,
) -> WentroStatus {
    guard(|| {
        let p = pair.as_ref().ok_or_else(|| null("pair"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = potential_from(potential, p.pair.x().size());
        let opts = CoverOptions {
            limits: Limits::from_env(),
            ..CoverOptions::default()
        };
        let g = lib(growth_limit_bounds(&p.pair, w, &f, n_max, &opts))?;
        *out = WentroBounds {
            lower: g.lower,
            upper: g.upper,
            estimate: g.estimate,
            lower_certified: i32::from(g.lower_kind == LowerKind::Certified),
        };
        Ok(())
    })
}

/// Hausdorff dimension of the carpet with digits `(digits[2i], digits[2i+1])`.
///
/// # Safety
/// `digits` must hold `2 * len` entries and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn wentro_carpet_dimension(
    a: u32,
    b: u32,
    digits: *const u32,
    len: usize,
    out: *mut f64,
) -> WentroStatus {
    guard(|| {
        if digits.is_null() {
            return Err(null("digits"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let raw = std::slice::from_raw_parts(digits, 2 * len);
        let spec = lib(CarpetSpec::new(a, b, raw.chunks(2).map(|d| (d[0], d[1])).collect()))?;
        *out = carpet_dimension(&spec).dimension_dim;
        Ok(())
    })
}
