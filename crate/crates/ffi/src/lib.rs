//! C interface to the juliathermo toolkit.
//!
//! Objects are opaque handles created by `jt_*_new` and released by the
//! matching `jt_*_free`. Every fallible call returns a `JtStatus` and writes its
//! result through an out pointer; on failure the message is kept per thread and
//! can be read with `jt_last_error_message`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use juliathermo::cycles::{periodic_cycles, Cycle};
use juliathermo::metric::{g_metric, pressure_metric, EntropyFunctionalRecord};
use juliathermo::poly::PolyMap;
use juliathermo::report::critical_condition;
use juliathermo::thermo::{
    bowen_root, build_markov_cover, hausdorff_dimension_with, pressure_matrix, pressure_orbits, DimensionOptions,
    MarkovCover,
};
use juliathermo::{Complex64, Error, ErrorClass};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JtStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed input.
    Config = 2,
    /// A numerical procedure failed to converge.
    Numerical = 3,
    /// The map lies outside the supported regime.
    Domain = 4,
    /// Internal error; the library caught a panic.
    Panic = 5,
}

/// A quadratic map `z^2 + c`.
pub struct JtMap(PolyMap);

/// A Markov cover of a Julia set at a fixed depth.
pub struct JtCover(MarkovCover);

/// Cycles of one period, with their multipliers.
pub struct JtCycleList(Vec<Cycle>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> JtStatus {
    match e.class() {
        ErrorClass::Config => JtStatus::Config,
        ErrorClass::Numerical => JtStatus::Numerical,
        ErrorClass::Domain => JtStatus::Domain,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> JtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            JtStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            JtStatus::Panic
        }
    }
}

fn null(what: &str) -> JtStatus {
    set_error(format!("null pointer passed as {what}"));
    JtStatus::NullPointer
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or 0
/// when the last call succeeded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn jt_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates `z^2 + (re + i im)`.
///
/// # Safety
/// `out` must be a valid pointer; the handle it receives must be released with `jt_map_free`.
#[no_mangle]
pub unsafe extern "C" fn jt_map_new_quadratic(re: f64, im: f64, out: *mut *mut JtMap) -> JtStatus {
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidInput(format!("parameter must be finite, got {re} + {im}i")));
        }
        *out = Box::into_raw(Box::new(JtMap(PolyMap::quadratic(Complex64::new(re, im)))));
        Ok(())
    })
}

/// # Safety
/// `map` must be null or a handle from `jt_map_new_quadratic` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jt_map_free(map: *mut JtMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Hausdorff dimension of the Julia set, refining covers from `depth_min` up to
/// `depth_max` until successive depths agree to `tol`.
///
/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jt_hausdorff_dimension(
    map: *const JtMap,
    tol: f64,
    depth_min: usize,
    depth_max: usize,
    out: *mut f64,
) -> JtStatus {
    let (Some(map), false) = (map.as_ref(), out.is_null()) else {
        return null("map or out");
    };
    guard(|| {
        let opts = DimensionOptions {
            tol,
            depth_min,
            depth_max,
        };
        *out = hausdorff_dimension_with(&map.0, opts)?.delta;
        Ok(())
    })
}

/// Orbit-sum pressure `(1/n) log Σ |(f^n)'|^(-s)` over the Julia periodic points of period dividing `n`.
///
/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jt_pressure_orbits(map: *const JtMap, s: f64, n: usize, out: *mut f64) -> JtStatus {
    let (Some(map), false) = (map.as_ref(), out.is_null()) else {
        return null("map or out");
    };
    guard(|| {
        *out = pressure_orbits(&map.0, s, n)?.value;
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle; `out` receives a handle to release with `jt_cover_free`.
#[no_mangle]
pub unsafe extern "C" fn jt_cover_new(map: *const JtMap, depth: usize, out: *mut *mut JtCover) -> JtStatus {
    let (Some(map), false) = (map.as_ref(), out.is_null()) else {
        return null("map or out");
    };
    guard(|| {
        *out = Box::into_raw(Box::new(JtCover(build_markov_cover(&map.0, depth)?)));
        Ok(())
    })
}

/// # Safety
/// `cover` must be null or a handle from `jt_cover_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jt_cover_free(cover: *mut JtCover) {
    if !cover.is_null() {
        drop(Box::from_raw(cover));
    }
}

/// Number of cells, or 0 for a null handle.
///
/// # Safety
/// `cover` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jt_cover_len(cover: *const JtCover) -> usize {
    cover.as_ref().map_or(0, |c| c.0.len())
}

/// `log` of the spectral radius of the transfer matrix at exponent `s`.
///
/// # Safety
/// `cover` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jt_pressure_matrix(cover: *const JtCover, s: f64, out: *mut f64) -> JtStatus {
    let (Some(cover), false) = (cover.as_ref(), out.is_null()) else {
        return null("cover or out");
    };
    guard(|| {
        *out = pressure_matrix(&cover.0, s)?;
        Ok(())
    })
}

/// Zero of the matrix pressure on `[0, 2]` for this cover.
///
/// # Safety
/// `cover` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jt_bowen_root(cover: *const JtCover, tol: f64, out: *mut f64) -> JtStatus {
    let (Some(cover), false) = (cover.as_ref(), out.is_null()) else {
        return null("cover or out");
    };
    guard(|| {
        *out = bowen_root(&cover.0, tol)?;
        Ok(())
    })
}

/// Cycles of exact period `period`; with `julia_only` nonzero, only repelling ones.
///
/// # Safety
/// `map` must be a live handle; `out` receives a handle to release with `jt_cycle_list_free`.
#[no_mangle]
pub unsafe extern "C" fn jt_cycles(
    map: *const JtMap,
    period: usize,
    julia_only: i32,
    out: *mut *mut JtCycleList,
) -> JtStatus {
    let (Some(map), false) = (map.as_ref(), out.is_null()) else {
        return null("map or out");
    };
    guard(|| {
        *out = Box::into_raw(Box::new(JtCycleList(periodic_cycles(&map.0, period, julia_only != 0)?)));
        Ok(())
    })
}

/// # Safety
/// `list` must be null or a handle from `jt_cycles` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jt_cycle_list_free(list: *mut JtCycleList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jt_cycle_list_len(list: *const JtCycleList) -> usize {
    list.as_ref().map_or(0, |l| l.0.len())
}

/// Multiplier of cycle `index`.
///
/// # Safety
/// `list` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn jt_cycle_multiplier(
    list: *const JtCycleList,
    index: usize,
    re: *mut f64,
    im: *mut f64,
) -> JtStatus {
    let (Some(list), false) = (list.as_ref(), re.is_null() || im.is_null()) else {
        return null("list, re or im");
    };
    guard(|| {
        let cycle = list
            .0
            .get(index)
            .ok_or_else(|| Error::InvalidInput(format!("cycle index {index} out of range 0..{}", list.0.len())))?;
        let m = cycle.multiplier();
        *re = m.re;
        *im = m.im;
        Ok(())
    })
}

/// G-metric tensor `[g11, g12, g22]` at `c0 = re + i im`, orbit horizon `horizon`, step `h`.
///
/// # Safety
/// `out` must point to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn jt_g_metric(re: f64, im: f64, horizon: usize, h: f64, out: *mut f64) -> JtStatus {
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        let record = EntropyFunctionalRecord::new(Complex64::new(re, im), horizon)?;
        let g = g_metric(&record, h)?;
        *out = g.g11;
        *out.add(1) = g.g12;
        *out.add(2) = g.g22;
        Ok(())
    })
}

/// Pressure-metric tensor `[g11, g12, g22]`; fails when the Hessian and variance routes disagree.
///
/// # Safety
/// `out` must point to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn jt_pressure_metric(re: f64, im: f64, horizon: usize, h: f64, out: *mut f64) -> JtStatus {
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        let record = EntropyFunctionalRecord::new(Complex64::new(re, im), horizon)?;
        let g = pressure_metric(&record, h)?;
        *out = g.g11;
        *out.add(1) = g.g12;
        *out.add(2) = g.g22;
        Ok(())
    })
}

/// Running infimum of `(1/n)|dλ/dc|/|λ|` over Julia cycles of period up to `n_max`.
/// `holds` is set to 1 when the condition holds up to the horizon and 0 otherwise.
///
/// # Safety
/// `inf` and `holds` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn jt_critical_condition(
    re: f64,
    im: f64,
    n_max: usize,
    inf: *mut f64,
    holds: *mut i32,
) -> JtStatus {
    if inf.is_null() || holds.is_null() {
        return null("inf or holds");
    }
    guard(|| {
        let r = critical_condition(Complex64::new(re, im), n_max)?;
        *inf = r.running_inf.last().copied().unwrap_or(f64::INFINITY);
        *holds = matches!(r.verdict, juliathermo::report::ConditionVerdict::ConditionHoldsUpToHorizon) as i32;
        Ok(())
    })
}
