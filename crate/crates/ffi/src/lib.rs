//! C ABI for hurwitz-tr. Curves and recursion engines are opaque handles;
//! every call returns an [`HtStatus`] and hands results back as JSON strings
//! that the caller frees with [`ht_string_free`]. The message for the last
//! failure on the calling thread is available from [`ht_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hurwitz_tr::algebra::rational::{fmt_q, parse_q};
use hurwitz_tr::curve::{CurveConfig, SpectralCurve};
use hurwitz_tr::hurwitz::{connected_weighted_hurwitz, weighted_hurwitz};
use hurwitz_tr::symfun::{Partition, Weight};
use hurwitz_tr::toprec::{oracle_check, TopRec};
use hurwitz_tr::verify::{run_all, run_suite, Caps};
use hurwitz_tr::Error;
use serde_json::json;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed input: JSON, rationals, partitions, caps.
    Parse = 3,
    /// Well-formed input the library does not accept, such as LM <= 1.
    Invalid = 4,
    /// A cross-check or verification suite failed; the JSON is still returned.
    CheckFailed = 5,
    /// Any other library error, or a caught panic.
    Internal = 6,
}

/// Opaque spectral curve.
pub struct HtCurve(SpectralCurve);

/// Opaque recursion engine; memoises ω_{g,n} across calls.
pub struct HtRecursion(TopRec);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HtStatus {
    match e {
        Error::Parse(_) | Error::SizeMismatch(..) | Error::TrivialProfile | Error::CapExceeded(_) => HtStatus::Parse,
        Error::Invalid(_) | Error::DegenerateModel | Error::NonSimpleRamification => HtStatus::Invalid,
        Error::CrossCheckFailure(_) | Error::InconsistentDefinitions(_) => HtStatus::CheckFailed,
        _ => HtStatus::Internal,
    }
}

struct Fail(HtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<HtStatus, Fail>) -> HtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("panic inside hurwitz-tr");
            HtStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(HtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(HtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write_json(out: *mut *mut c_char, v: &serde_json::Value) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(HtStatus::NullPointer, "output pointer is null".into()));
    }
    let s = serde_json::to_string(v).map_err(|e| Fail(HtStatus::Internal, e.to_string()))?;
    *out = CString::new(s).map_err(|e| Fail(HtStatus::Internal, e.to_string()))?.into_raw();
    Ok(())
}

fn partition(s: &str) -> Result<Partition, Fail> {
    let parts = s
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| Fail(HtStatus::Parse, format!("bad partition {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Partition::new(parts))
}

/// Message for the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ht_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned through an `out` parameter.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ht_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a curve from a JSON config such as
/// `{"G":["1","1"],"S":["0","0","1/2"],"gamma":"1"}`.
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_curve_new(config: *const c_char, out: *mut *mut HtCurve) -> HtStatus {
    guard(|| {
        let text = str_arg(config, "config")?;
        if out.is_null() {
            return Err(Fail(HtStatus::NullPointer, "output pointer is null".into()));
        }
        let c = SpectralCurve::from_config(&CurveConfig::from_json(text)?)?;
        *out = Box::into_raw(Box::new(HtCurve(c)));
        Ok(HtStatus::Ok)
    })
}

/// # Safety
/// `c` must come from [`ht_curve_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ht_curve_free(c: *mut HtCurve) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// X, Y, φ and branch data as JSON, polynomials as ascending coefficients.
///
/// # Safety
/// `c` must be a live curve handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_curve_json(c: *const HtCurve, out: *mut *mut c_char) -> HtStatus {
    guard(|| {
        let c = &c.as_ref().ok_or(Fail(HtStatus::NullPointer, "curve is null".into()))?.0;
        let qs = |v: &[hurwitz_tr::algebra::Q]| v.iter().map(fmt_q).collect::<Vec<_>>();
        let v = json!({
            "G": qs(&c.g), "s": qs(&c.s), "gamma": fmt_q(&c.gamma),
            "X": c.x, "Y": c.y, "phi": c.phi, "LM": c.lm(), "branch": c.branch,
        });
        write_json(out, &v)?;
        Ok(HtStatus::Ok)
    })
}

/// A recursion engine for a copy of the curve. The curve handle stays owned
/// by the caller.
///
/// # Safety
/// `c` must be a live curve handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_recursion_new(c: *const HtCurve, out: *mut *mut HtRecursion) -> HtStatus {
    guard(|| {
        let c = &c.as_ref().ok_or(Fail(HtStatus::NullPointer, "curve is null".into()))?.0;
        if out.is_null() {
            return Err(Fail(HtStatus::NullPointer, "output pointer is null".into()));
        }
        *out = Box::into_raw(Box::new(HtRecursion(TopRec::new(c.clone()))));
        Ok(HtStatus::Ok)
    })
}

/// # Safety
/// `r` must come from [`ht_recursion_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ht_recursion_free(r: *mut HtRecursion) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// ω_{g,n} as JSON `{g, n, numerator, denominator, variables}`.
///
/// # Safety
/// `r` must be a live engine handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_recursion_omega(r: *const HtRecursion, g: u32, n: u32, out: *mut *mut c_char) -> HtStatus {
    guard(|| {
        let tr = &r.as_ref().ok_or(Fail(HtStatus::NullPointer, "engine is null".into()))?.0;
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Err(Fail(HtStatus::Invalid, format!("(g, n) = ({g}, {n}) is not stable")));
        }
        let om = tr.omega(g, n as usize)?;
        write_json(out, &json!(om.to_json(tr.phi_hat())))?;
        Ok(HtStatus::Ok)
    })
}

/// Coefficients of F̃_{g,n} from ω_{g,n} through |μ| ≤ order, compared with
/// the enumeration oracle. Returns `CheckFailed` (with the JSON) on disagreement.
///
/// # Safety
/// `r` must be a live engine handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_recursion_hurwitz(r: *const HtRecursion, g: u32, n: u32, order: u32, out: *mut *mut c_char) -> HtStatus {
    guard(|| {
        let tr = &r.as_ref().ok_or(Fail(HtStatus::NullPointer, "engine is null".into()))?.0;
        if n == 0 || (2 * g as i64 - 2 + n as i64) < 0 {
            return Err(Fail(HtStatus::Invalid, format!("(g, n) = ({g}, {n}) has no correlator")));
        }
        let h = oracle_check(tr, g, n as usize, order as i32)?;
        write_json(out, &json!(h))?;
        Ok(if h.agrees { HtStatus::Ok } else { HtStatus::CheckFailed })
    })
}

/// Rows `{mu, nu, d, value, genus, connected}` of H^d_G(μ, ν) for d ≤ dmax.
/// `g` lists g_1,…,g_M comma-separated; `mu` and `nu` list parts.
///
/// # Safety
/// All strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_hurwitz(
    g: *const c_char,
    mu: *const c_char,
    nu: *const c_char,
    dmax: u32,
    connected: bool,
    out: *mut *mut c_char,
) -> HtStatus {
    guard(|| {
        let gs = str_arg(g, "G")?.split(',').map(|x| parse_q(x.trim())).collect::<hurwitz_tr::Result<Vec<_>>>()?;
        let (mu, nu) = (partition(str_arg(mu, "mu")?)?, partition(str_arg(nu, "nu")?)?);
        let w = Weight::numeric(&gs);
        let t = if connected { connected_weighted_hurwitz(&w, &mu, &nu, dmax)? } else { weighted_hurwitz(&w, &mu, &nu, dmax)? };
        write_json(out, &json!(t.rows()))?;
        Ok(HtStatus::Ok)
    })
}

/// Runs a verification suite (or `all`) with the default caps and the
/// environment overrides. Returns `CheckFailed` when any check fails; the
/// report is written either way.
///
/// # Safety
/// `suite` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_verify(suite: *const c_char, seed: u64, out: *mut *mut c_char) -> HtStatus {
    guard(|| {
        let suite = str_arg(suite, "suite")?;
        let caps = Caps::from_env()?;
        let (v, ok) = if suite == "all" {
            let r = run_all(&caps, seed)?;
            (json!(r), r.residual_zero)
        } else {
            let r = run_suite(suite, &caps, seed)?;
            (json!(r), r.residual_zero)
        };
        write_json(out, &v)?;
        Ok(if ok { HtStatus::Ok } else { HtStatus::CheckFailed })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_arguments_are_reported() {
        let mut c = ptr::null_mut();
        assert_eq!(unsafe { ht_curve_new(ptr::null(), &mut c) }, HtStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(ht_last_error()) }.to_str().unwrap();
        assert_eq!(msg, "config is null");
        assert_eq!(unsafe { ht_curve_json(ptr::null(), ptr::null_mut()) }, HtStatus::NullPointer);
    }

    #[test]
    fn error_codes_follow_the_error_kind() {
        assert_eq!(status_of(&Error::Parse("x".into())), HtStatus::Parse);
        assert_eq!(status_of(&Error::DegenerateModel), HtStatus::Invalid);
        assert_eq!(status_of(&Error::ZeroDivisor), HtStatus::Internal);
    }
}
