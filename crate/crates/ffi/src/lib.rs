//! C ABI over `volprod`.
//!
//! Every function returns a [`VpStatus`] and writes results through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`vp_last_error_message`]. Handles created by `*_new` / computing
//! functions must be released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use volprod::engine::{ProductEval, TailMode, TruncationPolicy};
use volprod::identities::{
    corollary1_check, corollary2_check_corrected, corollary2_check_printed, remark_product,
    RemarkVariant, Verdict,
};
use volprod::{special, volume, Error, IdentityReport};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Divergence = 3,
    Overflow = 4,
    Policy = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpTailMode {
    None = 0,
    FirstOrder = 1,
    Richardson = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpVerdict {
    Verified = 0,
    Falsified = 1,
    Diverges = 2,
}

/// Closed-form product identities at `p = 2`, indexed by `m >= 1`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpIdentity {
    EvenProduct = 0,
    OddPrinted = 1,
    OddCorrected = 2,
    RatioPrinted = 3,
    RatioCorrected = 4,
}

/// Opaque truncation policy.
pub struct VpPolicy(TruncationPolicy);

/// Opaque product evaluation.
pub struct VpProductEval(ProductEval);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VpProductSummary {
    pub value: f64,
    pub log_value: f64,
    pub log_bracket_lo: f64,
    pub log_bracket_hi: f64,
    pub tail_estimate: f64,
    pub terms_used: u64,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VpIdentityResult {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub verdict: VpVerdict,
    /// 0 when not reported.
    pub terms_used: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: Error) -> VpStatus {
    let status = match &e {
        Error::Domain { .. } => VpStatus::Domain,
        Error::DivergenceSuspected(_) => VpStatus::Divergence,
        Error::Overflow { .. } => VpStatus::Overflow,
        Error::Policy(_) => VpStatus::Policy,
    };
    set_error(e.to_string());
    status
}

fn guard<F>(f: F) -> VpStatus
where
    F: FnOnce() -> Result<(), VpStatus>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside volprod".into());
            VpStatus::Panic
        }
    }
}

fn null() -> VpStatus {
    set_error("null pointer argument".into());
    VpStatus::NullPointer
}

/// Writes `v` through `out`, which must be non-null.
unsafe fn put<T>(out: *mut T, v: T) -> Result<(), VpStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

/// Null selects the default policy.
unsafe fn policy_or_default(p: *const VpPolicy) -> TruncationPolicy {
    if p.is_null() {
        TruncationPolicy::default()
    } else {
        (*p).0
    }
}

/// Last error message on this thread, or null. Valid until the next call
/// into this library on the same thread.
#[no_mangle]
pub extern "C" fn vp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_policy_new(
    max_terms: u64,
    rel_tol: f64,
    tail: VpTailMode,
    out: *mut *mut VpPolicy,
) -> VpStatus {
    guard(|| {
        let mode = match tail {
            VpTailMode::None => TailMode::None,
            VpTailMode::FirstOrder => TailMode::FirstOrder,
            VpTailMode::Richardson => TailMode::Richardson,
        };
        if out.is_null() {
            return Err(null());
        }
        let policy = TruncationPolicy::new(max_terms, rel_tol, mode).map_err(status_of)?;
        put(out, Box::into_raw(Box::new(VpPolicy(policy))))
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_policy_default(out: *mut *mut VpPolicy) -> VpStatus {
    guard(|| put(out, Box::into_raw(Box::new(VpPolicy(TruncationPolicy::default())))))
}

/// # Safety
/// `policy` must be null or come from `vp_policy_new` / `vp_policy_default`.
#[no_mangle]
pub unsafe extern "C" fn vp_policy_free(policy: *mut VpPolicy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

/// # Safety
/// `policy` must be a live handle; out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_policy_get(
    policy: *const VpPolicy,
    max_terms: *mut u64,
    rel_tol: *mut f64,
    tail: *mut VpTailMode,
) -> VpStatus {
    guard(|| {
        if policy.is_null() {
            return Err(null());
        }
        let p = (*policy).0;
        put(max_terms, p.max_terms)?;
        put(rel_tol, p.rel_tol)?;
        put(
            tail,
            match p.tail_mode {
                TailMode::None => VpTailMode::None,
                TailMode::FirstOrder => VpTailMode::FirstOrder,
                TailMode::Richardson => VpTailMode::Richardson,
            },
        )
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_log_gamma(x: f64, out: *mut f64) -> VpStatus {
    guard(|| put(out, special::log_gamma(x).map_err(status_of)?))
}

/// `|B_p^n|`; pass `INFINITY` for the cube.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_ball_volume(n: u32, p: f64, out: *mut f64) -> VpStatus {
    guard(|| {
        let spec = volume::BallSpec::new(n, p).map_err(status_of)?;
        put(out, volume::ball_volume(&spec).map_err(status_of)?)
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_mprod_gamma(n: u32, p: f64, out: *mut f64) -> VpStatus {
    guard(|| put(out, volume::mprod_gamma(n, p).map_err(status_of)?))
}

/// `h(p) = Γ(1 + 1/p) Γ(1 + 1/q)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_h(p: f64, out: *mut f64) -> VpStatus {
    guard(|| put(out, volume::h_func(p).map_err(status_of)?))
}

unsafe fn eval_handle(
    out: *mut *mut VpProductEval,
    f: impl FnOnce() -> volprod::Result<ProductEval>,
) -> Result<(), VpStatus> {
    if out.is_null() {
        return Err(null());
    }
    let e = f().map_err(status_of)?;
    put(out, Box::into_raw(Box::new(VpProductEval(e))))
}

/// Gamma-free product route for `M(n, p)`. `policy` may be null.
///
/// # Safety
/// `policy` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_mprod_product(
    n: u32,
    p: f64,
    policy: *const VpPolicy,
    out: *mut *mut VpProductEval,
) -> VpStatus {
    guard(|| {
        let pol = policy_or_default(policy);
        eval_handle(out, || volume::mprod_product(n, p, &pol))
    })
}

/// `prod k(k+x-1) / ((k-a)(k+x+a-1))`. `policy` may be null.
///
/// # Safety
/// `policy` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_p_product(
    x: f64,
    a: f64,
    policy: *const VpPolicy,
    out: *mut *mut VpProductEval,
) -> VpStatus {
    guard(|| {
        let pol = policy_or_default(policy);
        eval_handle(out, || volume::p_product(x, a, &pol))
    })
}

/// `s_n`, which equals `1/n!`. `policy` may be null.
///
/// # Safety
/// `policy` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_s_product(
    n: u32,
    policy: *const VpPolicy,
    out: *mut *mut VpProductEval,
) -> VpStatus {
    guard(|| {
        let pol = policy_or_default(policy);
        eval_handle(out, || volume::s_product(n, &pol))
    })
}

/// # Safety
/// `eval` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_product_eval_get(
    eval: *const VpProductEval,
    out: *mut VpProductSummary,
) -> VpStatus {
    guard(|| {
        if eval.is_null() {
            return Err(null());
        }
        let e = &(*eval).0;
        put(
            out,
            VpProductSummary {
                value: e.value,
                log_value: e.log_value,
                log_bracket_lo: e.error_bracket.0,
                log_bracket_hi: e.error_bracket.1,
                tail_estimate: e.tail_estimate,
                terms_used: e.terms_used,
                converged: e.converged,
            },
        )
    })
}

/// # Safety
/// `eval` must be null or a handle returned by this library.
#[no_mangle]
pub unsafe extern "C" fn vp_product_eval_free(eval: *mut VpProductEval) {
    if !eval.is_null() {
        drop(Box::from_raw(eval));
    }
}

fn identity_result(r: IdentityReport) -> VpIdentityResult {
    VpIdentityResult {
        lhs: r.lhs,
        rhs: r.rhs,
        abs_dev: r.abs_dev,
        rel_dev: r.rel_dev,
        verdict: match r.verdict {
            Verdict::Verified => VpVerdict::Verified,
            Verdict::Falsified => VpVerdict::Falsified,
            Verdict::Diverges => VpVerdict::Diverges,
        },
        terms_used: r.terms_used.unwrap_or(0),
    }
}

/// Checks one identity numerically. A divergent product is reported through
/// `verdict`, not as an error status. `policy` may be null.
///
/// # Safety
/// `policy` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vp_identity_check(
    identity: VpIdentity,
    m: u32,
    policy: *const VpPolicy,
    out: *mut VpIdentityResult,
) -> VpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let pol = policy_or_default(policy);
        let report = match identity {
            VpIdentity::EvenProduct => corollary1_check(m, &pol),
            VpIdentity::OddPrinted => corollary2_check_printed(m, &pol),
            VpIdentity::OddCorrected => corollary2_check_corrected(m, &pol),
            VpIdentity::RatioPrinted => remark_product(m, RemarkVariant::Printed, &pol),
            VpIdentity::RatioCorrected => remark_product(m, RemarkVariant::Corrected, &pol),
        }
        .map_err(status_of)?;
        put(out, identity_result(report))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn error_message_is_set_and_cleared() {
        let mut v = 0.0;
        let s = unsafe { vp_log_gamma(-1.0, &mut v) };
        assert_eq!(s, VpStatus::Domain);
        let msg = unsafe { CStr::from_ptr(vp_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("log_gamma"));
        assert_eq!(unsafe { vp_log_gamma(1.0, &mut v) }, VpStatus::Ok);
        assert!(vp_last_error_message().is_null());
    }

    #[test]
    fn null_out_pointer() {
        assert_eq!(unsafe { vp_h(1.5, ptr::null_mut()) }, VpStatus::NullPointer);
    }
}
