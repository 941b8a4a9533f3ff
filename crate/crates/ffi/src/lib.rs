//! C ABI for the dcvortex library.
//!
//! Every fallible entry point returns a [`DcvStatus`]; on failure the message
//! is kept per thread and can be fetched with [`dcv_last_error_message`].
//! Strings handed out by this library must be released with
//! [`dcv_string_free`], sessions with [`dcv_session_free`].

use dcvortex::cli::commands::{cmd_solve, cmd_stability, cmd_verify_hk, cmd_verify_reduction};
use dcvortex::cli::config::RunConfig;
use dcvortex::cli::report::Report;
use dcvortex::reduction::{deg_p1, fs_contraction_constant};
use dcvortex::stability::{theta_tau, QuadInvariants};
use dcvortex::Error;
use num::{BigInt, BigRational, ToPrimitive};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    /// Shape, form-type, domain, constraint or resolution errors.
    Numerical = 4,
    Io = 5,
    /// Result does not fit the C representation (e.g. i64 overflow).
    Overflow = 6,
    /// No report yet: run a command first.
    NoResult = 7,
    Panic = 99,
}

/// Which command a session runs.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcvCommand {
    Solve = 0,
    Stability = 1,
    VerifyReduction = 2,
    VerifyHk = 3,
}

/// Opaque handle holding a parsed run configuration and the last report.
pub struct DcvSession {
    text: String,
    config: RunConfig,
    report: Option<Report>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> DcvStatus {
    match e {
        Error::Invalid(_) => DcvStatus::InvalidArgument,
        Error::Config(_) => DcvStatus::Config,
        Error::Io(_) => DcvStatus::Io,
        Error::FormType { .. } | Error::Shape(_) | Error::Domain(_) | Error::Constraint(_) | Error::Resolution(_) => {
            DcvStatus::Numerical
        }
    }
}

fn fail(status: DcvStatus, msg: impl Into<String>) -> DcvStatus {
    set_error(msg);
    status
}

fn from_lib(e: Error) -> DcvStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, turning panics into [`DcvStatus::Panic`].
fn guard(f: impl FnOnce() -> DcvStatus) -> DcvStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(DcvStatus::Panic, msg)
        }
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn dcv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or NULL if none.
/// Free with [`dcv_string_free`].
#[no_mangle]
pub extern "C" fn dcv_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|s| s.clone().into_raw()).unwrap_or(ptr::null_mut()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn dcv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Numerical degree of O(n) on P¹ with its Fubini–Study metric.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn dcv_deg_p1(n: i32, out: *mut f64) -> DcvStatus {
    guard(|| {
        if out.is_null() {
            return fail(DcvStatus::NullPointer, "out is null");
        }
        match deg_p1(n) {
            Ok(d) => {
                *out = d;
                DcvStatus::Ok
            }
            Err(e) => from_lib(e),
        }
    })
}

/// The Fubini–Study contraction constant (real and imaginary parts).
///
/// # Safety
/// Both pointers must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn dcv_fs_contraction_constant(re: *mut f64, im: *mut f64) -> DcvStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return fail(DcvStatus::NullPointer, "output pointer is null");
        }
        let c = fs_contraction_constant();
        *re = c.re;
        *im = c.im;
        DcvStatus::Ok
    })
}

/// Ranks and degrees of a quadruplet, as passed across the ABI.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DcvInvariants {
    pub r1: u32,
    pub r2: u32,
    pub d1: i64,
    pub d2: i64,
}

impl From<DcvInvariants> for QuadInvariants {
    fn from(v: DcvInvariants) -> QuadInvariants {
        QuadInvariants::new(v.r1, v.r2, v.d1, v.d2)
    }
}

/// Exact Θ_τ(sub) relative to `ambient` for τ = tau_num/tau_den, returned
/// as a reduced fraction with positive denominator.
///
/// # Safety
/// `out_num` and `out_den` must be valid for a write of one `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn dcv_theta_tau(
    sub: DcvInvariants,
    ambient: DcvInvariants,
    tau_num: i64,
    tau_den: i64,
    out_num: *mut i64,
    out_den: *mut i64,
) -> DcvStatus {
    guard(|| {
        if out_num.is_null() || out_den.is_null() {
            return fail(DcvStatus::NullPointer, "output pointer is null");
        }
        if tau_den == 0 {
            return fail(DcvStatus::InvalidArgument, "tau denominator is zero");
        }
        let tau = BigRational::new(BigInt::from(tau_num), BigInt::from(tau_den));
        let t = match theta_tau(&sub.into(), &ambient.into(), &tau) {
            Ok(t) => t,
            Err(e) => return from_lib(e),
        };
        match (t.numer().to_i64(), t.denom().to_i64()) {
            (Some(n), Some(d)) => {
                *out_num = n;
                *out_den = d;
                DcvStatus::Ok
            }
            _ => fail(DcvStatus::Overflow, format!("{t} does not fit in int64")),
        }
    })
}

/// Parse a TOML run configuration into a new session.
///
/// # Safety
/// `config_toml` must be a valid NUL-terminated UTF-8 string and `out`
/// valid for a write of one pointer.
#[no_mangle]
pub unsafe extern "C" fn dcv_session_new(config_toml: *const c_char, out: *mut *mut DcvSession) -> DcvStatus {
    guard(|| {
        if config_toml.is_null() || out.is_null() {
            return fail(DcvStatus::NullPointer, "argument is null");
        }
        *out = ptr::null_mut();
        let text = match CStr::from_ptr(config_toml).to_str() {
            Ok(t) => t.to_owned(),
            Err(e) => return fail(DcvStatus::InvalidArgument, format!("config is not UTF-8: {e}")),
        };
        let config = match RunConfig::from_toml(&text) {
            Ok(c) => c,
            Err(e) => return from_lib(e),
        };
        *out = Box::into_raw(Box::new(DcvSession { text, config, report: None }));
        DcvStatus::Ok
    })
}

/// Run `command` and keep its report. Files are not written.
///
/// # Safety
/// `session` must come from [`dcv_session_new`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn dcv_session_run(session: *mut DcvSession, command: DcvCommand) -> DcvStatus {
    guard(|| {
        let Some(s) = session.as_mut() else {
            return fail(DcvStatus::NullPointer, "session is null");
        };
        let run = match command {
            DcvCommand::Solve => cmd_solve,
            DcvCommand::Stability => cmd_stability,
            DcvCommand::VerifyReduction => cmd_verify_reduction,
            DcvCommand::VerifyHk => cmd_verify_hk,
        };
        match run(&s.config, &s.text) {
            Ok(o) => {
                s.report = Some(o.report);
                DcvStatus::Ok
            }
            Err(e) => from_lib(e),
        }
    })
}

/// Whether every check of the last report passed.
///
/// # Safety
/// `session` must be live; `out` valid for a write of one `bool`.
#[no_mangle]
pub unsafe extern "C" fn dcv_session_passed(session: *const DcvSession, out: *mut bool) -> DcvStatus {
    guard(|| {
        let (Some(s), false) = (session.as_ref(), out.is_null()) else {
            return fail(DcvStatus::NullPointer, "argument is null");
        };
        match &s.report {
            Some(r) => {
                *out = r.passed;
                DcvStatus::Ok
            }
            None => fail(DcvStatus::NoResult, "no command has been run"),
        }
    })
}

/// The last report as JSON. Free the string with [`dcv_string_free`].
///
/// # Safety
/// `session` must be live; `out` valid for a write of one pointer.
#[no_mangle]
pub unsafe extern "C" fn dcv_session_report_json(session: *const DcvSession, out: *mut *mut c_char) -> DcvStatus {
    guard(|| {
        let (Some(s), false) = (session.as_ref(), out.is_null()) else {
            return fail(DcvStatus::NullPointer, "argument is null");
        };
        *out = ptr::null_mut();
        let Some(r) = &s.report else {
            return fail(DcvStatus::NoResult, "no command has been run");
        };
        match r.to_json() {
            Ok(j) => {
                *out = into_c_string(j);
                DcvStatus::Ok
            }
            Err(e) => from_lib(e),
        }
    })
}

/// # Safety
/// `session` must be NULL or come from [`dcv_session_new`], freed at most once.
#[no_mangle]
pub unsafe extern "C" fn dcv_session_free(session: *mut DcvSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}
