//! C ABI for the laboratory.
//!
//! Every fallible call returns a [`CilStatus`]. On failure the message is available from
//! [`cil_last_error`] on the same thread until the next failing call. Strings returned to
//! the caller are owned by the caller and released with [`cil_string_free`]; handles are
//! released with their own `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cilab::cli::config::ToyConfig;
use cilab::cli::{self, Cli, EXIT_CONFIG, EXIT_GATE, EXIT_PASS};
use cilab::toy_ci::{lemma_bound_holds, to_f64, toy_run, PiecewiseConstantFn, Schedule, ToyTrajectory};
use cilab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CilStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Computation = 4,
    GateFailure = 5,
    Panic = 6,
}

/// Result of one exact toy run.
pub struct CilToy {
    traj: ToyTrajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: CilStatus, msg: impl Into<String>) -> CilStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> CilStatus {
    let status = match e {
        Error::Config(_) | Error::Parse { .. } | Error::Symbol(_) | Error::Type(_) => CilStatus::Config,
        _ => CilStatus::Computation,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> CilStatus) -> CilStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CilStatus::Panic, msg)
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, CilStatus> {
    if p.is_null() {
        return Err(fail(CilStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CilStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn give_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cil_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failing call on this thread, or null. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cil_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|s| s.as_ptr()).unwrap_or(ptr::null()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cil_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs one `cil` subcommand without writing to stdout. `argv` excludes the program name.
/// Artifacts named in the arguments are written as on the command line. On success
/// `*manifest_json` receives the manifest and the status is `Ok` or `GateFailure`.
///
/// # Safety
/// `argv` must point to `argc` valid NUL-terminated strings; `manifest_json` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cil_run(
    argc: usize,
    argv: *const *const c_char,
    manifest_json: *mut *mut c_char,
) -> CilStatus {
    guarded(|| {
        if manifest_json.is_null() || (argc > 0 && argv.is_null()) {
            return fail(CilStatus::NullPointer, "argv or manifest_json is null");
        }
        *manifest_json = ptr::null_mut();
        let mut args = vec!["cil".to_string()];
        for i in 0..argc {
            match read_str(*argv.add(i), "argument") {
                Ok(s) => args.push(s.to_string()),
                Err(status) => return status,
            }
        }
        let parsed = match <Cli as clap::Parser>::try_parse_from(&args) {
            Ok(c) => c,
            Err(e) => return fail(CilStatus::Config, e.render().to_string()),
        };
        let prepared = match cli::prepare(&parsed.command) {
            Ok(p) => p,
            Err(e) => return from_error(&e),
        };
        let (manifest, outcome, common) = match prepared.execute() {
            Ok(r) => r,
            Err(e) => return from_error(&e),
        };
        if let Err(e) = cli::write_outputs(&outcome, &manifest, common.manifest.as_ref()) {
            return from_error(&e);
        }
        let bytes = match manifest.to_bytes() {
            Ok(b) => b,
            Err(e) => return from_error(&e),
        };
        *manifest_json = give_string(String::from_utf8_lossy(&bytes).into_owned());
        if manifest.pass {
            CilStatus::Ok
        } else {
            fail(CilStatus::GateFailure, format!("gate failures: {}", manifest.failures.join(", ")))
        }
    })
}

/// Maps a status to the process exit code the `cil` binary would use.
#[no_mangle]
pub extern "C" fn cil_exit_code(status: CilStatus) -> i32 {
    match status {
        CilStatus::Ok => EXIT_PASS,
        CilStatus::GateFailure => EXIT_GATE,
        CilStatus::Config | CilStatus::InvalidArgument | CilStatus::NullPointer => EXIT_CONFIG,
        CilStatus::Computation | CilStatus::Panic => cli::EXIT_RUN,
    }
}

/// Exact toy scheme from zero with λ_k = 2^(k+shift). The ranges match `cil toy`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle for [`cil_toy_free`].
#[no_mangle]
pub unsafe extern "C" fn cil_toy_run(steps: usize, shift: u32, out: *mut *mut CilToy) -> CilStatus {
    guarded(|| {
        if out.is_null() {
            return fail(CilStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let cfg = ToyConfig { steps, shift, out: None };
        if let Err(e) = cfg.validate() {
            return from_error(&e);
        }
        match toy_run(&PiecewiseConstantFn::zero(), &Schedule::Dyadic { shift }, steps) {
            Ok(traj) => {
                *out = Box::into_raw(Box::new(CilToy { traj }));
                CilStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Number of defects held, steps + 1.
///
/// # Safety
/// `toy` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cil_toy_len(toy: *const CilToy) -> usize {
    toy.as_ref().map(|t| t.traj.defects.len()).unwrap_or(0)
}

/// Defect after step `k` as a double.
///
/// # Safety
/// `toy` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cil_toy_defect(toy: *const CilToy, k: usize, value: *mut f64) -> CilStatus {
    let (Some(t), false) = (toy.as_ref(), value.is_null()) else {
        return fail(CilStatus::NullPointer, "toy or value is null");
    };
    match t.traj.defects.get(k) {
        Some(d) => {
            *value = to_f64(d);
            CilStatus::Ok
        }
        None => fail(CilStatus::InvalidArgument, format!("step {k} out of range")),
    }
}

/// Defect after step `k` as an exact fraction "p/q"; free with [`cil_string_free`].
///
/// # Safety
/// `toy` must be a live handle and `text` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cil_toy_defect_exact(toy: *const CilToy, k: usize, text: *mut *mut c_char) -> CilStatus {
    let (Some(t), false) = (toy.as_ref(), text.is_null()) else {
        return fail(CilStatus::NullPointer, "toy or text is null");
    };
    match t.traj.defects.get(k) {
        Some(d) => {
            *text = give_string(d.to_string());
            CilStatus::Ok
        }
        None => fail(CilStatus::InvalidArgument, format!("step {k} out of range")),
    }
}

/// Whether every step obeys the one-step defect bound; 1 yes, 0 no, -1 null handle.
///
/// # Safety
/// `toy` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cil_toy_lemma_holds(toy: *const CilToy) -> i32 {
    match toy.as_ref() {
        Some(t) => lemma_bound_holds(&t.traj) as i32,
        None => -1,
    }
}

/// # Safety
/// `toy` must be null or a handle from [`cil_toy_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cil_toy_free(toy: *mut CilToy) {
    if !toy.is_null() {
        drop(Box::from_raw(toy));
    }
}
