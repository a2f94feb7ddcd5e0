//! C interface to the solver. Instances are opaque handles created from instance JSON;
//! every call returns a `DsnStatus` and leaves details in a thread-local message.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dsn_core::classify::{in_c_lambda_delta, in_c_star};
use dsn_core::cli;
use dsn_core::dp::{default_omega, oracle_cost, solve_dp};
use dsn_core::graph::{Pattern, WeightedDigraph};
use dsn_core::io::{parse_instance, to_json, SolutionDocument};
use dsn_core::DsnError;

/// Result codes; 1 to 4 agree with the exit codes of the `dsn` command.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsnStatus {
    Ok = 0,
    Infeasible = 1,
    ParseError = 2,
    InvalidArgument = 3,
    LimitExceeded = 4,
    NullPointer = 5,
    Panic = 6,
}

/// A parsed host graph with its demand pattern.
pub struct DsnInstance {
    graph: WeightedDigraph,
    pattern: Pattern,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &DsnError) -> DsnStatus {
    match e.exit_code() {
        1 => DsnStatus::Infeasible,
        2 => DsnStatus::ParseError,
        4 => DsnStatus::LimitExceeded,
        _ => DsnStatus::InvalidArgument,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), (DsnStatus, String)>) -> DsnStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsnStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DsnStatus::Panic
        }
    }
}

fn fail(e: DsnError) -> (DsnStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DsnStatus, String) {
    (DsnStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (DsnStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (DsnStatus::ParseError, format!("`{what}` is not UTF-8")))
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message describing the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn dsn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses instance JSON into a new handle stored in `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsn_instance_from_json(json: *const c_char, out: *mut *mut DsnInstance) -> DsnStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let doc = parse_instance(text(json, "json")?).map_err(fail)?;
        let (graph, pattern) = doc.to_instance().map_err(fail)?;
        *out = Box::into_raw(Box::new(DsnInstance { graph, pattern }));
        Ok(())
    })
}

/// # Safety
/// `inst` must be NULL or a handle from `dsn_instance_from_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsn_instance_free(inst: *mut DsnInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dsn_instance_vertex_count(inst: *const DsnInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.graph.vertex_count())
}

/// # Safety
/// `inst` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn dsn_instance_edge_count(inst: *const DsnInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.graph.edge_count())
}

/// Optimum cost by exhaustive search.
///
/// # Safety
/// `inst` must be a live handle and `cost` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsn_oracle_cost(inst: *const DsnInstance, cost: *mut u64) -> DsnStatus {
    guarded(|| {
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        if cost.is_null() {
            return Err(null("cost"));
        }
        match oracle_cost(&inst.graph, &inst.pattern).map_err(fail)? {
            Some(c) => {
                *cost = c;
                Ok(())
            }
            None => Err((DsnStatus::Infeasible, "some demand is unreachable".into())),
        }
    })
}

/// Optimum by the dynamic program with treewidth bound `omega` (0 picks the default).
/// On success `*solution_json` holds `{"cost":..,"edges":[..]}`, to be released with
/// `dsn_string_free`; `solution_json` may be NULL.
///
/// # Safety
/// `inst` must be a live handle; `cost` a valid pointer; `solution_json` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn dsn_solve(
    inst: *const DsnInstance,
    omega: usize,
    cost: *mut u64,
    solution_json: *mut *mut c_char,
) -> DsnStatus {
    guarded(|| {
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        if cost.is_null() {
            return Err(null("cost"));
        }
        if !solution_json.is_null() {
            *solution_json = ptr::null_mut();
        }
        let omega = if omega == 0 {
            default_omega(&inst.graph, &inst.pattern).map_err(fail)?
        } else {
            omega
        };
        let sol = solve_dp(&inst.graph, &inst.pattern, omega)
            .map_err(fail)?
            .ok_or_else(|| {
                (
                    DsnStatus::Infeasible,
                    format!("no solution of treewidth at most {omega}"),
                )
            })?;
        *cost = sol.cost;
        if !solution_json.is_null() {
            *solution_json = into_c(to_json(&SolutionDocument::from_network(&sol.network)));
        }
        Ok(())
    })
}

/// Sets `*member` to 1 when the pattern lies in C_{λ,δ} (C*_{λ,δ} if `star`), else 0.
///
/// # Safety
/// `inst` must be a live handle and `member` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsn_classify(
    inst: *const DsnInstance,
    lambda: usize,
    delta: usize,
    star: bool,
    member: *mut i32,
) -> DsnStatus {
    guarded(|| {
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        if member.is_null() {
            return Err(null("member"));
        }
        let cert = if star {
            in_c_star(&inst.pattern, lambda, delta)
        } else {
            in_c_lambda_delta(&inst.pattern, lambda, delta)
        }
        .map_err(fail)?;
        *member = i32::from(cert.is_some());
        Ok(())
    })
}

/// Runs the `dsn` command line on the arguments `argv[0..argc]` (no program name) and
/// returns its exit code. The captured streams go to `*out` and `*err` when those are
/// not NULL; release them with `dsn_string_free`.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `out` and `err` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn dsn_run(
    argc: usize,
    argv: *const *const c_char,
    out: *mut *mut c_char,
    err: *mut *mut c_char,
) -> i32 {
    let mut code = 0;
    let status = guarded(|| {
        if argv.is_null() && argc > 0 {
            return Err(null("argv"));
        }
        let mut args = vec!["dsn".to_string()];
        for i in 0..argc {
            args.push(text(*argv.add(i), "argv")?.to_string());
        }
        let o = cli::run(args);
        code = o.code;
        if !out.is_null() {
            *out = into_c(o.stdout);
        }
        if !err.is_null() {
            *err = into_c(o.stderr);
        }
        Ok(())
    });
    if status == DsnStatus::Ok {
        code
    } else {
        status as i32
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
