//! C ABI over `cmdp-core`.
//!
//! Problems and solutions are opaque handles created and freed through this
//! API. Every fallible call returns a [`CmdpStatus`]; on failure the message
//! is available from [`cmdp_last_error`] on the same thread until the next
//! failing call. Strings handed out by the library must be released with
//! [`cmdp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use cmdp_core::evaluator::evaluate_exact;
use cmdp_core::io::{parse_policy, parse_problem, PolicyFile};
use cmdp_core::model::{CmdpInstance, Policy};
use cmdp_core::solve::{solve_with_method, Method, SolveOptions};
use cmdp_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmdpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed JSON, invalid instance, unknown method or bad parameter.
    InvalidInput = 3,
    /// The quality constraints cannot be met.
    Infeasible = 4,
    Timeout = 5,
    /// The method cannot handle the reward family or problem size.
    Unsupported = 6,
    /// Solver failure or caught panic.
    Internal = 7,
}

/// Loaded, validated problem instance.
pub struct CmdpProblem {
    instance: CmdpInstance,
}

/// Result of a solve.
pub struct CmdpSolution {
    label: CString,
    objective: f64,
    policy: Policy,
    vertices_total: Option<usize>,
}

/// Exact evaluation of a policy.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CmdpEvaluation {
    pub expected_return: f64,
    /// Largest constraint mass minus its bound (negative when all are slack).
    pub max_violation: f64,
    /// 1 when every constraint holds within tolerance.
    pub feasible: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> CmdpStatus {
    match e {
        Error::Infeasible(_) | Error::GreedyInfeasible { .. } => CmdpStatus::Infeasible,
        Error::Timeout | Error::IterationLimit(_) => CmdpStatus::Timeout,
        Error::UnsupportedReward(_) | Error::DimensionLimit { .. } => CmdpStatus::Unsupported,
        Error::InvalidParameter(_)
        | Error::InvalidInstance(_)
        | Error::Dimension(_)
        | Error::Json(_)
        | Error::Io { .. } => CmdpStatus::InvalidInput,
        _ => CmdpStatus::Internal,
    }
}

struct Fail(CmdpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, records any failure and converts panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CmdpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CmdpStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CmdpStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CmdpStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            CmdpStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(CmdpStatus::NullArgument, format!("{what} is null")))
}

fn out_arg<T>(p: *mut T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(CmdpStatus::NullArgument, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(CmdpStatus::Internal, "string contains NUL".into()))
}

/// Message of the last failed call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn cmdp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cmdp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a problem in the JSON problem-file format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cmdp_problem_from_json(
    json: *const c_char,
    out: *mut *mut CmdpProblem,
) -> CmdpStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let instance = parse_problem(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(CmdpProblem { instance }));
        Ok(())
    })
}

/// Number of states (decision and terminal) in the problem.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cmdp_problem_num_states(problem: *const CmdpProblem) -> usize {
    problem
        .as_ref()
        .map_or(0, |p| p.instance.space.num_states())
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmdp_problem_free(problem: *mut CmdpProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Solves with `method` (`convex`, `extreme`, `envelope`, `greedy`,
/// `naive-linear`). `timeout_seconds <= 0` means no limit.
///
/// # Safety
/// `problem` must be a live handle, `method` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cmdp_solve(
    problem: *const CmdpProblem,
    method: *const c_char,
    timeout_seconds: f64,
    out: *mut *mut CmdpSolution,
) -> CmdpStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let problem = ref_arg(problem, "problem")?;
        let method = Method::parse(str_arg(method, "method")?)?;
        let opts = SolveOptions {
            timeout: (timeout_seconds > 0.0).then(|| Duration::from_secs_f64(timeout_seconds)),
            ..SolveOptions::default()
        };
        let sol = solve_with_method(&problem.instance, method, &opts)?;
        *out = Box::into_raw(Box::new(CmdpSolution {
            label: CString::new(sol.label).unwrap_or_default(),
            objective: sol.objective,
            policy: sol.policy,
            vertices_total: sol.vertices_total,
        }));
        Ok(())
    })
}

/// Optimal value reported by the solver, NaN for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cmdp_solution_objective(solution: *const CmdpSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.objective)
}

/// Method label, e.g. `extreme-pwl`. Owned by the solution.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cmdp_solution_method(solution: *const CmdpSolution) -> *const c_char {
    solution.as_ref().map_or(ptr::null(), |s| s.label.as_ptr())
}

/// Total vertex count for vertex-based methods, -1 otherwise.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cmdp_solution_vertices(solution: *const CmdpSolution) -> i64 {
    solution
        .as_ref()
        .and_then(|s| s.vertices_total)
        .map_or(-1, |v| v as i64)
}

/// Writes the policy as JSON in the policy-file format to `*out`.
/// Release with [`cmdp_string_free`].
///
/// # Safety
/// Handles must be live and belong together; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cmdp_solution_policy_json(
    problem: *const CmdpProblem,
    solution: *const CmdpSolution,
    out: *mut *mut c_char,
) -> CmdpStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let problem = ref_arg(problem, "problem")?;
        let solution = ref_arg(solution, "solution")?;
        let file = PolicyFile::from_policy(&problem.instance, &solution.policy);
        let text = serde_json::to_string_pretty(&file).map_err(Error::from)?;
        *out = into_c_string(text)?;
        Ok(())
    })
}

/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmdp_solution_free(solution: *mut CmdpSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

fn evaluation(instance: &CmdpInstance, policy: &Policy) -> Result<CmdpEvaluation, Fail> {
    let rep = evaluate_exact(instance, policy)?;
    Ok(CmdpEvaluation {
        expected_return: rep.ret,
        max_violation: rep
            .constraint_slack
            .iter()
            .map(|s| -s)
            .fold(f64::NEG_INFINITY, f64::max),
        feasible: rep.feasible as i32,
    })
}

/// Evaluates a solution's policy exactly by forward recursion.
///
/// # Safety
/// Handles must be live and belong together; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cmdp_evaluate_solution(
    problem: *const CmdpProblem,
    solution: *const CmdpSolution,
    out: *mut CmdpEvaluation,
) -> CmdpStatus {
    guard(|| {
        out_arg(out, "out")?;
        let problem = ref_arg(problem, "problem")?;
        let solution = ref_arg(solution, "solution")?;
        *out = evaluation(&problem.instance, &solution.policy)?;
        Ok(())
    })
}

/// Evaluates a policy given as JSON (policy file or solution file).
///
/// # Safety
/// `problem` must be live, `policy_json` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cmdp_evaluate_policy_json(
    problem: *const CmdpProblem,
    policy_json: *const c_char,
    out: *mut CmdpEvaluation,
) -> CmdpStatus {
    guard(|| {
        out_arg(out, "out")?;
        let problem = ref_arg(problem, "problem")?;
        let policy = parse_policy(&problem.instance, str_arg(policy_json, "policy_json")?)?;
        *out = evaluation(&problem.instance, &policy)?;
        Ok(())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmdp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
