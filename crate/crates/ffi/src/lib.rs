//! C ABI for `lasbound`.
//!
//! Graphs and reports are opaque handles created and released through this
//! API. Every fallible call returns an [`LbStatus`]; on failure a
//! description is available from [`lb_last_error`] on the same thread.
//! Vertices are 0-based on this interface.
//!
//! Handles are not synchronized. A handle may move between threads but must
//! not be used from two threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lasbound::pipeline::{run_graph, LevelOverride, RunConfig, RunReport};
use lasbound::{parse_dimacs, solve_theta, Error, Graph, PrecisionMode, SolverConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbStatus {
    Ok = 0,
    NullArgument = 1,
    Parse = 2,
    Config = 3,
    Input = 4,
    Numerical = 5,
    TimeLimit = 6,
    ResourceGuard = 7,
    Io = 8,
    Panic = 9,
}

/// Solver and pipeline settings. Obtain defaults from [`lb_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LbConfig {
    pub max_basis: usize,
    /// 0 selects the basis automatically, 1 or 2 force that level.
    pub level: u32,
    pub time_limit_sec: f64,
    /// 0 single, 1 double.
    pub precision: u32,
    pub rho_scale: f64,
    pub step: f64,
    pub tol: f64,
    pub check_every: u64,
    pub k_stag: u64,
    pub stag_tol: f64,
    pub bound_every: u64,
    /// 0 for no iteration limit.
    pub max_iters: u64,
    /// Known stability number, negative when unknown.
    pub alpha: i64,
    pub max_order: usize,
    /// Nonzero starts the final solve from zero.
    pub cold_start: u32,
}

/// Opaque graph handle.
pub struct LbGraph {
    inner: Graph,
}

/// Opaque run report handle.
pub struct LbReport {
    inner: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LbStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) => LbStatus::Parse,
        Error::Config(_) => LbStatus::Config,
        Error::Input(_) | Error::SizeCap { .. } => LbStatus::Input,
        Error::Numerical { .. } => LbStatus::Numerical,
        Error::TimeLimit => LbStatus::TimeLimit,
        Error::ResourceGuard { .. } => LbStatus::ResourceGuard,
        Error::Io(_) => LbStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (LbStatus, String)>) -> LbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            LbStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (LbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_arg(name: &str) -> (LbStatus, String) {
    (LbStatus::NullArgument, format!("{name} is null"))
}

fn to_run_config(c: &LbConfig) -> Result<RunConfig, (LbStatus, String)> {
    let config_err = |m: &str| (LbStatus::Config, m.to_string());
    let level = match c.level {
        0 => None,
        1 => Some(LevelOverride::One),
        2 => Some(LevelOverride::Two),
        _ => return Err(config_err("level must be 0, 1 or 2")),
    };
    let precision = match c.precision {
        0 => PrecisionMode::Single,
        1 => PrecisionMode::Double,
        _ => return Err(config_err("precision must be 0 or 1")),
    };
    let solver = SolverConfig {
        rho_scale: c.rho_scale,
        step: c.step,
        tol: c.tol,
        check_every: c.check_every,
        k_stag: usize::try_from(c.k_stag).unwrap_or(usize::MAX),
        stag_tol: c.stag_tol,
        time_limit_sec: c.time_limit_sec,
        bound_every: c.bound_every,
        precision,
        max_iters: (c.max_iters > 0).then_some(c.max_iters),
        ..SolverConfig::default()
    };
    solver.validate().map_err(lib_err)?;
    Ok(RunConfig {
        max_basis: c.max_basis,
        level,
        solver,
        alpha: usize::try_from(c.alpha).ok(),
        max_order: c.max_order,
        cold_start: c.cold_start != 0,
    })
}

fn into_handle<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn lb_config_default() -> LbConfig {
    let run = RunConfig::default();
    let s = &run.solver;
    LbConfig {
        max_basis: run.max_basis,
        level: 0,
        time_limit_sec: s.time_limit_sec,
        precision: 0,
        rho_scale: s.rho_scale,
        step: s.step,
        tol: s.tol,
        check_every: s.check_every,
        k_stag: s.k_stag as u64,
        stag_tol: s.stag_tol,
        bound_every: s.bound_every,
        max_iters: 0,
        alpha: -1,
        max_order: run.max_order,
        cold_start: 0,
    }
}

/// Builds a graph on `n` vertices from `m` edges stored as `2 * m`
/// consecutive vertex indices. Loops and repeated edges are dropped.
///
/// # Safety
/// `edges` must point to `2 * m` readable values (it may be null when
/// `m == 0`) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lb_graph_new(n: usize, edges: *const usize, m: usize, out: *mut *mut LbGraph) -> LbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        if edges.is_null() && m > 0 {
            return Err(null_arg("edges"));
        }
        let flat = if m == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(edges, 2 * m)
        };
        if let Some(&v) = flat.iter().find(|&&v| v >= n) {
            return Err((LbStatus::Input, format!("vertex {v} out of range for n = {n}")));
        }
        let g = Graph::from_edges(n, flat.chunks_exact(2).map(|e| (e[0], e[1])));
        *out = into_handle(LbGraph { inner: g });
        Ok(())
    })
}

/// Parses DIMACS text (vertices 1-based in the text).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lb_graph_parse_dimacs(text: *const c_char, out: *mut *mut LbGraph) -> LbStatus {
    guard(|| {
        if text.is_null() {
            return Err(null_arg("text"));
        }
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| (LbStatus::Parse, "text is not valid UTF-8".to_string()))?;
        let parsed = parse_dimacs(s).map_err(lib_err)?;
        *out = into_handle(LbGraph { inner: parsed.graph });
        Ok(())
    })
}

/// # Safety
/// `g` must be a live graph handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lb_graph_complement(g: *const LbGraph, out: *mut *mut LbGraph) -> LbStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null_arg("graph"))?;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        *out = into_handle(LbGraph {
            inner: g.inner.complement(),
        });
        Ok(())
    })
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn lb_graph_vertex_count(g: *const LbGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn lb_graph_edge_count(g: *const LbGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lb_graph_free(g: *mut LbGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Solves the first level and writes its certified bound to `theta_out`.
/// A null `config` means defaults.
///
/// # Safety
/// `g` must be a live graph handle, `config` null or readable, `theta_out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lb_theta(g: *const LbGraph, config: *const LbConfig, theta_out: *mut f64) -> LbStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null_arg("graph"))?;
        if theta_out.is_null() {
            return Err(null_arg("theta_out"));
        }
        let cfg = to_run_config(&config.as_ref().copied().unwrap_or_else(|| lb_config_default()))?;
        let ts = solve_theta(&g.inner, &cfg.solver).map_err(lib_err)?;
        *theta_out = ts.theta;
        Ok(())
    })
}

/// Runs the full pipeline. A null `config` means defaults.
///
/// # Safety
/// `g` must be a live graph handle, `config` null or readable, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lb_run(g: *const LbGraph, config: *const LbConfig, out: *mut *mut LbReport) -> LbStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null_arg("graph"))?;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let cfg = to_run_config(&config.as_ref().copied().unwrap_or_else(|| lb_config_default()))?;
        let report = run_graph(&g.inner, &cfg).map_err(lib_err)?;
        *out = into_handle(LbReport { inner: report });
        Ok(())
    })
}

/// Best certified bound, NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn lb_report_best_bound(r: *const LbReport) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.inner.best_bound)
}

/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn lb_report_theta(r: *const LbReport) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.inner.theta)
}

/// Gap-closed fraction in `[0, 1]`, NaN when alpha is unknown.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn lb_report_gap_closed(r: *const LbReport) -> f64 {
    r.as_ref().and_then(|r| r.inner.gap_closed).unwrap_or(f64::NAN)
}

/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn lb_report_basis_size(r: *const LbReport) -> usize {
    r.as_ref().map_or(0, |r| r.inner.basis_size)
}

/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn lb_report_iterations(r: *const LbReport) -> u64 {
    r.as_ref().map_or(0, |r| r.inner.iterations)
}

/// Serializes the report as JSON. Release the string with [`lb_string_free`].
///
/// # Safety
/// `r` must be a live report handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lb_report_to_json(r: *const LbReport, out: *mut *mut c_char) -> LbStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null_arg("report"))?;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let json = r.inner.to_json().map_err(lib_err)?;
        *out = CString::new(json)
            .map_err(|_| (LbStatus::Input, "report contains NUL".to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lb_report_free(r: *mut LbReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
