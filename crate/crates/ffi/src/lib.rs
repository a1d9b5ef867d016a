//! C interface to `toric-ma`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` functions and
//! released with the matching `*_free`. Every fallible function returns a
//! [`ToricStatus`]; on failure a description is available from
//! [`toric_ma_last_error_message`] on the same thread. Arrays are passed as a
//! pointer plus a length, points as rows of `dim` doubles.
//!
//! No function unwinds into the caller: panics are caught and reported as
//! `TORIC_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use toric_ma::capacity::CompactRegion;
use toric_ma::convexfun::PLConvexFunction;
use toric_ma::geometry::ConvexBody;
use toric_ma::mixedvol::{brunn_minkowski_check, mixed_volume};
use toric_ma::solver::{solve_aubin_yau_with, solve_ma_with, Atom, AubinYauOptions, DiscreteMeasure, SolveOptions};
use toric_ma::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToricStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NonConvex = 4,
    MassMismatch = 5,
    NonConvergence = 6,
    Panic = 7,
}

/// A convex polytope.
pub struct ToricBody(ConvexBody);

/// A piecewise-linear convex function with an asymptotic body.
pub struct ToricFunction(PLConvexFunction);

/// A finite measure of weighted atoms.
pub struct ToricMeasure(DiscreteMeasure);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ToricStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::UnsupportedDimension(_) => ToricStatus::DimensionMismatch,
        Error::NonConvex { .. } => ToricStatus::NonConvex,
        Error::MassMismatch { .. } => ToricStatus::MassMismatch,
        Error::NonConvergence { .. } | Error::NoStabilization { .. } | Error::FitResidual { .. } => {
            ToricStatus::NonConvergence
        }
        _ => ToricStatus::InvalidArgument,
    }
}

struct Fail(ToricStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ToricStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic as the last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ToricStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ToricStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            ToricStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn rows(p: *const f64, count: usize, dim: usize, what: &str) -> Result<Vec<Vec<f64>>, Fail> {
    let flat = slice(p, count * dim, what)?;
    Ok(flat.chunks(dim.max(1)).map(|c| c.to_vec()).collect())
}

unsafe fn out<T>(p: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(ToricStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn toric_ma_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Forgets the last error of this thread.
#[no_mangle]
pub extern "C" fn toric_ma_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn toric_ma_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Hull of `n_vertices` points given as rows of `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_body_new(
    dim: usize,
    coords: *const f64,
    n_vertices: usize,
    out_body: *mut *mut ToricBody,
) -> ToricStatus {
    guard(|| {
        let pts = rows(coords, n_vertices, dim, "coords")?;
        let body = ConvexBody::new(dim, &pts)?;
        out(out_body, Box::into_raw(Box::new(ToricBody(body))), "out_body")
    })
}

/// Body from JSON `{"dim": n, "vertices": [[...], ...]}`.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_body_from_json(json: *const c_char, out_body: *mut *mut ToricBody) -> ToricStatus {
    guard(|| {
        let s = text(json, "json")?;
        let body: ConvexBody =
            serde_json::from_str(s).map_err(|e| Fail(ToricStatus::InvalidArgument, format!("bad body: {e}")))?;
        out(out_body, Box::into_raw(Box::new(ToricBody(body))), "out_body")
    })
}

#[no_mangle]
pub unsafe extern "C" fn toric_ma_body_free(body: *mut ToricBody) {
    free(body)
}

#[no_mangle]
pub unsafe extern "C" fn toric_ma_body_dim(body: *const ToricBody, out_dim: *mut usize) -> ToricStatus {
    guard(|| out(out_dim, handle(body, "body")?.0.dim(), "out_dim"))
}

#[no_mangle]
pub unsafe extern "C" fn toric_ma_body_volume(body: *const ToricBody, out_volume: *mut f64) -> ToricStatus {
    guard(|| out(out_volume, handle(body, "body")?.0.volume(), "out_volume"))
}

/// Support function `h_P(x)` with `x` of length `dim`.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_body_support(
    body: *const ToricBody,
    x: *const f64,
    dim: usize,
    out_value: *mut f64,
) -> ToricStatus {
    guard(|| {
        let v = handle(body, "body")?.0.support(slice(x, dim, "x")?)?;
        out(out_value, v, "out_value")
    })
}

unsafe fn bodies(list: *const *const ToricBody, n: usize) -> Result<Vec<ConvexBody>, Fail> {
    slice(list, n, "bodies")?
        .iter()
        .map(|&b| handle(b, "body").map(|b| b.0.clone()))
        .collect()
}

/// `MV(P₁, …, Pₙ)` of `n` bodies of dimension `n`.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_mixed_volume(
    list: *const *const ToricBody,
    n: usize,
    out_mv: *mut f64,
) -> ToricStatus {
    guard(|| {
        let mv = mixed_volume(&bodies(list, n)?)?;
        out(out_mv, mv, "out_mv")
    })
}

/// `lhs = MV(P₁, …, Pₙ)`, `rhs = Π Vol(Pᵢ)^{1/n}`, `holds = lhs ≥ rhs − 1e-9`.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_bm_check(
    list: *const *const ToricBody,
    n: usize,
    out_lhs: *mut f64,
    out_rhs: *mut f64,
    out_holds: *mut bool,
) -> ToricStatus {
    guard(|| {
        let r = brunn_minkowski_check(&bodies(list, n)?)?;
        out(out_lhs, r.lhs, "out_lhs")?;
        out(out_rhs, r.rhs, "out_rhs")?;
        out(out_holds, r.holds, "out_holds")
    })
}

/// Convex function with values at `n_nodes` nodes; fails on nonconvex data.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_function_new(
    body: *const ToricBody,
    nodes: *const f64,
    n_nodes: usize,
    values: *const f64,
    out_fn: *mut *mut ToricFunction,
) -> ToricStatus {
    guard(|| {
        let body = handle(body, "body")?.0.clone();
        let pts = rows(nodes, n_nodes, body.dim(), "nodes")?;
        let vals = slice(values, n_nodes, "values")?.to_vec();
        let h = PLConvexFunction::new(body, &pts, vals)?;
        out(out_fn, Box::into_raw(Box::new(ToricFunction(h))), "out_fn")
    })
}

/// `h_P` sampled at the nodes.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_function_support(
    body: *const ToricBody,
    nodes: *const f64,
    n_nodes: usize,
    out_fn: *mut *mut ToricFunction,
) -> ToricStatus {
    guard(|| {
        let body = handle(body, "body")?.0.clone();
        let pts = rows(nodes, n_nodes, body.dim(), "nodes")?;
        let h = PLConvexFunction::support_function(body, &pts)?;
        out(out_fn, Box::into_raw(Box::new(ToricFunction(h))), "out_fn")
    })
}

#[no_mangle]
pub unsafe extern "C" fn toric_ma_function_free(h: *mut ToricFunction) {
    free(h)
}

#[no_mangle]
pub unsafe extern "C" fn toric_ma_function_len(h: *const ToricFunction, out_len: *mut usize) -> ToricStatus {
    guard(|| out(out_len, handle(h, "function")?.0.len(), "out_len"))
}

/// Copies the node values into `values[0..len]`; `len` must equal the node count.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_function_values(h: *const ToricFunction, values: *mut f64, len: usize) -> ToricStatus {
    guard(|| {
        let h = &handle(h, "function")?.0;
        if len != h.len() {
            return Err(Error::DimensionMismatch {
                expected: h.len(),
                found: len,
            }
            .into());
        }
        if values.is_null() {
            return Err(null("values"));
        }
        std::slice::from_raw_parts_mut(values, len).copy_from_slice(h.values());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn toric_ma_function_eval(
    h: *const ToricFunction,
    x: *const f64,
    dim: usize,
    out_value: *mut f64,
) -> ToricStatus {
    guard(|| {
        let v = handle(h, "function")?.0.eval(slice(x, dim, "x")?)?;
        out(out_value, v, "out_value")
    })
}

/// Monge-Ampère masses per node into `masses[0..len]`, plus the interior total
/// and the mass of nodes on the boundary of the node hull.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_function_ma(
    h: *const ToricFunction,
    masses: *mut f64,
    len: usize,
    out_total: *mut f64,
    out_boundary_remainder: *mut f64,
) -> ToricStatus {
    guard(|| {
        let h = &handle(h, "function")?.0;
        if len != h.len() {
            return Err(Error::DimensionMismatch {
                expected: h.len(),
                found: len,
            }
            .into());
        }
        let r = toric_ma::ma(h);
        if !masses.is_null() {
            std::slice::from_raw_parts_mut(masses, len).copy_from_slice(&r.masses);
        }
        out(out_total, r.total, "out_total")?;
        out(out_boundary_remainder, r.boundary_remainder, "out_boundary_remainder")
    })
}

/// Atoms at rows of `dim` doubles with the given masses.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_measure_new(
    dim: usize,
    points: *const f64,
    masses: *const f64,
    n_atoms: usize,
    out_measure: *mut *mut ToricMeasure,
) -> ToricStatus {
    guard(|| {
        let pts = rows(points, n_atoms, dim, "points")?;
        let ms = slice(masses, n_atoms, "masses")?;
        let atoms = pts.into_iter().zip(ms).map(|(x, &mass)| Atom { x, mass }).collect();
        let mu = DiscreteMeasure::new(atoms)?;
        out(out_measure, Box::into_raw(Box::new(ToricMeasure(mu))), "out_measure")
    })
}

#[no_mangle]
pub unsafe extern "C" fn toric_ma_measure_free(mu: *mut ToricMeasure) {
    free(mu)
}

fn options(box_radius: f64, tol: f64) -> SolveOptions {
    SolveOptions {
        box_radius: (box_radius > 0.0).then_some(box_radius),
        tol,
        ..SolveOptions::default()
    }
}

/// Solves `MA(h) = μ`, normalized by `sup(h − h_P) = 0`. A nonpositive
/// `box_radius` selects the default frame. The solution lists the atoms first.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_solve(
    body: *const ToricBody,
    mu: *const ToricMeasure,
    box_radius: f64,
    tol: f64,
    out_solution: *mut *mut ToricFunction,
    out_residual: *mut f64,
) -> ToricStatus {
    guard(|| {
        let r = solve_ma_with(&handle(body, "body")?.0, &handle(mu, "measure")?.0, &options(box_radius, tol))?;
        out(out_residual, r.residual, "out_residual")?;
        out(out_solution, Box::into_raw(Box::new(ToricFunction(r.solution))), "out_solution")
    })
}

/// Solves `MA(h) = e^{λh}μ`.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_solve_aubin_yau(
    body: *const ToricBody,
    mu: *const ToricMeasure,
    lambda: f64,
    box_radius: f64,
    tol: f64,
    out_solution: *mut *mut ToricFunction,
    out_residual: *mut f64,
) -> ToricStatus {
    guard(|| {
        let opts = AubinYauOptions {
            solve: options(box_radius, tol),
            ..AubinYauOptions::default()
        };
        let r = solve_aubin_yau_with(&handle(body, "body")?.0, &handle(mu, "measure")?.0, lambda, &opts)?;
        out(out_residual, r.residual, "out_residual")?;
        out(out_solution, Box::into_raw(Box::new(ToricFunction(r.solution))), "out_solution")
    })
}

/// Capacity of the region `{"boxes": [{"lo": [...], "hi": [...]}]}` computed on
/// `n_nodes` grid nodes. Both the mass and the energy formula are returned.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_capacity(
    body: *const ToricBody,
    region_json: *const c_char,
    nodes: *const f64,
    n_nodes: usize,
    out_cap_mass: *mut f64,
    out_cap_energy: *mut f64,
) -> ToricStatus {
    guard(|| {
        let body = &handle(body, "body")?.0;
        let region: CompactRegion = serde_json::from_str(text(region_json, "region_json")?)
            .map_err(|e| Fail(ToricStatus::InvalidArgument, format!("bad region: {e}")))?;
        let grid = rows(nodes, n_nodes, body.dim(), "nodes")?;
        let r = toric_ma::capacity(&region, body, &grid)?;
        out(out_cap_mass, r.cap_mass, "out_cap_mass")?;
        out(out_cap_energy, r.cap_energy, "out_cap_energy")
    })
}

/// Runs the command-line tool on `argc` arguments (without the program name).
/// `*out_stdout` and `*out_stderr` receive strings to release with
/// [`toric_ma_string_free`]; `*out_exit_code` the exit status.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_cli_run(
    argv: *const *const c_char,
    argc: usize,
    out_exit_code: *mut c_int,
    out_stdout: *mut *mut c_char,
    out_stderr: *mut *mut c_char,
) -> ToricStatus {
    guard(|| {
        let args = slice(argv, argc, "argv")?
            .iter()
            .map(|&a| text(a, "argument").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        let o = toric_ma::cli::run(std::iter::once("toric-ma".to_string()).chain(args));
        let c = |s: String| CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw();
        out(out_exit_code, o.code, "out_exit_code")?;
        out(out_stdout, c(o.stdout), "out_stdout")?;
        out(out_stderr, c(o.stderr), "out_stderr")
    })
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn toric_ma_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
