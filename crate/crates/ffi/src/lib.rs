//! C interface to nhs-core.
//!
//! Spaces and reports are opaque handles owned by the caller and released
//! with the matching `_free` function. Every call returns an [`NhsStatus`];
//! the message of the most recent failure on the calling thread is available
//! from [`nhs_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nhs_core::geometry::{discrete_coefficient, Ball, BallFamily};
use nhs_core::lab::{render_json, run_experiments, ExperimentConfig, ExperimentReport};
use nhs_core::mmspace::{estimate_geometric_doubling, fit_power_lambda, PowerExponent, SpaceFile};
use nhs_core::operators::{marcinkiewicz_all, maximal_p_tau_all, KernelForm, KernelSpec, OperatorParams, Theta};
use nhs_core::spaces::{campanato_norm, DiscreteFunction, RegularityFunctionPsi, DEFAULT_PAIR_BUDGET};
use nhs_core::{build_space, DominatingFunction, NhsError, PointCloudSpace, SpaceData};

/// Result of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NhsStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad parameter values, lengths or indices.
    InvalidArgument = 2,
    /// The points, distances or weights do not form a valid space.
    InvalidSpace = 3,
    /// Malformed JSON or an invalid experiment configuration.
    Config = 4,
    /// The function or symbol is constant where a nonzero norm is needed.
    ZeroNorm = 5,
    Io = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

impl From<&NhsError> for NhsStatus {
    fn from(e: &NhsError) -> Self {
        match e {
            NhsError::EmptySpace
            | NhsError::NonPositiveWeight { .. }
            | NhsError::MetricViolation { .. }
            | NhsError::DegenerateRadii => NhsStatus::InvalidSpace,
            NhsError::ZeroNorm | NhsError::ZeroNormB => NhsStatus::ZeroNorm,
            NhsError::Spec(_) | NhsError::Json(_) => NhsStatus::Config,
            NhsError::Io(_) => NhsStatus::Io,
            _ => NhsStatus::InvalidArgument,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

/// Run `body`, recording any error or panic for `nhs_last_error`.
fn guard(body: impl FnOnce() -> Result<(), (NhsStatus, String)>) -> NhsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            NhsStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NhsStatus::Internal
        }
    }
}

fn lift<T>(r: nhs_core::Result<T>) -> Result<T, (NhsStatus, String)> {
    r.map_err(|e| (NhsStatus::from(&e), e.to_string()))
}

fn null(what: &str) -> (NhsStatus, String) {
    (NhsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: String) -> (NhsStatus, String) {
    (NhsStatus::InvalidArgument, message)
}

/// Borrow `len` values, treating a null pointer as an error unless `len` is 0.
unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], (NhsStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, (NhsStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

/// A weighted finite metric space with its dominating function and ball
/// family.
pub struct NhsSpace {
    space: PointCloudSpace,
    lambda: DominatingFunction,
    family: BallFamily,
}

impl NhsSpace {
    fn new(space: PointCloudSpace) -> nhs_core::Result<Self> {
        let lambda = fit_power_lambda(&space, PowerExponent::Fixed(DEFAULT_KAPPA))?;
        let family = BallFamily::new(&space);
        Ok(Self { space, lambda, family })
    }

    fn values<'a>(&self, values: *const f64, len: usize) -> Result<&'a [f64], (NhsStatus, String)> {
        if len != self.space.len() {
            return Err(invalid(format!("expected {} values, got {len}", self.space.len())));
        }
        unsafe { slice(values, len, "values") }
    }
}

const DEFAULT_KAPPA: f64 = 0.5;

/// A finished experiment report and its JSON rendering.
pub struct NhsReport {
    report: ExperimentReport,
    json: CString,
}

unsafe fn space_ref<'a>(space: *const NhsSpace) -> Result<&'a NhsSpace, (NhsStatus, String)> {
    space.as_ref().ok_or_else(|| null("space"))
}

unsafe fn emit<T>(out: *mut T, value: T) -> Result<(), (NhsStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nhs_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nhs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a space from `n` points of dimension `dim` stored row-major in
/// `coords` (Euclidean distance) and `n` positive weights. λ is fitted as
/// `C₀ r^{1/2}`.
///
/// # Safety
/// `coords` must hold `n * dim` values and `weights` `n` values; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_space_from_points(
    coords: *const f64,
    n: usize,
    dim: usize,
    weights: *const f64,
    out: *mut *mut NhsSpace,
) -> NhsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let total = n.checked_mul(dim).ok_or_else(|| invalid("n * dim overflows".into()))?;
        let coords = slice(coords, total, "coords")?;
        let weights = slice(weights, n, "weights")?;
        let points = if dim == 0 { vec![Vec::new(); n] } else { coords.chunks(dim).map(<[f64]>::to_vec).collect() };
        let space = lift(build_space(SpaceData::Points(points), weights.to_vec()))?;
        let handle = lift(NhsSpace::new(space))?;
        emit(out, Box::into_raw(Box::new(handle)))
    })
}

/// Build a space from an `n × n` row-major distance matrix.
///
/// # Safety
/// `distances` must hold `n * n` values and `weights` `n` values; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_space_from_distances(
    distances: *const f64,
    n: usize,
    weights: *const f64,
    out: *mut *mut NhsSpace,
) -> NhsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let total = n.checked_mul(n).ok_or_else(|| invalid("n * n overflows".into()))?;
        let d = slice(distances, total, "distances")?;
        let weights = slice(weights, n, "weights")?;
        let rows = if n == 0 { Vec::new() } else { d.chunks(n).map(<[f64]>::to_vec).collect() };
        let space = lift(build_space(SpaceData::Distances(rows), weights.to_vec()))?;
        let handle = lift(NhsSpace::new(space))?;
        emit(out, Box::into_raw(Box::new(handle)))
    })
}

/// Build a space from the JSON space-file format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_space_from_json(json: *const c_char, out: *mut *mut NhsSpace) -> NhsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let file = lift(SpaceFile::from_json(text(json, "json")?))?;
        let space = lift(file.into_space())?;
        let handle = lift(NhsSpace::new(space))?;
        emit(out, Box::into_raw(Box::new(handle)))
    })
}

/// Release a space. Null is ignored.
///
/// # Safety
/// `space` must come from one of the constructors and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nhs_space_free(space: *mut NhsSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_space_len(space: *const NhsSpace, out: *mut usize) -> NhsStatus {
    guard(|| emit(out, space_ref(space)?.space.len()))
}

/// Refit λ as `C₀ r^κ` with the given exponent.
///
/// # Safety
/// `space` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nhs_space_fit_lambda(space: *mut NhsSpace, kappa: f64) -> NhsStatus {
    guard(|| {
        let handle = space.as_mut().ok_or_else(|| null("space"))?;
        handle.lambda = lift(fit_power_lambda(&handle.space, PowerExponent::Fixed(kappa)))?;
        Ok(())
    })
}

/// λ(x, r) of the current dominating function.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_space_lambda(space: *const NhsSpace, x: usize, r: f64, out: *mut f64) -> NhsStatus {
    guard(|| {
        let handle = space_ref(space)?;
        if x >= handle.space.len() {
            return Err(invalid(format!("point {x} out of range")));
        }
        emit(out, handle.lambda.eval(x, r))
    })
}

/// Greedy upper estimate of the geometric doubling constant N₀.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_geometric_doubling(space: *const NhsSpace, out: *mut usize) -> NhsStatus {
    guard(|| emit(out, estimate_geometric_doubling(&space_ref(space)?.space)))
}

/// K̃^{(τ)} for the nested pair B(inner_center, inner_radius) ⊂
/// B(outer_center, outer_radius).
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_coefficient(
    space: *const NhsSpace,
    inner_center: usize,
    inner_radius: f64,
    outer_center: usize,
    outer_radius: f64,
    tau: f64,
    out: *mut f64,
) -> NhsStatus {
    guard(|| {
        let h = space_ref(space)?;
        let inner = lift(Ball::checked(&h.space, inner_center, inner_radius))?;
        let outer = lift(Ball::checked(&h.space, outer_center, outer_radius))?;
        let k = lift(discrete_coefficient(&h.space, &h.lambda, inner, outer, tau))?;
        emit(out, k.value)
    })
}

/// Campanato norm with ψ ≡ 1 of the function given by `len` point values.
///
/// # Safety
/// `values` must hold `len` numbers; `space` must be live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_campanato_norm(
    space: *const NhsSpace,
    values: *const f64,
    len: usize,
    tau: f64,
    gamma: f64,
    out: *mut f64,
) -> NhsStatus {
    guard(|| {
        let h = space_ref(space)?;
        let f = DiscreteFunction::new(h.values(values, len)?.to_vec());
        let psi = RegularityFunctionPsi::one();
        let r = lift(campanato_norm(&h.space, &h.lambda, &f, &psi, tau, gamma, DEFAULT_PAIR_BUDGET, 0))?;
        emit(out, r.norm)
    })
}

/// M_{p,τ} f at every point, written to `out[0..len]`.
///
/// # Safety
/// `values` and `out` must each hold `len` numbers; `space` must be live.
#[no_mangle]
pub unsafe extern "C" fn nhs_maximal_p_tau(
    space: *const NhsSpace,
    values: *const f64,
    len: usize,
    p: f64,
    tau: f64,
    out: *mut f64,
) -> NhsStatus {
    guard(|| {
        let h = space_ref(space)?;
        let f = h.values(values, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = lift(maximal_p_tau_all(&h.space, &h.family, f, p, tau))?;
        ptr::copy_nonoverlapping(m.as_ptr(), out, len);
        Ok(())
    })
}

/// Fractional Marcinkiewicz integral with the canonical kernel at every
/// point, written to `out[0..len]`.
///
/// # Safety
/// `values` and `out` must each hold `len` numbers; `space` must be live.
#[no_mangle]
pub unsafe extern "C" fn nhs_marcinkiewicz(
    space: *const NhsSpace,
    values: *const f64,
    len: usize,
    l: f64,
    rho: f64,
    s: f64,
    out: *mut f64,
) -> NhsStatus {
    guard(|| {
        let h = space_ref(space)?;
        let f = h.values(values, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let params = OperatorParams { l, rho, s, ..OperatorParams::default() };
        let kernel = lift(KernelSpec::build(&h.space, &h.lambda, l, Theta::Power(1.0), KernelForm::Canonical))?;
        let m = lift(marcinkiewicz_all(&h.space, &kernel, f, &params))?;
        ptr::copy_nonoverlapping(m.as_ptr(), out, len);
        Ok(())
    })
}

/// Run an experiment configuration given as JSON.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_run_experiment(config_json: *const c_char, out: *mut *mut NhsReport) -> NhsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = lift(ExperimentConfig::from_json(text(config_json, "config_json")?))?;
        let report = lift(run_experiments(&config))?;
        let json = CString::new(lift(render_json(&report))?).map_err(|e| invalid(e.to_string()))?;
        emit(out, Box::into_raw(Box::new(NhsReport { report, json })))
    })
}

/// The report as JSON; valid until the report is freed.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nhs_report_json(report: *const NhsReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// 0 when every exact check passed, 1 otherwise.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_report_exit_code(report: *const NhsReport, out: *mut i32) -> NhsStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        emit(out, r.report.exit_code())
    })
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nhs_report_row_count(report: *const NhsReport, out: *mut usize) -> NhsStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        emit(out, r.report.rows.len())
    })
}

/// Release a report. Null is ignored.
///
/// # Safety
/// `report` must come from [`nhs_run_experiment`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nhs_report_free(report: *mut NhsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
