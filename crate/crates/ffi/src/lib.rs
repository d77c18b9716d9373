//! C ABI over `dimer-core`.
//!
//! Every function returns a [`DimerStatus`]; on failure a message is kept in
//! thread-local storage and exposed by [`dimer_last_error`]. Handles are
//! opaque and owned by the caller until passed to their `_free` function.
//! Panics never cross the boundary.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use dimer_core::measures::{classify_phase, Phase, PHASE_TOL};
use dimer_core::sweep::{run_sweep_with, GridRow, SweepOptions};
use dimer_core::{
    analytic_spectrum, Error, GridResult, GridSpec, ModelParams, ResourceReport, TableFormat,
    Temperature, ThermalState,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimerStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Unsupported = 3,
    Numeric = 4,
    Io = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimerPhase {
    /// Not computed (finite temperature or not requested).
    None = 0,
    RegionI = 1,
    RegionIi = 2,
    RegionIii = 3,
    Unclassified = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimerFormat {
    Csv = 0,
    Json = 1,
}

/// Model parameters in absolute units.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    pub j: f64,
    pub delta: f64,
    pub d_ani: f64,
    pub h: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerReport {
    pub c_l1: f64,
    pub c_r: f64,
    pub negativity: f64,
    pub steering_s: f64,
    pub steerable: bool,
    /// Set only at `t = 0`.
    pub phase: DimerPhase,
}

/// One sweep row. Quantities not requested are NaN; `steerable` is then -1.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerGridRow {
    pub x: f64,
    pub y: f64,
    pub c_l1: f64,
    pub c_r: f64,
    pub negativity: f64,
    pub steering_s: f64,
    pub steerable: i32,
    pub phase: DimerPhase,
    /// Ground-manifold dimension at `t = 0`, else 0.
    pub ground_rank: usize,
}

/// Opaque thermal (or ground) state.
pub struct DimerThermalState {
    inner: ThermalState,
}

/// Opaque sweep result.
pub struct DimerGridResult {
    inner: GridResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> DimerStatus {
    match e {
        Error::InvalidInput(_) | Error::Serde(_) => DimerStatus::InvalidInput,
        Error::Unsupported(_) => DimerStatus::Unsupported,
        Error::Numeric(_) => DimerStatus::Numeric,
        Error::Io { .. } => DimerStatus::Io,
    }
}

struct Failure(DimerStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DimerStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DimerStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DimerStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("panic: {msg}"));
            DimerStatus::Panic
        }
    }
}

unsafe fn read<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn params(p: &DimerParams) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(p.j, p.delta, p.d_ani, p.h)?)
}

fn phase_code(p: Option<Phase>) -> DimerPhase {
    match p {
        None => DimerPhase::None,
        Some(Phase::RegionI) => DimerPhase::RegionI,
        Some(Phase::RegionII) => DimerPhase::RegionIi,
        Some(Phase::RegionIII) => DimerPhase::RegionIii,
        Some(Phase::Unclassified) => DimerPhase::Unclassified,
    }
}

fn report_of(state: &ThermalState) -> Result<DimerReport, Failure> {
    let r = ResourceReport::evaluate_thermal(state)?;
    Ok(DimerReport {
        c_l1: r.c_l1,
        c_r: r.c_r,
        negativity: r.negativity,
        steering_s: r.steering_s,
        steerable: r.steerable,
        phase: phase_code(
            state
                .t
                .is_zero()
                .then(|| classify_phase(r.negativity, PHASE_TOL)),
        ),
    })
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dimer_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn dimer_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Thermal state at `t > 0`, or the ground-state mixture at `t = 0`.
#[no_mangle]
pub unsafe extern "C" fn dimer_state_new(
    params_in: *const DimerParams,
    t: f64,
    out: *mut *mut DimerThermalState,
) -> DimerStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let p = params(read(params_in, "params")?)?;
        let inner = ThermalState::at(&p, Temperature::new(t)?)?;
        out.write(Box::into_raw(Box::new(DimerThermalState { inner })));
        Ok(())
    })
}

/// Accepts null.
#[no_mangle]
pub unsafe extern "C" fn dimer_state_free(state: *mut DimerThermalState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Copies the 9x9 density matrix, row-major, into `out[81]`.
#[no_mangle]
pub unsafe extern "C" fn dimer_state_density(
    state: *const DimerThermalState,
    out: *mut f64,
) -> DimerStatus {
    guard(|| {
        let s = read(state, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let data = s.inner.rho.as_slice();
        ptr::copy_nonoverlapping(data.as_ptr(), out, data.len());
        Ok(())
    })
}

/// Partition function; `Unsupported` for a ground state.
#[no_mangle]
pub unsafe extern "C" fn dimer_state_partition_function(
    state: *const DimerThermalState,
    out: *mut f64,
) -> DimerStatus {
    guard(|| {
        let s = read(state, "state")?;
        let z = s.inner.z.ok_or_else(|| {
            Failure(
                DimerStatus::Unsupported,
                "ground state has no partition function".into(),
            )
        })?;
        write(out, z, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn dimer_state_evaluate(
    state: *const DimerThermalState,
    out: *mut DimerReport,
) -> DimerStatus {
    guard(|| {
        let s = read(state, "state")?;
        write(out, report_of(&s.inner)?, "out")
    })
}

/// One-shot [`dimer_state_new`] + [`dimer_state_evaluate`].
#[no_mangle]
pub unsafe extern "C" fn dimer_evaluate(
    params_in: *const DimerParams,
    t: f64,
    out: *mut DimerReport,
) -> DimerStatus {
    guard(|| {
        let p = params(read(params_in, "params")?)?;
        let state = ThermalState::at(&p, Temperature::new(t)?)?;
        write(out, report_of(&state)?, "out")
    })
}

/// Analytic energies `E_1..E_9` into `out[9]`.
#[no_mangle]
pub unsafe extern "C" fn dimer_spectrum(
    params_in: *const DimerParams,
    out: *mut f64,
) -> DimerStatus {
    guard(|| {
        let p = params(read(params_in, "params")?)?;
        let spec = analytic_spectrum(&p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(spec.energies.as_ptr(), out, 9);
        Ok(())
    })
}

/// Runs a sweep described by a JSON grid spec. `workers = 0` uses the
/// default pool.
#[no_mangle]
pub unsafe extern "C" fn dimer_sweep_run(
    spec_json: *const c_char,
    workers: usize,
    out: *mut *mut DimerGridResult,
) -> DimerStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        if spec_json.is_null() {
            return Err(null("spec_json"));
        }
        let text = CStr::from_ptr(spec_json)
            .to_str()
            .map_err(|_| Failure(DimerStatus::InvalidInput, "spec_json is not UTF-8".into()))?;
        let spec = GridSpec::from_json(text)?;
        let opts = SweepOptions {
            workers: (workers > 0).then_some(workers),
        };
        let inner = run_sweep_with(&spec, opts)?;
        out.write(Box::into_raw(Box::new(DimerGridResult { inner })));
        Ok(())
    })
}

/// Accepts null.
#[no_mangle]
pub unsafe extern "C" fn dimer_sweep_free(result: *mut DimerGridResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of rows; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn dimer_sweep_len(result: *const DimerGridResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.rows.len())
}

fn row_of(r: &GridRow) -> DimerGridRow {
    let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
    DimerGridRow {
        x: r.x,
        y: r.y,
        c_l1: nan(r.c_l1),
        c_r: nan(r.c_r),
        negativity: nan(r.negativity),
        steering_s: nan(r.steering_s),
        steerable: r.steerable.map_or(-1, i32::from),
        phase: phase_code(r.phase),
        ground_rank: r.ground_rank.unwrap_or(0),
    }
}

/// Row `index` in x-major order.
#[no_mangle]
pub unsafe extern "C" fn dimer_sweep_row(
    result: *const DimerGridResult,
    index: usize,
    out: *mut DimerGridRow,
) -> DimerStatus {
    guard(|| {
        let r = read(result, "result")?;
        let row = r.inner.rows.get(index).ok_or_else(|| {
            Failure(
                DimerStatus::OutOfRange,
                format!("row {index} out of range (len {})", r.inner.rows.len()),
            )
        })?;
        write(out, row_of(row), "out")
    })
}

/// `format` is a [`DimerFormat`] value.
#[no_mangle]
pub unsafe extern "C" fn dimer_sweep_write(
    result: *const DimerGridResult,
    path: *const c_char,
    format: i32,
) -> DimerStatus {
    guard(|| {
        let r = read(result, "result")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(DimerStatus::InvalidInput, "path is not UTF-8".into()))?;
        let format = match format {
            f if f == DimerFormat::Csv as i32 => TableFormat::Csv,
            f if f == DimerFormat::Json as i32 => TableFormat::Json,
            other => {
                return Err(Failure(
                    DimerStatus::InvalidInput,
                    format!("unknown format {other}"),
                ))
            }
        };
        dimer_core::write_table(&r.inner, format, Path::new(path))?;
        Ok(())
    })
}
