//! C ABI over the `cqm` library.
//!
//! Matrices cross the boundary as row-major arrays of interleaved
//! `(re, im)` doubles, `2 * n * n` values for an `n x n` matrix. States and
//! composite systems are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`CqmStatus`]; the message of the last failure on the calling thread is
//! available from [`cqm_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cqm::composite::CompositeSystem;
use cqm::infoexchange::{self, Regime};
use cqm::matrix::{ComplexMatrix, C64};
use cqm::state::{linear_entropy, von_neumann_entropy, DensityMatrix, HermitianObservable, UnitaryMap};
use cqm::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqmStatus {
    Ok = 0,
    NullPointer = 1,
    Dimension = 2,
    InvalidState = 3,
    NotHermitian = 4,
    NotUnitary = 5,
    NotEquivalent = 6,
    PropertyViolated = 7,
    InvalidArgument = 8,
    Numerical = 9,
    Infeasible = 10,
    NotTraceless = 11,
    OutOfRange = 12,
    BufferTooSmall = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqmRegime {
    Unconstrained = 0,
    Isoenergetic = 1,
}

/// Opaque validated density matrix.
pub struct CqmDensityMatrix(DensityMatrix);

/// Opaque composite system (H_R, H_S, U).
pub struct CqmCompositeSystem(CompositeSystem);

/// Flat exchange report. `optimal_rho_r0` is owned by the report and
/// released by [`cqm_exchange_report_release`].
#[repr(C)]
#[derive(Debug)]
pub struct CqmExchangeReport {
    pub regime: CqmRegime,
    pub n: usize,
    pub delta_i: f64,
    pub delta_s: f64,
    /// Meaningful only when `has_eta` is true.
    pub eta: f64,
    pub has_eta: bool,
    pub purity_s0: f64,
    pub energy_s0: f64,
    pub energy_shift: f64,
    pub optimal_rho_r0: *mut CqmDensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CqmStatus {
    match e {
        Error::Dimension { .. } | Error::NotSquare { .. } => CqmStatus::Dimension,
        Error::InvalidState(_) => CqmStatus::InvalidState,
        Error::NotHermitian { .. } => CqmStatus::NotHermitian,
        Error::NotUnitary { .. } => CqmStatus::NotUnitary,
        Error::NotEquivalent { .. } => CqmStatus::NotEquivalent,
        Error::PropertyViolated { .. } => CqmStatus::PropertyViolated,
        Error::InvalidArgument(_) | Error::NotCommuting { .. } => CqmStatus::InvalidArgument,
        Error::NonFinite { .. } | Error::StepRejected { .. } | Error::NoConvergence { .. } => {
            CqmStatus::Numerical
        }
        Error::Infeasible { .. } => CqmStatus::Infeasible,
        Error::NotTraceless { .. } => CqmStatus::NotTraceless,
    }
}

fn fail(status: CqmStatus, msg: impl Into<String>) -> CqmStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), CqmStatus>) -> CqmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CqmStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(CqmStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, CqmStatus>;
}

impl<T> OrStatus<T> for cqm::Result<T> {
    fn or_status(self) -> Result<T, CqmStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn read_matrix(data: *const f64, n: usize) -> Result<ComplexMatrix, CqmStatus> {
    if data.is_null() {
        return Err(fail(CqmStatus::NullPointer, "matrix pointer is null"));
    }
    if n == 0 {
        return Err(fail(CqmStatus::Dimension, "dimension must be positive"));
    }
    // SAFETY: caller provides 2 * n * n readable doubles.
    let raw = unsafe { std::slice::from_raw_parts(data, 2 * n * n) };
    let entries = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
    ComplexMatrix::from_vec(n, n, entries).or_status()
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, CqmStatus> {
    // SAFETY: non-null handles come from this library and are live.
    unsafe { p.as_ref() }.ok_or_else(|| fail(CqmStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), CqmStatus> {
    if out.is_null() {
        return Err(fail(CqmStatus::NullPointer, "output pointer is null"));
    }
    // SAFETY: checked non-null; caller provides writable storage.
    unsafe { out.write(value) };
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cqm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Validates an `n x n` matrix as a density matrix.
///
/// # Safety
/// `data` must point to `2 * n * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_density_matrix_new(
    data: *const f64,
    n: usize,
    out: *mut *mut CqmDensityMatrix,
) -> CqmStatus {
    guard(|| {
        let m = unsafe { read_matrix(data, n) }?;
        let rho = DensityMatrix::new(m).or_status()?;
        unsafe { write_out(out, Box::into_raw(Box::new(CqmDensityMatrix(rho)))) }
    })
}

/// # Safety
/// `rho` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cqm_density_matrix_free(rho: *mut CqmDensityMatrix) {
    if !rho.is_null() {
        // SAFETY: handle was created by Box::into_raw.
        drop(unsafe { Box::from_raw(rho) });
    }
}

/// Dimension of the state, 0 for a null handle.
///
/// # Safety
/// `rho` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cqm_density_matrix_dim(rho: *const CqmDensityMatrix) -> usize {
    unsafe { rho.as_ref() }.map_or(0, |r| r.0.dim())
}

/// Entry (row, col).
///
/// # Safety
/// `rho` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_density_matrix_get(
    rho: *const CqmDensityMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> CqmStatus {
    guard(|| {
        let rho = unsafe { deref(rho, "state") }?;
        let n = rho.0.dim();
        if row >= n || col >= n {
            return Err(fail(
                CqmStatus::OutOfRange,
                format!("({row}, {col}) outside {n}x{n}"),
            ));
        }
        let z = rho.0.matrix()[(row, col)];
        unsafe { write_out(re, z.re) }?;
        unsafe { write_out(im, z.im) }
    })
}

/// Copies the matrix as interleaved row-major doubles into `buf`, which
/// must hold at least `2 * n * n` values.
///
/// # Safety
/// `rho` must be a live handle; `buf` must have `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cqm_density_matrix_copy(
    rho: *const CqmDensityMatrix,
    buf: *mut f64,
    len: usize,
) -> CqmStatus {
    guard(|| {
        let rho = unsafe { deref(rho, "state") }?;
        let data = rho.0.matrix().as_slice();
        if buf.is_null() {
            return Err(fail(CqmStatus::NullPointer, "buffer is null"));
        }
        if len < 2 * data.len() {
            return Err(fail(
                CqmStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", 2 * data.len()),
            ));
        }
        // SAFETY: checked length above.
        let out = unsafe { std::slice::from_raw_parts_mut(buf, 2 * data.len()) };
        for (pair, z) in out.chunks_exact_mut(2).zip(data) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

fn scalar(rho: *const CqmDensityMatrix, out: *mut f64, f: fn(&DensityMatrix) -> f64) -> CqmStatus {
    guard(|| {
        let rho = unsafe { deref(rho, "state") }?;
        unsafe { write_out(out, f(&rho.0)) }
    })
}

/// tr ρ²
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_purity(rho: *const CqmDensityMatrix, out: *mut f64) -> CqmStatus {
    scalar(rho, out, DensityMatrix::purity)
}

/// 1 − tr ρ²
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_linear_entropy(rho: *const CqmDensityMatrix, out: *mut f64) -> CqmStatus {
    scalar(rho, out, linear_entropy)
}

/// −tr ρ ln ρ
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_von_neumann_entropy(rho: *const CqmDensityMatrix, out: *mut f64) -> CqmStatus {
    scalar(rho, out, von_neumann_entropy)
}

/// Builds a composite system from H_R and U; H_S = U H_R U†. A null `h_r`
/// means H_R = 0 and a null `u` means U = 1.
///
/// # Safety
/// Non-null matrix pointers must hold `2 * n * n` doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_composite_new(
    h_r: *const f64,
    u: *const f64,
    n: usize,
    out: *mut *mut CqmCompositeSystem,
) -> CqmStatus {
    guard(|| {
        if n == 0 {
            return Err(fail(CqmStatus::Dimension, "dimension must be positive"));
        }
        let h_r = if h_r.is_null() {
            HermitianObservable::zero(n)
        } else {
            HermitianObservable::new(unsafe { read_matrix(h_r, n) }?).or_status()?
        };
        let u = if u.is_null() {
            UnitaryMap::identity(n)
        } else {
            UnitaryMap::new(unsafe { read_matrix(u, n) }?).or_status()?
        };
        let sys = CompositeSystem::new(h_r, u).or_status()?;
        unsafe { write_out(out, Box::into_raw(Box::new(CqmCompositeSystem(sys)))) }
    })
}

/// # Safety
/// `sys` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cqm_composite_free(sys: *mut CqmCompositeSystem) {
    if !sys.is_null() {
        // SAFETY: handle was created by Box::into_raw.
        drop(unsafe { Box::from_raw(sys) });
    }
}

/// Part dimension N, 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cqm_composite_dim(sys: *const CqmCompositeSystem) -> usize {
    unsafe { sys.as_ref() }.map_or(0, |s| s.0.n())
}

/// Largest receiver information gain for the given sender state.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_max_info(
    sys: *const CqmCompositeSystem,
    rho_s0: *const CqmDensityMatrix,
    regime: CqmRegime,
    out: *mut f64,
) -> CqmStatus {
    guard(|| {
        let sys = unsafe { deref(sys, "system") }?;
        let rho = unsafe { deref(rho_s0, "sender state") }?;
        let v = match regime {
            CqmRegime::Unconstrained => infoexchange::max_info(&sys.0, &rho.0),
            CqmRegime::Isoenergetic => {
                infoexchange::isoenergetic_max_info(&sys.0.traceless_shifted().0, &rho.0)
            }
        }
        .or_status()?;
        unsafe { write_out(out, v) }
    })
}

/// Receiver state maximizing the information gain. The caller owns the
/// returned handle.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_optimal_receiver_state(
    sys: *const CqmCompositeSystem,
    rho_s0: *const CqmDensityMatrix,
    regime: CqmRegime,
    out: *mut *mut CqmDensityMatrix,
) -> CqmStatus {
    guard(|| {
        let sys = unsafe { deref(sys, "system") }?;
        let rho = unsafe { deref(rho_s0, "sender state") }?;
        let state = match regime {
            CqmRegime::Unconstrained => infoexchange::optimal_receiver_state(&sys.0, &rho.0),
            CqmRegime::Isoenergetic => {
                infoexchange::isoenergetic_optimal_state(&sys.0.traceless_shifted().0, &rho.0)
            }
        }
        .or_status()?;
        unsafe { write_out(out, Box::into_raw(Box::new(CqmDensityMatrix(state)))) }
    })
}

/// Fills `out` with the exchange report for the regime. On success the
/// report owns a state handle; release it with
/// [`cqm_exchange_report_release`].
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_exchange_report(
    sys: *const CqmCompositeSystem,
    rho_s0: *const CqmDensityMatrix,
    regime: CqmRegime,
    out: *mut CqmExchangeReport,
) -> CqmStatus {
    guard(|| {
        let sys = unsafe { deref(sys, "system") }?;
        let rho = unsafe { deref(rho_s0, "sender state") }?;
        let r = match regime {
            CqmRegime::Unconstrained => Regime::Unconstrained,
            CqmRegime::Isoenergetic => Regime::Isoenergetic,
        };
        let report = infoexchange::exchange_report(&sys.0, &rho.0, r).or_status()?;
        if out.is_null() {
            return Err(fail(CqmStatus::NullPointer, "output pointer is null"));
        }
        let flat = CqmExchangeReport {
            regime,
            n: report.n,
            delta_i: report.delta_i,
            delta_s: report.delta_s,
            eta: report.eta.unwrap_or(f64::NAN),
            has_eta: report.eta.is_some(),
            purity_s0: report.purity_s0,
            energy_s0: report.energy_s0,
            energy_shift: report.energy_shift,
            optimal_rho_r0: Box::into_raw(Box::new(CqmDensityMatrix(report.optimal_rho_r0))),
        };
        unsafe { write_out(out, flat) }
    })
}

/// Frees the state held by a report and nulls the pointer.
///
/// # Safety
/// `report` must be null or a report filled by [`cqm_exchange_report`].
#[no_mangle]
pub unsafe extern "C" fn cqm_exchange_report_release(report: *mut CqmExchangeReport) {
    if let Some(r) = unsafe { report.as_mut() } {
        unsafe { cqm_density_matrix_free(r.optimal_rho_r0) };
        r.optimal_rho_r0 = ptr::null_mut();
    }
}
