//! C ABI for the optoacoustic library.
//!
//! Every function returns an [`OaStatus`]; results come back through out
//! pointers. Objects are opaque handles created by `oa_*_new`/producer
//! calls and released with the matching `oa_*_free`. On failure the
//! thread-local message from [`oa_last_error_message`] says what went wrong.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use optoacoustic::analytic::{covariance_entangle, en_max};
use optoacoustic::gaussian::{extract_pair, log_negativity};
use optoacoustic::propagator::{run_protocol_with, Pair, Sampling, Tolerances, Trajectory};
use optoacoustic::{CovMat, ProtocolTimeline, SystemParams};

/// Result of every `oa_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Entanglement series of a trajectory.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OaSeries {
    Time = 0,
    /// Stokes–phonon log-negativity.
    EnStokesPhonon = 1,
    /// Stokes–anti-Stokes log-negativity.
    EnStokesAntiStokes = 2,
    /// Anti-Stokes occupancy.
    AntiStokesOccupancy = 3,
    /// Phonon occupancy.
    PhononOccupancy = 4,
}

/// Opaque system parameters.
pub struct OaParams(SystemParams);

/// Opaque covariance matrix.
pub struct OaCovMat(CovMat);

/// Opaque protocol trajectory.
pub struct OaTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(OaStatus, String);

impl From<optoacoustic::Error> for Failure {
    fn from(e: optoacoustic::Error) -> Self {
        let code = match e {
            optoacoustic::Error::InvalidArgument(_)
            | optoacoustic::Error::ModeIndex { .. }
            | optoacoustic::Error::Shape { .. }
            | optoacoustic::Error::InvalidCovariance(_) => OaStatus::InvalidArgument,
            _ => OaStatus::Numerical,
        };
        Failure(code, e.to_string())
    }
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard<F>(f: F) -> OaStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            OaStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            OaStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(OaStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(OaStatus::InvalidArgument, msg.into())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    let slot = deref_mut(out, "out")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize, needed: *mut usize) -> Result<(), Failure> {
    if let Some(n) = needed.as_mut() {
        *n = src.len();
    }
    if buf.is_null() {
        return if len == 0 { Ok(()) } else { Err(null("buf")) };
    }
    if len < src.len() {
        return Err(Failure(
            OaStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn oa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns the full length
/// without the terminator. Empty after a successful call.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn oa_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parameters of the reference operating point.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_params_new_default(out: *mut *mut OaParams) -> OaStatus {
    guard(|| put(out, OaParams(SystemParams::reference_point())))
}

/// # Safety
/// `params` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn oa_params_free(params: *mut OaParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

fn field<'a>(p: &'a mut SystemParams, key: &str) -> Result<&'a mut f64, Failure> {
    Ok(match key {
        "gamma" => &mut p.gamma,
        "Gamma" => &mut p.gamma_ac,
        "omega_ac" => &mut p.omega_ac,
        "g" => &mut p.g,
        "g_tilde" => &mut p.g_tilde,
        "v_opt" => &mut p.v_opt,
        "v_ac" => &mut p.v_ac,
        "T_m" => &mut p.t_m,
        "k" => &mut p.k,
        _ => return Err(invalid(format!("unknown parameter {key:?}"))),
    })
}

unsafe fn key_str<'a>(key: *const c_char) -> Result<&'a str, Failure> {
    if key.is_null() {
        return Err(null("key"));
    }
    CStr::from_ptr(key).to_str().map_err(|_| invalid("key is not UTF-8"))
}

/// Sets a parameter by name. Rates are angular (rad/s); names are
/// `gamma`, `Gamma`, `omega_ac`, `g`, `g_tilde`, `gamma_tilde`, `v_opt`,
/// `v_ac`, `T_m`, `k`, `delta_a_tilde`. The value is checked before it is
/// stored.
///
/// # Safety
/// `params` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn oa_params_set(params: *mut OaParams, key: *const c_char, value: f64) -> OaStatus {
    guard(|| {
        let p = &mut deref_mut(params, "params")?.0;
        let key = key_str(key)?;
        let mut q = *p;
        match key {
            "gamma_tilde" => q.gamma_tilde = Some(value),
            "delta_a_tilde" => q.delta_a_tilde = Some(value),
            _ => *field(&mut q, key)? = value,
        }
        q.validate()?;
        *p = q;
        Ok(())
    })
}

/// Reads a parameter by name (see [`oa_params_set`]).
///
/// # Safety
/// `params` must be a live handle, `key` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_params_get(params: *const OaParams, key: *const c_char, out: *mut f64) -> OaStatus {
    guard(|| {
        let mut p = deref(params, "params")?.0;
        let key = key_str(key)?;
        let v = match key {
            "gamma_tilde" => p.gamma_tilde(),
            "delta_a_tilde" => p.delta_a_tilde(),
            _ => *field(&mut p, key)?,
        };
        *deref_mut(out, "out")? = v;
        Ok(())
    })
}

/// Thermal phonon occupancy at the configured temperature.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_params_n_th(params: *const OaParams, out: *mut f64) -> OaStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        *deref_mut(out, "out")? = p.n_th();
        Ok(())
    })
}

/// Predicted peak log-negativity `−ln[1 − 2(g/Γn)²]`; fails with
/// `Numerical` when heating dominates.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_en_max(g: f64, gamma_ac: f64, n_th: f64, out: *mut f64) -> OaStatus {
    guard(|| {
        let v = en_max(g, gamma_ac, n_th)?;
        *deref_mut(out, "out")? = v;
        Ok(())
    })
}

/// Covariance of `n_modes` (2 or 3) modes from `4·n_modes²` row-major
/// values; the input is symmetrized.
///
/// # Safety
/// `data` must point to `4·n_modes²` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn oa_covmat_new(n_modes: usize, data: *const f64, out: *mut *mut OaCovMat) -> OaStatus {
    guard(|| {
        if n_modes == 0 || n_modes > 64 {
            return Err(invalid(format!("n_modes = {n_modes} outside 1..=64")));
        }
        if data.is_null() {
            return Err(null("data"));
        }
        let n = 2 * n_modes;
        let values = std::slice::from_raw_parts(data, n * n);
        let m = nalgebra::DMatrix::from_row_slice(n, n, values);
        put(out, OaCovMat(CovMat::from_matrix(m)?))
    })
}

/// # Safety
/// `cov` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn oa_covmat_free(cov: *mut OaCovMat) {
    if !cov.is_null() {
        drop(Box::from_raw(cov));
    }
}

/// Number of modes.
///
/// # Safety
/// `cov` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_covmat_modes(cov: *const OaCovMat, out: *mut usize) -> OaStatus {
    guard(|| {
        let v = &deref(cov, "cov")?.0;
        *deref_mut(out, "out")? = v.dim();
        Ok(())
    })
}

/// Copies the matrix row-major into `buf`; `needed` (optional) receives
/// the number of values.
///
/// # Safety
/// `cov` must be a live handle; `buf` null with `len = 0` or `len`
/// writable values; `needed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn oa_covmat_data(
    cov: *const OaCovMat,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> OaStatus {
    guard(|| {
        let v = &deref(cov, "cov")?.0;
        let m = v.matrix();
        let rows: Vec<f64> = m.transpose().iter().copied().collect();
        copy_out(&rows, buf, len, needed)
    })
}

/// Symplectic eigenvalues, ascending.
///
/// # Safety
/// As for [`oa_covmat_data`].
#[no_mangle]
pub unsafe extern "C" fn oa_covmat_symplectic_spectrum(
    cov: *const OaCovMat,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> OaStatus {
    guard(|| {
        let v = &deref(cov, "cov")?.0;
        copy_out(&v.symplectic_spectrum(), buf, len, needed)
    })
}

/// Log-negativity between modes `i` and `j`.
///
/// # Safety
/// `cov` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_covmat_log_negativity(
    cov: *const OaCovMat,
    i: usize,
    j: usize,
    out: *mut f64,
) -> OaStatus {
    guard(|| {
        let v = &deref(cov, "cov")?.0;
        let e = log_negativity(&extract_pair(v, i, j)?)?;
        *deref_mut(out, "out")? = e;
        Ok(())
    })
}

/// Closed-form write-phase covariance `(a, b)` at time `t` with the phonon
/// starting at occupancy `n0`.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_covariance_entangle(
    params: *const OaParams,
    t: f64,
    n0: f64,
    out: *mut *mut OaCovMat,
) -> OaStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        put(out, OaCovMat(covariance_entangle(p, t, n0)?))
    })
}

/// Runs write (`tau1`), delay (`tau_d`) and readout (`tau2`) with
/// `samples` points per phase, integrated to relative tolerance `rtol`.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_run_protocol(
    params: *const OaParams,
    tau1: f64,
    tau_d: f64,
    tau2: f64,
    samples: usize,
    rtol: f64,
    out: *mut *mut OaTrajectory,
) -> OaStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        if samples < 2 {
            return Err(invalid(format!("samples = {samples} < 2")));
        }
        if !(rtol.is_finite() && rtol > 0.0) {
            return Err(invalid(format!("rtol = {rtol} must be > 0")));
        }
        let tl = ProtocolTimeline::new(tau1, tau_d, tau2)?;
        let tol = Tolerances {
            rtol,
            ..Tolerances::default()
        };
        put(out, OaTrajectory(run_protocol_with(p, &tl, &Sampling::uniform(samples), tol)?))
    })
}

/// # Safety
/// `traj` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn oa_trajectory_free(traj: *mut OaTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of samples.
///
/// # Safety
/// `traj` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_trajectory_len(traj: *const OaTrajectory, out: *mut usize) -> OaStatus {
    guard(|| {
        let tr = &deref(traj, "traj")?.0;
        *deref_mut(out, "out")? = tr.times.len();
        Ok(())
    })
}

/// Copies one series (an [`OaSeries`] value) into `buf`.
///
/// # Safety
/// As for [`oa_covmat_data`], with `traj` a live handle.
#[no_mangle]
pub unsafe extern "C" fn oa_trajectory_series(
    traj: *const OaTrajectory,
    series: i32,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> OaStatus {
    guard(|| {
        let tr = &deref(traj, "traj")?.0;
        // Taken as an integer: an out-of-range enum from C would be undefined behaviour.
        let s = match series {
            x if x == OaSeries::Time as i32 => &tr.times,
            x if x == OaSeries::EnStokesPhonon as i32 => &tr.en_ab,
            x if x == OaSeries::EnStokesAntiStokes as i32 => &tr.en_a_atilde,
            x if x == OaSeries::AntiStokesOccupancy as i32 => &tr.n_as,
            x if x == OaSeries::PhononOccupancy as i32 => &tr.n_b,
            _ => return Err(invalid(format!("unknown series {series}"))),
        };
        copy_out(s, buf, len, needed)
    })
}

/// Refined peak of the Stokes–phonon (`anti_stokes = false`) or
/// Stokes–anti-Stokes log-negativity.
///
/// # Safety
/// `traj` must be a live handle; `value` and `time` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn oa_trajectory_peak(
    traj: *const OaTrajectory,
    anti_stokes: bool,
    value: *mut f64,
    time: *mut f64,
) -> OaStatus {
    guard(|| {
        let tr = &deref(traj, "traj")?.0;
        let pair = if anti_stokes { Pair::StokesAntiStokes } else { Pair::StokesPhonon };
        let pk = tr.peak(pair)?;
        *deref_mut(value, "value")? = pk.value;
        *deref_mut(time, "time")? = pk.time;
        Ok(())
    })
}
