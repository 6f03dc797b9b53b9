//! C ABI over the solver: opaque handles, integer status codes, and a
//! per-thread last-error message. See the generated `include/bbmb.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use bbmb::config::ScenarioConfig;
use bbmb::stepper::{run_simulation, SimulationResult};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbmbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    SolverFailure = 4,
    Io = 5,
    BufferTooSmall = 6,
}

/// Opaque parsed scenario.
pub struct BbmbScenario(ScenarioConfig);

/// Opaque completed simulation.
pub struct BbmbRun(SimulationResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: BbmbStatus, err: impl std::fmt::Display) -> BbmbStatus {
    set_error(err.to_string());
    status
}

fn status_for(err: &bbmb::Error) -> BbmbStatus {
    match err {
        bbmb::Error::Io(_) => BbmbStatus::Io,
        bbmb::Error::Config(_) | bbmb::Error::InvalidMesh(_) | bbmb::Error::InvalidParams(_) => {
            BbmbStatus::InvalidConfig
        }
        _ => BbmbStatus::SolverFailure,
    }
}

/// Copies the last error message for the calling thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full length in bytes
/// excluding the NUL, or 0 if there is no pending error.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be NULL (query mode).
#[no_mangle]
pub unsafe extern "C" fn bbmb_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

unsafe fn parse_scenario(
    text: &str,
    out: *mut *mut BbmbScenario,
) -> BbmbStatus {
    match ScenarioConfig::from_str(text) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(BbmbScenario(cfg)));
            BbmbStatus::Ok
        }
        Err(e) => fail(status_for(&e), e),
    }
}

/// Parses a scenario from `key = value` text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbmb_scenario_parse(
    text: *const c_char,
    out: *mut *mut BbmbScenario,
) -> BbmbStatus {
    if text.is_null() || out.is_null() {
        return fail(BbmbStatus::NullPointer, "NULL argument");
    }
    match CStr::from_ptr(text).to_str() {
        Ok(s) => parse_scenario(s, out),
        Err(e) => fail(BbmbStatus::InvalidUtf8, e),
    }
}

/// Loads and parses a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbmb_scenario_load(
    path: *const c_char,
    out: *mut *mut BbmbScenario,
) -> BbmbStatus {
    if path.is_null() || out.is_null() {
        return fail(BbmbStatus::NullPointer, "NULL argument");
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => Path::new(s),
        Err(e) => return fail(BbmbStatus::InvalidUtf8, e),
    };
    match ScenarioConfig::from_file(path) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(BbmbScenario(cfg)));
            BbmbStatus::Ok
        }
        Err(e) => fail(status_for(&e), e),
    }
}

/// Frees a scenario handle. NULL is a no-op.
///
/// # Safety
/// `scenario` must come from `bbmb_scenario_*` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bbmb_scenario_free(scenario: *mut BbmbScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs the scenario's simulation to completion.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbmb_run(
    scenario: *const BbmbScenario,
    out: *mut *mut BbmbRun,
) -> BbmbStatus {
    if scenario.is_null() || out.is_null() {
        return fail(BbmbStatus::NullPointer, "NULL argument");
    }
    let cfg = &(*scenario).0;
    let res = cfg
        .initial_field()
        .and_then(|w0| run_simulation(&w0, &cfg.params, &cfg.stepper));
    match res {
        Ok(r) => {
            *out = Box::into_raw(Box::new(BbmbRun(r)));
            BbmbStatus::Ok
        }
        Err(e) => fail(status_for(&e), e),
    }
}

/// Frees a run handle. NULL is a no-op.
///
/// # Safety
/// `run` must come from `bbmb_run` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bbmb_run_free(run: *mut BbmbRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of recorded samples in a completed run.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bbmb_run_sample_count(run: *const BbmbRun) -> usize {
    if run.is_null() {
        return 0;
    }
    (*run).0.times.len()
}

/// Number of nodal values in the final state.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bbmb_run_state_len(run: *const BbmbRun) -> usize {
    if run.is_null() {
        return 0;
    }
    (*run).0.final_state.values().len()
}

unsafe fn copy_series(src: &[f64], buf: *mut f64, len: usize) -> BbmbStatus {
    if buf.is_null() {
        return fail(BbmbStatus::NullPointer, "NULL buffer");
    }
    if len < src.len() {
        return fail(
            BbmbStatus::BufferTooSmall,
            format!("need {} slots, got {len}", src.len()),
        );
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    BbmbStatus::Ok
}

/// Copies the recorded sample times into `buf`.
///
/// # Safety
/// `run` must be live; `buf` must hold `len >= bbmb_run_sample_count` doubles.
#[no_mangle]
pub unsafe extern "C" fn bbmb_run_times(
    run: *const BbmbRun,
    buf: *mut f64,
    len: usize,
) -> BbmbStatus {
    if run.is_null() {
        return fail(BbmbStatus::NullPointer, "NULL run");
    }
    copy_series(&(*run).0.times, buf, len)
}

/// Copies the recorded L2 norms into `buf`.
///
/// # Safety
/// As for `bbmb_run_times`.
#[no_mangle]
pub unsafe extern "C" fn bbmb_run_l2(
    run: *const BbmbRun,
    buf: *mut f64,
    len: usize,
) -> BbmbStatus {
    if run.is_null() {
        return fail(BbmbStatus::NullPointer, "NULL run");
    }
    copy_series(&(*run).0.l2, buf, len)
}

/// Copies the final nodal state into `buf`.
///
/// # Safety
/// `run` must be live; `buf` must hold `len >= bbmb_run_state_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bbmb_run_final_state(
    run: *const BbmbRun,
    buf: *mut f64,
    len: usize,
) -> BbmbStatus {
    if run.is_null() {
        return fail(BbmbStatus::NullPointer, "NULL run");
    }
    copy_series((*run).0.final_state.values(), buf, len)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENARIO: &str = "mode = both_neumann_control\nmu = 0.5\nnu = 0.5\nw_d = 3\n\
        c0 = 1\nc1 = 1\nn_cells = 6\ndt = 1e-3\nt_end = 0.02\ninitial = cubic\n\
        record_every = 5\n\0";

    #[test]
    fn parse_run_and_read_back() {
        unsafe {
            let mut sc: *mut BbmbScenario = ptr::null_mut();
            let st = bbmb_scenario_parse(SCENARIO.as_ptr().cast(), &mut sc);
            assert_eq!(st, BbmbStatus::Ok);
            let mut run: *mut BbmbRun = ptr::null_mut();
            assert_eq!(bbmb_run(sc, &mut run), BbmbStatus::Ok);
            let n = bbmb_run_sample_count(run);
            assert_eq!(n, 5);
            let mut times = vec![0.0; n];
            let mut l2 = vec![0.0; n];
            assert_eq!(bbmb_run_times(run, times.as_mut_ptr(), n), BbmbStatus::Ok);
            assert_eq!(bbmb_run_l2(run, l2.as_mut_ptr(), n), BbmbStatus::Ok);
            assert_eq!(times[0], 0.0);
            assert!(l2.iter().all(|v| v.is_finite() && *v > 0.0));
            let m = bbmb_run_state_len(run);
            assert_eq!(m, 7);
            // undersized buffer is rejected
            assert_eq!(
                bbmb_run_final_state(run, l2.as_mut_ptr(), 3),
                BbmbStatus::BufferTooSmall
            );
            bbmb_run_free(run);
            bbmb_scenario_free(sc);
        }
    }

    #[test]
    fn errors_and_messages() {
        unsafe {
            let mut sc: *mut BbmbScenario = ptr::null_mut();
            let st = bbmb_scenario_parse("mu = nope\n\0".as_ptr().cast(), &mut sc);
            assert_eq!(st, BbmbStatus::InvalidConfig);
            let needed = bbmb_last_error(ptr::null_mut(), 0);
            assert!(needed > 0);
            let mut buf = vec![0i8; needed + 1];
            bbmb_last_error(buf.as_mut_ptr().cast(), buf.len());
            let msg = CStr::from_ptr(buf.as_ptr().cast()).to_str().unwrap();
            assert!(msg.contains("mu"), "{msg}");

            assert_eq!(
                bbmb_scenario_parse(ptr::null(), &mut sc),
                BbmbStatus::NullPointer
            );
            let missing = b"/no/such/file\0";
            assert_eq!(
                bbmb_scenario_load(missing.as_ptr().cast(), &mut sc),
                BbmbStatus::Io
            );
            // free of NULL is a no-op
            bbmb_scenario_free(ptr::null_mut());
            bbmb_run_free(ptr::null_mut());
        }
    }
}
