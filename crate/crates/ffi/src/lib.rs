//! C ABI for the placement and scheduling library.
//!
//! Every fallible function returns a [`UavbsStatus`]; on failure the
//! message is available from [`uavbs_last_error`] on the same thread.
//! Objects are opaque handles released with their `_free` function.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use uavbs::assignment::{solve_assignment, CostMatrix};
use uavbs::channel::{per_user_tx_power, Environment, RadioConfig};
use uavbs::placement::{EnergyParams, PlacementModel};
use uavbs::sampling::{min_sampling_numbers, optimal_sampling_numbers, LearningBudget};
use uavbs::scenario::Scenario;
use uavbs::scheduler::{run_schedule, Method, Schedule};
use uavbs::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UavbsStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Numerical = 3,
    Io = 4,
    Panic = 5,
}

/// Air-to-ground channel parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavbsEnvironment {
    pub a: f64,
    pub b: f64,
    /// Mean excess loss of line-of-sight links, dB.
    pub eta_los: f64,
    pub eta_nlos: f64,
}

/// Optimal single-slot placement of one subregion.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UavbsPlacement {
    pub radius: f64,
    pub altitude: f64,
    pub tx_power: f64,
    pub static_rf: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UavbsScheduleSummary {
    pub avg_dynamic_rf: f64,
    pub updates: usize,
    pub mobility_joules: f64,
}

/// Placement model for one environment with the default radio.
pub struct UavbsModel(Arc<PlacementModel>);

pub struct UavbsScenario(Scenario);

pub struct UavbsSchedule(Schedule);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> UavbsStatus {
    match err {
        Error::Io { .. } => UavbsStatus::Io,
        e if e.is_numerical() => UavbsStatus::Numerical,
        _ => UavbsStatus::Validation,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard<F>(f: F) -> UavbsStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            UavbsStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            UavbsStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            UavbsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure::Lib(Error::Invalid {
            what: "string argument",
            reason: format!("{what} is not valid UTF-8"),
        })
    })
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn to_env(e: &UavbsEnvironment) -> Result<Environment, Error> {
    Environment::new("custom", e.a, e.b, e.eta_los, e.eta_nlos)
}

/// Message of the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn uavbs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Looks up `urban`, `dense-urban` or `suburban`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out_env` writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_environment_preset(name: *const c_char, out_env: *mut UavbsEnvironment) -> UavbsStatus {
    guard(|| {
        let e = Environment::preset(string(name, "name")?)?;
        *out(out_env, "out_env")? = UavbsEnvironment {
            a: e.a,
            b: e.b,
            eta_los: e.eta_los,
            eta_nlos: e.eta_nlos,
        };
        Ok(())
    })
}

/// Transmit power needed by one user at ground distance `r` from a UAV at
/// altitude `h`, W.
///
/// # Safety
/// `env` must be readable and `out_power` writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_per_user_tx_power(
    env: *const UavbsEnvironment,
    r: f64,
    h: f64,
    out_power: *mut f64,
) -> UavbsStatus {
    guard(|| {
        let e = to_env(deref(env, "env")?)?;
        *out(out_power, "out_power")? = per_user_tx_power(r, h, &e, &RadioConfig::default())?;
        Ok(())
    })
}

/// Builds the placement model (optimal altitude ratio) for `env`.
///
/// # Safety
/// `env` must be readable and `out_model` writable. Release the model with
/// [`uavbs_model_free`].
#[no_mangle]
pub unsafe extern "C" fn uavbs_model_new(env: *const UavbsEnvironment, out_model: *mut *mut UavbsModel) -> UavbsStatus {
    guard(|| {
        let slot = out(out_model, "out_model")?;
        let e = to_env(deref(env, "env")?)?;
        let model = PlacementModel::cached(&e, &RadioConfig::default())?;
        *slot = Box::into_raw(Box::new(UavbsModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`uavbs_model_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn uavbs_model_free(model: *mut UavbsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Optimal altitude-to-radius ratio.
///
/// # Safety
/// `model` must be a live handle and `out_ratio` writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_model_altitude_ratio(model: *const UavbsModel, out_ratio: *mut f64) -> UavbsStatus {
    guard(|| {
        *out(out_ratio, "out_ratio")? = deref(model, "model")?.0.altitude_ratio;
        Ok(())
    })
}

/// Radius minimizing the static recall frequency, m.
///
/// # Safety
/// `model` must be a live handle and `out_radius` writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_model_optimal_radius(
    model: *const UavbsModel,
    lambda: f64,
    p_circuit: f64,
    out_radius: *mut f64,
) -> UavbsStatus {
    guard(|| {
        *out(out_radius, "out_radius")? = deref(model, "model")?.0.optimal_radius(lambda, p_circuit)?;
        Ok(())
    })
}

/// Optimal placement and minimal static recall frequency of a subregion of
/// `area` m^2 at density `lambda`.
///
/// # Safety
/// `model` must be a live handle and `out_placement` writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_model_min_static_rf(
    model: *const UavbsModel,
    lambda: f64,
    p_circuit: f64,
    battery_j: f64,
    area: f64,
    out_placement: *mut UavbsPlacement,
) -> UavbsStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let energy = EnergyParams {
            p_circuit,
            battery_j,
            ..EnergyParams::default()
        };
        energy.validate()?;
        let (rf, p) = m.0.min_static_rf(lambda, &energy, area)?;
        *out(out_placement, "out_placement")? = UavbsPlacement {
            radius: p.radius,
            altitude: p.altitude,
            tx_power: p.tx_power,
            static_rf: rf,
        };
        Ok(())
    })
}

fn boxed_scenario(s: Scenario, slot: &mut *mut UavbsScenario) -> Result<(), Failure> {
    s.validate()?;
    *slot = Box::into_raw(Box::new(UavbsScenario(s)));
    Ok(())
}

/// Loads and validates a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out_scenario` writable.
/// Release the scenario with [`uavbs_scenario_free`].
#[no_mangle]
pub unsafe extern "C" fn uavbs_scenario_load(path: *const c_char, out_scenario: *mut *mut UavbsScenario) -> UavbsStatus {
    guard(|| {
        let slot = out(out_scenario, "out_scenario")?;
        boxed_scenario(Scenario::load(Path::new(string(path, "path")?))?, slot)
    })
}

/// Parses scenario text; an empty string gives the defaults.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out_scenario` writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_scenario_parse(text: *const c_char, out_scenario: *mut *mut UavbsScenario) -> UavbsStatus {
    guard(|| {
        let slot = out(out_scenario, "out_scenario")?;
        boxed_scenario(Scenario::parse(string(text, "text")?, Path::new("<string>"))?, slot)
    })
}

/// # Safety
/// `scenario` must come from a scenario constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn uavbs_scenario_free(scenario: *mut UavbsScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of slots in the scenario horizon.
///
/// # Safety
/// `scenario` must be a live handle and `out_slots` writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_scenario_n_slots(scenario: *const UavbsScenario, out_slots: *mut usize) -> UavbsStatus {
    guard(|| {
        *out(out_slots, "out_slots")? = deref(scenario, "scenario")?.0.n_slots();
        Ok(())
    })
}

/// Runs `method` (`smgd`, `lazy`, `diligent` or `optimal`) over the
/// scenario horizon. A negative `p_mobility` keeps the scenario's mobility
/// powers; otherwise it replaces all three.
///
/// # Safety
/// `scenario` must be a live handle, `method` a NUL-terminated string and
/// `out_schedule` writable. Release the schedule with [`uavbs_schedule_free`].
#[no_mangle]
pub unsafe extern "C" fn uavbs_schedule_run(
    scenario: *const UavbsScenario,
    method: *const c_char,
    p_mobility: f64,
    out_schedule: *mut *mut UavbsSchedule,
) -> UavbsStatus {
    guard(|| {
        let slot = out(out_schedule, "out_schedule")?;
        let s = &deref(scenario, "scenario")?.0;
        let method: Method = string(method, "method")?.parse()?;
        let energy = if p_mobility < 0.0 {
            s.energy.clone()
        } else {
            s.energy.clone().with_mobility_power(p_mobility)
        };
        let problem = s.planning_problem_with(&energy, s.start_seconds, s.n_slots())?;
        let schedule = run_schedule(&problem, method, s.objective)?;
        *slot = Box::into_raw(Box::new(UavbsSchedule(schedule)));
        Ok(())
    })
}

/// # Safety
/// `schedule` must come from [`uavbs_schedule_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn uavbs_schedule_free(schedule: *mut UavbsSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// # Safety
/// `schedule` must be a live handle and `out_summary` writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_schedule_summary(
    schedule: *const UavbsSchedule,
    out_summary: *mut UavbsScheduleSummary,
) -> UavbsStatus {
    guard(|| {
        let s = &deref(schedule, "schedule")?.0;
        *out(out_summary, "out_summary")? = UavbsScheduleSummary {
            avg_dynamic_rf: s.avg_dynamic_rf,
            updates: s.update_count(),
            mobility_joules: s.total_mobility_joules(),
        };
        Ok(())
    })
}

/// Copies up to `capacity` epoch slot indices into `slots` and stores the
/// full count in `out_len`. Call with `capacity = 0` to query the size.
///
/// # Safety
/// `schedule` must be a live handle, `slots` writable for `capacity`
/// elements and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_schedule_epoch_slots(
    schedule: *const UavbsSchedule,
    slots: *mut usize,
    capacity: usize,
    out_len: *mut usize,
) -> UavbsStatus {
    guard(|| {
        let epochs = deref(schedule, "schedule")?.0.epoch_slots();
        let len = out(out_len, "out_len")?;
        let buf = slice_mut(slots, capacity, "slots")?;
        for (dst, src) in buf.iter_mut().zip(&epochs) {
            *dst = *src;
        }
        *len = epochs.len();
        Ok(())
    })
}

/// Minimum-cost perfect matching of a row-major `n x n` cost matrix.
/// `perm[i]` receives the column assigned to row `i`.
///
/// # Safety
/// `costs` must hold `n * n` readable values, `perm` `n` writable slots
/// and `out_total` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uavbs_solve_assignment(
    costs: *const f64,
    n: usize,
    perm: *mut usize,
    out_total: *mut f64,
) -> UavbsStatus {
    guard(|| {
        let len = n.checked_mul(n).ok_or_else(|| {
            Failure::Lib(Error::Invalid {
                what: "cost matrix",
                reason: "size overflows".into(),
            })
        })?;
        let m = CostMatrix::new(n, slice(costs, len, "costs")?.to_vec())?;
        let result = solve_assignment(&m);
        slice_mut(perm, n, "perm")?.copy_from_slice(&result.perm);
        *out(out_total, "out_total")? = result.total_energy;
        Ok(())
    })
}

/// Per-subregion sample sizes meeting a learning budget. `exact != 0`
/// selects the minimum-total allocation, otherwise the stationarity rule.
///
/// # Safety
/// `eigenvalues` must hold `k` readable values; `n_samples` and `xi_bounds`
/// must each have room for `k` values.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn uavbs_sampling_numbers(
    eigenvalues: *const f64,
    k: usize,
    hypothesis_volume: f64,
    confidence_delta: f64,
    max_training_error: f64,
    max_rf_increment: f64,
    exact: c_int,
    n_samples: *mut f64,
    xi_bounds: *mut f64,
) -> UavbsStatus {
    guard(|| {
        let eigen = slice(eigenvalues, k, "eigenvalues")?;
        let budget = LearningBudget {
            hypothesis_volume,
            confidence_delta,
            max_training_error,
            max_rf_increment,
        };
        let plan = if exact != 0 {
            optimal_sampling_numbers(eigen, &budget)?
        } else {
            min_sampling_numbers(eigen, &budget)?
        };
        slice_mut(n_samples, k, "n_samples")?.copy_from_slice(&plan.n_samples);
        slice_mut(xi_bounds, k, "xi_bounds")?.copy_from_slice(&plan.xi_bounds);
        Ok(())
    })
}
