#ifndef UAVBS_H
#define UAVBS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  UAVBS_STATUS_OK = 0,
  UAVBS_STATUS_NULL_POINTER = 1,
  UAVBS_STATUS_VALIDATION = 2,
  UAVBS_STATUS_NUMERICAL = 3,
  UAVBS_STATUS_IO = 4,
  UAVBS_STATUS_PANIC = 5,
} UavbsStatus;

// Placement model for one environment with the default radio.
typedef struct UavbsModel UavbsModel;

typedef struct UavbsScenario UavbsScenario;

typedef struct UavbsSchedule UavbsSchedule;

// Air-to-ground channel parameters.
typedef struct {
  double a;
  double b;
  // Mean excess loss of line-of-sight links, dB.
  double eta_los;
  double eta_nlos;
} UavbsEnvironment;

// Optimal single-slot placement of one subregion.
typedef struct {
  double radius;
  double altitude;
  double tx_power;
  double static_rf;
} UavbsPlacement;

typedef struct {
  double avg_dynamic_rf;
  size_t updates;
  double mobility_joules;
} UavbsScheduleSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *uavbs_last_error(void);

// Looks up `urban`, `dense-urban` or `suburban`.
//
// # Safety
// `name` must be a NUL-terminated string and `out_env` writable.
UavbsStatus uavbs_environment_preset(const char *name, UavbsEnvironment *out_env);

// Transmit power needed by one user at ground distance `r` from a UAV at
// altitude `h`, W.
//
// # Safety
// `env` must be readable and `out_power` writable.
UavbsStatus uavbs_per_user_tx_power(const UavbsEnvironment *env,
                                    double r,
                                    double h,
                                    double *out_power);

// Builds the placement model (optimal altitude ratio) for `env`.
//
// # Safety
// `env` must be readable and `out_model` writable. Release the model with
// [`uavbs_model_free`].
UavbsStatus uavbs_model_new(const UavbsEnvironment *env, UavbsModel **out_model);

// # Safety
// `model` must come from [`uavbs_model_new`] and not be used afterwards.
void uavbs_model_free(UavbsModel *model);

// Optimal altitude-to-radius ratio.
//
// # Safety
// `model` must be a live handle and `out_ratio` writable.
UavbsStatus uavbs_model_altitude_ratio(const UavbsModel *model, double *out_ratio);

// Radius minimizing the static recall frequency, m.
//
// # Safety
// `model` must be a live handle and `out_radius` writable.
UavbsStatus uavbs_model_optimal_radius(const UavbsModel *model,
                                       double lambda,
                                       double p_circuit,
                                       double *out_radius);

// Optimal placement and minimal static recall frequency of a subregion of
// `area` m^2 at density `lambda`.
//
// # Safety
// `model` must be a live handle and `out_placement` writable.
UavbsStatus uavbs_model_min_static_rf(const UavbsModel *model,
                                      double lambda,
                                      double p_circuit,
                                      double battery_j,
                                      double area,
                                      UavbsPlacement *out_placement);

// Loads and validates a scenario file.
//
// # Safety
// `path` must be a NUL-terminated string and `out_scenario` writable.
// Release the scenario with [`uavbs_scenario_free`].
UavbsStatus uavbs_scenario_load(const char *path, UavbsScenario **out_scenario);

// Parses scenario text; an empty string gives the defaults.
//
// # Safety
// `text` must be a NUL-terminated string and `out_scenario` writable.
UavbsStatus uavbs_scenario_parse(const char *text, UavbsScenario **out_scenario);

// # Safety
// `scenario` must come from a scenario constructor and not be used afterwards.
void uavbs_scenario_free(UavbsScenario *scenario);

// Number of slots in the scenario horizon.
//
// # Safety
// `scenario` must be a live handle and `out_slots` writable.
UavbsStatus uavbs_scenario_n_slots(const UavbsScenario *scenario, size_t *out_slots);

// Runs `method` (`smgd`, `lazy`, `diligent` or `optimal`) over the
// scenario horizon. A negative `p_mobility` keeps the scenario's mobility
// powers; otherwise it replaces all three.
//
// # Safety
// `scenario` must be a live handle, `method` a NUL-terminated string and
// `out_schedule` writable. Release the schedule with [`uavbs_schedule_free`].
UavbsStatus uavbs_schedule_run(const UavbsScenario *scenario,
                               const char *method,
                               double p_mobility,
                               UavbsSchedule **out_schedule);

// # Safety
// `schedule` must come from [`uavbs_schedule_run`] and not be used afterwards.
void uavbs_schedule_free(UavbsSchedule *schedule);

// # Safety
// `schedule` must be a live handle and `out_summary` writable.
UavbsStatus uavbs_schedule_summary(const UavbsSchedule *schedule,
                                   UavbsScheduleSummary *out_summary);

// Copies up to `capacity` epoch slot indices into `slots` and stores the
// full count in `out_len`. Call with `capacity = 0` to query the size.
//
// # Safety
// `schedule` must be a live handle, `slots` writable for `capacity`
// elements and `out_len` writable.
UavbsStatus uavbs_schedule_epoch_slots(const UavbsSchedule *schedule,
                                       size_t *slots,
                                       size_t capacity,
                                       size_t *out_len);

// Minimum-cost perfect matching of a row-major `n x n` cost matrix.
// `perm[i]` receives the column assigned to row `i`.
//
// # Safety
// `costs` must hold `n * n` readable values, `perm` `n` writable slots
// and `out_total` must be writable.
UavbsStatus uavbs_solve_assignment(const double *costs, size_t n, size_t *perm, double *out_total);

// Per-subregion sample sizes meeting a learning budget. `exact != 0`
// selects the minimum-total allocation, otherwise the stationarity rule.
//
// # Safety
// `eigenvalues` must hold `k` readable values; `n_samples` and `xi_bounds`
// must each have room for `k` values.
UavbsStatus uavbs_sampling_numbers(const double *eigenvalues,
                                   size_t k,
                                   double hypothesis_volume,
                                   double confidence_delta,
                                   double max_training_error,
                                   double max_rf_increment,
                                   int exact,
                                   double *n_samples,
                                   double *xi_bounds);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UAVBS_H */
