#ifndef DIMER_FFI_H
#define DIMER_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DimerStatus {
  DIMER_STATUS_OK = 0,
  DIMER_STATUS_NULL_POINTER = 1,
  DIMER_STATUS_INVALID_INPUT = 2,
  DIMER_STATUS_UNSUPPORTED = 3,
  DIMER_STATUS_NUMERIC = 4,
  DIMER_STATUS_IO = 5,
  DIMER_STATUS_OUT_OF_RANGE = 6,
  DIMER_STATUS_PANIC = 7,
} DimerStatus;

typedef enum DimerPhase {
  /**
   * Not computed (finite temperature or not requested).
   */
  DIMER_PHASE_NONE = 0,
  DIMER_PHASE_REGION_I = 1,
  DIMER_PHASE_REGION_II = 2,
  DIMER_PHASE_REGION_III = 3,
  DIMER_PHASE_UNCLASSIFIED = 4,
} DimerPhase;

typedef enum DimerFormat {
  DIMER_FORMAT_CSV = 0,
  DIMER_FORMAT_JSON = 1,
} DimerFormat;

/**
 * Opaque sweep result.
 */
typedef struct DimerGridResult DimerGridResult;

/**
 * Opaque thermal (or ground) state.
 */
typedef struct DimerThermalState DimerThermalState;

/**
 * Model parameters in absolute units.
 */
typedef struct DimerParams {
  double j;
  double delta;
  double d_ani;
  double h;
} DimerParams;

typedef struct DimerReport {
  double c_l1;
  double c_r;
  double negativity;
  double steering_s;
  bool steerable;
  /**
   * Set only at `t = 0`.
   */
  enum DimerPhase phase;
} DimerReport;

/**
 * One sweep row. Quantities not requested are NaN; `steerable` is then -1.
 */
typedef struct DimerGridRow {
  double x;
  double y;
  double c_l1;
  double c_r;
  double negativity;
  double steering_s;
  int32_t steerable;
  enum DimerPhase phase;
  /**
   * Ground-manifold dimension at `t = 0`, else 0.
   */
  size_t ground_rank;
} DimerGridRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *dimer_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *dimer_last_error(void);

/**
 * Thermal state at `t > 0`, or the ground-state mixture at `t = 0`.
 */
enum DimerStatus dimer_state_new(const struct DimerParams *params_in,
                                 double t,
                                 struct DimerThermalState **out);

/**
 * Accepts null.
 */
void dimer_state_free(struct DimerThermalState *state);

/**
 * Copies the 9x9 density matrix, row-major, into `out[81]`.
 */
enum DimerStatus dimer_state_density(const struct DimerThermalState *state, double *out);

/**
 * Partition function; `Unsupported` for a ground state.
 */
enum DimerStatus dimer_state_partition_function(const struct DimerThermalState *state, double *out);

enum DimerStatus dimer_state_evaluate(const struct DimerThermalState *state,
                                      struct DimerReport *out);

/**
 * One-shot [`dimer_state_new`] + [`dimer_state_evaluate`].
 */
enum DimerStatus dimer_evaluate(const struct DimerParams *params_in,
                                double t,
                                struct DimerReport *out);

/**
 * Analytic energies `E_1..E_9` into `out[9]`.
 */
enum DimerStatus dimer_spectrum(const struct DimerParams *params_in, double *out);

/**
 * Runs a sweep described by a JSON grid spec. `workers = 0` uses the
 * default pool.
 */
enum DimerStatus dimer_sweep_run(const char *spec_json,
                                 size_t workers,
                                 struct DimerGridResult **out);

/**
 * Accepts null.
 */
void dimer_sweep_free(struct DimerGridResult *result);

/**
 * Number of rows; 0 for null.
 */
size_t dimer_sweep_len(const struct DimerGridResult *result);

/**
 * Row `index` in x-major order.
 */
enum DimerStatus dimer_sweep_row(const struct DimerGridResult *result,
                                 size_t index,
                                 struct DimerGridRow *out);

/**
 * `format` is a [`DimerFormat`] value.
 */
enum DimerStatus dimer_sweep_write(const struct DimerGridResult *result,
                                   const char *path,
                                   int32_t format);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIMER_FFI_H */
