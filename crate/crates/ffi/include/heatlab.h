/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef HEATLAB_H
#define HEATLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum hl_status {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_ARGUMENT = 2,
  HL_STATUS_DOMAIN = 3,
  HL_STATUS_NUMERICAL = 4,
  HL_STATUS_CONFIG = 5,
  HL_STATUS_IO = 6,
  HL_STATUS_BUFFER_TOO_SMALL = 7,
  HL_STATUS_PANIC = 8,
} hl_status;

typedef struct hl_kernel hl_kernel;

/*
 Self-adjoint generator with its spectral data.
 */
typedef struct hl_model hl_model;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. Valid until the next
 failing call on the same thread.
 */
const char *hl_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

/*
 Discretizes a graph document with mesh size `h`.

 # Safety
 `graph_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum hl_status hl_graph_model_new(const char *graph_json, double h, struct hl_model **out);

/*
 Gasket approximation at `level` with the resistance metric.

 # Safety
 `out` must be a valid pointer.
 */
enum hl_status hl_gasket_model_new(uint32_t level, struct hl_model **out);

/*
 # Safety
 `model` must come from a constructor of this library and not be used
 afterwards. Null is ignored.
 */
void hl_model_free(struct hl_model *model);

/*
 # Safety
 `model` and `out` must be valid pointers.
 */
enum hl_status hl_model_dimension(const struct hl_model *model, size_t *out);

/*
 Copies up to `len` ascending eigenvalues into `buf` and stores the total
 count in `count`. Returns `HL_STATUS_BUFFER_TOO_SMALL` when `len` is
 short; the copied prefix is still valid.

 # Safety
 `buf` must hold `len` doubles; `model` and `count` must be valid.
 */
enum hl_status hl_model_eigenvalues(const struct hl_model *model,
                                    double *buf,
                                    size_t len,
                                    size_t *count);

/*
 Heat kernel at time `t`.

 # Safety
 `model` and `out` must be valid pointers.
 */
enum hl_status hl_heat_kernel(const struct hl_model *model, double t, struct hl_kernel **out);

/*
 # Safety
 `kernel` must come from [`hl_heat_kernel`] and not be used afterwards.
 Null is ignored.
 */
void hl_kernel_free(struct hl_kernel *kernel);

/*
 Copies the kernel matrix, row-major, into `buf` of `len` doubles
 (`len ≥ n²`).

 # Safety
 `kernel` must be valid and `buf` must hold `len` doubles.
 */
enum hl_status hl_kernel_values(const struct hl_kernel *kernel, double *buf, size_t len);

/*
 Kernel entry `p(x_i, x_j)`.

 # Safety
 `kernel` and `out` must be valid pointers.
 */
enum hl_status hl_kernel_value(const struct hl_kernel *kernel, size_t i, size_t j, double *out);

/*
 `max |p − pᵀ| / max |p|`.

 # Safety
 `kernel` and `out` must be valid pointers.
 */
enum hl_status hl_kernel_symmetry_residual(const struct hl_kernel *kernel, double *out);

/*
 `max_x |Σ_y p(x, y) w(y) − 1|`.

 # Safety
 `kernel` and `out` must be valid pointers.
 */
enum hl_status hl_kernel_mass_defect(const struct hl_kernel *kernel, double *out);

/*
 `max |p_{s+t} − p_t W p_s| / max |p_{s+t}|`.

 # Safety
 `model` and `out` must be valid pointers.
 */
enum hl_status hl_chapman_kolmogorov_residual(const struct hl_model *model,
                                              double s,
                                              double t,
                                              double *out);

/*
 Runs a scenario file like `heatlab run`; `out_dir` may be null. The
 command-line exit code (0, 2, 3 or 4) is stored in `exit_code`.

 # Safety
 `scenario_path` must be a NUL-terminated string, `out_dir` null or
 NUL-terminated, and `exit_code` valid.
 */
enum hl_status hl_run_scenario(const char *scenario_path, const char *out_dir, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEATLAB_H */
