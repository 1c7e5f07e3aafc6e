#ifndef JULIATHERMO_H
#define JULIATHERMO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JtStatus {
  JT_STATUS_OK = 0,
  JT_STATUS_NULL_POINTER = 1,
  // Malformed input.
  JT_STATUS_CONFIG = 2,
  // A numerical procedure failed to converge.
  JT_STATUS_NUMERICAL = 3,
  // The map lies outside the supported regime.
  JT_STATUS_DOMAIN = 4,
  // Internal error; the library caught a panic.
  JT_STATUS_PANIC = 5,
} JtStatus;

// A Markov cover of a Julia set at a fixed depth.
typedef struct JtCover JtCover;

// Cycles of one period, with their multipliers.
typedef struct JtCycleList JtCycleList;

// A quadratic map `z^2 + c`.
typedef struct JtMap JtMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length without the NUL, or 0
// when the last call succeeded.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t jt_last_error_message(char *buf, size_t len);

// Creates `z^2 + (re + i im)`.
//
// # Safety
// `out` must be a valid pointer; the handle it receives must be released with `jt_map_free`.
enum JtStatus jt_map_new_quadratic(double re, double im, struct JtMap **out);

// # Safety
// `map` must be null or a handle from `jt_map_new_quadratic` not yet freed.
void jt_map_free(struct JtMap *map);

// Hausdorff dimension of the Julia set, refining covers from `depth_min` up to
// `depth_max` until successive depths agree to `tol`.
//
// # Safety
// `map` must be a live handle and `out` a valid pointer.
enum JtStatus jt_hausdorff_dimension(const struct JtMap *map,
                                     double tol,
                                     size_t depth_min,
                                     size_t depth_max,
                                     double *out);

// Orbit-sum pressure `(1/n) log Σ |(f^n)'|^(-s)` over the Julia periodic points of period dividing `n`.
//
// # Safety
// `map` must be a live handle and `out` a valid pointer.
enum JtStatus jt_pressure_orbits(const struct JtMap *map,
                                 double s,
                                 size_t n,
                                 double *out);

// # Safety
// `map` must be a live handle; `out` receives a handle to release with `jt_cover_free`.
enum JtStatus jt_cover_new(const struct JtMap *map, size_t depth, struct JtCover **out);

// # Safety
// `cover` must be null or a handle from `jt_cover_new` not yet freed.
void jt_cover_free(struct JtCover *cover);

// Number of cells, or 0 for a null handle.
//
// # Safety
// `cover` must be null or a live handle.
size_t jt_cover_len(const struct JtCover *cover);

// `log` of the spectral radius of the transfer matrix at exponent `s`.
//
// # Safety
// `cover` must be a live handle and `out` a valid pointer.
enum JtStatus jt_pressure_matrix(const struct JtCover *cover, double s, double *out);

// Zero of the matrix pressure on `[0, 2]` for this cover.
//
// # Safety
// `cover` must be a live handle and `out` a valid pointer.
enum JtStatus jt_bowen_root(const struct JtCover *cover, double tol, double *out);

// Cycles of exact period `period`; with `julia_only` nonzero, only repelling ones.
//
// # Safety
// `map` must be a live handle; `out` receives a handle to release with `jt_cycle_list_free`.
enum JtStatus jt_cycles(const struct JtMap *map,
                        size_t period,
                        int32_t julia_only,
                        struct JtCycleList **out);

// # Safety
// `list` must be null or a handle from `jt_cycles` not yet freed.
void jt_cycle_list_free(struct JtCycleList *list);

// # Safety
// `list` must be null or a live handle.
size_t jt_cycle_list_len(const struct JtCycleList *list);

// Multiplier of cycle `index`.
//
// # Safety
// `list` must be a live handle; `re` and `im` valid pointers.
enum JtStatus jt_cycle_multiplier(const struct JtCycleList *list,
                                  size_t index,
                                  double *re,
                                  double *im);

// G-metric tensor `[g11, g12, g22]` at `c0 = re + i im`, orbit horizon `horizon`, step `h`.
//
// # Safety
// `out` must point to three writable doubles.
enum JtStatus jt_g_metric(double re, double im, size_t horizon, double h, double *out);

// Pressure-metric tensor `[g11, g12, g22]`; fails when the Hessian and variance routes disagree.
//
// # Safety
// `out` must point to three writable doubles.
enum JtStatus jt_pressure_metric(double re, double im, size_t horizon, double h, double *out);

// Running infimum of `(1/n)|dλ/dc|/|λ|` over Julia cycles of period up to `n_max`.
// `holds` is set to 1 when the condition holds up to the horizon and 0 otherwise.
//
// # Safety
// `inf` and `holds` must be valid pointers.
enum JtStatus jt_critical_condition(double re,
                                    double im,
                                    size_t n_max,
                                    double *inf,
                                    int32_t *holds);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JULIATHERMO_H */
