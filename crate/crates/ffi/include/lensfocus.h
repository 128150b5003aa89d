#ifndef LENSFOCUS_H
#define LENSFOCUS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Unrounded arithmetic throughout.
#define LF_MODE_FULL_PRECISION 0

// Rounds intermediate cells the way the bundled tables were printed.
#define LF_MODE_TABLE_REPRODUCTION 1

#define LF_FORMAT_TEXT 0

#define LF_FORMAT_CSV 1

#define LF_FORMAT_PLOTDATA 2

// Status code returned by every function.
typedef enum LfStatus {
  LF_STATUS_OK = 0,
  LF_STATUS_NULL_POINTER = 1,
  LF_STATUS_INVALID_UTF8 = 2,
  LF_STATUS_PARSE_ERROR = 3,
  LF_STATUS_INVALID_ARGUMENT = 4,
  LF_STATUS_DEGENERATE = 5,
  LF_STATUS_INSUFFICIENT_DATA = 6,
  LF_STATUS_PANIC = 7,
} LfStatus;

// Per-row estimates plus their mean and standard error.
typedef struct LfEstimate LfEstimate;

// A parsed measurement session.
typedef struct LfSession LfSession;

// Half-widths of the uniform jitter applied in Monte Carlo trials.
typedef struct LfNoise {
  double pixel_halfwidth;
  double d_halfwidth_cm;
  double u_halfwidth_cm;
  uint64_t seed;
} LfNoise;

// Summary of a Monte Carlo focal-length distribution.
typedef struct LfUncertainty {
  size_t n;
  size_t failed;
  double mean_f;
  double sd_f;
  double q025;
  double q500;
  double q975;
} LfUncertainty;

// One estimated row. Distances and widths in cm.
typedef struct LfRow {
  uint32_t obs_no;
  double d1_cm;
  uint32_t pixel1;
  double i1_cm;
  double d_cm;
  uint32_t pixel2;
  double i2_cm;
  double width_cm;
  double magnification;
  double focal_length_cm;
} LfRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL if none.
// The pointer stays valid until the next failing call on the same thread.
const char *lf_last_error(void);

// Library version as a static NUL-terminated string.
const char *lf_version(void);

// Parses session text. On success `*out_session` owns a new session.
//
// # Safety
// `text` must be a NUL-terminated string; `out_session` must be writable.
enum LfStatus lf_session_parse(const char *text, struct LfSession **out_session);

// Loads one of the bundled datasets: 1 for the concave lens, 2 for the convex lens.
//
// # Safety
// `out_session` must be writable.
enum LfStatus lf_session_bundled(uint32_t table, struct LfSession **out_session);

// Releases a session. NULL is ignored.
//
// # Safety
// `session` must come from this library and not be used afterwards.
void lf_session_free(struct LfSession *session);

// # Safety
// `session` must be a live handle; `count` must be writable.
enum LfStatus lf_session_row_count(const struct LfSession *session, size_t *count);

// Estimates every row of a session and aggregates them.
//
// # Safety
// `session` must be a live handle; `out_estimate` must be writable.
enum LfStatus lf_session_estimate(const struct LfSession *session,
                                  uint32_t rounding,
                                  struct LfEstimate **out_estimate);

// Monte Carlo spread of one row's focal length. `noise` may be NULL for defaults with seed 0.
//
// # Safety
// `session` must be a live handle; `noise` NULL or readable; `out_summary` writable.
enum LfStatus lf_session_uncertainty(const struct LfSession *session,
                                     size_t row_index,
                                     const struct LfNoise *noise,
                                     size_t trials,
                                     struct LfUncertainty *out_summary);

// Default measurement noise with the given seed.
struct LfNoise lf_noise_default(uint64_t seed);

// Releases an estimate. NULL is ignored.
//
// # Safety
// `estimate` must come from this library and not be used afterwards.
void lf_estimate_free(struct LfEstimate *estimate);

// # Safety
// `estimate` must be a live handle; `count` must be writable.
enum LfStatus lf_estimate_row_count(const struct LfEstimate *estimate, size_t *count);

// Mean focal length in cm; negative for a diverging lens.
//
// # Safety
// `estimate` must be a live handle; `mean_f` must be writable.
enum LfStatus lf_estimate_mean_f(const struct LfEstimate *estimate, double *mean_f);

// Standard error of the mean focal length in cm.
//
// # Safety
// `estimate` must be a live handle; `sem_f` must be writable.
enum LfStatus lf_estimate_sem_f(const struct LfEstimate *estimate, double *sem_f);

// # Safety
// `estimate` must be a live handle; `row` must be writable.
enum LfStatus lf_estimate_row(const struct LfEstimate *estimate, size_t index, struct LfRow *row);

// Renders a report. `*out_text` receives a string to be released with `lf_string_free`.
//
// # Safety
// `estimate` must be a live handle; `out_text` must be writable.
enum LfStatus lf_estimate_report(const struct LfEstimate *estimate,
                                 uint32_t format,
                                 char **out_text);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void lf_string_free(char *s);

// Image distance v for object distance u and focal length f, all signed cm.
//
// # Safety
// `v_cm` must be writable.
enum LfStatus lf_image_distance(double u_cm, double f_cm, double *v_cm);

// Focal length from object distance and lateral magnification.
//
// # Safety
// `f_cm` must be writable.
enum LfStatus lf_focal_from_magnification(double u_cm, double m, double *f_cm);

// Virtual-image width from two sensor widths taken a displacement `d_cm` apart.
//
// # Safety
// `width_cm` must be writable.
enum LfStatus lf_width_two_position(double d_cm,
                                    double camera_focal_cm,
                                    double i1_cm,
                                    double i2_cm,
                                    double *width_cm);

// Sensor width in cm of a span of `count` pixels at `pitch_um` micrometres.
//
// # Safety
// `width_cm` must be writable.
enum LfStatus lf_pixels_to_width(uint32_t count, double pitch_um, double *width_cm);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LENSFOCUS_H */
