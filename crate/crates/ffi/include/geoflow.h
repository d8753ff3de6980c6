#ifndef GEOFLOW_H
#define GEOFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Limit reached by a flowing loop.
 */
typedef enum GeoflowOutcome {
  GEOFLOW_OUTCOME_CLOSED_GEODESIC = 0,
  GEOFLOW_OUTCOME_INCOMPLETE_POINT_DIRECTION = 1,
  GEOFLOW_OUTCOME_DOUBLED_ARC = 2,
  GEOFLOW_OUTCOME_SHRUNK_TO_POINT = 3,
  GEOFLOW_OUTCOME_INCONCLUSIVE = 4,
} GeoflowOutcome;

/**
 * Result code of every call.
 */
typedef enum GeoflowStatus {
  GEOFLOW_STATUS_OK = 0,
  GEOFLOW_STATUS_NULL_POINTER = 1,
  GEOFLOW_STATUS_INVALID_ARGUMENT = 2,
  GEOFLOW_STATUS_OUTSIDE_DOMAIN = 3,
  GEOFLOW_STATUS_UNBOUNDED = 4,
  GEOFLOW_STATUS_NOT_FOUND = 5,
  GEOFLOW_STATUS_COMPUTATION_FAILED = 6,
  GEOFLOW_STATUS_PANIC = 7,
} GeoflowStatus;

/**
 * Opaque chart handle.
 */
typedef struct GeoflowChart GeoflowChart;

/**
 * Polygon closed geodesic summary.
 */
typedef struct GeoflowPolygonResult {
  double y0;
  double angle;
  double length;
  double reintegration_defect;
  bool embedded;
} GeoflowPolygonResult;

/**
 * Flow run summary; `theta1`/`theta2` are NaN when not applicable.
 */
typedef struct GeoflowFlowResult {
  enum GeoflowOutcome outcome;
  double theta1;
  double theta2;
  double final_length;
  double enclosed_drift;
  double time;
} GeoflowFlowResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *geoflow_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *geoflow_version(void);

/**
 * Build a chart from `{"id": ..., "params": {...}}`.
 *
 * # Safety
 * `spec_json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum GeoflowStatus geoflow_chart_new(const char *spec_json, struct GeoflowChart **out);

/**
 * Release a chart; null is ignored.
 *
 * # Safety
 * `chart` must come from [`geoflow_chart_new`] and not be used afterwards.
 */
void geoflow_chart_free(struct GeoflowChart *chart);

/**
 * Metric coefficients `(E, F, G)` at `(u, v)`.
 *
 * # Safety
 * `chart` must be a live handle and `out` point to three doubles.
 */
enum GeoflowStatus geoflow_chart_metric(const struct GeoflowChart *chart,
                                        double u,
                                        double v,
                                        double *out);

/**
 * Gaussian curvature at `(u, v)`.
 *
 * # Safety
 * `chart` must be a live handle and `out` a valid pointer.
 */
enum GeoflowStatus geoflow_chart_curvature(const struct GeoflowChart *chart,
                                           double u,
                                           double v,
                                           double *out);

/**
 * `∫K dA` over the chart disk of `radius` about `(u, v)`.
 * Returns [`GeoflowStatus::Unbounded`] when the integral diverges.
 *
 * # Safety
 * `chart` must be a live handle and `out` a valid pointer.
 */
enum GeoflowStatus geoflow_curvature_integral_disk(const struct GeoflowChart *chart,
                                                   double u,
                                                   double v,
                                                   double radius,
                                                   double tol,
                                                   double *out);

/**
 * Period `Ω_c` of the profile named or written in `profile` (an expression in `r`).
 * `r_max <= 0` lets the profile choose its own range.
 *
 * # Safety
 * `profile` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum GeoflowStatus geoflow_period(const char *profile,
                                  double r_max,
                                  double c,
                                  double tol,
                                  double *out);

/**
 * Embedded closed geodesic on the product polygon `"square"`, `"triangle"` or `"hexagon"`.
 *
 * # Safety
 * `polygon` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum GeoflowStatus geoflow_polygon_geodesic(const char *polygon, struct GeoflowPolygonResult *out);

/**
 * Flow the loop about `(u, v)` enclosing total curvature 2π for at most `max_time`.
 *
 * # Safety
 * `chart` must be a live handle and `out` a valid pointer.
 */
enum GeoflowStatus geoflow_flow_disk(const struct GeoflowChart *chart,
                                     double u,
                                     double v,
                                     size_t vertices,
                                     double max_time,
                                     struct GeoflowFlowResult *out);

/**
 * Run acceptance criterion `id` (1 to 11); `passed` receives the verdict.
 *
 * # Safety
 * `passed` must be a valid pointer.
 */
enum GeoflowStatus geoflow_acceptance(uint8_t id, uint64_t seed, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOFLOW_H */
