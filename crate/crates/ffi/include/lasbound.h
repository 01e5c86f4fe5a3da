#ifndef LASBOUND_H
#define LASBOUND_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LbStatus {
  LB_STATUS_OK = 0,
  LB_STATUS_NULL_ARGUMENT = 1,
  LB_STATUS_PARSE = 2,
  LB_STATUS_CONFIG = 3,
  LB_STATUS_INPUT = 4,
  LB_STATUS_NUMERICAL = 5,
  LB_STATUS_TIME_LIMIT = 6,
  LB_STATUS_RESOURCE_GUARD = 7,
  LB_STATUS_IO = 8,
  LB_STATUS_PANIC = 9,
} LbStatus;

/**
 * Opaque graph handle.
 */
typedef struct LbGraph LbGraph;

/**
 * Opaque run report handle.
 */
typedef struct LbReport LbReport;

/**
 * Solver and pipeline settings. Obtain defaults from [`lb_config_default`].
 */
typedef struct LbConfig {
  size_t max_basis;
  /**
   * 0 selects the basis automatically, 1 or 2 force that level.
   */
  uint32_t level;
  double time_limit_sec;
  /**
   * 0 single, 1 double.
   */
  uint32_t precision;
  double rho_scale;
  double step;
  double tol;
  uint64_t check_every;
  uint64_t k_stag;
  double stag_tol;
  uint64_t bound_every;
  /**
   * 0 for no iteration limit.
   */
  uint64_t max_iters;
  /**
   * Known stability number, negative when unknown.
   */
  int64_t alpha;
  size_t max_order;
  /**
   * Nonzero starts the final solve from zero.
   */
  uint32_t cold_start;
} LbConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *lb_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lb_version(void);

struct LbConfig lb_config_default(void);

/**
 * Builds a graph on `n` vertices from `m` edges stored as `2 * m`
 * consecutive vertex indices. Loops and repeated edges are dropped.
 *
 * # Safety
 * `edges` must point to `2 * m` readable values (it may be null when
 * `m == 0`) and `out` must be writable.
 */
enum LbStatus lb_graph_new(size_t n, const size_t *edges, size_t m, struct LbGraph **out);

/**
 * Parses DIMACS text (vertices 1-based in the text).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` must be writable.
 */
enum LbStatus lb_graph_parse_dimacs(const char *text, struct LbGraph **out);

/**
 * # Safety
 * `g` must be a live graph handle and `out` must be writable.
 */
enum LbStatus lb_graph_complement(const struct LbGraph *g, struct LbGraph **out);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t lb_graph_vertex_count(const struct LbGraph *g);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t lb_graph_edge_count(const struct LbGraph *g);

/**
 * # Safety
 * `g` must be null or a handle from this library not yet freed.
 */
void lb_graph_free(struct LbGraph *g);

/**
 * Solves the first level and writes its certified bound to `theta_out`.
 * A null `config` means defaults.
 *
 * # Safety
 * `g` must be a live graph handle, `config` null or readable, `theta_out`
 * writable.
 */
enum LbStatus lb_theta(const struct LbGraph *g, const struct LbConfig *config, double *theta_out);

/**
 * Runs the full pipeline. A null `config` means defaults.
 *
 * # Safety
 * `g` must be a live graph handle, `config` null or readable, `out`
 * writable.
 */
enum LbStatus lb_run(const struct LbGraph *g, const struct LbConfig *config, struct LbReport **out);

/**
 * Best certified bound, NaN for a null handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
double lb_report_best_bound(const struct LbReport *r);

/**
 * # Safety
 * `r` must be null or a live report handle.
 */
double lb_report_theta(const struct LbReport *r);

/**
 * Gap-closed fraction in `[0, 1]`, NaN when alpha is unknown.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
double lb_report_gap_closed(const struct LbReport *r);

/**
 * # Safety
 * `r` must be null or a live report handle.
 */
size_t lb_report_basis_size(const struct LbReport *r);

/**
 * # Safety
 * `r` must be null or a live report handle.
 */
uint64_t lb_report_iterations(const struct LbReport *r);

/**
 * Serializes the report as JSON. Release the string with [`lb_string_free`].
 *
 * # Safety
 * `r` must be a live report handle and `out` writable.
 */
enum LbStatus lb_report_to_json(const struct LbReport *r, char **out);

/**
 * # Safety
 * `r` must be null or a handle from this library not yet freed.
 */
void lb_report_free(struct LbReport *r);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void lb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LASBOUND_H */
