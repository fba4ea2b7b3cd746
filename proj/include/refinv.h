/* refinv — refined real enumerative invariants of toric surfaces.
 *
 * C interface over the C++ core: opaque handles, integer status codes, and
 * JSON payloads for structured data.  Every function returns RC_OK (0) on
 * success; on failure it returns a nonzero status and leaves a human-readable
 * message in rc_last_error() (thread-local).  Strings returned through
 * char** out-parameters are heap-allocated and must be released with
 * rc_string_free().
 */
#ifndef REFINV_H
#define REFINV_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RC_API __declspec(dllexport)
#else
#define RC_API __attribute__((visibility("default")))
#endif

typedef enum rc_status {
  RC_OK = 0,
  RC_PARSE_ERROR,
  RC_NOT_BALANCED,
  RC_DEGENERATE_DEGREE,
  RC_NOT_EVEN,
  RC_ZERO_VECTOR,
  RC_BAD_SIDE_ASSIGNMENT,
  RC_CHART_DEGENERATE,
  RC_INCOMPLETE_CONSTRAINT,
  RC_NOT_POSITIVE,
  RC_EMPTY_CHAMBER_BOX,
  RC_SLOT_MISMATCH,
  RC_NO_CONVERGENCE,
  RC_DEGENERATE_CURVE,
  RC_BRANCH_OUTSIDE_POSITIVE_QUADRANT,
  RC_UNCERTIFIED_ROUNDING,
  RC_BUDGET_EXCEEDED,
  RC_TRACKING_STALLED,
  RC_INVARIANCE_VIOLATION,
  RC_IO_ERROR,
  RC_INTERNAL
} rc_status;

typedef struct rc_degree rc_degree;  /* validated degree + dual polygon */
typedef struct rc_curves rc_curves;  /* list of solved curves */
typedef struct rc_table rc_table;    /* refined invariant table */
typedef struct rc_trace rc_trace;    /* wall-crossing trace */

RC_API const char* rc_version(void);
RC_API const char* rc_status_name(rc_status s);
RC_API const char* rc_last_error(void);
RC_API void rc_string_free(char* s);

/* ---- degrees ---- */

/* json: {"schema":"refinv/degree@1","entries":[[x,y],...],"sides":[...]?} */
RC_API rc_status rc_degree_parse(const char* json, rc_degree** out);
/* xy_pairs: n entries as 2n packed integers x0,y0,x1,y1,... */
RC_API rc_status rc_degree_from_entries(const int64_t* xy_pairs, size_t n, rc_degree** out);
RC_API void rc_degree_free(rc_degree* d);
/* Degree, dual polygon with metrics, slot layout, k0. */
RC_API rc_status rc_degree_info(const rc_degree* d, char** json_out);
RC_API rc_status rc_degree_constraint_count(const rc_degree* d, int genus, int* out);
/* eps_x, eps_y in {+1,-1}, not both +1.  *out is 1 if admissible else 0. */
RC_API rc_status rc_degree_aqc(const rc_degree* d, int eps_x, int eps_y, int* out);

/* ---- boundary constraints ----
 * constraint json: {"schema":"refinv/constraint@1","xi":[...],"completion_slot":n}
 * with null for an unspecified value. */

RC_API rc_status rc_constraint_residual(const rc_degree* d, const char* constraint_json,
                                        char** json_out);
RC_API rc_status rc_constraint_complete(const rc_degree* d, const char* constraint_json,
                                        char** json_out);
/* options json (all optional): {"log_lo":..,"log_hi":..,"rho":..,
 * "min_log_gap":..,"max_tries":..} */
RC_API rc_status rc_sample_chamber(const rc_degree* d, uint64_t seed,
                                   const char* options_json, char** json_out);

/* ---- enumeration ---- */

/* options json (all optional): {"starts":..,"newton_iters":..,"tol":..,
 * "dedup_tol":..} */
RC_API rc_status rc_enumerate(const rc_degree* d, const char* constraint_json,
                              uint64_t seed, const char* options_json, rc_curves** out);
RC_API rc_status rc_curves_parse(const rc_degree* d, const char* json, rc_curves** out);
RC_API void rc_curves_free(rc_curves* c);
RC_API rc_status rc_curves_count(const rc_curves* c, size_t* out);
RC_API rc_status rc_curves_to_json(const rc_curves* c, char** json_out);

/* ---- per-curve queries (index into an rc_curves list) ---- */

/* out_xy = {Re x, Im x, Re y, Im y} at the complex parameter t. */
RC_API rc_status rc_curve_evaluate(const rc_degree* d, const rc_curves* c, size_t index,
                                   double t_re, double t_im, double out_xy[4]);
RC_API rc_status rc_curve_boundary(const rc_degree* d, const rc_curves* c, size_t index,
                                   char** json_out);
RC_API rc_status rc_curve_nodes(const rc_degree* d, const rc_curves* c, size_t index,
                                char** json_out);
/* half: 0 upper, 1 lower.  options json: {"jmin":..,"jmax":..,"panels":..,
 * "gauss":..,"margin":..,"fallback":true,...} */
RC_API rc_status rc_curve_qi(const rc_degree* d, const rc_curves* c, size_t index,
                             int half, const char* options_json, char** json_out);
RC_API rc_status rc_curve_verify(const rc_degree* d, const rc_curves* c, size_t index,
                                 const char* constraint_json, char** json_out);

/* ---- invariant tables ---- */

RC_API rc_status rc_assemble_table(const rc_degree* d, const rc_curves* c,
                                   const char* options_json, rc_table** out);
RC_API void rc_table_free(rc_table* t);
RC_API rc_status rc_table_to_json(const rc_table* t, char** json_out);
RC_API rc_status rc_table_to_csv(const rc_table* t, char** csv_out);

/* ---- wall lab ---- */

/* options json (all optional): {"dt0":..,"dt_floor":..,"per_step_tables":..,
 * "solve":{...},"qi":{...}} */
RC_API rc_status rc_track(const rc_degree* d, const char* from_json, const char* to_json,
                          uint64_t seed, const char* options_json, rc_trace** out);
RC_API void rc_trace_free(rc_trace* t);
RC_API rc_status rc_trace_to_json(const rc_trace* t, char** json_out);
/* options json: {"sample":{...},"solve":{...},"qi":{...}} */
RC_API rc_status rc_invariance_report(const rc_degree* d, const uint64_t* seeds,
                                      size_t n_seeds, const char* options_json,
                                      char** json_out);

/* ---- plotting ---- */

RC_API rc_status rc_plot_data(const rc_degree* d, const rc_curves* c, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* REFINV_H */
