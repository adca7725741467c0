#ifndef HARDYLAB_H
#define HARDYLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(HL_BUILDING_LIBRARY)
#define HL_API __attribute__((visibility("default")))
#else
#define HL_API
#endif

typedef enum hl_status {
  HL_OK = 0,
  HL_E_USAGE = 1,
  HL_E_DOMAIN = 2,
  HL_E_NUMERIC = 3,
  HL_E_PRECONDITION = 4,
  HL_E_DEGENERATE = 5,
  HL_E_INTERNAL = 6
} hl_status;

/* Message of the last failed call on this thread; "" after a success. */
HL_API const char* hl_last_error(void);
HL_API const char* hl_status_name(hl_status status);
HL_API const char* hl_version(void);

/* Strings returned through char** are owned by the caller. */
HL_API void hl_string_free(char* s);

HL_API hl_status hl_catalog_listing(char** out);

typedef struct hl_geometry hl_geometry;
typedef struct hl_weight hl_weight;

/* name is "euclidean", "heisenberg", ...; m is the dimension parameter. */
HL_API hl_status hl_geometry_create(const char* name, int m, hl_geometry** out);
HL_API void hl_geometry_free(hl_geometry* geo);
HL_API int hl_geometry_dim(const hl_geometry* geo);

/* name in the short config form, e.g. "euclid-norm" or "coordinate(0)". */
HL_API hl_status hl_weight_create(const hl_geometry* geo, const char* name, hl_weight** out);
HL_API void hl_weight_free(hl_weight* w);
HL_API double hl_weight_claimed_q(const hl_weight* w);
HL_API hl_status hl_weight_eval(const hl_weight* w, const double* point, size_t dim, double* value);

/* L psi and Gamma(psi) at a point, with closed-form derivatives. */
HL_API hl_status hl_eval_L(const hl_geometry* geo, const hl_weight* w, const double* point, size_t dim, double* value);
HL_API hl_status hl_eval_gamma(const hl_geometry* geo, const hl_weight* w, const double* point, size_t dim,
                               double* value);

typedef enum hl_verdict { HL_EXACT = 0, HL_LOWER_BOUND = 1, HL_UPPER_BOUND = 2, HL_FAIL = 3 } hl_verdict;

typedef struct hl_qcond_result {
  double Q_claimed;
  double Q_estimate;
  double max_defect;
  double inf_ratio;
  double sup_ratio;
  size_t evaluated;
  size_t skipped;
  hl_verdict verdict;
} hl_qcond_result;

/* Lattice over [lo, hi] with spacing <= h; nodes within `excision` of the
   weight's singular set are dropped. tol < 0 selects the default. */
HL_API hl_status hl_qcond(const hl_geometry* geo, const hl_weight* w, const double* lo, const double* hi, size_t dim,
                          double h, double excision, double tol, hl_qcond_result* out);

typedef enum hl_format { HL_FORMAT_DEFAULT = 0, HL_FORMAT_CSV = 1, HL_FORMAT_JSON_LINES = 2 } hl_format;

typedef struct hl_run_options {
  hl_format format;
  int has_seed;
  uint64_t seed;
  int refine;
} hl_run_options;

typedef struct hl_run hl_run;

/* Runs a JSON configuration. Configuration and evaluation problems do not
   fail the call; they show up as exit code 2 with a message. */
HL_API hl_status hl_run_config(const char* config_json, const hl_run_options* options, hl_run** out);
HL_API int hl_run_exit_code(const hl_run* run);
HL_API const char* hl_run_report(const hl_run* run);
HL_API const char* hl_run_summary(const hl_run* run);
HL_API const char* hl_run_message(const hl_run* run);
HL_API const char* hl_run_output_path(const hl_run* run);
HL_API void hl_run_free(hl_run* run);

#ifdef __cplusplus
}
#endif

#endif
