/* nlslab: blow-up ansatz, split-step solver and rate checks for
 *   du/dt = i Lap u + (1 + i lambda2) |u|^alpha u
 *
 * All functions return an nls_status. On failure a message is available
 * from nls_last_error() on the calling thread until the next call. Handles
 * are opaque, owned by the caller and released with the matching _destroy.
 */
#ifndef NLSLAB_NLSLAB_H
#define NLSLAB_NLSLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(NLSLAB_BUILDING_LIBRARY)
#define NLS_API __attribute__((visibility("default")))
#else
#define NLS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nls_status {
  NLS_OK = 0,
  NLS_INVALID_ARGUMENT = 1,
  NLS_DEGENERATE_INPUT = 2,
  NLS_STEP_TOO_LARGE = 3,
  NLS_INVALID_OVERRIDE = 4,
  NLS_INVALID_GRID = 5,
  NLS_INVALID_SPEC = 6,
  NLS_EMPTY_REGION = 7,
  NLS_NON_INTEGRABLE_TAIL = 8,
  NLS_HALF_BOUND_VIOLATED = 9,
  NLS_OUT_OF_WINDOW = 10,
  NLS_DIVERGED = 11,
  NLS_INSUFFICIENT_DATA = 12,
  NLS_NON_POSITIVE_VALUE = 13,
  NLS_IO = 14,
  NLS_INTERNAL = 15
} nls_status;

NLS_API const char* nls_status_name(nls_status s);
NLS_API const char* nls_last_error(void);
NLS_API const char* nls_version(void);

/* ---- model ---- */

typedef struct nls_model {
  double alpha;
  double lambda2;
  int dim;
} nls_model;

typedef enum nls_scheme_mode { NLS_MODE_PAPER = 0, NLS_MODE_EXPERIMENT = 1 } nls_scheme_mode;

typedef struct nls_scheme {
  double csu;
  double sigma;
  double theta;
  int64_t big_j;
  int64_t k;
  nls_scheme_mode mode;
} nls_scheme;

/* Validates m; *h1_subcritical (may be NULL) receives (N-2) alpha < 4. */
NLS_API nls_status nls_model_check(const nls_model* m, int* h1_subcritical);
/* z and out are {re, im}. */
NLS_API nls_status nls_eval_f(const nls_model* m, const double z[2], double out[2]);
NLS_API nls_status nls_ode_flow(const nls_model* m, const double u0[2], double dt, double out[2]);
NLS_API nls_status nls_estimate_csu(const nls_model* m, int64_t samples, uint64_t seed, double* out);
/* big_j and k are experiment-mode overrides; pass NULL in paper mode. */
NLS_API nls_status nls_scheme_params(const nls_model* m, double csu, nls_scheme_mode mode,
                                     const int64_t* big_j, const int64_t* k, nls_scheme* out);

/* ---- geometry ---- */

typedef struct nls_grid nls_grid;
typedef struct nls_aset nls_aset;
typedef struct nls_afield nls_afield;

NLS_API nls_status nls_grid_create(int dim, double half_width, int points_per_dim, nls_grid** out);
NLS_API void nls_grid_destroy(nls_grid* g);
NLS_API size_t nls_grid_node_count(const nls_grid* g);
NLS_API double nls_grid_spacing(const nls_grid* g);

/* count points, coordinates packed point-major. squared != 0 selects
 * Z = prod |x - x_i|^2 instead of prod |x - x_i|. */
NLS_API nls_status nls_aset_points(int dim, size_t count, const double* coords, int squared, nls_aset** out);
NLS_API nls_status nls_aset_sphere(int dim, const double* center, double radius, int squared, nls_aset** out);
/* Z grid values from a CSV with header "Z,M,L,dim". */
NLS_API nls_status nls_aset_from_csv(const char* path, nls_aset** out);
NLS_API void nls_aset_destroy(nls_aset* s);
/* Writes a NUL-terminated description; *needed gets the full length + 1. */
NLS_API nls_status nls_aset_describe(const nls_aset* s, char* buf, size_t cap, size_t* needed);

typedef struct nls_afield_info {
  int64_t k;
  size_t k_nodes;
  double bound_grad;
  double bound_lap;
} nls_afield_info;

NLS_API nls_status nls_afield_build(const nls_aset* s, int64_t k, const nls_grid* g, nls_afield** out);
NLS_API void nls_afield_destroy(nls_afield* a);
NLS_API nls_status nls_afield_info_get(const nls_afield* a, nls_afield_info* out);
/* Node values of A; n must equal the node count. */
NLS_API nls_status nls_afield_values(const nls_afield* a, double* out, size_t n);
NLS_API nls_status nls_afield_export_csv(const nls_afield* a, const char* path);

/* ---- ansatz ---- */

typedef struct nls_time_grid {
  double t_start;
  double t_end;
  size_t count;
} nls_time_grid;

typedef struct nls_bundle nls_bundle;

typedef enum nls_level_kind { NLS_LEVEL_U = 0, NLS_LEVEL_W = 1, NLS_LEVEL_ERR = 2 } nls_level_kind;

typedef struct nls_bundle_info {
  int64_t big_j;
  size_t time_nodes;
  int has_trusted_window;
  double trusted_from;
  double t_start;
  double t_end;
} nls_bundle_info;

/* analysis_radius <= 0 selects half the box width. */
NLS_API nls_status nls_bundle_build(const nls_afield* a, const nls_model* m, const nls_scheme* s,
                                    const nls_time_grid* tg, double analysis_radius, nls_bundle** out);
NLS_API void nls_bundle_destroy(nls_bundle* b);
NLS_API nls_status nls_bundle_info_get(const nls_bundle* b, nls_bundle_info* out);
/* out holds n = node count interleaved {re, im} pairs (2n doubles). */
NLS_API nls_status nls_bundle_eval_uj(const nls_bundle* b, double t, double* out, size_t n);
/* max_x |F|/|U0| over the analysis region at every time node (nt doubles). */
NLS_API nls_status nls_bundle_level_ratio(const nls_bundle* b, nls_level_kind kind, int64_t j, double* out,
                                          size_t nt);
/* Level CSVs and manifest.json into dir; slopes fitted on [fit_lo, fit_hi]. */
NLS_API nls_status nls_bundle_export(const nls_bundle* b, const char* dir, double fit_lo, double fit_hi);

/* ---- solver ---- */

typedef struct nls_solver_config {
  double dt_max;
  double shrink_factor;
  double substep_safety;
  double t_stop;
  const double* snapshot_times;
  size_t snapshot_count;
  int dealias;
} nls_solver_config;

typedef struct nls_trajectory nls_trajectory;

typedef struct nls_trajectory_info {
  double t0;
  double t_last;
  size_t snapshots;
  size_t steps;
  int diverged;
  double last_good_t;
} nls_trajectory_info;

/* Integrates from U_J(t0). On NLS_DIVERGED *out still receives the partial
 * record with diverged = 1. */
NLS_API nls_status nls_simulate(const nls_bundle* b, double t0, const nls_solver_config* cfg,
                                nls_trajectory** out);
NLS_API void nls_trajectory_destroy(nls_trajectory* tr);
NLS_API nls_status nls_trajectory_info_get(const nls_trajectory* tr, nls_trajectory_info* out);
NLS_API nls_status nls_trajectory_write_csv(const nls_trajectory* tr, const char* path);
NLS_API nls_status nls_trajectory_write_steps_csv(const nls_trajectory* tr, const char* path);
NLS_API nls_status nls_trajectory_read_csv(const char* path, const nls_grid* g, nls_trajectory** out);

/* ---- metrics ---- */

typedef struct nls_check_config {
  double slope_tol;           /* local L2 rate band half-margin (0.05) */
  double local_radius;        /* ball around each point of K (0.5) */
  double exterior_radius;     /* H1 boundedness on |x| > exterior_radius (1) */
  double exterior_core;       /* plus |x| < exterior_core when > 0 */
  double bounded_ratio;       /* max/min threshold (3) */
  double gradient_radius;     /* gradient growth on |x| < gradient_radius (1) */
  double growth_ratio;        /* final/initial threshold (10) */
  double exclude_fraction;    /* leading share of the ln(-t) span dropped (0.1) */
  double epsilon_threshold;   /* sup ||eps|| / ||U_J|| (0.01) */
} nls_check_config;

NLS_API void nls_check_config_default(nls_check_config* out);

typedef struct nls_report nls_report;

typedef struct nls_check {
  char name[128];
  double window_lo, window_hi;
  double target_lo, target_hi;
  double fitted;
  double r2;
  int pass;
} nls_check;

NLS_API nls_status nls_verify(const nls_trajectory* tr, const nls_bundle* b, const nls_check_config* cfg,
                              nls_report** out);
NLS_API void nls_report_destroy(nls_report* r);
NLS_API nls_status nls_report_summary(const nls_report* r, size_t* checks, int* all_pass);
NLS_API nls_status nls_report_check(const nls_report* r, size_t i, nls_check* out);
/* report.json and norms.csv into dir. */
NLS_API nls_status nls_report_write(const nls_report* r, const char* dir);

/* Gagliardo-Nirenberg ratio on Gaussians of the given widths; spread = max/min. */
NLS_API nls_status nls_gn_diagnostic(const nls_model* m, const nls_grid* g, const double* widths, size_t n,
                                     double* ratios, double* spread);

#ifdef __cplusplus
}
#endif

#endif
