/* C interface to the rankreg solver library.
 *
 * All handles are opaque and owned by the caller once returned; free them with
 * the matching *_free function. Functions return an rr_status; on anything other
 * than RR_OK / RR_NOT_CONVERGED a message is available from rr_last_error() on
 * the calling thread. Matrices are column-major. Column and group indices are
 * 0-based here (group files on disk use 1-based indices).
 */
#ifndef RANKREG_RANKREG_H
#define RANKREG_RANKREG_H

#include <stddef.h>
#include <stdint.h>

#if defined(RANKREG_BUILDING_LIBRARY)
#define RR_API __attribute__((visibility("default")))
#else
#define RR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rr_status {
    RR_OK = 0,
    RR_NOT_CONVERGED = 1, /* result produced, tolerance not reached */
    RR_INVALID_INPUT = 2,
    RR_IO_ERROR = 3,
    RR_NUMERICAL_ERROR = 4,
    RR_INTERNAL_ERROR = 5
} rr_status;

typedef enum rr_weight_rule {
    RR_WEIGHTS_ONE = 0,
    RR_WEIGHTS_SQRT = 1,   /* w_l = sqrt(|G_l|) */
    RR_WEIGHTS_INVSQRT = 2
} rr_weight_rule;

typedef enum rr_strategy {
    RR_STRATEGY_AUTO = 0,
    RR_STRATEGY_DIRECT = 1,
    RR_STRATEGY_CG = 2,
    RR_STRATEGY_WOODBURY = 3
} rr_strategy;

typedef struct rr_problem rr_problem;
typedef struct rr_solution rr_solution;

RR_API const char* rr_version(void);
/* Message of the last failure on this thread ("" if none). */
RR_API const char* rr_last_error(void);

/* ---- problems ---- */

/* X is n x p column-major. group_of[j] is the group id of column j (ids must be
 * 0..g-1, each used at least once); NULL means singleton groups. weights has g
 * entries, or NULL to derive them from the group sizes with `rule`. */
RR_API rr_status rr_problem_create(const double* X, const double* y, int64_t n, int64_t p,
                                   const int64_t* group_of, const double* weights,
                                   rr_weight_rule rule, rr_problem** out);

/* Reads X and y from CSV files. groups_json may be NULL or "singleton" for the
 * l1 case. poly_order > 1 replaces X by its polynomial expansion (before groups
 * are checked); center != 0 shifts every column of X to zero mean. */
RR_API rr_status rr_problem_load(const char* x_csv, const char* y_csv, const char* groups_json,
                                 rr_weight_rule rule, int poly_order, int center,
                                 rr_problem** out);

RR_API rr_status rr_problem_dims(const rr_problem* prob, int64_t* n, int64_t* p, int64_t* g);
/* Copies of the stored data. X receives n*p entries column-major, y n entries,
 * group_of p entries and weights g entries; any pointer may be NULL. */
RR_API rr_status rr_problem_data(const rr_problem* prob, double* X, double* y, int64_t* group_of,
                                 double* weights);
RR_API void rr_problem_free(rr_problem* prob);

/* ---- lambda selection ---- */

typedef struct rr_lambda_config {
    double c0;
    double alpha0;
    int64_t reps;
    uint64_t seed;
} rr_lambda_config;

RR_API void rr_lambda_config_default(rr_lambda_config* cfg);

/* samples, if not NULL, receives cfg->reps simulated dual norms. */
RR_API rr_status rr_select_lambda(const rr_problem* prob, const rr_lambda_config* cfg,
                                  double* lambda, double* quantile, double* samples);

/* ---- solver ---- */

typedef struct rr_iteration {
    int k;
    double sigma;
    double eta_p;
    double eta_d;
    double eta_kkt;
    double pobj;
    double dobj;
    double relgap;
    int newton_iters;
} rr_iteration;

typedef void (*rr_progress_fn)(const rr_iteration* it, void* user);

typedef struct rr_options {
    double sigma0;
    double tau;
    double tol;
    int max_outer;
    rr_strategy strategy;
    int cg_max_iters;
    int max_inner;
    rr_progress_fn progress; /* may be NULL */
    void* progress_user;
} rr_options;

RR_API void rr_options_default(rr_options* opts);

/* Returns RR_OK or RR_NOT_CONVERGED with *out set in both cases. */
RR_API rr_status rr_solve(const rr_problem* prob, double lambda, const rr_options* opts,
                          rr_solution** out);

typedef struct rr_solution_info {
    double lambda;
    double eta_kkt;
    double eta_p;
    double eta_d;
    double pobj;
    double dobj;
    double relgap;
    double dual_infeas;
    int outer_iters;
    int newton_iters;
    double wall_time;
    int converged;
} rr_solution_info;

RR_API rr_status rr_solution_info_get(const rr_solution* sol, rr_solution_info* info);
/* Copy out beta (p entries), s and w (n entries each); len must match. */
RR_API rr_status rr_solution_beta(const rr_solution* sol, double* out, int64_t len);
RR_API rr_status rr_solution_s(const rr_solution* sol, double* out, int64_t len);
RR_API rr_status rr_solution_w(const rr_solution* sol, double* out, int64_t len);
/* Ids of groups with some |beta_j| > zero_tol. Writes at most cap ids; *count
 * always receives the total. */
RR_API rr_status rr_solution_nonzero_groups(const rr_solution* sol, double zero_tol, int64_t* out,
                                            int64_t cap, int64_t* count);
RR_API void rr_solution_free(rr_solution* sol);

/* KKT residuals of an arbitrary triple: out[0] = eta_p, out[1] = eta_d, out[2] = eta_kkt. */
RR_API rr_status rr_kkt_residual(const rr_problem* prob, double lambda, const double* w,
                                 const double* s, const double* beta, double out[3]);

/* ---- synthetic scenarios ---- */

typedef struct rr_scenario {
    const char* design; /* "C1" | "C2" | "C3" */
    const char* signal; /* "S1" .. "S4" */
    const char* noise;  /* "E1" .. "E6" */
    int64_t n;
    int64_t p;
    int64_t group_size;
    double active_fraction;
    rr_weight_rule weights;
} rr_scenario;

RR_API void rr_scenario_default(rr_scenario* sc);

/* Draws a dataset. beta_star, if not NULL, receives p entries. */
RR_API rr_status rr_generate(const rr_scenario* sc, uint64_t seed, rr_problem** out,
                             double* beta_star);

typedef struct rr_method {
    int singleton_fit; /* fit the l1 specialization instead of the scenario groups */
    double lambda;     /* > 0 fixed, otherwise the simulation rule */
    rr_lambda_config lambda_rule;
    double zero_tol;
} rr_method;

RR_API void rr_method_default(rr_method* m);

typedef struct rr_report {
    uint64_t replicate;
    uint64_t seed;
    double l2_error;
    double model_error;
    int64_t fp;
    int64_t fn;
    double lambda_used;
    double lambda_time;
    double solve_time;
    double eta_kkt;
    double relgap;
    int outer_iters;
    int newton_iters;
    int converged;
    int failed;
    char error[256];
} rr_report;

typedef struct rr_aggregate {
    double median_l2, mean_l2;
    double median_me, mean_me;
    double median_fp, mean_fp;
    double median_fn, mean_fn;
    double median_lambda;
    double median_solve_time;
    int64_t converged;
    int64_t failed;
} rr_aggregate;

/* reports must hold `reps` entries; the progress callback in opts is ignored. */
RR_API rr_status rr_run_replications(const rr_scenario* sc, const rr_method* method,
                                     const rr_options* opts, int64_t reps, uint64_t seed,
                                     int jobs, rr_report* reports, rr_aggregate* agg);

#ifdef __cplusplus
}
#endif

#endif
