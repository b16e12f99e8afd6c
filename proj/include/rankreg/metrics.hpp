#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankreg/datagen.hpp"
#include "rankreg/lambda_rule.hpp"
#include "rankreg/palm.hpp"

namespace rankreg {

double l2_error(const Vec& beta_hat, const Vec& beta_star);

/// (b - b*)^T Sigma_X (b - b*) with Sigma_X the 1/n column-centered sample
/// covariance, computed as ||(X - mean)(b - b*)||^2 / n.
double model_error(const Vec& beta_hat, const Vec& beta_star, const Mat& X);

struct SupportErrors {
    Index fp = 0;
    Index fn = 0;
};

/// |beta_hat_j| > zero_tol counts as selected; beta_star is compared to 0 exactly.
SupportErrors support_errors(const Vec& beta_hat, const Vec& beta_star, double zero_tol = 1e-8);

/// How each replicate picks the fitted group structure and lambda.
struct MethodConfig {
    bool singleton_fit = false;  ///< fit the l1 specialization instead of the scenario's groups
    double lambda = 0.0;         ///< > 0: fixed; otherwise the simulation rule
    LambdaConfig lambda_rule;    ///< seed is replaced by the replicate seed
    double zero_tol = 1e-8;
};

struct EstimationReport {
    std::uint64_t replicate = 0;
    std::uint64_t seed = 0;
    double l2_error = 0.0;
    double model_error = 0.0;
    Index fp = 0;
    Index fn = 0;
    double lambda_used = 0.0;
    double lambda_time = 0.0;
    double solve_time = 0.0;
    double eta_kkt = 0.0;
    double relgap = 0.0;
    int outer_iters = 0;
    int newton_iters = 0;
    bool converged = false;
    bool failed = false;
    std::string error;
};

struct Aggregate {
    double median_l2 = 0.0, mean_l2 = 0.0;
    double median_me = 0.0, mean_me = 0.0;
    double median_fp = 0.0, mean_fp = 0.0;
    double median_fn = 0.0, mean_fn = 0.0;
    double median_lambda = 0.0;
    double median_solve_time = 0.0;
    Index converged = 0;
    Index failed = 0;
};

struct ReplicationSummary {
    std::vector<EstimationReport> reports;
    Aggregate aggregate;
};

/// Seed of replicate `rep` under master seed `seed`.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t rep);

/// One replicate: generate, choose lambda, solve, score. Solver failures are
/// recorded in the report rather than thrown.
EstimationReport run_replicate(const Scenario& sc, const MethodConfig& method,
                               const SolverOptions& opts, std::uint64_t seed, std::uint64_t rep);

/// Runs `reps` replicates on up to `jobs` threads; output order and values do
/// not depend on `jobs`.
ReplicationSummary run_replications(const Scenario& sc, const MethodConfig& method,
                                    const SolverOptions& opts, Index reps, std::uint64_t seed,
                                    int jobs = 1);

Aggregate aggregate(const std::vector<EstimationReport>& reports);

} // namespace rankreg
