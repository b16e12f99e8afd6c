#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rankreg/problem.hpp"

namespace rankreg {

struct LambdaConfig {
    double c0 = 1.01;      ///< safety factor, > 1
    double alpha0 = 0.1;   ///< quantile level, in (0, 1)
    Index reps = 500;      ///< number of simulated permutations K
    std::uint64_t seed = 0;
};

struct LambdaSelection {
    double lambda = 0.0;          ///< c0 * quantile
    double quantile = 0.0;        ///< empirical (1 - alpha0)-quantile
    std::vector<double> samples;  ///< dual norm of each simulated score, in replicate order
};

void validate(const LambdaConfig& cfg);

/// Score of the rank loss at the truth for a given rank vector:
/// S_n = -(2 / (n(n-1))) X^T xi with xi = 2r - (n+1). `ranks` holds 1-based ranks.
Vec simulate_score(const Mat& X, std::span<const Index> ranks);

/// Uniform random permutation of 1..n (Fisher-Yates) from replicate `rep`'s stream.
std::vector<Index> random_ranks(Index n, std::uint64_t seed, std::uint64_t rep);

/// Simulation-based regularization level: c0 times the ceil((1-alpha0) K)-th
/// order statistic of K simulated dual norms. Depends only on X, G and cfg.
LambdaSelection select_lambda(const Mat& X, const GroupStructure& G, const LambdaConfig& cfg);

} // namespace rankreg
