#pragma once

// Random problem and subproblem generators shared by the unit and acceptance tests.

#include <memory>

#include "oracles.hpp"
#include "rankreg/group_reg.hpp"
#include "rankreg/lambda_rule.hpp"
#include "rankreg/ssn.hpp"

namespace fixture {

using rankreg::Index;
using oracle::Vec;

inline rankreg::GroupStructure random_groups(oracle::TestRng& rng, Index p) {
    std::vector<std::vector<Index>> groups;
    std::vector<double> weights;
    for (Index j = 0; j < p;) {
        const Index size = std::min<Index>(rng.integer(1, 3), p - j);
        std::vector<Index> grp;
        for (Index k = 0; k < size; ++k) grp.push_back(j++);
        weights.push_back(std::sqrt(static_cast<double>(size)));
        groups.push_back(std::move(grp));
    }
    return rankreg::GroupStructure(groups, weights, p);
}

/// Smallest lambda with beta = 0 optimal (dual norm of X^T v for the subgradient
/// of L at -y built from the ranks of -y).
inline double lambda_zero(const rankreg::ProblemData& d) {
    const Vec v = oracle::rank_loss_gradient(-d.y());
    return rankreg::dual_norm(d.X().transpose() * v, d.groups());
}

struct Sub {
    std::unique_ptr<rankreg::ProblemData> data;
    std::unique_ptr<rankreg::Subproblem> sub;
};

/// A subproblem with random multipliers; sigma in [0.5, 50], lambda a fraction of
/// the zero-solution threshold so that some groups are active.
inline Sub random_subproblem(oracle::TestRng& rng, Index n, Index p) {
    Sub f;
    const oracle::Mat X = rng.normal_mat(n, p);
    const oracle::Vec y = rng.normal_vec(n);
    f.data = std::make_unique<rankreg::ProblemData>(X, y, random_groups(rng, p));
    const double lambda = rng.uniform(0.2, 0.8) * lambda_zero(*f.data);
    const double sigma = std::exp(rng.uniform(std::log(0.5), std::log(50.0)));
    const double scale = 1.0 / static_cast<double>(n);
    f.sub = std::make_unique<rankreg::Subproblem>(rankreg::Subproblem{
        *f.data, lambda, rng.normal_vec(n) * rng.uniform(0.1, 1.0), rng.normal_vec(p) * rng.uniform(0.0, 1.0),
        rng.normal_vec(n) * scale, sigma, 1.0});
    return f;
}

} // namespace fixture
