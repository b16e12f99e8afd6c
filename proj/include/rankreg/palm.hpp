#pragma once

#include <functional>
#include <vector>

#include "rankreg/problem.hpp"
#include "rankreg/ssn.hpp"

namespace rankreg {

/// One outer iteration as seen by progress callbacks and the solution trace.
struct OuterRecord {
    int k = 0;
    double sigma = 0.0;
    double eta_p = 0.0;
    double eta_d = 0.0;
    double eta_kkt = 0.0;
    double pobj = 0.0;
    double dobj = 0.0;
    double relgap = 0.0;
    int newton_iters = 0;
    bool inner_converged = false;
};

struct SolverOptions {
    /// The dual lives at O(1/n) scale and beta at O(1); a sigma in the hundreds
    /// balances the two and halves the outer count against sigma0 = 1.
    double sigma0 = 100.0;
    double tau = 1.0;
    double sigma_growth = 1.5;
    double sigma_max = 1e6;
    double tol = 1e-6;
    /// Also required for convergence: relgap <= gap_tol. Small eta_kkt leaves w
    /// infeasible at its own O(1/n) scale, which can keep the gap above 1e-5 for
    /// a couple more outer steps. Infinity restores the plain KKT test.
    double gap_tol = 1e-5;
    int max_outer = 500;
    /// Inexactness sequence delta_k = min(delta_cap, (k+1)^-delta_exponent); summable and < 1.
    double delta_cap = 0.5;
    double delta_exponent = 1.5;
    SsnOptions ssn;
    std::function<void(const OuterRecord&)> on_iteration;
};

void validate(const SolverOptions& opts);

struct Solution {
    Vec beta;
    Vec s;
    Vec w;
    double eta_kkt = 0.0;
    double eta_p = 0.0;
    double eta_d = 0.0;
    double pobj = 0.0;
    double dobj = 0.0;
    double relgap = 0.0;
    double dual_infeas = 0.0;
    int outer_iters = 0;
    int total_newton_iters = 0;
    double wall_time = 0.0;
    bool converged = false;
    std::vector<OuterRecord> trace;
};

struct KktResidual {
    double eta_p = 0.0;
    double eta_d = 0.0;
    double eta_kkt = 0.0;
};

/// Relative KKT residuals of the primal-dual triple (w, s, beta):
///   eta_p = ||X beta - s - y|| / (1 + ||y||)
///   eta_d = max(||s - Prox_L(w + s)|| / (1 + ||s||),
///               ||beta - Prox_{lambda Psi}(beta - X^T w)|| / (1 + ||beta||))
KktResidual kkt_residual(const ProblemData& data, double lambda, const Vec& w, const Vec& s,
                         const Vec& beta);

struct Objectives {
    double pobj = 0.0;
    double dobj = 0.0;
    double relgap = 0.0;
    double dual_infeas = 0.0;
};

/// w counts as dual feasible when dual_infeas is at most this.
inline constexpr double kDualFeasTol = 1e-8;

/// Primal objective L(X beta - y) + lambda Psi(beta) and dual objective -<y, w>
/// (conjugate indicators are zero on feasible w). When w violates the dual
/// constraints by more than kDualFeasTol, dobj is taken at the nearest point
/// of dL(0) shrunk into the group balls, so it stays a valid lower bound;
/// dual_infeas reports the violation of w itself.
Objectives objectives(const ProblemData& data, double lambda, const Vec& w, const Vec& beta);

/// Proximal augmented Lagrangian method on the dual, with semismooth Newton
/// subproblem solves. Never throws for non-convergence; check Solution::converged.
Solution palm_solve(const ProblemData& data, double lambda, const SolverOptions& opts = {});

} // namespace rankreg
