#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "rankreg/group_reg.hpp"
#include "rankreg/problem.hpp"
#include "rankreg/rank_loss.hpp"

namespace rankreg {

enum class NewtonStrategy { Auto, Direct, CG, Woodbury };

std::string_view to_string(NewtonStrategy s);
NewtonStrategy parse_strategy(std::string_view name);

struct SsnOptions {
    double mu = 1e-3;        ///< Armijo constant, in (0, 1/2)
    double eta = 1e-1;       ///< linear-solve accuracy cap, in (0, 1)
    double tau_bar = 1e-1;   ///< linear-solve accuracy exponent, in (0, 1]
    double delta = 0.5;      ///< backtracking factor, in (0, 1)
    int max_inner = 100;
    int max_backtracks = 50;
    int cg_max_iters = 500;
    NewtonStrategy strategy = NewtonStrategy::Auto;
    /// Auto picks Woodbury while the low-rank width r is <= n * woodbury_ratio.
    double woodbury_ratio = 0.25;
    /// Auto falls back to a dense factorization up to this n, CG beyond.
    Index direct_max_n = 500;
    /// Adaptive damping eps*I added to the Newton matrix after short steps.
    /// Directions inside tied residual blocks that only touch inactive groups
    /// carry curvature tau/sigma alone, so undamped steps there overshoot by
    /// orders of magnitude once sigma is large. eps shrinks by reg_decay after
    /// every unit step, so it vanishes near the solution.
    bool adaptive_damping = true;
    double reg_decay = 0.1;
};

void validate(const SsnOptions& opts);

/// The proximal augmented Lagrangian subproblem in the dual variable w:
///   psi(w) = L_sigma(w; s_k, beta_k) + tau/(2 sigma) ||w - w_k||^2.
struct Subproblem {
    const ProblemData& data;
    double lambda;
    Vec s_k;
    Vec beta_k;
    Vec w_k;
    double sigma;
    double tau;
};

/// psi, its gradient and every by-product of the two prox evaluations at w.
struct PsiPoint {
    Vec w;
    Vec Xtw;        ///< X^T w
    double value = 0.0;
    Vec grad;
    Vec s_cand;     ///< sigma * Prox_L(s_k/sigma + w)
    Vec beta_cand;  ///< sigma*lambda * Prox_Psi(beta_k/(sigma lambda) - X^T w / lambda)
    Vec beta_tilde; ///< beta_k/(sigma lambda) - X^T w / lambda
    MonotoneBlocks blocks;  ///< rank-loss prox structure at s_k/sigma + w
    ActiveGroups active;    ///< group prox structure at beta_tilde (unit scale)
};

/// Multiplier-update candidates (s, beta) at w; the outer loop and the SSN
/// gradient both go through this routine.
struct Candidates {
    Vec s_cand;
    Vec beta_cand;
    Vec beta_tilde;
    MonotoneBlocks blocks;
    ActiveGroups active;
};
Candidates multiplier_candidates(const Subproblem& sub, const Vec& w, const Vec& Xtw);

PsiPoint evaluate_psi(const Subproblem& sub, const Vec& w, const Vec& Xtw);
PsiPoint evaluate_psi(const Subproblem& sub, const Vec& w);

double eval_psi(const Subproblem& sub, const Vec& w);
inline PsiPoint grad_psi(const Subproblem& sub, const Vec& w) { return evaluate_psi(sub, w); }

/// Generalized Hessian of psi in diagonal-plus-low-rank form
///   H = diag + sigma * Theta Theta^T + sigma * U U^T,  U = [Xi, Upsilon].
struct NewtonSystem {
    double sigma = 1.0;
    double tau = 1.0;
    Vec diag;                    ///< tau/sigma + sigma on singleton blocks, tau/sigma elsewhere
    MonotoneBlocks blocks;       ///< Theta: one normalized indicator per block of size >= 2
    std::vector<Index> active_groups;
    std::vector<double> xi_coef;       ///< sqrt(1 - w_l / ||beta_G||)
    std::vector<double> upsilon_coef;  ///< sqrt(w_l / ||beta_G||^3)
    Mat U;                       ///< [Xi, Upsilon] with coefficients folded in
    Index theta_cols = 0;
    Index xi_cols = 0;
    Index upsilon_cols = 0;

    Index n() const { return diag.size(); }
    /// Total low-rank width r.
    Index width() const { return theta_cols + xi_cols + upsilon_cols; }
};

NewtonSystem assemble_hessian(const Subproblem& sub, const MonotoneBlocks& blocks,
                              const ActiveGroups& active, const Vec& beta_tilde);
inline NewtonSystem assemble_hessian(const Subproblem& sub, const PsiPoint& at) {
    return assemble_hessian(sub, at.blocks, at.active, at.beta_tilde);
}

/// O(n r) product H d.
Vec hessian_matvec(const NewtonSystem& sys, const Vec& d);

/// Dense H; O(n^2 r).
Mat dense_hessian(const NewtonSystem& sys);

struct NewtonStep {
    Vec d;
    NewtonStrategy used = NewtonStrategy::Auto;
    int cg_iters = 0;
    bool cg_capped = false;  ///< CG hit its cap and a factorization finished the solve
    double residual = 0.0;   ///< ||H d - rhs||
};

/// Solves H d = rhs to ||H d - rhs|| <= tol with the requested strategy.
NewtonStep solve_newton(const NewtonSystem& sys, const Vec& rhs, NewtonStrategy strategy,
                        double tol, const SsnOptions& opts = {});

/// Strategy that Auto resolves to for this system.
NewtonStrategy choose_strategy(const NewtonSystem& sys, const SsnOptions& opts);

using SsnStopRule = std::function<bool(const PsiPoint& at, double grad_norm)>;

struct SsnResult {
    PsiPoint at;
    int iters = 0;
    double last_grad_norm = 0.0;
    bool converged = false;
    int capped_line_searches = 0;
    std::vector<double> grad_norms;  ///< ||grad psi|| at every visited iterate
    std::vector<double> damping;     ///< eps used for each Newton step
    std::vector<double> values;      ///< psi at every visited iterate
};

/// Semismooth Newton with Armijo backtracking, started at w0, until `stop` holds
/// or max_inner Newton steps were taken.
SsnResult ssn_solve(const Subproblem& sub, const Vec& w0, const SsnStopRule& stop,
                    const SsnOptions& opts = {});

} // namespace rankreg
