#include "rankreg/palm.hpp"

#include <chrono>
#include <cmath>

#include "rankreg/group_reg.hpp"
#include "rankreg/rank_loss.hpp"

namespace rankreg {

namespace {

struct Triple {
    Vec w;
    Vec s;
    Vec beta;
    Vec Xtw;
};

KktResidual kkt_with_xtw(const ProblemData& data, double lambda, const Vec& w, const Vec& s,
                         const Vec& beta, const Vec& Xtw, const Vec& primal_gap) {
    KktResidual r;
    r.eta_p = primal_gap.norm() / (1.0 + data.y().norm());
    const double ds = (s - prox_rank_loss(w + s, 1.0).value).norm() / (1.0 + s.norm());
    const double db =
        (beta - prox_group(beta - Xtw, data.groups(), lambda).value).norm() / (1.0 + beta.norm());
    r.eta_d = std::max(ds, db);
    r.eta_kkt = std::max(r.eta_p, r.eta_d);
    return r;
}

double max_group_ratio(const GroupStructure& G, const Vec& Xtv, double lambda) {
    double worst = 0.0;
    for (Index l = 0; l < G.num_groups(); ++l) {
        double sq = 0.0;
        for (Index j : G.members(l)) sq += Xtv(j) * Xtv(j);
        worst = std::max(worst, std::sqrt(sq) / (lambda * G.weight(l)));
    }
    return worst;
}

// resid = X beta - y.
Objectives objectives_with(const ProblemData& data, double lambda, const Vec& w, const Vec& Xtw,
                           const Vec& beta, const Vec& resid) {
    const GroupStructure& G = data.groups();
    Objectives o;
    o.pobj = rank_loss(resid) + lambda * group_norm(beta, G);
    // w is L*-feasible iff Prox_L(w) = 0; the group part needs ||(X^T w)_G|| <= lambda w_l.
    const Vec px = prox_rank_loss(w, 1.0).value;
    double group_excess = 0.0;
    for (Index l = 0; l < G.num_groups(); ++l) {
        double sq = 0.0;
        for (Index j : G.members(l)) sq += Xtw(j) * Xtw(j);
        group_excess = std::max(group_excess, std::sqrt(sq) / lambda - G.weight(l));
    }
    o.dual_infeas = std::max(px.lpNorm<Eigen::Infinity>(), group_excess);
    if (o.dual_infeas <= kDualFeasTol) {
        o.dobj = -data.y().dot(w);
    } else {
        // Restore feasibility: w - Prox_L(w) is the projection onto dL(0), and
        // shrinking toward 0 (which lies in dL(0)) fixes the group constraints.
        const Vec wf = w - px;
        const double ratio = max_group_ratio(G, data.X().transpose() * wf, lambda);
        const double theta = ratio > 1.0 ? 1.0 / ratio : 1.0;
        o.dobj = -theta * data.y().dot(wf);
    }
    o.relgap = std::abs(o.pobj - o.dobj) / (1.0 + std::abs(o.pobj) + std::abs(o.dobj));
    if (!std::isfinite(o.pobj) || !std::isfinite(o.dobj))
        throw NumericalError("non-finite objective value");
    return o;
}

double delta_k(const SolverOptions& opts, int k) {
    return std::min(opts.delta_cap, std::pow(static_cast<double>(k + 1), -opts.delta_exponent));
}

} // namespace

void validate(const SolverOptions& o) {
    if (!(o.sigma0 > 0.0)) throw InvalidInput("sigma0 must be positive");
    if (!(o.tau > 0.0)) throw InvalidInput("tau must be positive");
    if (!(o.sigma_growth >= 1.0)) throw InvalidInput("sigma growth must be >= 1");
    if (!(o.sigma_max > 0.0)) throw InvalidInput("sigma_max must be positive");
    if (!(o.tol > 0.0)) throw InvalidInput("tol must be positive");
    if (!(o.gap_tol > 0.0)) throw InvalidInput("gap_tol must be positive");
    if (o.max_outer < 1) throw InvalidInput("max_outer must be >= 1");
    if (!(o.delta_cap > 0.0 && o.delta_cap < 1.0)) throw InvalidInput("delta cap must lie in (0, 1)");
    if (!(o.delta_exponent > 1.0)) throw InvalidInput("delta exponent must exceed 1 (summability)");
    validate(o.ssn);
}

KktResidual kkt_residual(const ProblemData& data, double lambda, const Vec& w, const Vec& s,
                         const Vec& beta) {
    if (w.size() != data.n() || s.size() != data.n() || beta.size() != data.p())
        throw InvalidInput("kkt_residual: dimension mismatch");
    if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
    const Vec gap = data.X() * beta - s - data.y();
    return kkt_with_xtw(data, lambda, w, s, beta, data.X().transpose() * w, gap);
}

Objectives objectives(const ProblemData& data, double lambda, const Vec& w, const Vec& beta) {
    if (w.size() != data.n() || beta.size() != data.p())
        throw InvalidInput("objectives: dimension mismatch");
    if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
    return objectives_with(data, lambda, w, data.X().transpose() * w, beta,
                           data.X() * beta - data.y());
}

Solution palm_solve(const ProblemData& data, double lambda, const SolverOptions& opts) {
    validate(opts);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    const Index n = data.n();
    const Index p = data.p();
    const Mat& X = data.X();
    const Vec& y = data.y();

    // Primal-feasible start: X*0 - (-y) - y = 0.
    Triple cur{Vec::Zero(n), -y, Vec::Zero(p), Vec::Zero(p)};
    double sigma = opts.sigma0;
    const double sqrt_tau = std::sqrt(opts.tau);

    Solution sol;
    KktResidual last_kkt;
    Objectives last_obj = objectives(data, lambda, cur.w, cur.beta);
    for (int k = 0; k < opts.max_outer; ++k) {
        Subproblem sub{data, lambda, cur.s, cur.beta, cur.w, sigma, opts.tau};
        const double dk = delta_k(opts, k);

        // Inexactness rule on ||grad psi_k||, plus early exit once the candidate
        // triple already meets the final tolerances.
        auto stop = [&](const PsiPoint& at, double gnorm) {
            const double move = std::sqrt(opts.tau * (at.w - cur.w).squaredNorm() +
                                          (at.s_cand - cur.s).squaredNorm() +
                                          (at.beta_cand - cur.beta).squaredNorm());
            const double bound = dk * std::min(1.0, sqrt_tau) / sigma * std::min(1.0, move);
            if (gnorm <= bound) return true;
            // X beta_c - s_c - y = -grad + (tau/sigma)(w - w_k)
            const Vec gap = (opts.tau / sigma) * (at.w - cur.w) - at.grad;
            if (kkt_with_xtw(data, lambda, at.w, at.s_cand, at.beta_cand, at.Xtw, gap).eta_kkt > opts.tol)
                return false;
            return objectives_with(data, lambda, at.w, at.Xtw, at.beta_cand, gap + at.s_cand).relgap <=
                   opts.gap_tol;
        };
        SsnResult inner = ssn_solve(sub, cur.w, stop, opts.ssn);
        sol.total_newton_iters += inner.iters;

        cur.w = std::move(inner.at.w);
        cur.s = std::move(inner.at.s_cand);
        cur.beta = std::move(inner.at.beta_cand);
        cur.Xtw = X.transpose() * cur.w;

        const Vec resid = X * cur.beta - y;
        last_kkt = kkt_with_xtw(data, lambda, cur.w, cur.s, cur.beta, cur.Xtw, resid - cur.s);
        last_obj = objectives_with(data, lambda, cur.w, cur.Xtw, cur.beta, resid);
        const Objectives& obj = last_obj;

        OuterRecord rec;
        rec.k = k;
        rec.sigma = sigma;
        rec.eta_p = last_kkt.eta_p;
        rec.eta_d = last_kkt.eta_d;
        rec.eta_kkt = last_kkt.eta_kkt;
        rec.pobj = obj.pobj;
        rec.dobj = obj.dobj;
        rec.relgap = obj.relgap;
        rec.newton_iters = inner.iters;
        rec.inner_converged = inner.converged;
        sol.trace.push_back(rec);
        if (opts.on_iteration) opts.on_iteration(rec);
        sol.outer_iters = k + 1;

        if (last_kkt.eta_kkt <= opts.tol && obj.relgap <= opts.gap_tol) {
            sol.converged = true;
            break;
        }
        sigma = std::min(opts.sigma_growth * sigma, opts.sigma_max);
    }

    const Objectives& obj = last_obj;
    sol.beta = std::move(cur.beta);
    sol.s = std::move(cur.s);
    sol.w = std::move(cur.w);
    sol.eta_p = last_kkt.eta_p;
    sol.eta_d = last_kkt.eta_d;
    sol.eta_kkt = last_kkt.eta_kkt;
    sol.pobj = obj.pobj;
    sol.dobj = obj.dobj;
    sol.relgap = obj.relgap;
    sol.dual_infeas = obj.dual_infeas;
    sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

} // namespace rankreg
