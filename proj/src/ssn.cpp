#include "rankreg/ssn.hpp"

#include <cmath>
#include <limits>

namespace rankreg {

namespace {

// Slack on the Armijo test so that rounding noise in psi near the solution
// does not force pointless backtracking.
constexpr double kValueSlack = 64.0 * std::numeric_limits<double>::epsilon();

void require_finite(const Vec& v, const char* what) {
    if (!v.allFinite()) throw NumericalError(std::string("non-finite ") + what);
}

// X * beta restricted to the columns of the active groups.
Vec active_product(const Mat& X, const GroupStructure& G, const ActiveGroups& active,
                   const Vec& beta) {
    Vec out = Vec::Zero(X.rows());
    for (Index l : active.groups)
        for (Index j : G.members(l))
            if (beta(j) != 0.0) out.noalias() += beta(j) * X.col(j);
    return out;
}

Vec jacobi_diagonal(const NewtonSystem& sys) {
    Vec dg = sys.diag;
    if (sys.U.cols() > 0) dg += sys.sigma * sys.U.rowwise().squaredNorm();
    const auto& blocks = sys.blocks;
    for (Index b = 0; b < blocks.num_blocks(); ++b) {
        const Index lo = blocks.block_begin(b);
        const Index hi = blocks.block_end(b);
        if (hi - lo < 2) continue;
        const double add = sys.sigma / static_cast<double>(hi - lo);
        for (Index k = lo; k < hi; ++k) dg(blocks.perm[static_cast<std::size_t>(k)]) += add;
    }
    return dg;
}

// H = D + sigma W W^T with W = [Theta, U]. With What = sqrt(sigma) D^{-1/2} W,
//   H^{-1} r = D^{-1/2} (I + What What^T)^{-1} D^{-1/2} r
// and (I + What What^T)^{-1} v is the residual of min ||v - What z||^2 + ||z||^2.
// Taking that residual from a QR of [What; I] avoids the explicit capacitance
// matrix, whose conditioning grows like sigma^2.
Vec solve_woodbury(const NewtonSystem& sys, const Vec& rhs) {
    const Vec dinv_sqrt = sys.diag.cwiseSqrt().cwiseInverse();
    const Vec v = rhs.cwiseProduct(dinv_sqrt);
    const Index n = sys.n();
    const Index m = sys.theta_cols + sys.U.cols();
    if (m == 0) return v.cwiseProduct(dinv_sqrt);

    Mat A = Mat::Zero(n + m, m);
    const double sq = std::sqrt(sys.sigma);
    Index c = 0;
    const auto& blocks = sys.blocks;
    for (Index b = 0; b < blocks.num_blocks(); ++b) {
        const Index lo = blocks.block_begin(b);
        const Index hi = blocks.block_end(b);
        if (hi - lo < 2) continue;
        const double scale = sq / std::sqrt(static_cast<double>(hi - lo));
        for (Index k = lo; k < hi; ++k) {
            const Index i = blocks.perm[static_cast<std::size_t>(k)];
            A(i, c) = scale * dinv_sqrt(i);
        }
        ++c;
    }
    A.block(0, c, n, sys.U.cols()) = sq * (dinv_sqrt.asDiagonal() * sys.U);
    A.bottomRows(m).diagonal().setOnes();

    Eigen::HouseholderQR<Mat> qr(A);
    Vec b = Vec::Zero(n + m);
    b.head(n) = v;
    b.applyOnTheLeft(qr.householderQ().transpose());
    b.head(m).setZero();
    b.applyOnTheLeft(qr.householderQ());
    return b.head(n).cwiseProduct(dinv_sqrt);
}

Vec solve_direct(const NewtonSystem& sys, const Vec& rhs) {
    Eigen::LLT<Mat> llt(dense_hessian(sys));
    if (llt.info() != Eigen::Success) throw NumericalError("Newton matrix is not SPD");
    return llt.solve(rhs);
}

double direct_cost(const NewtonSystem& sys) {
    const double n = static_cast<double>(sys.n());
    return n * n * static_cast<double>(sys.U.cols()) + n * n * n / 3.0;
}

double woodbury_cost(const NewtonSystem& sys) {
    const double n = static_cast<double>(sys.n());
    const double r = static_cast<double>(sys.width());
    return 2.0 * (n + r) * r * r;
}

} // namespace

std::string_view to_string(NewtonStrategy s) {
    switch (s) {
    case NewtonStrategy::Auto: return "auto";
    case NewtonStrategy::Direct: return "direct";
    case NewtonStrategy::CG: return "cg";
    case NewtonStrategy::Woodbury: return "woodbury";
    }
    return "auto";
}

NewtonStrategy parse_strategy(std::string_view name) {
    if (name == "auto") return NewtonStrategy::Auto;
    if (name == "direct") return NewtonStrategy::Direct;
    if (name == "cg") return NewtonStrategy::CG;
    if (name == "woodbury") return NewtonStrategy::Woodbury;
    throw InvalidInput("unknown Newton strategy '" + std::string(name) + "'");
}

void validate(const SsnOptions& o) {
    if (!(o.mu > 0.0 && o.mu < 0.5)) throw InvalidInput("ssn mu must lie in (0, 1/2)");
    if (!(o.eta > 0.0 && o.eta < 1.0)) throw InvalidInput("ssn eta must lie in (0, 1)");
    if (!(o.tau_bar > 0.0 && o.tau_bar <= 1.0)) throw InvalidInput("ssn tau must lie in (0, 1]");
    if (!(o.delta > 0.0 && o.delta < 1.0)) throw InvalidInput("ssn delta must lie in (0, 1)");
    if (o.max_inner < 1) throw InvalidInput("ssn max_inner must be >= 1");
    if (o.cg_max_iters < 1) throw InvalidInput("cg_max_iters must be >= 1");
    if (o.max_backtracks < 0) throw InvalidInput("max_backtracks must be >= 0");
    if (!(o.reg_decay >= 0.0 && o.reg_decay < 1.0)) throw InvalidInput("reg_decay must lie in [0, 1)");
}

Candidates multiplier_candidates(const Subproblem& sub, const Vec& w, const Vec& Xtw) {
    const double sigma = sub.sigma;
    const double sl = sigma * sub.lambda;
    Candidates c;
    RankProx rp = prox_rank_loss(sub.s_k / sigma + w, 1.0);
    c.s_cand = sigma * rp.value;
    c.blocks = std::move(rp.blocks);
    c.beta_tilde = sub.beta_k / sl - Xtw / sub.lambda;
    GroupProx gp = prox_group(c.beta_tilde, sub.data.groups(), 1.0);
    c.beta_cand = sl * gp.value;
    c.active = std::move(gp.active);
    return c;
}

namespace {

// psi without the w-independent terms -(||s_k||^2 + ||beta_k||^2)/(2 sigma).
double psi_merit(const Subproblem& sub, const Vec& w, const Vec& Xtw, const Candidates& c) {
    const double sigma = sub.sigma;
    const Vec a = sub.s_k + sigma * w;
    const Vec b = sub.beta_k - sigma * Xtw;
    // -e_sigma L(a) + ||a||^2/(2 sigma) = -L(s_c) + <s_c, 2a - s_c>/(2 sigma)
    const double loss_part = -rank_loss(c.s_cand) + c.s_cand.dot(2.0 * a - c.s_cand) / (2.0 * sigma);
    const double reg_part = -sub.lambda * group_norm(c.beta_cand, sub.data.groups()) +
                            c.beta_cand.dot(2.0 * b - c.beta_cand) / (2.0 * sigma);
    return sub.data.y().dot(w) + loss_part + reg_part +
           sub.tau / (2.0 * sigma) * (w - sub.w_k).squaredNorm();
}

double psi_constant(const Subproblem& sub) {
    return -(sub.s_k.squaredNorm() + sub.beta_k.squaredNorm()) / (2.0 * sub.sigma);
}

struct PsiPointEx {
    PsiPoint pt;
    double merit = 0.0;
};

PsiPointEx evaluate_ex(const Subproblem& sub, const Vec& w, const Vec& Xtw) {
    Candidates c = multiplier_candidates(sub, w, Xtw);
    PsiPointEx out;
    out.merit = psi_merit(sub, w, Xtw, c);
    PsiPoint& pt = out.pt;
    pt.value = out.merit + psi_constant(sub);
    pt.grad = sub.data.y() + c.s_cand -
              active_product(sub.data.X(), sub.data.groups(), c.active, c.beta_cand) +
              (sub.tau / sub.sigma) * (w - sub.w_k);
    pt.w = w;
    pt.Xtw = Xtw;
    pt.s_cand = std::move(c.s_cand);
    pt.beta_cand = std::move(c.beta_cand);
    pt.beta_tilde = std::move(c.beta_tilde);
    pt.blocks = std::move(c.blocks);
    pt.active = std::move(c.active);
    return out;
}

} // namespace

PsiPoint evaluate_psi(const Subproblem& sub, const Vec& w, const Vec& Xtw) {
    return evaluate_ex(sub, w, Xtw).pt;
}

PsiPoint evaluate_psi(const Subproblem& sub, const Vec& w) {
    if (w.size() != sub.data.n()) throw InvalidInput("evaluate_psi: w has wrong length");
    return evaluate_psi(sub, w, sub.data.X().transpose() * w);
}

double eval_psi(const Subproblem& sub, const Vec& w) {
    const Vec Xtw = sub.data.X().transpose() * w;
    return psi_merit(sub, w, Xtw, multiplier_candidates(sub, w, Xtw)) + psi_constant(sub);
}

NewtonSystem assemble_hessian(const Subproblem& sub, const MonotoneBlocks& blocks,
                              const ActiveGroups& active, const Vec& beta_tilde) {
    const Index n = sub.data.n();
    const Mat& X = sub.data.X();
    const GroupStructure& G = sub.data.groups();
    if (blocks.size() != n || beta_tilde.size() != sub.data.p())
        throw InvalidInput("assemble_hessian: inconsistent dimensions");

    NewtonSystem sys;
    sys.sigma = sub.sigma;
    sys.tau = sub.tau;
    sys.diag = Vec::Constant(n, sub.tau / sub.sigma);
    sys.blocks = blocks;
    for (Index b = 0; b < blocks.num_blocks(); ++b) {
        if (blocks.block_end(b) - blocks.block_begin(b) == 1)
            sys.diag(blocks.perm[static_cast<std::size_t>(blocks.block_begin(b))]) += sub.sigma;
        else
            ++sys.theta_cols;
    }

    Index cols = 0;
    for (Index l : active.groups) cols += G.group_size(l);
    sys.xi_cols = cols;
    sys.upsilon_cols = active.count();
    sys.U.resize(n, sys.xi_cols + sys.upsilon_cols);
    sys.active_groups = active.groups;

    Index c = 0;
    for (Index a = 0; a < active.count(); ++a) {
        const auto ai = static_cast<std::size_t>(a);
        const double nrm = active.norms[ai];
        const double r = active.radii[ai];
        const double xi = std::sqrt(1.0 - r / nrm);
        const double ups = std::sqrt(r / (nrm * nrm * nrm));
        sys.xi_coef.push_back(xi);
        sys.upsilon_coef.push_back(ups);
        Vec xb = Vec::Zero(n);
        for (Index j : G.members(active.groups[ai])) {
            sys.U.col(c++) = xi * X.col(j);
            xb.noalias() += beta_tilde(j) * X.col(j);
        }
        sys.U.col(sys.xi_cols + a) = ups * xb;
    }
    return sys;
}

Vec hessian_matvec(const NewtonSystem& sys, const Vec& d) {
    if (d.size() != sys.n()) throw InvalidInput("hessian_matvec: wrong vector length");
    Vec out = sys.diag.cwiseProduct(d);
    if (sys.U.cols() > 0) out.noalias() += sys.sigma * (sys.U * (sys.U.transpose() * d));
    const auto& blocks = sys.blocks;
    for (Index b = 0; b < blocks.num_blocks(); ++b) {
        const Index lo = blocks.block_begin(b);
        const Index hi = blocks.block_end(b);
        if (hi - lo < 2) continue;
        double sum = 0.0;
        for (Index k = lo; k < hi; ++k) sum += d(blocks.perm[static_cast<std::size_t>(k)]);
        const double add = sys.sigma * sum / static_cast<double>(hi - lo);
        for (Index k = lo; k < hi; ++k) out(blocks.perm[static_cast<std::size_t>(k)]) += add;
    }
    return out;
}

Mat dense_hessian(const NewtonSystem& sys) {
    const Index n = sys.n();
    Mat H = Mat::Zero(n, n);
    if (sys.U.cols() > 0) {
        H.selfadjointView<Eigen::Lower>().rankUpdate(sys.U, sys.sigma);
        H.triangularView<Eigen::StrictlyUpper>() = H.transpose();
    }
    H.diagonal() += sys.diag;
    const auto& blocks = sys.blocks;
    for (Index b = 0; b < blocks.num_blocks(); ++b) {
        const Index lo = blocks.block_begin(b);
        const Index hi = blocks.block_end(b);
        if (hi - lo < 2) continue;
        const double add = sys.sigma / static_cast<double>(hi - lo);
        for (Index k1 = lo; k1 < hi; ++k1)
            for (Index k2 = lo; k2 < hi; ++k2)
                H(blocks.perm[static_cast<std::size_t>(k1)], blocks.perm[static_cast<std::size_t>(k2)]) += add;
    }
    return H;
}

NewtonStrategy choose_strategy(const NewtonSystem& sys, const SsnOptions& opts) {
    const double n = static_cast<double>(sys.n());
    if (static_cast<double>(sys.width()) <= opts.woodbury_ratio * n) return NewtonStrategy::Woodbury;
    if (sys.n() <= opts.direct_max_n) return NewtonStrategy::Direct;
    return NewtonStrategy::CG;
}

NewtonStep solve_newton(const NewtonSystem& sys, const Vec& rhs, NewtonStrategy strategy,
                        double tol, const SsnOptions& opts) {
    if (!(tol > 0.0)) throw InvalidInput("solve_newton: tol must be positive");
    if (rhs.size() != sys.n()) throw InvalidInput("solve_newton: wrong right-hand side length");
    if (strategy == NewtonStrategy::Auto) strategy = choose_strategy(sys, opts);

    NewtonStep step;
    step.used = strategy;
    switch (strategy) {
    case NewtonStrategy::Direct: step.d = solve_direct(sys, rhs); break;
    case NewtonStrategy::Woodbury: step.d = solve_woodbury(sys, rhs); break;
    case NewtonStrategy::CG: {
        const Vec precond = jacobi_diagonal(sys);
        Vec x = Vec::Zero(rhs.size());
        Vec r = rhs;
        Vec z = r.cwiseQuotient(precond);
        Vec p = z;
        double rz = r.dot(z);
        int it = 0;
        while (r.norm() > tol && it < opts.cg_max_iters) {
            const Vec Hp = hessian_matvec(sys, p);
            const double alpha = rz / p.dot(Hp);
            x.noalias() += alpha * p;
            r.noalias() -= alpha * Hp;
            z = r.cwiseQuotient(precond);
            const double rz_next = r.dot(z);
            p = z + (rz_next / rz) * p;
            rz = rz_next;
            ++it;
        }
        step.cg_iters = it;
        if (r.norm() > tol) {
            step.cg_capped = true;
            const bool direct = direct_cost(sys) < woodbury_cost(sys);
            step.used = direct ? NewtonStrategy::Direct : NewtonStrategy::Woodbury;
            x = direct ? solve_direct(sys, rhs) : solve_woodbury(sys, rhs);
        }
        step.d = std::move(x);
        break;
    }
    case NewtonStrategy::Auto: break;
    }
    step.residual = (hessian_matvec(sys, step.d) - rhs).norm();
    return step;
}

SsnResult ssn_solve(const Subproblem& sub, const Vec& w0, const SsnStopRule& stop,
                    const SsnOptions& opts) {
    validate(opts);
    if (w0.size() != sub.data.n()) throw InvalidInput("ssn_solve: w0 has wrong length");
    const Mat& X = sub.data.X();

    SsnResult res;
    const double base = sub.tau / sub.sigma;
    double reg = 0.0;
    PsiPointEx cur = evaluate_ex(sub, w0, X.transpose() * w0);
    for (int j = 0;; ++j) {
        require_finite(cur.pt.grad, "gradient in semismooth Newton");
        const double gnorm = cur.pt.grad.norm();
        res.grad_norms.push_back(gnorm);
        res.values.push_back(cur.pt.value);
        if (stop(cur.pt, gnorm)) {
            res.converged = true;
            break;
        }
        if (j >= opts.max_inner) break;

        NewtonSystem sys = assemble_hessian(sub, cur.pt);
        sys.diag.array() += reg;
        res.damping.push_back(reg);
        const double tol = std::min(opts.eta, std::pow(gnorm, 1.0 + opts.tau_bar));
        const NewtonStep step = solve_newton(sys, -cur.pt.grad, opts.strategy, tol, opts);
        const Vec& d = step.d;
        const double slope = cur.pt.grad.dot(d);
        if (!(slope < 0.0)) throw NumericalError("Newton direction is not a descent direction");

        const Vec Xtd = X.transpose() * d;
        double alpha = 1.0;
        PsiPointEx trial;
        bool accepted = false;
        for (int m = 0; m <= opts.max_backtracks; ++m) {
            trial = evaluate_ex(sub, cur.pt.w + alpha * d, cur.pt.Xtw + alpha * Xtd);
            const double slack = kValueSlack * (1.0 + std::abs(cur.merit));
            if (trial.merit <= cur.merit + opts.mu * alpha * slope + slack) {
                accepted = true;
                break;
            }
            if (m < opts.max_backtracks) alpha *= opts.delta;
        }
        if (!accepted) ++res.capped_line_searches;
        if (opts.adaptive_damping) {
            // A step cut to alpha suggests the low-curvature part of the model is
            // about 1/alpha too flat; lift it accordingly.
            if (alpha >= 1.0) {
                reg *= opts.reg_decay;
                if (reg < 1e-3 * base) reg = 0.0;
            } else {
                reg = std::max(reg, (base + reg) / alpha - base);
            }
        }
        cur = std::move(trial);
        ++res.iters;
    }
    res.last_grad_norm = res.grad_norms.back();
    res.at = std::move(cur.pt);
    return res;
}

} // namespace rankreg
