#include "rankreg/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <thread>

#include "rankreg/rng.hpp"

namespace rankreg {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

double l2_error(const Vec& beta_hat, const Vec& beta_star) {
    if (beta_hat.size() != beta_star.size()) throw InvalidInput("l2_error: length mismatch");
    return (beta_hat - beta_star).norm();
}

double model_error(const Vec& beta_hat, const Vec& beta_star, const Mat& X) {
    if (beta_hat.size() != beta_star.size() || X.cols() != beta_hat.size())
        throw InvalidInput("model_error: dimension mismatch");
    const Vec fitted = X * (beta_hat - beta_star);
    const Vec centered = fitted.array() - fitted.mean();
    return centered.squaredNorm() / static_cast<double>(X.rows());
}

SupportErrors support_errors(const Vec& beta_hat, const Vec& beta_star, double zero_tol) {
    if (beta_hat.size() != beta_star.size()) throw InvalidInput("support_errors: length mismatch");
    if (!(zero_tol >= 0.0)) throw InvalidInput("support_errors: zero_tol must be >= 0");
    SupportErrors e;
    for (Index j = 0; j < beta_hat.size(); ++j) {
        const bool selected = std::abs(beta_hat(j)) > zero_tol;
        const bool truth = beta_star(j) != 0.0;
        if (selected && !truth) ++e.fp;
        if (!selected && truth) ++e.fn;
    }
    return e;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t rep) {
    return splitmix64(seed ^ splitmix64(rep + 1));
}

EstimationReport run_replicate(const Scenario& sc, const MethodConfig& method,
                               const SolverOptions& opts, std::uint64_t seed, std::uint64_t rep) {
    EstimationReport r;
    r.replicate = rep;
    r.seed = replicate_seed(seed, rep);
    try {
        Dataset ds = generate_dataset(sc, r.seed);
        GroupStructure fit_groups =
            method.singleton_fit ? GroupStructure::singletons(sc.p) : ds.groups;

        const auto t_lambda = std::chrono::steady_clock::now();
        if (method.lambda > 0.0) {
            r.lambda_used = method.lambda;
        } else {
            LambdaConfig cfg = method.lambda_rule;
            cfg.seed = r.seed;
            r.lambda_used = select_lambda(ds.X, fit_groups, cfg).lambda;
        }
        r.lambda_time = seconds_since(t_lambda);

        const Vec beta_star = ds.beta_star;
        const ProblemData data(std::move(ds.X), std::move(ds.y), std::move(fit_groups));
        const Solution sol = palm_solve(data, r.lambda_used, opts);
        r.solve_time = sol.wall_time;
        r.eta_kkt = sol.eta_kkt;
        r.relgap = sol.relgap;
        r.outer_iters = sol.outer_iters;
        r.newton_iters = sol.total_newton_iters;
        r.converged = sol.converged;
        r.l2_error = l2_error(sol.beta, beta_star);
        r.model_error = model_error(sol.beta, beta_star, data.X());
        const SupportErrors se = support_errors(sol.beta, beta_star, method.zero_tol);
        r.fp = se.fp;
        r.fn = se.fn;
    } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
    }
    return r;
}

Aggregate aggregate(const std::vector<EstimationReport>& reports) {
    std::vector<double> l2, me, fp, fn, lam, t;
    Aggregate a;
    for (const auto& r : reports) {
        if (r.failed) {
            ++a.failed;
            continue;
        }
        if (r.converged) ++a.converged;
        l2.push_back(r.l2_error);
        me.push_back(r.model_error);
        fp.push_back(static_cast<double>(r.fp));
        fn.push_back(static_cast<double>(r.fn));
        lam.push_back(r.lambda_used);
        t.push_back(r.solve_time);
    }
    a.median_l2 = median(l2);
    a.mean_l2 = mean(l2);
    a.median_me = median(me);
    a.mean_me = mean(me);
    a.median_fp = median(fp);
    a.mean_fp = mean(fp);
    a.median_fn = median(fn);
    a.mean_fn = mean(fn);
    a.median_lambda = median(lam);
    a.median_solve_time = median(t);
    return a;
}

ReplicationSummary run_replications(const Scenario& sc, const MethodConfig& method,
                                    const SolverOptions& opts, Index reps, std::uint64_t seed,
                                    int jobs) {
    if (reps < 1) throw InvalidInput("reps must be >= 1");
    ReplicationSummary out;
    out.reports.resize(static_cast<std::size_t>(reps));
    std::atomic<Index> next{0};
    auto worker = [&] {
        for (Index k; (k = next.fetch_add(1)) < reps;)
            out.reports[static_cast<std::size_t>(k)] =
                run_replicate(sc, method, opts, seed, static_cast<std::uint64_t>(k));
    };
    const int threads = std::clamp<int>(jobs, 1, static_cast<int>(reps));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    out.aggregate = aggregate(out.reports);
    return out;
}

} // namespace rankreg
