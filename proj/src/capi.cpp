#include "rankreg/rankreg.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "rankreg/datagen.hpp"
#include "rankreg/io.hpp"
#include "rankreg/lambda_rule.hpp"
#include "rankreg/metrics.hpp"
#include "rankreg/palm.hpp"

struct rr_problem {
    rankreg::ProblemData data;
};

struct rr_solution {
    rankreg::Solution sol;
    rankreg::GroupStructure groups;
    double lambda;
};

namespace {

using namespace rankreg;

thread_local std::string g_last_error;

rr_status fail(rr_status st, const char* msg) {
    g_last_error = msg;
    return st;
}

// Runs f, mapping exceptions onto status codes.
template <class F>
rr_status guarded(F&& f) {
    try {
        g_last_error.clear();
        return f();
    } catch (const IoError& e) {
        return fail(RR_IO_ERROR, e.what());
    } catch (const InvalidInput& e) {
        return fail(RR_INVALID_INPUT, e.what());
    } catch (const NumericalError& e) {
        return fail(RR_NUMERICAL_ERROR, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RR_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(RR_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(RR_INTERNAL_ERROR, "unknown error");
    }
}

#define RR_REQUIRE(cond, msg) \
    if (!(cond)) return fail(RR_INVALID_INPUT, msg)

WeightRule to_rule(rr_weight_rule r) {
    switch (r) {
    case RR_WEIGHTS_ONE: return WeightRule::One;
    case RR_WEIGHTS_SQRT: return WeightRule::SqrtSize;
    case RR_WEIGHTS_INVSQRT: return WeightRule::InvSqrtSize;
    }
    throw InvalidInput("unknown weight rule");
}

NewtonStrategy to_strategy(rr_strategy s) {
    switch (s) {
    case RR_STRATEGY_AUTO: return NewtonStrategy::Auto;
    case RR_STRATEGY_DIRECT: return NewtonStrategy::Direct;
    case RR_STRATEGY_CG: return NewtonStrategy::CG;
    case RR_STRATEGY_WOODBURY: return NewtonStrategy::Woodbury;
    }
    throw InvalidInput("unknown Newton strategy");
}

SolverOptions to_options(const rr_options* o) {
    SolverOptions opts;
    if (!o) return opts;
    opts.sigma0 = o->sigma0;
    opts.tau = o->tau;
    opts.tol = o->tol;
    opts.max_outer = o->max_outer;
    opts.ssn.strategy = to_strategy(o->strategy);
    opts.ssn.cg_max_iters = o->cg_max_iters;
    opts.ssn.max_inner = o->max_inner;
    if (o->progress) {
        rr_progress_fn fn = o->progress;
        void* user = o->progress_user;
        opts.on_iteration = [fn, user](const OuterRecord& r) {
            const rr_iteration it{r.k,       r.sigma, r.eta_p,  r.eta_d,       r.eta_kkt,
                                  r.pobj,    r.dobj,  r.relgap, r.newton_iters};
            fn(&it, user);
        };
    }
    validate(opts);
    return opts;
}

LambdaConfig to_lambda(const rr_lambda_config& c) {
    LambdaConfig cfg;
    cfg.c0 = c.c0;
    cfg.alpha0 = c.alpha0;
    cfg.reps = static_cast<Index>(c.reps);
    cfg.seed = c.seed;
    return cfg;
}

Scenario to_scenario(const rr_scenario* s) {
    if (!s->design || !s->signal || !s->noise) throw InvalidInput("scenario names must be set");
    Scenario sc;
    sc.design = parse_design(s->design);
    sc.signal = parse_signal(s->signal);
    sc.noise = parse_noise(s->noise);
    sc.n = static_cast<Index>(s->n);
    sc.p = static_cast<Index>(s->p);
    sc.group_size = static_cast<Index>(s->group_size);
    sc.active_fraction = s->active_fraction;
    sc.weights = to_rule(s->weights);
    if (sc.group_size < 1) throw InvalidInput("group size must be >= 1");
    return sc;
}

rr_status copy_vec(const rr_solution* sol, const Vec& v, double* out, int64_t len) {
    RR_REQUIRE(sol && out, "null argument");
    RR_REQUIRE(len == v.size(), "output length does not match");
    std::copy(v.data(), v.data() + v.size(), out);
    return RR_OK;
}

} // namespace

extern "C" {

const char* rr_version(void) { return "0.1.0"; }

const char* rr_last_error(void) { return g_last_error.c_str(); }

rr_status rr_problem_create(const double* X, const double* y, int64_t n, int64_t p,
                            const int64_t* group_of, const double* weights, rr_weight_rule rule,
                            rr_problem** out) {
    return guarded([&] {
        RR_REQUIRE(X && y && out, "null argument");
        RR_REQUIRE(n >= 1 && p >= 1, "n and p must be >= 1");
        *out = nullptr;
        Mat Xm = Eigen::Map<const Mat>(X, n, p);
        Vec yv = Eigen::Map<const Vec>(y, n);
        GroupStructure G;
        if (!group_of) {
            G = GroupStructure::singletons(p);
        } else {
            int64_t g = 0;
            for (int64_t j = 0; j < p; ++j) {
                RR_REQUIRE(group_of[j] >= 0 && group_of[j] < p, "group id out of range");
                g = std::max(g, group_of[j] + 1);
            }
            std::vector<std::vector<Index>> groups(static_cast<std::size_t>(g));
            for (int64_t j = 0; j < p; ++j) groups[static_cast<std::size_t>(group_of[j])].push_back(j);
            std::vector<double> w;
            for (std::size_t l = 0; l < groups.size(); ++l)
                w.push_back(weights ? weights[l]
                                    : groups[l].empty()
                                        ? 1.0
                                        : weight_for_size(to_rule(rule), static_cast<Index>(groups[l].size())));
            G = GroupStructure(groups, std::move(w), p);
        }
        *out = new rr_problem{ProblemData(std::move(Xm), std::move(yv), std::move(G))};
        return RR_OK;
    });
}

rr_status rr_problem_load(const char* x_csv, const char* y_csv, const char* groups_json,
                          rr_weight_rule rule, int poly_order, int center, rr_problem** out) {
    return guarded([&] {
        RR_REQUIRE(x_csv && y_csv && out, "null argument");
        RR_REQUIRE(poly_order >= 1, "polynomial order must be >= 1");
        *out = nullptr;
        Mat X = read_csv_matrix(x_csv);
        Vec y = read_csv_vector(y_csv);
        if (poly_order > 1) X = polynomial_expand(X, poly_order);
        GroupStructure G;
        if (!groups_json || std::strcmp(groups_json, "singleton") == 0)
            G = GroupStructure::singletons(X.cols());
        else
            G = to_group_structure(read_group_file(groups_json), X.cols(), to_rule(rule));
        ProblemData data(std::move(X), std::move(y), std::move(G));
        *out = new rr_problem{center ? data.centered() : std::move(data)};
        return RR_OK;
    });
}

rr_status rr_problem_dims(const rr_problem* prob, int64_t* n, int64_t* p, int64_t* g) {
    RR_REQUIRE(prob, "null problem");
    if (n) *n = prob->data.n();
    if (p) *p = prob->data.p();
    if (g) *g = prob->data.groups().num_groups();
    return RR_OK;
}

rr_status rr_problem_data(const rr_problem* prob, double* X, double* y, int64_t* group_of,
                          double* weights) {
    return guarded([&] {
        RR_REQUIRE(prob, "null problem");
        const ProblemData& d = prob->data;
        if (X) std::copy(d.X().data(), d.X().data() + d.X().size(), X);
        if (y) std::copy(d.y().data(), d.y().data() + d.y().size(), y);
        if (group_of)
            for (Index j = 0; j < d.p(); ++j) group_of[j] = d.groups().group_of(j);
        if (weights) std::copy(d.groups().weights().begin(), d.groups().weights().end(), weights);
        return RR_OK;
    });
}

void rr_problem_free(rr_problem* prob) { delete prob; }

void rr_lambda_config_default(rr_lambda_config* cfg) {
    if (!cfg) return;
    const LambdaConfig d;
    *cfg = {d.c0, d.alpha0, static_cast<int64_t>(d.reps), d.seed};
}

rr_status rr_select_lambda(const rr_problem* prob, const rr_lambda_config* cfg, double* lambda,
                           double* quantile, double* samples) {
    return guarded([&] {
        RR_REQUIRE(prob && cfg, "null argument");
        const LambdaSelection sel = select_lambda(prob->data.X(), prob->data.groups(), to_lambda(*cfg));
        if (lambda) *lambda = sel.lambda;
        if (quantile) *quantile = sel.quantile;
        if (samples) std::copy(sel.samples.begin(), sel.samples.end(), samples);
        return RR_OK;
    });
}

void rr_options_default(rr_options* o) {
    if (!o) return;
    const SolverOptions d;
    o->sigma0 = d.sigma0;
    o->tau = d.tau;
    o->tol = d.tol;
    o->max_outer = d.max_outer;
    o->strategy = RR_STRATEGY_AUTO;
    o->cg_max_iters = d.ssn.cg_max_iters;
    o->max_inner = d.ssn.max_inner;
    o->progress = nullptr;
    o->progress_user = nullptr;
}

rr_status rr_solve(const rr_problem* prob, double lambda, const rr_options* opts, rr_solution** out) {
    return guarded([&] {
        RR_REQUIRE(prob && out, "null argument");
        *out = nullptr;
        Solution sol = palm_solve(prob->data, lambda, to_options(opts));
        const bool ok = sol.converged;
        *out = new rr_solution{std::move(sol), prob->data.groups(), lambda};
        return ok ? RR_OK : RR_NOT_CONVERGED;
    });
}

rr_status rr_solution_info_get(const rr_solution* sol, rr_solution_info* info) {
    RR_REQUIRE(sol && info, "null argument");
    const Solution& s = sol->sol;
    *info = {sol->lambda, s.eta_kkt,     s.eta_p,       s.eta_d,
             s.pobj,      s.dobj,        s.relgap,      s.dual_infeas,
             s.outer_iters, s.total_newton_iters, s.wall_time, s.converged ? 1 : 0};
    return RR_OK;
}

rr_status rr_solution_beta(const rr_solution* sol, double* out, int64_t len) {
    RR_REQUIRE(sol, "null solution");
    return copy_vec(sol, sol->sol.beta, out, len);
}

rr_status rr_solution_s(const rr_solution* sol, double* out, int64_t len) {
    RR_REQUIRE(sol, "null solution");
    return copy_vec(sol, sol->sol.s, out, len);
}

rr_status rr_solution_w(const rr_solution* sol, double* out, int64_t len) {
    RR_REQUIRE(sol, "null solution");
    return copy_vec(sol, sol->sol.w, out, len);
}

rr_status rr_solution_nonzero_groups(const rr_solution* sol, double zero_tol, int64_t* out,
                                     int64_t cap, int64_t* count) {
    RR_REQUIRE(sol && count, "null argument");
    RR_REQUIRE(zero_tol >= 0.0, "zero_tol must be >= 0");
    RR_REQUIRE(cap == 0 || out, "null output buffer");
    const GroupStructure& G = sol->groups;
    int64_t c = 0;
    for (Index l = 0; l < G.num_groups(); ++l) {
        bool nz = false;
        for (Index j : G.members(l)) nz = nz || std::abs(sol->sol.beta(j)) > zero_tol;
        if (!nz) continue;
        if (c < cap) out[c] = l;
        ++c;
    }
    *count = c;
    return RR_OK;
}

void rr_solution_free(rr_solution* sol) { delete sol; }

rr_status rr_kkt_residual(const rr_problem* prob, double lambda, const double* w, const double* s,
                          const double* beta, double out[3]) {
    return guarded([&] {
        RR_REQUIRE(prob && w && s && beta && out, "null argument");
        const Index n = prob->data.n();
        const Index p = prob->data.p();
        const KktResidual r = kkt_residual(prob->data, lambda, Eigen::Map<const Vec>(w, n),
                                           Eigen::Map<const Vec>(s, n), Eigen::Map<const Vec>(beta, p));
        out[0] = r.eta_p;
        out[1] = r.eta_d;
        out[2] = r.eta_kkt;
        return RR_OK;
    });
}

void rr_scenario_default(rr_scenario* sc) {
    if (!sc) return;
    const Scenario d;
    sc->design = "C1";
    sc->signal = "S1";
    sc->noise = "E2";
    sc->n = d.n;
    sc->p = d.p;
    sc->group_size = d.group_size;
    sc->active_fraction = d.active_fraction;
    sc->weights = RR_WEIGHTS_SQRT;
}

rr_status rr_generate(const rr_scenario* sc, uint64_t seed, rr_problem** out, double* beta_star) {
    return guarded([&] {
        RR_REQUIRE(sc && out, "null argument");
        *out = nullptr;
        Dataset ds = generate_dataset(to_scenario(sc), seed);
        if (beta_star) std::copy(ds.beta_star.data(), ds.beta_star.data() + ds.beta_star.size(), beta_star);
        *out = new rr_problem{ProblemData(std::move(ds.X), std::move(ds.y), std::move(ds.groups))};
        return RR_OK;
    });
}

void rr_method_default(rr_method* m) {
    if (!m) return;
    m->singleton_fit = 0;
    m->lambda = 0.0;
    rr_lambda_config_default(&m->lambda_rule);
    m->zero_tol = 1e-8;
}

rr_status rr_run_replications(const rr_scenario* sc, const rr_method* method, const rr_options* opts,
                              int64_t reps, uint64_t seed, int jobs, rr_report* reports,
                              rr_aggregate* agg) {
    return guarded([&] {
        RR_REQUIRE(sc && method && reports, "null argument");
        RR_REQUIRE(reps >= 1, "reps must be >= 1");
        MethodConfig m;
        m.singleton_fit = method->singleton_fit != 0;
        m.lambda = method->lambda;
        m.lambda_rule = to_lambda(method->lambda_rule);
        m.zero_tol = method->zero_tol;
        if (m.lambda <= 0.0) validate(m.lambda_rule);
        SolverOptions so = to_options(opts);
        so.on_iteration = nullptr;
        const ReplicationSummary res = run_replications(to_scenario(sc), m, so, reps, seed, jobs);
        for (std::size_t i = 0; i < res.reports.size(); ++i) {
            const EstimationReport& r = res.reports[i];
            rr_report& o = reports[i];
            o = rr_report{};
            o.replicate = r.replicate;
            o.seed = r.seed;
            o.l2_error = r.l2_error;
            o.model_error = r.model_error;
            o.fp = r.fp;
            o.fn = r.fn;
            o.lambda_used = r.lambda_used;
            o.lambda_time = r.lambda_time;
            o.solve_time = r.solve_time;
            o.eta_kkt = r.eta_kkt;
            o.relgap = r.relgap;
            o.outer_iters = r.outer_iters;
            o.newton_iters = r.newton_iters;
            o.converged = r.converged ? 1 : 0;
            o.failed = r.failed ? 1 : 0;
            std::strncpy(o.error, r.error.c_str(), sizeof o.error - 1);
        }
        if (agg) {
            const Aggregate& a = res.aggregate;
            *agg = {a.median_l2, a.mean_l2,     a.median_me,        a.mean_me,
                    a.median_fp, a.mean_fp,     a.median_fn,        a.mean_fn,
                    a.median_lambda, a.median_solve_time, a.converged, a.failed};
        }
        return RR_OK;
    });
}

} // extern "C"
