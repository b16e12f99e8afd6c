// Exercises the shared library through the C header only.
#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "rankreg/rankreg.h"

namespace {

struct Instance {
    int64_t n, p;
    std::vector<double> X, y;
};

Instance make_instance(int64_t n, int64_t p, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    Instance in{n, p, std::vector<double>(static_cast<std::size_t>(n * p)), std::vector<double>(static_cast<std::size_t>(n))};
    for (auto& v : in.X) v = N(rng);
    for (int64_t i = 0; i < n; ++i) {
        double xb = 0.0;
        for (int64_t j = 0; j < 2; ++j) xb += 2.0 * in.X[static_cast<std::size_t>(j * n + i)];
        in.y[static_cast<std::size_t>(i)] = xb + N(rng);
    }
    return in;
}

} // namespace

TEST_CASE("version and error reporting") {
    CHECK(std::strlen(rr_version()) > 0);
    rr_problem* prob = nullptr;
    double X[6] = {1, 2, 3, 4, 5, 6}, y[2] = {0, 1};
    const int64_t bad_groups[3] = {0, 0, 2};  // id 1 unused: empty group
    CHECK(rr_problem_create(X, y, 2, 3, bad_groups, nullptr, RR_WEIGHTS_SQRT, &prob) == RR_INVALID_INPUT);
    CHECK(prob == nullptr);
    CHECK(std::string(rr_last_error()).find("empty group") != std::string::npos);
    CHECK(rr_problem_create(nullptr, y, 2, 1, nullptr, nullptr, RR_WEIGHTS_ONE, &prob) == RR_INVALID_INPUT);
    CHECK(rr_problem_load("/nonexistent/x.csv", "/nonexistent/y.csv", nullptr, RR_WEIGHTS_ONE, 1, 0, &prob) ==
          RR_IO_ERROR);
    CHECK(std::strlen(rr_last_error()) > 0);
}

TEST_CASE("errors are per thread") {
    rr_problem* prob = nullptr;
    double X[1] = {1}, y[1] = {0};
    CHECK(rr_problem_create(X, y, 1, 1, nullptr, nullptr, RR_WEIGHTS_ONE, &prob) != RR_OK);
    std::string other;
    std::thread([&] { other = rr_last_error(); }).join();
    CHECK(other.empty());
    CHECK(std::strlen(rr_last_error()) > 0);
}

TEST_CASE("create, inspect, solve, score") {
    const Instance in = make_instance(30, 8, 1);
    const int64_t groups[8] = {0, 0, 1, 1, 2, 2, 3, 3};
    rr_problem* prob = nullptr;
    REQUIRE(rr_problem_create(in.X.data(), in.y.data(), in.n, in.p, groups, nullptr, RR_WEIGHTS_SQRT, &prob) == RR_OK);
    int64_t n = 0, p = 0, g = 0;
    CHECK(rr_problem_dims(prob, &n, &p, &g) == RR_OK);
    CHECK(n == 30);
    CHECK(p == 8);
    CHECK(g == 4);
    std::vector<double> Xc(240), w(4);
    std::vector<int64_t> gc(8);
    CHECK(rr_problem_data(prob, Xc.data(), nullptr, gc.data(), w.data()) == RR_OK);
    CHECK(Xc == in.X);
    CHECK(gc[7] == 3);
    CHECK(w[0] == doctest::Approx(std::sqrt(2.0)));

    rr_lambda_config cfg;
    rr_lambda_config_default(&cfg);
    CHECK(cfg.c0 == 1.01);
    CHECK(cfg.alpha0 == 0.1);
    cfg.reps = 100;
    double lambda = 0, q = 0;
    std::vector<double> samples(100);
    REQUIRE(rr_select_lambda(prob, &cfg, &lambda, &q, samples.data()) == RR_OK);
    CHECK(lambda == doctest::Approx(1.01 * q));

    rr_options opts;
    rr_options_default(&opts);
    CHECK(opts.tol == 1e-6);
    int calls = 0;
    opts.progress = [](const rr_iteration*, void* user) { ++*static_cast<int*>(user); };
    opts.progress_user = &calls;
    rr_solution* sol = nullptr;
    REQUIRE(rr_solve(prob, lambda, &opts, &sol) == RR_OK);
    rr_solution_info info;
    CHECK(rr_solution_info_get(sol, &info) == RR_OK);
    CHECK(info.converged == 1);
    CHECK(info.eta_kkt <= 1e-6);
    CHECK(calls == info.outer_iters);

    std::vector<double> beta(8), s(30), dual(30);
    CHECK(rr_solution_beta(sol, beta.data(), 8) == RR_OK);
    CHECK(rr_solution_s(sol, s.data(), 30) == RR_OK);
    CHECK(rr_solution_w(sol, dual.data(), 30) == RR_OK);
    CHECK(rr_solution_beta(sol, beta.data(), 7) == RR_INVALID_INPUT);
    double r[3];
    CHECK(rr_kkt_residual(prob, lambda, dual.data(), s.data(), beta.data(), r) == RR_OK);
    CHECK(r[2] == doctest::Approx(info.eta_kkt).epsilon(1e-12));

    int64_t count = 0, ids[4];
    CHECK(rr_solution_nonzero_groups(sol, 1e-8, ids, 4, &count) == RR_OK);
    CHECK(count >= 1);
    CHECK(ids[0] == 0);  // the true signal sits in group 0
    CHECK(rr_solution_nonzero_groups(sol, 1e-8, nullptr, 0, &count) == RR_OK);

    rr_solution_free(sol);
    rr_problem_free(prob);
}

TEST_CASE("non-convergence still returns a solution") {
    const Instance in = make_instance(30, 8, 2);
    rr_problem* prob = nullptr;
    REQUIRE(rr_problem_create(in.X.data(), in.y.data(), in.n, in.p, nullptr, nullptr, RR_WEIGHTS_ONE, &prob) == RR_OK);
    rr_options opts;
    rr_options_default(&opts);
    opts.max_outer = 1;
    opts.tol = 1e-15;
    rr_solution* sol = nullptr;
    CHECK(rr_solve(prob, 0.01, &opts, &sol) == RR_NOT_CONVERGED);
    REQUIRE(sol != nullptr);
    rr_solution_info info;
    rr_solution_info_get(sol, &info);
    CHECK(info.converged == 0);
    rr_solution_free(sol);
    CHECK(rr_solve(prob, -1.0, &opts, &sol) == RR_INVALID_INPUT);
    rr_problem_free(prob);
}

TEST_CASE("scenario generation and replications") {
    rr_scenario sc;
    rr_scenario_default(&sc);
    sc.n = 40;
    sc.p = 60;
    sc.group_size = 5;
    sc.active_fraction = 0.1;
    rr_problem* prob = nullptr;
    std::vector<double> beta_star(60);
    REQUIRE(rr_generate(&sc, 3, &prob, beta_star.data()) == RR_OK);
    CHECK(beta_star[0] != 0.0);
    CHECK(beta_star[59] == 0.0);
    rr_problem_free(prob);

    sc.design = "C9";
    CHECK(rr_generate(&sc, 3, &prob, nullptr) == RR_INVALID_INPUT);
    sc.design = "C1";

    rr_method m;
    rr_method_default(&m);
    m.lambda_rule.reps = 50;
    rr_options opts;
    rr_options_default(&opts);
    std::vector<rr_report> reports(3);
    rr_aggregate agg;
    REQUIRE(rr_run_replications(&sc, &m, &opts, 3, 11, 2, reports.data(), &agg) == RR_OK);
    CHECK(agg.failed == 0);
    CHECK(reports[2].replicate == 2);
    CHECK(reports[0].lambda_used > 0.0);
}
