#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rankreg/metrics.hpp"

using namespace rankreg;

TEST_SUITE("metrics") {

TEST_CASE("error measures") {
    Vec b(4), bs(4);
    b << 1, 0, 0.5, 0;
    bs << 1, 1, 0, 0;
    CHECK(l2_error(b, bs) == doctest::Approx(std::sqrt(1.25)));
    const SupportErrors e = support_errors(b, bs);
    CHECK(e.fp == 1);
    CHECK(e.fn == 1);
    CHECK(support_errors(b, bs, 0.6).fp == 0);
    CHECK_THROWS_AS(l2_error(b, Vec::Zero(3)), InvalidInput);
}

TEST_CASE("model error is the centered sample covariance quadratic form") {
    oracle::TestRng rng(71);
    const Mat X = rng.normal_mat(30, 5).array() + 2.0;
    const Vec d = rng.normal_vec(5);
    const Mat C = X.rowwise() - X.colwise().mean();
    const Mat Sigma = C.transpose() * C / 30.0;
    CHECK(model_error(d, Vec::Zero(5), X) == doctest::Approx(d.dot(Sigma * d)).epsilon(1e-12));
    CHECK(model_error(d, d, X) == 0.0);
}

TEST_CASE("replicate seeds are distinct and stable") {
    CHECK(replicate_seed(1, 0) == replicate_seed(1, 0));
    CHECK(replicate_seed(1, 0) != replicate_seed(1, 1));
    CHECK(replicate_seed(1, 0) != replicate_seed(2, 0));
}

TEST_CASE("replications do not depend on the thread count") {
    Scenario sc;
    sc.n = 40;
    sc.p = 60;
    sc.group_size = 5;
    sc.active_fraction = 0.1;
    MethodConfig m;
    m.lambda_rule.reps = 50;
    const auto one = run_replications(sc, m, {}, 4, 7, 1);
    const auto three = run_replications(sc, m, {}, 4, 7, 3);
    REQUIRE(one.reports.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(one.reports[k].replicate == k);
        CHECK(one.reports[k].seed == three.reports[k].seed);
        CHECK(one.reports[k].l2_error == three.reports[k].l2_error);
        CHECK(one.reports[k].lambda_used == three.reports[k].lambda_used);
        CHECK_FALSE(one.reports[k].failed);
    }
    CHECK(one.aggregate.median_l2 == three.aggregate.median_l2);
}

TEST_CASE("failures are recorded per replicate") {
    Scenario sc;
    sc.n = 1;  // too few observations
    sc.p = 10;
    const EstimationReport r = run_replicate(sc, {}, {}, 0, 0);
    CHECK(r.failed);
    CHECK_FALSE(r.error.empty());
    const Aggregate a = aggregate({r});
    CHECK(a.failed == 1);
}

TEST_CASE("aggregate medians and means") {
    std::vector<EstimationReport> rs(3);
    rs[0].l2_error = 1;
    rs[1].l2_error = 5;
    rs[2].l2_error = 3;
    for (auto& r : rs) r.converged = true;
    const Aggregate a = aggregate(rs);
    CHECK(a.median_l2 == 3.0);
    CHECK(a.mean_l2 == 3.0);
    CHECK(a.converged == 3);
}

}
