#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rankreg/datagen.hpp"

using namespace rankreg;

namespace {

Mat sample_cov(const Mat& X) {
    const Mat C = X.rowwise() - X.colwise().mean();
    return C.transpose() * C / static_cast<double>(X.rows() - 1);
}

} // namespace

TEST_SUITE("datagen") {

TEST_CASE("names round trip") {
    for (auto d : {Design::C1, Design::C2, Design::C3}) CHECK(parse_design(to_string(d)) == d);
    for (auto s : {Signal::S1, Signal::S2, Signal::S3, Signal::S4}) CHECK(parse_signal(to_string(s)) == s);
    for (auto e : {Noise::E1, Noise::E2, Noise::E3, Noise::E4, Noise::E5, Noise::E6})
        CHECK(parse_noise(to_string(e)) == e);
    CHECK_THROWS_AS(parse_design("C4"), InvalidInput);
}

TEST_CASE("design covariances") {
    const Mat C1 = sample_cov(gen_design({Design::C1, 20000, 4}, 1));
    const Mat C3 = sample_cov(gen_design({Design::C3, 20000, 4}, 1));
    const Mat C2 = sample_cov(gen_design({Design::C2, 20000, 4}, 1));
    for (Index i = 0; i < 4; ++i) {
        CHECK(C1(i, i) == doctest::Approx(1.0).epsilon(0.05));
        CHECK(C2(i, i) == doctest::Approx(1.0).epsilon(0.05));
        for (Index j = 0; j < 4; ++j) {
            if (i == j) continue;
            CHECK(std::abs(C1(i, j) - 0.3) < 0.04);
            CHECK(std::abs(C3(i, j) - 0.5) < 0.04);
            CHECK(std::abs(C2(i, j) - std::pow(0.9, std::abs(static_cast<double>(i - j)))) < 0.04);
        }
    }
}

TEST_CASE("designs are seeded") {
    CHECK(gen_design({Design::C2, 10, 5}, 3) == gen_design({Design::C2, 10, 5}, 3));
    CHECK(gen_design({Design::C2, 10, 5}, 3) != gen_design({Design::C2, 10, 5}, 4));
}

TEST_CASE("signals") {
    const auto G = GroupStructure::contiguous(200, 20, WeightRule::SqrtSize);
    const Vec s1 = gen_signal({Signal::S1, 0.01}, 200, G);
    CHECK(active_group_count({Signal::S1, 0.01}, 10) == 1);
    CHECK((s1.head(20).array() == std::sqrt(3.0)).all());
    CHECK(s1.tail(180).cwiseAbs().maxCoeff() == 0.0);
    const Vec s2 = gen_signal({Signal::S2, 0.2}, 200, G);
    CHECK(s2(0) == 2.0);
    CHECK(s2(4) == 1.0);
    CHECK(s2(39) == doctest::Approx(2.0 - 19.0 / 4.0));
    CHECK(s2.tail(160).cwiseAbs().maxCoeff() == 0.0);
    const Vec s3 = gen_signal({Signal::S3, 0.0}, 200, G);
    CHECK((s3.array() != 0.0).count() == 3);
    const Vec s4 = gen_signal({Signal::S4, 0.0}, 200, G);
    CHECK((s4.array() != 0.0).count() == 25);
    CHECK(s4(0) == 2.0);
    CHECK(s4(24) == 0.25);
}

TEST_CASE("noise scales") {
    const Index n = 200000;
    CHECK(gen_noise(Noise::E1, n, 1).squaredNorm() / n == doctest::Approx(0.25).epsilon(0.02));
    CHECK(gen_noise(Noise::E2, n, 1).squaredNorm() / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(gen_noise(Noise::E3, n, 1).squaredNorm() / n == doctest::Approx(2.0).epsilon(0.02));
    // Mixture variance 0.95 + 0.05 * 100 = 5.95; t4 scaled by sqrt 2 has variance 4.
    CHECK(gen_noise(Noise::E4, n, 1).squaredNorm() / n == doctest::Approx(5.95).epsilon(0.05));
    // Cauchy: median of |e| is 1.
    Vec c = gen_noise(Noise::E6, n, 1).cwiseAbs();
    std::nth_element(c.data(), c.data() + n / 2, c.data() + n);
    CHECK(c(n / 2) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("polynomial expansion") {
    Mat X(2, 2);
    X << 1, 2, 3, 4;
    const Mat P = polynomial_expand(X, 2);
    REQUIRE(P.cols() == 5);
    CHECK(polynomial_width(2, 2) == 5);
    CHECK(polynomial_width(10, 3) == 285);
    // x1, x2, x1^2, x1 x2, x2^2
    CHECK(P.row(1) == (Eigen::RowVectorXd(5) << 3, 4, 9, 12, 16).finished());
    CHECK(polynomial_expand(X, 1) == X);
}

TEST_CASE("dataset follows the model y = X beta + eps") {
    Scenario sc;
    sc.n = 50;
    sc.p = 100;
    sc.group_size = 10;
    sc.active_fraction = 0.1;
    const Dataset ds = generate_dataset(sc, 9);
    CHECK(ds.groups.num_groups() == 10);
    CHECK(ds.groups.weight(0) == doctest::Approx(std::sqrt(10.0)));
    const Vec eps = ds.y - ds.X * ds.beta_star;
    CHECK(eps.norm() > 0.0);
    const Dataset again = generate_dataset(sc, 9);
    CHECK(again.X == ds.X);
    CHECK(again.y == ds.y);
}

}
