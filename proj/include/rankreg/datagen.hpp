#pragma once

#include <cstdint>
#include <string_view>

#include "rankreg/problem.hpp"

namespace rankreg {

/// Row covariance of the design: C1/C3 equi-correlated (0.3 / 0.5), C2 AR(1) with 0.9.
enum class Design { C1, C2, C3 };
/// S1 uniform and S2 linearly decaying group signals; S3 sparse and S4 decaying elementwise.
enum class Signal { S1, S2, S3, S4 };
/// E1 N(0,0.25), E2 N(0,1), E3 N(0,2), E4 0.95 N(0,1) + 0.05 N(0,100), E5 sqrt(2) t_4, E6 Cauchy(0,1).
enum class Noise { E1, E2, E3, E4, E5, E6 };

Design parse_design(std::string_view s);
Signal parse_signal(std::string_view s);
Noise parse_noise(std::string_view s);
std::string_view to_string(Design d);
std::string_view to_string(Signal s);
std::string_view to_string(Noise e);

/// Off-diagonal correlation for the equi-correlated designs, 0.9 (the lag-1 coefficient) for C2.
double design_rho(Design d);

struct DesignSpec {
    Design kind = Design::C1;
    Index n = 0;
    Index p = 0;
};

/// Rows i.i.d. N(0, Sigma) using O(np) structured samplers.
Mat gen_design(const DesignSpec& spec, std::uint64_t seed);

/// Equi-correlated rows with an arbitrary rho in [0, 1): sqrt(1-rho) Z + sqrt(rho) z0 1^T.
Mat gen_equicorrelated(Index n, Index p, double rho, std::uint64_t seed);

struct SignalSpec {
    Signal kind = Signal::S1;
    double active_fraction = 0.01;  ///< S1/S2: share of groups that carry signal
};

/// Number of active leading groups for S1/S2: max(1, round(fraction * g)).
Index active_group_count(const SignalSpec& spec, Index num_groups);

Vec gen_signal(const SignalSpec& spec, Index p, const GroupStructure& G);

Vec gen_noise(Noise kind, Index n, std::uint64_t seed);

/// All monomials of total degree 1..order over the columns of X, graded
/// lexicographic order (degree-1 block first, equal to X). No intercept column.
Mat polynomial_expand(const Mat& X, int order);

/// Column count of polynomial_expand: C(p + order, order) - 1.
Index polynomial_width(Index p, int order);

/// A full synthetic scenario: design, signal, noise and group layout.
struct Scenario {
    Design design = Design::C1;
    Signal signal = Signal::S1;
    Noise noise = Noise::E2;
    Index n = 500;
    Index p = 8000;
    Index group_size = 20;
    double active_fraction = 0.01;
    WeightRule weights = WeightRule::SqrtSize;
};

struct Dataset {
    Mat X;
    Vec y;
    Vec beta_star;
    GroupStructure groups;
};

/// y = X beta* + eps with independent seeded streams for X and eps.
Dataset generate_dataset(const Scenario& sc, std::uint64_t seed);

} // namespace rankreg
