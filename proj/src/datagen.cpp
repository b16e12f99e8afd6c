#include "rankreg/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "rankreg/rng.hpp"

namespace rankreg {

namespace {

constexpr std::uint64_t kDesignDomain = 0x64657369676e0001ULL;
constexpr std::uint64_t kNoiseDomain = 0x6e6f697365000001ULL;

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::string_view, N>& names, const char* what) {
    for (std::size_t i = 0; i < N; ++i)
        if (s == names[i]) return static_cast<E>(i);
    throw InvalidInput(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<std::string_view, 3> kDesignNames{"C1", "C2", "C3"};
constexpr std::array<std::string_view, 4> kSignalNames{"S1", "S2", "S3", "S4"};
constexpr std::array<std::string_view, 6> kNoiseNames{"E1", "E2", "E3", "E4", "E5", "E6"};

} // namespace

Design parse_design(std::string_view s) { return parse_enum<Design>(s, kDesignNames, "design"); }
Signal parse_signal(std::string_view s) { return parse_enum<Signal>(s, kSignalNames, "signal"); }
Noise parse_noise(std::string_view s) { return parse_enum<Noise>(s, kNoiseNames, "noise"); }
std::string_view to_string(Design d) { return kDesignNames[static_cast<std::size_t>(d)]; }
std::string_view to_string(Signal s) { return kSignalNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(Noise e) { return kNoiseNames[static_cast<std::size_t>(e)]; }

double design_rho(Design d) {
    switch (d) {
    case Design::C1: return 0.3;
    case Design::C2: return 0.9;
    case Design::C3: return 0.5;
    }
    return 0.0;
}

Mat gen_equicorrelated(Index n, Index p, double rho, std::uint64_t seed) {
    if (n < 1 || p < 1) throw InvalidInput("design needs n, p >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidInput("equi-correlation must lie in [0, 1)");
    Rng rng = make_stream(seed, 0, kDesignDomain);
    std::normal_distribution<double> normal;
    Vec common(n);
    for (Index i = 0; i < n; ++i) common(i) = normal(rng);
    const double a = std::sqrt(1.0 - rho);
    const double b = std::sqrt(rho);
    Mat X(n, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < n; ++i) X(i, j) = a * normal(rng) + b * common(i);
    return X;
}

Mat gen_design(const DesignSpec& spec, std::uint64_t seed) {
    if (spec.n < 2 || spec.p < 1) throw InvalidInput("design needs n >= 2 and p >= 1");
    if (spec.kind != Design::C2) return gen_equicorrelated(spec.n, spec.p, design_rho(spec.kind), seed);

    // AR(1) columns: X_{.,j+1} = phi X_{.,j} + sqrt(1 - phi^2) fresh.
    const double phi = design_rho(Design::C2);
    const double innov = std::sqrt(1.0 - phi * phi);
    Rng rng = make_stream(seed, 0, kDesignDomain);
    std::normal_distribution<double> normal;
    Mat X(spec.n, spec.p);
    for (Index i = 0; i < spec.n; ++i) X(i, 0) = normal(rng);
    for (Index j = 1; j < spec.p; ++j)
        for (Index i = 0; i < spec.n; ++i) X(i, j) = phi * X(i, j - 1) + innov * normal(rng);
    return X;
}

Index active_group_count(const SignalSpec& spec, Index num_groups) {
    const auto m = static_cast<Index>(std::llround(spec.active_fraction * static_cast<double>(num_groups)));
    return std::clamp<Index>(m, 1, num_groups);
}

Vec gen_signal(const SignalSpec& spec, Index p, const GroupStructure& G) {
    if (G.dim() != p) throw InvalidInput("signal: group structure does not cover p columns");
    Vec beta = Vec::Zero(p);
    switch (spec.kind) {
    case Signal::S1:
    case Signal::S2: {
        if (!(spec.active_fraction > 0.0 && spec.active_fraction <= 1.0))
            throw InvalidInput("signal: active fraction must lie in (0, 1]");
        const Index m = active_group_count(spec, G.num_groups());
        for (Index l = 0; l < m; ++l) {
            const auto members = G.members(l);
            for (std::size_t j = 0; j < members.size(); ++j)
                beta(members[j]) = spec.kind == Signal::S1
                                       ? std::sqrt(3.0)
                                       : 2.0 - static_cast<double>(j) / 4.0;
        }
        break;
    }
    case Signal::S3: {
        const Index k = p <= 8000 ? 3 : static_cast<Index>(std::floor(0.001 * static_cast<double>(p)));
        if (k > p) throw InvalidInput("signal S3 needs p >= 3");
        beta.head(k).setConstant(std::sqrt(3.0));
        break;
    }
    case Signal::S4: {
        const Index m = p <= 8000 ? 1 : static_cast<Index>(std::ceil(static_cast<double>(p) / 2500.0));
        // 2 repeated 4m times, then 1.75, 1.5, ..., 0.25 each repeated 3m times.
        if (25 * m > p) throw InvalidInput("signal S4 needs p >= 25 m");
        Index pos = 0;
        for (int level = 0; level < 8; ++level) {
            const Index count = (level == 0 ? 4 : 3) * m;
            beta.segment(pos, count).setConstant(2.0 - 0.25 * level);
            pos += count;
        }
        break;
    }
    }
    return beta;
}

Vec gen_noise(Noise kind, Index n, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("noise needs n >= 1");
    Rng rng = make_stream(seed, 0, kNoiseDomain);
    Vec eps(n);
    std::normal_distribution<double> normal;
    switch (kind) {
    case Noise::E1:
        for (Index i = 0; i < n; ++i) eps(i) = 0.5 * normal(rng);
        break;
    case Noise::E2:
        for (Index i = 0; i < n; ++i) eps(i) = normal(rng);
        break;
    case Noise::E3:
        for (Index i = 0; i < n; ++i) eps(i) = std::sqrt(2.0) * normal(rng);
        break;
    case Noise::E4: {
        std::bernoulli_distribution outlier(0.05);
        for (Index i = 0; i < n; ++i) eps(i) = (outlier(rng) ? 10.0 : 1.0) * normal(rng);
        break;
    }
    case Noise::E5: {
        std::student_t_distribution<double> t4(4.0);
        for (Index i = 0; i < n; ++i) eps(i) = std::sqrt(2.0) * t4(rng);
        break;
    }
    case Noise::E6: {
        std::cauchy_distribution<double> cauchy(0.0, 1.0);
        for (Index i = 0; i < n; ++i) eps(i) = cauchy(rng);
        break;
    }
    }
    return eps;
}

Index polynomial_width(Index p, int order) {
    if (order < 1) throw InvalidInput("polynomial order must be >= 1");
    // C(p + order, order) - 1, computed incrementally with an overflow guard.
    long double c = 1.0L;
    for (int k = 1; k <= order; ++k) c = c * static_cast<long double>(p + k) / k;
    if (c - 1.0L > static_cast<long double>(std::numeric_limits<int>::max()))
        throw InvalidInput("polynomial expansion too wide");
    return static_cast<Index>(std::llround(static_cast<double>(c))) - 1;
}

Mat polynomial_expand(const Mat& X, int order) {
    const Index p = X.cols();
    const Index width = polynomial_width(p, order);
    Mat out(X.rows(), width);
    // Monomials of degree d are nondecreasing index tuples (i1 <= ... <= id),
    // enumerated lexicographically; each extends a degree d-1 monomial.
    std::vector<Index> prev_last;  // last index of each degree-(d-1) monomial
    std::vector<Index> prev_cols;
    Index col = 0;
    for (Index j = 0; j < p; ++j) {
        out.col(col) = X.col(j);
        prev_last.push_back(j);
        prev_cols.push_back(col);
        ++col;
    }
    for (int d = 2; d <= order; ++d) {
        std::vector<Index> next_last;
        std::vector<Index> next_cols;
        for (std::size_t m = 0; m < prev_last.size(); ++m) {
            for (Index j = prev_last[m]; j < p; ++j) {
                out.col(col) = out.col(prev_cols[m]).cwiseProduct(X.col(j));
                next_last.push_back(j);
                next_cols.push_back(col);
                ++col;
            }
        }
        prev_last = std::move(next_last);
        prev_cols = std::move(next_cols);
    }
    return out;
}

Dataset generate_dataset(const Scenario& sc, std::uint64_t seed) {
    Dataset ds;
    ds.X = gen_design({sc.design, sc.n, sc.p}, seed);
    const bool grouped = sc.signal == Signal::S1 || sc.signal == Signal::S2;
    ds.groups = grouped ? GroupStructure::contiguous(sc.p, sc.group_size, sc.weights)
                        : GroupStructure::singletons(sc.p);
    ds.beta_star = gen_signal({sc.signal, sc.active_fraction}, sc.p, ds.groups);
    ds.y = ds.X * ds.beta_star + gen_noise(sc.noise, sc.n, seed);
    return ds;
}

} // namespace rankreg
