#include "rankreg/lambda_rule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankreg/group_reg.hpp"
#include "rankreg/rng.hpp"

namespace rankreg {

namespace {

constexpr std::uint64_t kPermutationDomain = 0x6c616d6264610001ULL;
constexpr Index kBatch = 64;

Vec xi_from_ranks(std::span<const Index> ranks) {
    const auto n = static_cast<Index>(ranks.size());
    Vec xi(n);
    for (Index i = 0; i < n; ++i)
        xi(i) = 2.0 * static_cast<double>(ranks[static_cast<std::size_t>(i)]) -
                static_cast<double>(n + 1);
    return xi;
}

} // namespace

void validate(const LambdaConfig& cfg) {
    if (!(cfg.c0 > 1.0)) throw InvalidInput("c0 must be > 1");
    if (!(cfg.alpha0 > 0.0 && cfg.alpha0 < 1.0)) throw InvalidInput("alpha0 must lie in (0, 1)");
    if (cfg.reps < 1) throw InvalidInput("number of simulations must be >= 1");
}

Vec simulate_score(const Mat& X, std::span<const Index> ranks) {
    const Index n = X.rows();
    if (static_cast<Index>(ranks.size()) != n)
        throw InvalidInput("simulate_score: rank vector length differs from n");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (Index r : ranks) {
        if (r < 1 || r > n || seen[static_cast<std::size_t>(r - 1)])
            throw InvalidInput("simulate_score: ranks are not a permutation of 1..n");
        seen[static_cast<std::size_t>(r - 1)] = 1;
    }
    const double nn = static_cast<double>(n);
    return (-2.0 / (nn * (nn - 1.0))) * (X.transpose() * xi_from_ranks(ranks));
}

std::vector<Index> random_ranks(Index n, std::uint64_t seed, std::uint64_t rep) {
    Rng rng = make_stream(seed, rep, kPermutationDomain);
    std::vector<Index> r(static_cast<std::size_t>(n));
    std::iota(r.begin(), r.end(), Index{1});
    for (Index i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<Index> pick(0, i);
        std::swap(r[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(pick(rng))]);
    }
    return r;
}

LambdaSelection select_lambda(const Mat& X, const GroupStructure& G, const LambdaConfig& cfg) {
    validate(cfg);
    if (G.dim() != X.cols()) throw InvalidInput("select_lambda: groups do not match X columns");
    const Index n = X.rows();
    if (n < 2) throw InvalidInput("select_lambda: need n >= 2");
    const double nn = static_cast<double>(n);
    const double factor = -2.0 / (nn * (nn - 1.0));

    LambdaSelection out;
    out.samples.resize(static_cast<std::size_t>(cfg.reps));
    // Batches of replicates share one X^T * Xi product.
    for (Index start = 0; start < cfg.reps; start += kBatch) {
        const Index b = std::min(kBatch, cfg.reps - start);
        Mat xi(n, b);
        for (Index k = 0; k < b; ++k) {
            const auto ranks = random_ranks(n, cfg.seed, static_cast<std::uint64_t>(start + k));
            xi.col(k) = xi_from_ranks(ranks);
        }
        const Mat scores = factor * (X.transpose() * xi);
        for (Index k = 0; k < b; ++k)
            out.samples[static_cast<std::size_t>(start + k)] = dual_norm(scores.col(k), G);
    }

    std::vector<double> sorted = out.samples;
    const double level = (1.0 - cfg.alpha0) * static_cast<double>(cfg.reps);
    // Guard against (1 - alpha0) * K landing a hair above an integer.
    auto order = static_cast<Index>(std::ceil(level - 1e-9));
    order = std::clamp<Index>(order, 1, cfg.reps);
    std::nth_element(sorted.begin(), sorted.begin() + (order - 1), sorted.end());
    out.quantile = sorted[static_cast<std::size_t>(order - 1)];
    out.lambda = cfg.c0 * out.quantile;
    return out;
}

} // namespace rankreg
