#include "rankreg/rank_loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rankreg {

namespace {

// Relative tolerance under which adjacent PAVA blocks count as tied for the
// Jacobian. The prox value itself comes from exact PAVA.
constexpr double kTieTol = 1e-12;

std::vector<Index> descending_order(const Vec& s) {
    std::vector<Index> perm(static_cast<std::size_t>(s.size()));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) { return s(a) > s(b); });
    return perm;
}

struct Pool {
    double sum;
    Index count;
    double mean() const { return sum / static_cast<double>(count); }
};

// PAVA for the nonincreasing cone; merges only on a strict violation.
std::vector<Pool> pava(const double* z, Index n) {
    std::vector<Pool> pools;
    pools.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        pools.push_back({z[i], 1});
        while (pools.size() > 1) {
            const Pool& right = pools.back();
            const Pool& left = pools[pools.size() - 2];
            if (!(left.mean() < right.mean())) break;
            Pool merged{left.sum + right.sum, left.count + right.count};
            pools.pop_back();
            pools.back() = merged;
        }
    }
    return pools;
}

} // namespace

Vec rho_weights(Index n) {
    if (n < 2) throw InvalidInput("rank loss needs n >= 2");
    const double nn = static_cast<double>(n);
    const double denom = nn * (nn - 1.0);
    Vec rho(n);
    for (Index k = 1; k <= n; ++k)
        rho(k - 1) = (2.0 * nn - 4.0 * static_cast<double>(k) + 2.0) / denom;
    return rho;
}

double rank_loss(const Vec& u) {
    const Index n = u.size();
    if (n < 2) throw InvalidInput("rank loss needs n >= 2");
    std::vector<double> sorted(u.data(), u.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const Vec rho = rho_weights(n);
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) acc += rho(k) * sorted[static_cast<std::size_t>(k)];
    return std::max(acc, 0.0);
}

Vec project_monotone(const Vec& z) {
    const Index n = z.size();
    Vec out(n);
    Index pos = 0;
    for (const Pool& p : pava(z.data(), n)) {
        out.segment(pos, p.count).setConstant(p.mean());
        pos += p.count;
    }
    return out;
}

Index MonotoneBlocks::tied_blocks() const {
    Index r = 0;
    for (Index b = 0; b < num_blocks(); ++b)
        if (block_end(b) - block_begin(b) >= 2) ++r;
    return r;
}

Vec MonotoneBlocks::expand() const {
    Vec out(size());
    for (Index b = 0; b < num_blocks(); ++b) {
        const double v = block_values[static_cast<std::size_t>(b)];
        for (Index k = block_begin(b); k < block_end(b); ++k)
            out(perm[static_cast<std::size_t>(k)]) = v;
    }
    return out;
}

RankProx prox_rank_loss(const Vec& s, double scale) {
    if (!(scale > 0.0)) throw InvalidInput("prox scale must be positive");
    const Index n = s.size();
    const Vec rho = rho_weights(n);

    RankProx out;
    out.blocks.perm = descending_order(s);
    const auto& perm = out.blocks.perm;

    // Prox_{cL}(s) = c Prox_L(s/c); in sorted coordinates z = s/c - rho.
    Vec z(n);
    for (Index k = 0; k < n; ++k) z(k) = s(perm[static_cast<std::size_t>(k)]) / scale - rho(k);

    const std::vector<Pool> pools = pava(z.data(), n);

    // Coalesce numerically equal neighbours for the Jacobian's active set.
    auto& starts = out.blocks.block_starts;
    auto& values = out.blocks.block_values;
    starts.reserve(pools.size());
    values.reserve(pools.size());
    std::vector<double> sums;
    std::vector<Index> counts;
    Index pos = 0;
    for (const Pool& p : pools) {
        const double m = p.mean();
        if (!counts.empty()) {
            const double prev = sums.back() / static_cast<double>(counts.back());
            if (std::abs(prev - m) <= kTieTol * std::max({1.0, std::abs(prev), std::abs(m)})) {
                sums.back() += p.sum;
                counts.back() += p.count;
                pos += p.count;
                continue;
            }
        }
        starts.push_back(pos);
        sums.push_back(p.sum);
        counts.push_back(p.count);
        pos += p.count;
    }

    // Values come from the exact PAVA pools; coalescing only changes bookkeeping.
    out.value.resize(n);
    pos = 0;
    for (const Pool& p : pools) {
        const double v = scale * p.mean();
        for (Index k = pos; k < pos + p.count; ++k) out.value(perm[static_cast<std::size_t>(k)]) = v;
        pos += p.count;
    }
    for (std::size_t b = 0; b < starts.size(); ++b)
        values.push_back(out.value(perm[static_cast<std::size_t>(starts[b])]));
    return out;
}

Vec jacobian_rank_apply(const MonotoneBlocks& blocks, const Vec& d) {
    if (d.size() != blocks.size())
        throw InvalidInput("jacobian_rank_apply: block structure does not match vector length");
    Vec out = d;
    for (Index b = 0; b < blocks.num_blocks(); ++b) {
        const Index lo = blocks.block_begin(b);
        const Index hi = blocks.block_end(b);
        if (hi - lo < 2) continue;
        double sum = 0.0;
        for (Index k = lo; k < hi; ++k) sum += d(blocks.perm[static_cast<std::size_t>(k)]);
        const double mean = sum / static_cast<double>(hi - lo);
        for (Index k = lo; k < hi; ++k) out(blocks.perm[static_cast<std::size_t>(k)]) = mean;
    }
    return out;
}

} // namespace rankreg
