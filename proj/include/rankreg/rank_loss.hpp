#pragma once

#include <vector>

#include "rankreg/problem.hpp"

namespace rankreg {

/// Weights rho_k = (2n - 4k + 2) / (n(n-1)), k = 1..n. Strictly decreasing,
/// antisymmetric, summing to zero. The rank loss is <rho, u sorted descending>.
Vec rho_weights(Index n);

/// Wilcoxon rank loss L(u) = 1/(n(n-1)) sum_{i != j} |u_i - u_j|, evaluated in
/// O(n log n) through the sorted form.
double rank_loss(const Vec& u);

/// Euclidean projection onto {z : z_1 >= z_2 >= ... >= z_n} (pool adjacent violators).
Vec project_monotone(const Vec& z);

/// Tied-block structure of a rank-loss prox evaluation.
///
/// `perm[k]` is the original index holding the k-th largest prox input.
/// Block b covers sorted positions [block_starts[b], block_starts[b+1]) (the
/// last block ends at n) and every entry in it takes `block_values[b]`.
struct MonotoneBlocks {
    std::vector<Index> perm;
    std::vector<Index> block_starts;
    std::vector<double> block_values;

    Index size() const { return static_cast<Index>(perm.size()); }
    Index num_blocks() const { return static_cast<Index>(block_starts.size()); }
    Index block_begin(Index b) const { return block_starts[static_cast<std::size_t>(b)]; }
    Index block_end(Index b) const {
        return b + 1 < num_blocks() ? block_starts[static_cast<std::size_t>(b) + 1] : size();
    }
    /// Number of blocks with >= 2 entries: the rank-loss share of the Newton width.
    Index tied_blocks() const;
    /// Scatter the block values back to the original coordinates.
    Vec expand() const;
};

struct RankProx {
    Vec value;
    MonotoneBlocks blocks;
};

/// Prox of scale * L at s. Returns the minimizer of scale*L(x) + 0.5||x - s||^2
/// together with the tied blocks of the projected (sorted) vector, which
/// determine the generalized Jacobian.
RankProx prox_rank_loss(const Vec& s, double scale);

/// Applies the generalized Jacobian of the rank-loss prox encoded by `blocks`:
/// averages `d` within every tied block, identity on singleton blocks.
Vec jacobian_rank_apply(const MonotoneBlocks& blocks, const Vec& d);

} // namespace rankreg
