#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

using Eigen::Index;

double rank_loss_pairwise(const Vec& u) {
    const Index n = u.size();
    double sum = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (i != j) sum += std::abs(u(i) - u(j));
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

Vec rank_loss_gradient(const Vec& u) {
    const Index n = u.size();
    Vec g = Vec::Zero(n);
    const double c = 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (i != j) g(i) += c * (u(i) > u(j) ? 1.0 : (u(i) < u(j) ? -1.0 : 0.0));
    return g;
}

Vec project_monotone_exhaustive(const Vec& z) {
    const Index n = z.size();
    if (n <= 1) return z;
    Vec best;
    double best_dist = std::numeric_limits<double>::infinity();
    // Bit b of mask set: a block boundary sits between positions b and b+1.
    const std::uint64_t masks = std::uint64_t{1} << (n - 1);
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
        Vec x(n);
        Index start = 0;
        for (Index i = 0; i < n; ++i) {
            const bool boundary = i == n - 1 || ((mask >> i) & 1U);
            if (!boundary) continue;
            const double avg = z.segment(start, i - start + 1).mean();
            x.segment(start, i - start + 1).setConstant(avg);
            start = i + 1;
        }
        bool monotone = true;
        for (Index i = 0; i + 1 < n && monotone; ++i) monotone = x(i) >= x(i + 1) - 1e-14;
        if (!monotone) continue;
        const double dist = (x - z).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = x;
        }
    }
    return best;
}

Vec project_monotone_minmax(const Vec& z) {
    const Index n = z.size();
    Vec prefix(n + 1);
    prefix(0) = 0.0;
    for (Index i = 0; i < n; ++i) prefix(i + 1) = prefix(i) + z(i);
    auto mean = [&](Index j, Index k) { return (prefix(k + 1) - prefix(j)) / static_cast<double>(k - j + 1); };
    Vec x(n);
    for (Index i = 0; i < n; ++i) {
        double lo = std::numeric_limits<double>::infinity();
        for (Index j = 0; j <= i; ++j) {
            double hi = -std::numeric_limits<double>::infinity();
            for (Index k = i; k < n; ++k) hi = std::max(hi, mean(j, k));
            lo = std::min(lo, hi);
        }
        x(i) = lo;
    }
    return x;
}

Vec prox_rank_enumerate(const Vec& s, double scale) {
    const Index n = s.size();
    const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    Vec best;
    double best_val = std::numeric_limits<double>::infinity();
    Vec t(n), x(n);
    do {
        // On {x_perm[0] >= ... >= x_perm[n-1]} the loss is sum_k c_k x_perm[k] with
        // c_k = (n - 1 - 2k) * 2 / (n(n-1)): entry k beats n-1-k others and loses to k.
        for (Index k = 0; k < n; ++k) {
            const double c = 2.0 * static_cast<double>(n - 1 - 2 * k) / denom;
            t(k) = s(perm[static_cast<std::size_t>(k)]) - scale * c;
        }
        const Vec proj = project_monotone_minmax(t);
        for (Index k = 0; k < n; ++k) x(perm[static_cast<std::size_t>(k)]) = proj(k);
        const double val = scale * rank_loss_pairwise(x) + 0.5 * (x - s).squaredNorm();
        if (val < best_val) {
            best_val = val;
            best = x;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double group_norm(const Vec& beta, const Groups& G, const std::vector<double>& w) {
    double total = 0.0;
    for (std::size_t l = 0; l < G.size(); ++l) {
        double sq = 0.0;
        for (Index j : G[l]) sq += beta(j) * beta(j);
        total += w[l] * std::sqrt(sq);
    }
    return total;
}

double dual_norm(const Vec& v, const Groups& G, const std::vector<double>& w) {
    double best = 0.0;
    for (std::size_t l = 0; l < G.size(); ++l) {
        double sq = 0.0;
        for (Index j : G[l]) sq += v(j) * v(j);
        best = std::max(best, std::sqrt(sq) / w[l]);
    }
    return best;
}

Vec prox_group(const Vec& beta, const Groups& G, const std::vector<double>& w, double scale) {
    // argmin_x scale*w||x|| + 0.5||x - b||^2 is 0 when ||b|| <= scale*w, otherwise
    // x = t b with t solving scale*w + (t - 1)||b|| = 0.
    Vec out = Vec::Zero(beta.size());
    for (std::size_t l = 0; l < G.size(); ++l) {
        double sq = 0.0;
        for (Index j : G[l]) sq += beta(j) * beta(j);
        const double nb = std::sqrt(sq);
        const double r = scale * w[l];
        if (nb <= r) continue;
        const double t = (nb - r) / nb;
        for (Index j : G[l]) out(j) = t * beta(j);
    }
    return out;
}

Vec central_difference(const std::function<Vec(const Vec&)>& f, const Vec& x, const Vec& d, double h) {
    return (f(x + h * d) - f(x - h * d)) / (2.0 * h);
}

double primal_objective(const Mat& X, const Vec& y, const Groups& G, const std::vector<double>& w,
                        double lambda, const Vec& beta) {
    return rank_loss_pairwise(X * beta - y) + lambda * group_norm(beta, G, w);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

template <class F>
std::pair<double, double> golden(F&& f, double lo, double hi, double tol) {
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    // The interval may have collapsed onto an endpoint or a kink; check both ends too.
    double xbest = c, fbest = fc;
    for (double x : {d, a, b, 0.5 * (a + b)}) {
        const double v = f(x);
        if (v < fbest) {
            fbest = v;
            xbest = x;
        }
    }
    return {xbest, fbest};
}

} // namespace

BoxMinimum nested_golden_min(const std::function<double(const Vec&)>& f, int p, double radius, double tol) {
    Vec x = Vec::Zero(p);
    std::function<double(int)> level = [&](int k) -> double {
        if (k == p) return f(x);
        auto g = [&](double t) {
            x(k) = t;
            return level(k + 1);
        };
        const auto [t, v] = golden(g, -radius, radius, tol * radius);
        x(k) = t;
        (void)v;
        return level(k + 1);
    };
    BoxMinimum out;
    out.value = level(0);
    out.argmin = x;
    return out;
}

Vec score_for_ranks(const Mat& X, const std::vector<int>& ranks) {
    const Index n = X.rows();
    Vec xi(n);
    for (Index i = 0; i < n; ++i) xi(i) = 2.0 * ranks[static_cast<std::size_t>(i)] - (static_cast<double>(n) + 1.0);
    return -(2.0 / (static_cast<double>(n) * static_cast<double>(n - 1))) * (X.transpose() * xi);
}

double exact_score_quantile(const Mat& X, const Groups& G, const std::vector<double>& w, double alpha) {
    std::vector<int> ranks(static_cast<std::size_t>(X.rows()));
    std::iota(ranks.begin(), ranks.end(), 1);
    std::vector<double> values;
    do {
        values.push_back(dual_norm(score_for_ranks(X, ranks), G, w));
    } while (std::next_permutation(ranks.begin(), ranks.end()));
    std::sort(values.begin(), values.end());
    // Smallest v with P(V <= v) >= 1 - alpha.
    const double m = static_cast<double>(values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        if (static_cast<double>(k + 1) / m >= 1.0 - alpha - 1e-12) return values[k];
    return values.back();
}

Mat dense_from_action(const std::function<Vec(const Vec&)>& apply, Index n) {
    Mat M(n, n);
    for (Index j = 0; j < n; ++j) M.col(j) = apply(Vec::Unit(n, j));
    return M;
}

TestRng::TestRng(std::uint64_t seed) : state(seed * 0x9e3779b97f4a7c15ULL + 0x1234567ULL) {}

namespace {
std::uint64_t next_u64(std::uint64_t& s) {
    // splitmix64
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace

double TestRng::uniform(double lo, double hi) {
    const double u = static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double TestRng::normal() {
    if (has_spare) {
        has_spare = false;
        return spare;
    }
    double u, v, s;
    do {
        u = uniform(-1.0, 1.0);
        v = uniform(-1.0, 1.0);
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare = v * m;
    has_spare = true;
    return u * m;
}

int TestRng::integer(int lo, int hi) {
    return lo + static_cast<int>(next_u64(state) % static_cast<std::uint64_t>(hi - lo + 1));
}

Vec TestRng::normal_vec(Index n) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal();
    return v;
}

Mat TestRng::normal_mat(Index r, Index c) {
    Mat M(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) M(i, j) = normal();
    return M;
}

} // namespace oracle
