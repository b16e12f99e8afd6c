#include "rankreg/problem.hpp"

#include <cmath>
#include <sstream>

namespace rankreg {

double weight_for_size(WeightRule rule, Index size) {
    const double m = static_cast<double>(size);
    switch (rule) {
    case WeightRule::One: return 1.0;
    case WeightRule::SqrtSize: return std::sqrt(m);
    case WeightRule::InvSqrtSize: return 1.0 / std::sqrt(m);
    }
    return 1.0;
}

std::optional<std::string> check_groups(const std::vector<std::vector<Index>>& groups,
                                        const std::vector<double>& weights, Index p) {
    std::ostringstream msg;
    if (p < 1) {
        msg << "dimension mismatch: p must be >= 1, got " << p;
        return msg.str();
    }
    if (weights.size() != groups.size()) {
        msg << "dimension mismatch: " << groups.size() << " groups but " << weights.size()
            << " weights";
        return msg.str();
    }
    std::vector<Index> owner(static_cast<std::size_t>(p), -1);
    for (std::size_t l = 0; l < groups.size(); ++l) {
        if (groups[l].empty()) {
            msg << "empty group: group " << l;
            return msg.str();
        }
        for (Index j : groups[l]) {
            if (j < 0 || j >= p) {
                msg << "index out of range: group " << l << " contains " << j << " (p = " << p
                    << ")";
                return msg.str();
            }
            auto& o = owner[static_cast<std::size_t>(j)];
            if (o != -1) {
                msg << "overlapping groups: index " << j << " is in groups " << o << " and " << l;
                return msg.str();
            }
            o = static_cast<Index>(l);
        }
        const double w = weights[l];
        if (!std::isfinite(w)) {
            msg << "non-finite entry: weight of group " << l;
            return msg.str();
        }
        if (w <= 0.0) {
            msg << "nonpositive weight: group " << l << " has weight " << w;
            return msg.str();
        }
    }
    for (Index j = 0; j < p; ++j) {
        if (owner[static_cast<std::size_t>(j)] == -1) {
            msg << "uncovered index: " << j << " belongs to no group";
            return msg.str();
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_problem(const Mat& X, const Vec& y,
                                         const std::vector<std::vector<Index>>& groups,
                                         const std::vector<double>& weights) {
    std::ostringstream msg;
    if (X.rows() < 2) {
        msg << "dimension mismatch: need n >= 2 observations, got " << X.rows();
        return msg.str();
    }
    if (X.cols() < 1) {
        msg << "dimension mismatch: need p >= 1 columns, got " << X.cols();
        return msg.str();
    }
    if (y.size() != X.rows()) {
        msg << "dimension mismatch: X has " << X.rows() << " rows but y has " << y.size()
            << " entries";
        return msg.str();
    }
    for (Index j = 0; j < X.cols(); ++j)
        for (Index i = 0; i < X.rows(); ++i)
            if (!std::isfinite(X(i, j))) {
                msg << "non-finite entry: X(" << i << ", " << j << ")";
                return msg.str();
            }
    for (Index i = 0; i < y.size(); ++i)
        if (!std::isfinite(y(i))) {
            msg << "non-finite entry: y(" << i << ")";
            return msg.str();
        }
    return check_groups(groups, weights, X.cols());
}

GroupStructure::GroupStructure(const std::vector<std::vector<Index>>& groups,
                               std::vector<double> weights, Index p) {
    if (auto err = check_groups(groups, weights, p)) throw InvalidInput(*err);
    group_of_.assign(static_cast<std::size_t>(p), 0);
    offsets_.reserve(groups.size() + 1);
    offsets_.push_back(0);
    members_.reserve(static_cast<std::size_t>(p));
    for (std::size_t l = 0; l < groups.size(); ++l) {
        for (Index j : groups[l]) {
            group_of_[static_cast<std::size_t>(j)] = static_cast<Index>(l);
            members_.push_back(j);
        }
        offsets_.push_back(static_cast<Index>(members_.size()));
    }
    weights_ = std::move(weights);
}

GroupStructure GroupStructure::singletons(Index p) {
    return contiguous(p, 1, WeightRule::One);
}

GroupStructure GroupStructure::contiguous(Index p, Index size, WeightRule rule) {
    if (size < 1) throw InvalidInput("group size must be >= 1");
    std::vector<std::vector<Index>> groups;
    std::vector<double> weights;
    for (Index start = 0; start < p; start += size) {
        const Index end = std::min(p, start + size);
        std::vector<Index> g(static_cast<std::size_t>(end - start));
        for (Index j = start; j < end; ++j) g[static_cast<std::size_t>(j - start)] = j;
        weights.push_back(weight_for_size(rule, end - start));
        groups.push_back(std::move(g));
    }
    return GroupStructure(groups, std::move(weights), p);
}

namespace {

std::vector<std::vector<Index>> member_lists(const GroupStructure& g) {
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(g.num_groups()));
    for (Index l = 0; l < g.num_groups(); ++l) {
        auto m = g.members(l);
        out[static_cast<std::size_t>(l)].assign(m.begin(), m.end());
    }
    return out;
}

} // namespace

ProblemData::ProblemData(Mat X, Vec y, GroupStructure groups)
    : X_(std::move(X)), y_(std::move(y)), groups_(std::move(groups)) {
    if (auto err = check_problem(X_, y_, member_lists(groups_), groups_.weights()))
        throw InvalidInput(*err);
}

ProblemData ProblemData::centered() const {
    Mat Xc = X_;
    Xc.rowwise() -= Xc.colwise().mean();
    return ProblemData(std::move(Xc), y_, groups_);
}

} // namespace rankreg
