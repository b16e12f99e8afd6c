#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rankreg {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised for invalid inputs (bad dimensions, broken group partitions, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the solver produces a non-finite quantity.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Convention used to derive group weights from group sizes.
enum class WeightRule { One, SqrtSize, InvSqrtSize };

double weight_for_size(WeightRule rule, Index size);

/// Disjoint index groups covering [0, p) with positive weights.
///
/// Stored both as a p-length group-id map and as flat per-group member lists
/// so that row access (prox) and column gathering (Hessian) are O(1) per entry.
class GroupStructure {
public:
    GroupStructure() = default;

    /// Throws InvalidInput unless `groups` partitions [0, p) and every weight is > 0.
    GroupStructure(const std::vector<std::vector<Index>>& groups,
                   std::vector<double> weights, Index p);

    /// g = p, every weight 1: the plain l1 penalty.
    static GroupStructure singletons(Index p);
    /// Consecutive groups of `size` columns (the last one may be shorter).
    static GroupStructure contiguous(Index p, Index size, WeightRule rule);

    Index dim() const { return static_cast<Index>(group_of_.size()); }
    Index num_groups() const { return static_cast<Index>(weights_.size()); }
    Index group_of(Index j) const { return group_of_[static_cast<std::size_t>(j)]; }
    double weight(Index l) const { return weights_[static_cast<std::size_t>(l)]; }
    Index group_size(Index l) const {
        return offsets_[static_cast<std::size_t>(l) + 1] - offsets_[static_cast<std::size_t>(l)];
    }
    std::span<const Index> members(Index l) const {
        const auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(l)]);
        const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(l) + 1]);
        return {members_.data() + b, e - b};
    }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<Index> group_of_;
    std::vector<Index> offsets_;
    std::vector<Index> members_;
    std::vector<double> weights_;
};

/// First violated invariant of a candidate group partition, or nullopt.
std::optional<std::string> check_groups(const std::vector<std::vector<Index>>& groups,
                                        const std::vector<double>& weights, Index p);

/// First violated invariant of a candidate problem instance, or nullopt.
std::optional<std::string> check_problem(const Mat& X, const Vec& y,
                                         const std::vector<std::vector<Index>>& groups,
                                         const std::vector<double>& weights);

/// A validated regression instance: X (n x p, row = observation), y, groups.
class ProblemData {
public:
    ProblemData(Mat X, Vec y, GroupStructure groups);

    const Mat& X() const { return X_; }
    const Vec& y() const { return y_; }
    const GroupStructure& groups() const { return groups_; }
    Index n() const { return X_.rows(); }
    Index p() const { return X_.cols(); }

    /// Copy with every column of X shifted to zero mean.
    ProblemData centered() const;

private:
    Mat X_;
    Vec y_;
    GroupStructure groups_;
};

} // namespace rankreg
