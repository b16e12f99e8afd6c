#pragma once

#include <vector>

#include "rankreg/problem.hpp"

namespace rankreg {

/// Groups strictly outside their shrinkage ball at the prox input, with cached norms.
struct ActiveGroups {
    std::vector<Index> groups;  ///< group ids l with ||beta_G|| > radius_l
    std::vector<double> norms;  ///< ||beta_G||_2
    std::vector<double> radii;  ///< scale * w_l

    Index count() const { return static_cast<Index>(groups.size()); }
};

struct GroupProx {
    Vec value;
    ActiveGroups active;
};

/// Psi(beta) = sum_l w_l ||beta_{G_l}||_2.
double group_norm(const Vec& beta, const GroupStructure& G);

/// Dual norm max_l ||v_{G_l}||_2 / w_l.
double dual_norm(const Vec& v, const GroupStructure& G);

/// Projection onto the l2 ball of the given radius.
Vec project_l2_ball(const Vec& v, double radius);

/// Groupwise block soft-thresholding: prox of scale * Psi. Groups with norm at
/// or below scale * w_l map to exact zeros.
GroupProx prox_group(const Vec& beta, const GroupStructure& G, double scale);

/// Applies the generalized Jacobian of prox_group at `beta`. On each active
/// group: (1 - r/||b||) d + (r/||b||^3) <b, d> b with r = scale * w_l; zero elsewhere.
Vec jacobian_group_apply(const Vec& beta, const ActiveGroups& active, const GroupStructure& G,
                         const Vec& d);

} // namespace rankreg
