#include "rankreg/group_reg.hpp"

#include <cmath>

namespace rankreg {

namespace {

double group_sq_norm(const Vec& v, std::span<const Index> members) {
    double acc = 0.0;
    for (Index j : members) acc += v(j) * v(j);
    return acc;
}

void require_dim(const Vec& v, const GroupStructure& G, const char* what) {
    if (v.size() != G.dim())
        throw InvalidInput(std::string(what) + ": vector length does not match group structure");
}

} // namespace

double group_norm(const Vec& beta, const GroupStructure& G) {
    require_dim(beta, G, "group_norm");
    double acc = 0.0;
    for (Index l = 0; l < G.num_groups(); ++l)
        acc += G.weight(l) * std::sqrt(group_sq_norm(beta, G.members(l)));
    return acc;
}

double dual_norm(const Vec& v, const GroupStructure& G) {
    require_dim(v, G, "dual_norm");
    double best = 0.0;
    for (Index l = 0; l < G.num_groups(); ++l)
        best = std::max(best, std::sqrt(group_sq_norm(v, G.members(l))) / G.weight(l));
    return best;
}

Vec project_l2_ball(const Vec& v, double radius) {
    if (!(radius > 0.0)) throw InvalidInput("project_l2_ball: radius must be positive");
    const double nrm = v.norm();
    return nrm <= radius ? Vec(v) : Vec(v * (radius / nrm));
}

GroupProx prox_group(const Vec& beta, const GroupStructure& G, double scale) {
    if (!(scale > 0.0)) throw InvalidInput("prox scale must be positive");
    require_dim(beta, G, "prox_group");
    GroupProx out;
    out.value = Vec::Zero(beta.size());
    for (Index l = 0; l < G.num_groups(); ++l) {
        const auto members = G.members(l);
        const double nrm = std::sqrt(group_sq_norm(beta, members));
        const double radius = scale * G.weight(l);
        if (nrm <= radius) continue;
        const double shrink = 1.0 - radius / nrm;
        for (Index j : members) out.value(j) = shrink * beta(j);
        out.active.groups.push_back(l);
        out.active.norms.push_back(nrm);
        out.active.radii.push_back(radius);
    }
    return out;
}

Vec jacobian_group_apply(const Vec& beta, const ActiveGroups& active, const GroupStructure& G,
                         const Vec& d) {
    require_dim(beta, G, "jacobian_group_apply");
    require_dim(d, G, "jacobian_group_apply");
    Vec out = Vec::Zero(d.size());
    for (Index a = 0; a < active.count(); ++a) {
        const auto ai = static_cast<std::size_t>(a);
        const auto members = G.members(active.groups[ai]);
        const double nrm = active.norms[ai];
        if (std::abs(std::sqrt(group_sq_norm(beta, members)) - nrm) > 1e-12 * std::max(1.0, nrm))
            throw InvalidInput("jacobian_group_apply: active set was computed at a different point");
        const double r = active.radii[ai];
        double inner = 0.0;
        for (Index j : members) inner += beta(j) * d(j);
        const double c1 = 1.0 - r / nrm;
        const double c2 = r / (nrm * nrm * nrm) * inner;
        for (Index j : members) out(j) = c1 * d(j) + c2 * beta(j);
    }
    return out;
}

} // namespace rankreg
