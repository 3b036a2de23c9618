#include "ssbl/social_forces.hpp"

#include <algorithm>

#include "ssbl/error.hpp"

namespace ssbl {

NeighborPartition partition_neighbors(const AgentState& subject,
                                      std::span<const AgentState> others,
                                      const ProxemicsConfig& prox) {
    NeighborPartition out;
    for (const AgentState& other : others) {
        if (other.id == subject.id) continue;
        const double d = (other.position - subject.position).norm();
        const Neighbor n{other.id, other.position, d};
        if (d <= prox.d_public) out.publik.push_back(n);
        if (d <= prox.d_social) out.social.push_back(n);
        if (d <= prox.d_personal) out.personal.push_back(n);
    }
    return out;
}

Vec2 repulsion_force(const AgentState& subject, const NeighborPartition& partition,
                     const ProxemicsConfig& prox) {
    if (partition.personal.empty()) return {};
    Vec2 offset_sum;
    double d_min = partition.personal.front().distance;
    for (const Neighbor& n : partition.personal) {
        offset_sum += n.position - subject.position;
        if (n.distance < d_min) d_min = n.distance;
    }
    const double len = offset_sum.norm();
    if (len < kDirEpsilon) return {};
    const double gap = prox.d_personal - d_min;
    return offset_sum * (-(gap * gap) / len);
}

DirectedForce equality_force(const AgentState& subject, const NeighborPartition& partition) {
    if (partition.social.empty()) return {};
    const Vec2 p = subject.position;
    Vec2 centroid = p;
    Vec2 orientation;
    for (const Neighbor& n : partition.social) {
        centroid += n.position;
        orientation += n.position - p;
    }
    const double members = static_cast<double>(partition.social.size() + 1);
    centroid = centroid / members;

    double mean_dist = (p - centroid).norm();
    for (const Neighbor& n : partition.social) mean_dist += (n.position - centroid).norm();
    mean_dist /= members;

    DirectedForce out;
    out.orientation = orientation;
    const Vec2 to_centroid = centroid - p;
    const double len = to_centroid.norm();
    if (len >= kDirEpsilon) out.force = to_centroid * (1.0 - mean_dist / len);
    return out;
}

DirectedForce cohesion_force(const AgentState& subject, const NeighborPartition& partition,
                             const OSpace& ospace) {
    if (partition.publik.empty()) return {};
    const Vec2 p = subject.position;
    DirectedForce out;
    for (const Neighbor& n : partition.publik) out.orientation += n.position - p;
    const double alpha = static_cast<double>(partition.publik.size()) /
                         static_cast<double>(partition.social.size() + 1);
    const Vec2 to_center = ospace.center - p;
    const double len = to_center.norm();
    if (len >= kDirEpsilon) out.force = to_center * (alpha * (1.0 - ospace.radius / len));
    return out;
}

ForceBreakdown combined_force(const AgentState& subject, std::span<const AgentState> others,
                              const ProxemicsConfig& prox, const OSpace& ospace) {
    const NeighborPartition part = partition_neighbors(subject, others, prox);
    ForceBreakdown b;
    b.repulsion = repulsion_force(subject, part, prox);
    const DirectedForce eq = equality_force(subject, part);
    const DirectedForce co = cohesion_force(subject, part, ospace);
    b.equality = eq.force;
    b.equality_orientation = eq.orientation;
    b.cohesion = co.force;
    b.cohesion_orientation = co.orientation;
    b.combined = b.repulsion + b.equality + b.cohesion;
    return b;
}

OSpace estimate_ospace(std::span<const AgentState> members, double min_radius) {
    if (members.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "estimate_ospace: no group (need >= 2 members)");
    Vec2 center;
    for (const AgentState& m : members) center += m.position;
    center = center / static_cast<double>(members.size());
    double mean_dist = 0.0;
    for (const AgentState& m : members) mean_dist += (m.position - center).norm();
    mean_dist /= static_cast<double>(members.size());
    return {center, std::max(min_radius, mean_dist)};
}

}  // namespace ssbl
