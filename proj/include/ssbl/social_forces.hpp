#pragma once

// Extended social force field: proxemic neighbor bands and the repulsion,
// equality and cohesion forces (plus their orientation vectors) acting on
// one evaluated agent given everyone else's positions.

#include <span>
#include <vector>

#include "ssbl/geometry.hpp"

namespace ssbl {

struct Neighbor {
    int id = 0;
    Vec2 position;
    double distance = 0.0;
};

/// Zones nest: personal ⊆ social ⊆ publik. The evaluated agent is never listed.
struct NeighborPartition {
    std::vector<Neighbor> personal;
    std::vector<Neighbor> social;
    std::vector<Neighbor> publik;
};

struct OSpace {
    Vec2 center;
    double radius = 0.0;
};

inline constexpr double kDefaultOSpaceMinRadius = 0.5;

struct ForceBreakdown {
    Vec2 repulsion;
    Vec2 equality;
    Vec2 cohesion;
    Vec2 equality_orientation;  // d_e
    Vec2 cohesion_orientation;  // d_c
    Vec2 combined;              // repulsion + equality + cohesion
};

struct DirectedForce {
    Vec2 force;
    Vec2 orientation;
};

NeighborPartition partition_neighbors(const AgentState& subject,
                                      std::span<const AgentState> others,
                                      const ProxemicsConfig& prox);

/// -(d_p - d_min)^2 * p_r/|p_r| with p_r the summed offsets to personal-zone intruders.
Vec2 repulsion_force(const AgentState& subject, const NeighborPartition& partition,
                     const ProxemicsConfig& prox);

/// Pull toward (or push from) the centroid of the subject and its social-zone
/// neighbors so the subject sits at the members' mean distance from it.
DirectedForce equality_force(const AgentState& subject, const NeighborPartition& partition);

/// alpha * (1 - s/|o-p|) * (o-p) with alpha = N_public / (N_social + 1).
DirectedForce cohesion_force(const AgentState& subject, const NeighborPartition& partition,
                             const OSpace& ospace);

ForceBreakdown combined_force(const AgentState& subject, std::span<const AgentState> others,
                              const ProxemicsConfig& prox, const OSpace& ospace);

/// Centroid of the members and max(min_radius, mean member distance to it).
/// Throws Error(InvalidArgument) for fewer than two members.
OSpace estimate_ospace(std::span<const AgentState> members,
                       double min_radius = kDefaultOSpaceMinRadius);

}  // namespace ssbl
