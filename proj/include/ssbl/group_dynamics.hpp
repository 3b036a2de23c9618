#pragma once

// Simulated human agents (SHAs): the force-driven controller that keeps the
// conversation group in an F-formation, and seeded episode spawning.

#include <cstdint>
#include <span>
#include <vector>

#include "ssbl/geometry.hpp"
#include "ssbl/social_forces.hpp"

namespace ssbl {

struct ShaControllerConfig {
    double gain_force = 1.0;     // accel = gain_force * combined force
    double k_turn = 2.0;         // turn_rate = k_turn * heading error
    double force_deadband = 0.05;
    double w_equality_dir = 0.5;
    double w_cohesion_dir = 0.5;
};

struct MotionCommand {
    Vec2 accel;
    double turn_rate = 0.0;
};

/// Heading of w_e*unit(d_e) + w_c*unit(d_c); false when the blend degenerates.
bool orientation_target(const ForceBreakdown& forces, double w_equality, double w_cohesion,
                        double* heading_out);

/// `all_agents` may include the SHA itself; it is skipped by id.
MotionCommand sha_policy(const AgentState& sha, std::span<const AgentState> all_agents,
                         const ProxemicsConfig& prox, const OSpace& ospace,
                         const ShaControllerConfig& ctrl, const WorldConfig& world);

struct GroupSpawnSpec {
    int n_shas = 2;
    double separation = 2.0;      // diameter of the circle the SHAs stand on
    double center_region = 1.5;   // half-side of the box around the floor center
    double robot_min_dist = 4.0;  // robot-to-centroid distance bounds
    double robot_max_dist = 6.0;
    std::uint64_t rng_seed = 0;

    void validate(const ProxemicsConfig& prox) const;
};

inline constexpr int kRobotId = 0;
inline constexpr int kSpawnMaxTries = 1000;

/// Robot first (id 0), then SHAs with ids 1..n_shas.
std::vector<AgentState> spawn_episode(const GroupSpawnSpec& spec, const WorldConfig& world,
                                      const ProxemicsConfig& prox);

}  // namespace ssbl
