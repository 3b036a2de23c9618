#include "ssbl/group_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ssbl/error.hpp"
#include "ssbl/rng.hpp"

namespace ssbl {

bool orientation_target(const ForceBreakdown& forces, double w_equality, double w_cohesion,
                        double* heading_out) {
    const Vec2 blend = forces.equality_orientation.normalized() * w_equality +
                       forces.cohesion_orientation.normalized() * w_cohesion;
    if (blend.norm() < kDirEpsilon) return false;
    *heading_out = std::atan2(blend.y, blend.x);
    return true;
}

MotionCommand sha_policy(const AgentState& sha, std::span<const AgentState> all_agents,
                         const ProxemicsConfig& prox, const OSpace& ospace,
                         const ShaControllerConfig& ctrl, const WorldConfig& world) {
    if (sha.role != Role::Sha)
        throw Error(ErrorCode::InvalidArgument, "sha_policy: agent is not an SHA");
    const ForceBreakdown f = combined_force(sha, all_agents, prox, ospace);

    MotionCommand cmd;
    if (f.combined.norm() >= ctrl.force_deadband) {
        cmd.accel = f.combined * ctrl.gain_force;
        const double n = cmd.accel.norm();
        if (n > world.a_max) cmd.accel = cmd.accel * (world.a_max / n);
    }
    double target = 0.0;
    if (orientation_target(f, ctrl.w_equality_dir, ctrl.w_cohesion_dir, &target)) {
        const double err = wrap_angle(target - sha.heading);
        cmd.turn_rate = std::clamp(ctrl.k_turn * err, -world.omega_max, world.omega_max);
    }
    return cmd;
}

void GroupSpawnSpec::validate(const ProxemicsConfig& prox) const {
    if (n_shas < 2) throw Error(ErrorCode::Config, "spawn: n_shas must be >= 2");
    if (!(separation > 0.0)) throw Error(ErrorCode::Config, "spawn: separation must be > 0");
    if (!(center_region >= 0.0)) throw Error(ErrorCode::Config, "spawn: center_region must be >= 0");
    if (!(robot_min_dist > prox.d_social))
        throw Error(ErrorCode::Config, "spawn: robot_min_dist must exceed d_social");
    if (!(robot_max_dist >= robot_min_dist))
        throw Error(ErrorCode::Config, "spawn: robot_max_dist must be >= robot_min_dist");
}

namespace {

bool inside(Vec2 p, double side) { return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side; }

}  // namespace

std::vector<AgentState> spawn_episode(const GroupSpawnSpec& spec, const WorldConfig& world,
                                      const ProxemicsConfig& prox) {
    spec.validate(prox);
    constexpr double pi = std::numbers::pi;
    const double side = world.floor_side;
    const double max_dist = std::min(spec.robot_max_dist, side * std::numbers::sqrt2);
    Rng rng(spec.rng_seed);

    for (int attempt = 0; attempt < kSpawnMaxTries; ++attempt) {
        const Vec2 center{side / 2.0 + rng.uniform(-spec.center_region, spec.center_region),
                          side / 2.0 + rng.uniform(-spec.center_region, spec.center_region)};
        const double phase = rng.uniform(-pi, pi);
        const double radius = spec.separation / 2.0;

        std::vector<AgentState> agents;
        agents.reserve(static_cast<std::size_t>(spec.n_shas) + 1);
        agents.push_back({kRobotId, Role::Robot, {}, {}, 0.0});
        bool ok = true;
        for (int k = 0; k < spec.n_shas; ++k) {
            const double a = phase + 2.0 * pi * k / spec.n_shas;
            const Vec2 p = center + Vec2::from_angle(a) * radius;
            ok = ok && inside(p, side);
            // Facing the centroid means looking back along the spoke.
            agents.push_back({k + 1, Role::Sha, p, {}, wrap_angle(a + pi)});
        }

        const double dist = rng.uniform(spec.robot_min_dist, max_dist);
        const double bearing = rng.uniform(-pi, pi);
        AgentState& robot = agents.front();
        robot.position = center + Vec2::from_angle(bearing) * dist;
        robot.heading = wrap_angle(rng.uniform(-pi, pi));
        if (ok && inside(robot.position, side)) return agents;
    }
    throw Error(ErrorCode::Config, "spawn_episode: could not satisfy spawn constraints within " +
                                       std::to_string(kSpawnMaxTries) + " tries");
}

}  // namespace ssbl
