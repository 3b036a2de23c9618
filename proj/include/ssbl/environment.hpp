#pragma once

// Episodic MDP around the simulated group: reset/step, the fixed-layout
// egocentric observation vector, and the success/termination rules.
//
// Observation layout (version 1), length 6*(1+n_shas)+4:
//   robot block  [x, y, vx, vy, cos, sin]  position is the ego origin (0, 0),
//                                          velocity in the ego frame, heading
//                                          relative to itself (1, 0)
//   SHA blocks   same six fields per SHA in id order, relative to the robot
//                and rotated by -robot.heading
//   walls        distances {left, right, bottom, top} in the world frame

#include <cstdint>
#include <span>
#include <vector>

#include "ssbl/config.hpp"
#include "ssbl/reward.hpp"
#include "ssbl/social_forces.hpp"

namespace ssbl {

using Observation = std::vector<double>;

struct Action {
    double forward = 0.0;  // fraction of a_max along the heading
    double turn = 0.0;     // fraction of omega_max

    /// Components saturated to [-1, 1]; NaN maps to 0.
    Action clamped() const;
    bool operator==(const Action&) const = default;
};

inline constexpr std::size_t kAgentBlock = 6;
inline constexpr std::size_t kWallBlock = 4;

constexpr std::size_t observation_size(int n_shas) {
    return kAgentBlock * (1 + static_cast<std::size_t>(n_shas)) + kWallBlock;
}

/// `agents` is robot first, SHAs after, as produced by spawn_episode.
Observation encode_observation(std::span<const AgentState> agents, const WorldConfig& world);

struct Transition {
    int t = 0;
    std::vector<AgentState> states;
    Action action;
    RewardBreakdown breakdown;
    bool done = false;
    bool success = false;
};

/// Instantaneous success: on the o-space circle within the band and facing o.
bool success_instant(const AgentState& robot, const OSpace& ospace, const EpisodeConfig& ep);

struct SuccessCounter {
    int consecutive = 0;
};

/// Advances the consecutive-step counter; true once it reaches success_hold.
bool success_check(const AgentState& robot, const OSpace& ospace, const EpisodeConfig& ep,
                   SuccessCounter& counter);

std::span<const AgentState> shas_of(std::span<const AgentState> agents);

/// Combined field on the robot at `position`, with everybody else frozen as in `frozen`.
Vec2 robot_field_at(const SimConfig& cfg, std::span<const AgentState> frozen, Vec2 position);

/**
 * Reward increments of one tick from the pre- and post-tick states. Fields
 * are evaluated at each mover's segment midpoint with all other agents
 * frozen at their pre-tick positions and the o-space estimated from the
 * pre-tick SHAs. r4 carries the bonus when `success` terminates the episode.
 */
RewardBreakdown step_reward(const SimConfig& cfg, std::span<const AgentState> pre,
                            std::span<const AgentState> post, bool success);

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
    bool success = false;
    RewardBreakdown info;
};

class Environment {
public:
    explicit Environment(SimConfig cfg);

    Observation reset(std::uint64_t seed);

    /// Throws Error(State) before reset or after done.
    StepResult step(Action action);

    const SimConfig& config() const { return cfg_; }
    const std::vector<AgentState>& agents() const { return agents_; }
    const AgentState& robot() const { return agents_.front(); }
    const OSpace& ospace() const { return ospace_; }
    ForceBreakdown robot_forces() const;
    Observation observation() const;

    int t() const { return t_; }
    bool done() const { return done_; }
    bool started() const { return started_; }
    std::uint64_t seed() const { return seed_; }
    double cumulative_reward() const { return cumulative_; }
    const Transition& last_transition() const { return last_; }

private:
    SimConfig cfg_;
    std::vector<AgentState> agents_;
    OSpace ospace_;
    SuccessCounter counter_;
    Transition last_;
    std::uint64_t seed_ = 0;
    int t_ = 0;
    double cumulative_ = 0.0;
    bool done_ = false;
    bool started_ = false;
};

}  // namespace ssbl
