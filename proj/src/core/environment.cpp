#include "ssbl/environment.hpp"

#include <algorithm>
#include <cmath>

#include "ssbl/error.hpp"
#include "ssbl/group_dynamics.hpp"

namespace ssbl {

Action Action::clamped() const {
    auto sat = [](double v) { return std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0); };
    return {sat(forward), sat(turn)};
}

Observation encode_observation(std::span<const AgentState> agents, const WorldConfig& world) {
    if (agents.empty()) throw Error(ErrorCode::InvalidArgument, "encode_observation: no agents");
    const AgentState& robot = agents.front();
    const double yaw = -robot.heading;
    Observation obs;
    obs.reserve(kAgentBlock * agents.size() + kWallBlock);
    for (const AgentState& a : agents) {
        const Vec2 rel = (a.position - robot.position).rotated(yaw);
        const Vec2 vel = a.velocity.rotated(yaw);
        const double dh = a.heading - robot.heading;
        obs.insert(obs.end(), {rel.x, rel.y, vel.x, vel.y, std::cos(dh), std::sin(dh)});
    }
    const WallDistances walls = wall_distances(robot.position, world);
    obs.insert(obs.end(), walls.d.begin(), walls.d.end());
    return obs;
}

bool success_instant(const AgentState& robot, const OSpace& ospace, const EpisodeConfig& ep) {
    const Vec2 to_center = ospace.center - robot.position;
    const double dist = to_center.norm();
    if (std::abs(dist - ospace.radius) > ep.success_band) return false;
    if (dist < kDirEpsilon) return false;
    const double bearing = std::atan2(to_center.y, to_center.x);
    return std::abs(wrap_angle(bearing - robot.heading)) <= ep.success_angle;
}

bool success_check(const AgentState& robot, const OSpace& ospace, const EpisodeConfig& ep,
                   SuccessCounter& counter) {
    if (success_instant(robot, ospace, ep))
        ++counter.consecutive;
    else
        counter.consecutive = 0;
    return counter.consecutive >= ep.success_hold;
}

std::span<const AgentState> shas_of(std::span<const AgentState> agents) {
    return agents.subspan(1);
}

namespace {

OSpace group_ospace(const SimConfig& cfg, std::span<const AgentState> agents) {
    return estimate_ospace(shas_of(agents), cfg.sffm.ospace_min_radius);
}

// Field on agents[index] if it stood at `position`, everyone else frozen.
Vec2 field_on(const SimConfig& cfg, std::span<const AgentState> frozen, std::size_t index,
              Vec2 position, const OSpace& ospace) {
    AgentState probe = frozen[index];
    probe.position = position;
    return combined_force(probe, frozen, cfg.proxemics, ospace).combined;
}

}  // namespace

Vec2 robot_field_at(const SimConfig& cfg, std::span<const AgentState> frozen, Vec2 position) {
    return field_on(cfg, frozen, 0, position, group_ospace(cfg, frozen));
}

RewardBreakdown step_reward(const SimConfig& cfg, std::span<const AgentState> pre,
                            std::span<const AgentState> post, bool success) {
    if (pre.size() != post.size() || pre.size() < 3)
        throw Error(ErrorCode::InvalidArgument, "step_reward: mismatched or too few agent states");
    const RewardWeights& w = cfg.reward_weights;
    const double dt = cfg.world.dt;
    const OSpace os = group_ospace(cfg, pre);

    RewardBreakdown b;
    const FieldFn robot_field = [&](Vec2 u) { return field_on(cfg, pre, 0, u, os); };
    b.r1 = w.r1_sign * group_forming_increment(robot_field, pre[0].position, post[0].position);
    b.r2 = non_increasing_increment(b.r1 / dt, dt);
    b.r3 = time_penalty_increment(dt);
    b.r4 = success_bonus(success, w.success_bonus);

    std::vector<ShaSegment> segments;
    segments.reserve(pre.size() - 1);
    for (std::size_t j = 1; j < pre.size(); ++j) {
        const Vec2 mid = (pre[j].position + post[j].position) * 0.5;
        segments.push_back({field_on(cfg, pre, j, mid, os), post[j].position - pre[j].position});
    }
    b.r5 = w.r5_sign * sha_disturbance_increment(segments);
    b.total = total_reward(b, w);
    return b;
}

Environment::Environment(SimConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Observation Environment::reset(std::uint64_t seed) {
    GroupSpawnSpec spec = cfg_.spawn;
    spec.rng_seed = seed;
    agents_ = spawn_episode(spec, cfg_.world, cfg_.proxemics);
    ospace_ = group_ospace(cfg_, agents_);
    counter_ = {};
    last_ = {};
    seed_ = seed;
    t_ = 0;
    cumulative_ = 0.0;
    done_ = false;
    started_ = true;
    return observation();
}

Observation Environment::observation() const { return encode_observation(agents_, cfg_.world); }

ForceBreakdown Environment::robot_forces() const {
    return combined_force(agents_.front(), agents_, cfg_.proxemics, ospace_);
}

StepResult Environment::step(Action action) {
    if (!started_) throw Error(ErrorCode::State, "step called before reset");
    if (done_) throw Error(ErrorCode::State, "step called after the episode finished");
    action = action.clamped();
    const WorldConfig& world = cfg_.world;

    // (1) every command from the pre-tick state
    std::vector<MotionCommand> commands(agents_.size());
    const AgentState& robot = agents_.front();
    commands[0] = {Vec2::from_angle(robot.heading) * (action.forward * world.a_max),
                   action.turn * world.omega_max};
    for (std::size_t i = 1; i < agents_.size(); ++i)
        commands[i] = sha_policy(agents_[i], agents_, cfg_.proxemics, ospace_, cfg_.sffm.sha, world);

    // (2) integrate in id order
    std::vector<AgentState> next(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i)
        next[i] = integrate(agents_[i], commands[i].accel, commands[i].turn_rate, world);

    // (3) o-space follows the group
    const OSpace next_ospace = group_ospace(cfg_, next);

    // (5) is needed by (4) for the bonus, and depends only on post-tick state
    ++t_;
    const bool success = success_check(next.front(), next_ospace, cfg_.episode, counter_);
    const bool done = success || t_ >= cfg_.episode.max_steps;

    // (4)
    const RewardBreakdown b = step_reward(cfg_, agents_, next, success);

    agents_ = std::move(next);
    ospace_ = next_ospace;
    done_ = done;
    cumulative_ += b.total;
    last_ = {t_, agents_, action, b, done, success};

    StepResult out;
    out.observation = observation();
    out.reward = b.total;
    out.done = done;
    out.success = success;
    out.info = b;
    return out;
}

}  // namespace ssbl
