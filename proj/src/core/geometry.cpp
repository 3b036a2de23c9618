#include "ssbl/geometry.hpp"

#include <algorithm>
#include <string>

#include "ssbl/error.hpp"

namespace ssbl {

double wrap_angle(double angle) {
    constexpr double pi = std::numbers::pi;
    double a = std::remainder(angle, 2.0 * pi);  // [-pi, pi]
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

const char* role_name(Role role) { return role == Role::Robot ? "robot" : "sha"; }

void ProxemicsConfig::validate() const {
    if (!(d_personal > 0.0 && d_personal < d_social && d_social < d_public))
        throw Error(ErrorCode::Config,
                    "proxemics: require 0 < d_personal < d_social < d_public");
}

void WorldConfig::validate() const {
    if (!(floor_side > 0.0)) throw Error(ErrorCode::Config, "world: floor_side must be > 0");
    if (!(dt > 0.0)) throw Error(ErrorCode::Config, "world: dt must be > 0");
    if (!(v_max > 0.0)) throw Error(ErrorCode::Config, "world: v_max must be > 0");
    if (!(a_max > 0.0)) throw Error(ErrorCode::Config, "world: a_max must be > 0");
    if (!(omega_max > 0.0)) throw Error(ErrorCode::Config, "world: omega_max must be > 0");
    if (!(damping > 0.0 && damping <= 1.0))
        throw Error(ErrorCode::Config, "world: damping must lie in (0, 1]");
}

namespace {

Vec2 clamp_norm(Vec2 v, double cap) {
    const double n = v.norm();
    if (n <= cap) return v;
    double scale = cap / n;
    Vec2 out = v * scale;
    // Rounding in cap/n can leave |out| one ulp above the cap.
    while (out.norm() > cap) {
        scale = std::nextafter(scale, 0.0);
        out = v * scale;
    }
    return out;
}

}  // namespace

AgentState integrate(const AgentState& agent, Vec2 accel, double turn_rate,
                     const WorldConfig& world) {
    if (!agent.position.finite() || !agent.velocity.finite() || !std::isfinite(agent.heading) ||
        !accel.finite() || !std::isfinite(turn_rate))
        throw Error(ErrorCode::Corrupt,
                    "integrate: non-finite state or control for agent " + std::to_string(agent.id));

    accel = clamp_norm(accel, world.a_max);
    turn_rate = std::clamp(turn_rate, -world.omega_max, world.omega_max);

    AgentState next = agent;
    next.velocity = clamp_norm((agent.velocity + accel * world.dt) * world.damping, world.v_max);
    Vec2 p = agent.position + next.velocity * world.dt;

    const double side = world.floor_side;
    if (p.x <= 0.0) {
        p.x = 0.0;
        if (next.velocity.x < 0.0) next.velocity.x = 0.0;
    } else if (p.x >= side) {
        p.x = side;
        if (next.velocity.x > 0.0) next.velocity.x = 0.0;
    }
    if (p.y <= 0.0) {
        p.y = 0.0;
        if (next.velocity.y < 0.0) next.velocity.y = 0.0;
    } else if (p.y >= side) {
        p.y = side;
        if (next.velocity.y > 0.0) next.velocity.y = 0.0;
    }
    next.position = p;
    next.heading = wrap_angle(agent.heading + turn_rate * world.dt);
    return next;
}

WallDistances wall_distances(Vec2 p, const WorldConfig& world) {
    const double side = world.floor_side;
    WallDistances out;
    const Vec2 q{std::clamp(p.x, 0.0, side), std::clamp(p.y, 0.0, side)};
    out.clamped = !(q == p);
    out.d = {q.x, side - q.x, q.y, side - q.y};
    return out;
}

}  // namespace ssbl
