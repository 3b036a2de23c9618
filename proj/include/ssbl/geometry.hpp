#pragma once

/**
 * Core geometric value types, proxemic zone radii, world bounds, and the
 * point-agent integrator every other module moves agents through.
 *
 * Conventions:
 *   - The floor is the square [0, floor_side]^2 with the origin at a corner.
 *   - Headings are radians in (-pi, pi], measured from +x toward +y.
 *   - Direction-dependent quantities degenerate to zero below kDirEpsilon.
 */

#include <array>
#include <cmath>
#include <numbers>

namespace ssbl {

inline constexpr double kDirEpsilon = 1e-9;

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    friend constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

    Vec2& operator+=(const Vec2& r) { x += r.x; y += r.y; return *this; }
    Vec2& operator-=(const Vec2& r) { x -= r.x; y -= r.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
    constexpr double cross(const Vec2& r) const { return x * r.y - y * r.x; }
    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }

    /// Unit vector, or {0, 0} when norm <= kDirEpsilon.
    Vec2 normalized() const {
        const double n = norm();
        if (n <= kDirEpsilon) return {};
        return {x / n, y / n};
    }

    /// Counter-clockwise rotation by `angle` radians.
    Vec2 rotated(double angle) const {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        return {c * x - s * y, s * x + c * y};
    }

    static Vec2 from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

enum class Role { Sha, Robot };

const char* role_name(Role role);

struct AgentState {
    int id = 0;
    Role role = Role::Sha;
    Vec2 position;
    Vec2 velocity;
    double heading = 0.0;

    bool operator==(const AgentState&) const = default;
};

struct ProxemicsConfig {
    double d_personal = 1.2;
    double d_social = 3.6;
    double d_public = 7.6;

    /// Throws Error(Config) unless 0 < personal < social < public.
    void validate() const;
};

struct WorldConfig {
    double floor_side = 10.0;
    double dt = 0.1;
    double v_max = 1.0;
    double a_max = 1.0;
    double omega_max = std::numbers::pi / 2.0;
    double damping = 0.95;

    void validate() const;
};

/**
 * Semi-implicit Euler step of a point agent.
 *
 *   v' = clamp_norm(damping * (v + accel * dt), v_max)
 *   p' = p + v' * dt, clamped to the walls; the velocity component pointing
 *        into a wall the agent is touching is zeroed
 *   heading' = wrap(heading + turn_rate * dt)
 *
 * accel and turn_rate are saturated at a_max / omega_max. Non-finite inputs
 * throw Error(Corrupt).
 */
AgentState integrate(const AgentState& agent, Vec2 accel, double turn_rate,
                     const WorldConfig& world);

/// Distances to the walls in the order {left (x=0), right, bottom (y=0), top}.
struct WallDistances {
    std::array<double, 4> d{};
    bool clamped = false;  // p was outside the floor and had to be clamped first
};

WallDistances wall_distances(Vec2 p, const WorldConfig& world);

}  // namespace ssbl
