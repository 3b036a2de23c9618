#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ssbl/error.hpp"
#include "ssbl/geometry.hpp"
#include "ssbl/rng.hpp"

using namespace ssbl;

TEST_CASE("integrate: zero dynamics leave the agent in place") {
    WorldConfig w;
    AgentState a{1, Role::Sha, {3.0, 4.0}, {0.0, 0.0}, 0.25};
    const AgentState b = integrate(a, {0.0, 0.0}, 0.0, w);
    CHECK(b.position == a.position);
    CHECK(b.velocity == Vec2{});
    CHECK(b.heading == a.heading);
}

TEST_CASE("integrate: hand-evaluated semi-implicit Euler step") {
    WorldConfig w;
    w.damping = 1.0;
    AgentState a{1, Role::Sha, {5.0, 5.0}, {}, 0.0};
    const AgentState b = integrate(a, {1.0, 0.0}, 0.0, w);
    CHECK(b.velocity.x == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(b.velocity.y == 0.0);
    CHECK(b.position.x - 5.0 == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(b.position.y == 5.0);
}

TEST_CASE("integrate: walls clamp position and cancel outward velocity") {
    WorldConfig w;
    AgentState a{1, Role::Sha, {9.99, 5.0}, {1.0, 0.3}, 0.0};
    const AgentState b = integrate(a, {1.0, 0.0}, 0.0, w);
    CHECK(b.position.x == w.floor_side);
    CHECK(b.velocity.x == 0.0);
    CHECK(b.velocity.y != 0.0);

    AgentState c{1, Role::Sha, {0.0, 0.0}, {-1.0, -1.0}, 0.0};
    const AgentState d = integrate(c, {-1.0, -1.0}, 0.0, w);
    CHECK(d.position == Vec2{0.0, 0.0});
    CHECK(d.velocity == Vec2{0.0, 0.0});
}

TEST_CASE("integrate: acceleration and turn rate saturate") {
    WorldConfig w;
    w.damping = 1.0;
    AgentState a{1, Role::Sha, {5.0, 5.0}, {}, 0.0};
    const AgentState b = integrate(a, {50.0, 0.0}, 100.0, w);
    CHECK(b.velocity.x == doctest::Approx(w.a_max * w.dt));
    CHECK(b.heading == doctest::Approx(w.omega_max * w.dt));
}

TEST_CASE("integrate: non-finite input is rejected") {
    WorldConfig w;
    AgentState a{1, Role::Sha, {5.0, 5.0}, {}, 0.0};
    CHECK_THROWS_AS(integrate(a, {NAN, 0.0}, 0.0, w), Error);
    CHECK_THROWS_AS(integrate(a, {0.0, 0.0}, INFINITY, w), Error);
    a.position.x = NAN;
    CHECK_THROWS_AS(integrate(a, {0.0, 0.0}, 0.0, w), Error);
}

TEST_CASE("integrate property: speed cap, wall containment, heading range") {
    WorldConfig w;
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        AgentState a{1, Role::Sha, {rng.uniform(0, 10), rng.uniform(0, 10)},
                     {rng.uniform(-3, 3), rng.uniform(-3, 3)}, rng.uniform(-3, 3)};
        for (int step = 0; step < 50; ++step) {
            a = integrate(a, {rng.uniform(-5, 5), rng.uniform(-5, 5)}, rng.uniform(-10, 10), w);
            REQUIRE(a.velocity.norm() <= w.v_max);
            REQUIRE(a.position.x >= 0.0);
            REQUIRE(a.position.x <= w.floor_side);
            REQUIRE(a.position.y >= 0.0);
            REQUIRE(a.position.y <= w.floor_side);
            REQUIRE(a.heading > -std::numbers::pi);
            REQUIRE(a.heading <= std::numbers::pi);
        }
    }
}

TEST_CASE("integrate: identical inputs give identical states") {
    WorldConfig w;
    AgentState a{1, Role::Sha, {2.0, 3.0}, {0.2, -0.1}, 1.0}, b = a;
    Rng r1(5), r2(5);
    for (int i = 0; i < 100; ++i) {
        a = integrate(a, {r1.uniform(-1, 1), r1.uniform(-1, 1)}, r1.uniform(-1, 1), w);
        b = integrate(b, {r2.uniform(-1, 1), r2.uniform(-1, 1)}, r2.uniform(-1, 1), w);
    }
    CHECK(a == b);
}

TEST_CASE("wall_distances") {
    WorldConfig w;
    const WallDistances c = wall_distances({5.0, 5.0}, w);
    CHECK(c.d == std::array<double, 4>{5.0, 5.0, 5.0, 5.0});
    const WallDistances e = wall_distances({1.0, 1.0}, w);
    CHECK(e.d == std::array<double, 4>{1.0, 9.0, 1.0, 9.0});
    CHECK_FALSE(e.clamped);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const WallDistances r = wall_distances({rng.uniform(0, 10), rng.uniform(0, 10)}, w);
        CHECK(r.d[0] + r.d[1] == doctest::Approx(10.0).epsilon(1e-14));
        CHECK(r.d[2] + r.d[3] == doctest::Approx(10.0).epsilon(1e-14));
    }
    CHECK(wall_distances({-1.0, 4.0}, w).clamped);
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
    CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(3.0 * std::numbers::pi / 2.0) == doctest::Approx(-std::numbers::pi / 2.0));
    CHECK(wrap_angle(0.3) == 0.3);
}

TEST_CASE("config validation rejects bad worlds and zones") {
    WorldConfig w;
    w.dt = 0.0;
    CHECK_THROWS_AS(w.validate(), Error);
    ProxemicsConfig p;
    p.d_social = 1.0;
    CHECK_THROWS_AS(p.validate(), Error);
}
