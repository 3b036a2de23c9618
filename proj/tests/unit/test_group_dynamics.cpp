#include <cmath>

#include "doctest.h"
#include "ssbl/error.hpp"
#include "ssbl/group_dynamics.hpp"
#include "ssbl/rng.hpp"

using namespace ssbl;

namespace {

std::vector<AgentState> sha_only(std::uint64_t seed) {
    GroupSpawnSpec spec;
    spec.rng_seed = seed;
    std::vector<AgentState> all = spawn_episode(spec, WorldConfig{}, ProxemicsConfig{});
    return {all.begin() + 1, all.end()};
}

void tick(std::vector<AgentState>& shas, const ProxemicsConfig& prox, const WorldConfig& world) {
    const OSpace os = estimate_ospace(shas);
    std::vector<MotionCommand> cmds;
    for (const AgentState& s : shas) cmds.push_back(sha_policy(s, shas, prox, os, ShaControllerConfig{}, world));
    for (std::size_t i = 0; i < shas.size(); ++i) shas[i] = integrate(shas[i], cmds[i].accel, cmds[i].turn_rate, world);
}

}  // namespace

TEST_CASE("spawn_episode: dyad layout and robot placement") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        GroupSpawnSpec spec;
        spec.rng_seed = seed;
        const std::vector<AgentState> a = spawn_episode(spec, WorldConfig{}, ProxemicsConfig{});
        REQUIRE(a.size() == 3);
        CHECK(a[0].role == Role::Robot);
        CHECK(a[0].id == kRobotId);
        CHECK((a[1].position - a[2].position).norm() == doctest::Approx(2.0).epsilon(1e-12));
        for (int i : {1, 2}) {
            const Vec2 to_other = a[3 - i].position - a[i].position;
            CHECK(std::abs(wrap_angle(a[i].heading - std::atan2(to_other.y, to_other.x))) < 1e-9);
        }
        const Vec2 c = (a[1].position + a[2].position) * 0.5;
        CHECK((a[0].position - c).norm() >= spec.robot_min_dist);
        CHECK((a[0].position - c).norm() <= spec.robot_max_dist);
        CHECK(a == spawn_episode(spec, WorldConfig{}, ProxemicsConfig{}));
    }
}

TEST_CASE("spawn_episode: impossible layouts are a config error") {
    GroupSpawnSpec spec;
    spec.robot_min_dist = 30.0;
    spec.robot_max_dist = 40.0;
    CHECK_THROWS_AS(spawn_episode(spec, WorldConfig{}, ProxemicsConfig{}), Error);
    spec = {};
    spec.n_shas = 0;
    CHECK_THROWS_AS(spec.validate(ProxemicsConfig{}), Error);
}

TEST_CASE("sha_policy: a spawned dyad holds still and keeps facing") {
    const std::vector<AgentState> shas = sha_only(3);
    const OSpace os = estimate_ospace(shas);
    for (const AgentState& s : shas) {
        const MotionCommand m = sha_policy(s, shas, ProxemicsConfig{}, os, ShaControllerConfig{}, WorldConfig{});
        CHECK(m.accel == Vec2{});
        CHECK(std::abs(m.turn_rate) < 1e-9);
    }
}

TEST_CASE("sha_policy: deep personal intrusion pushes the SHA away") {
    // Shallow intrusions along the dyad axis are partly cancelled by the
    // equality force of the three-agent line; 0.4 m is deep enough to win.
    std::vector<AgentState> shas = sha_only(5);
    const Vec2 axis = (shas[0].position - shas[1].position).normalized();
    const Vec2 side{-axis.y, axis.x};
    for (Vec2 dir : {axis, side, (axis + side).normalized()}) {
        AgentState robot{kRobotId, Role::Robot, shas[0].position + dir * 0.4, {}, 0.0};
        std::vector<AgentState> all{robot, shas[0], shas[1]};
        const OSpace os = estimate_ospace(shas);
        const ForceBreakdown f = combined_force(shas[0], all, ProxemicsConfig{}, os);
        const MotionCommand m = sha_policy(shas[0], all, ProxemicsConfig{}, os, ShaControllerConfig{}, WorldConfig{});
        CHECK(m.accel.dot(f.repulsion) > 0.0);
        CHECK(m.accel.dot(shas[0].position - robot.position) > 0.0);
    }
}

TEST_CASE("sha_policy: no orientation target holds the heading") {
    const AgentState lone{1, Role::Sha, {5, 5}, {}, 0.7};
    std::vector<AgentState> all{lone};
    const MotionCommand m =
        sha_policy(lone, all, ProxemicsConfig{}, {{5, 5}, 1.0}, ShaControllerConfig{}, WorldConfig{});
    CHECK(m.turn_rate == 0.0);
    double h = 0.0;
    CHECK_FALSE(orientation_target(ForceBreakdown{}, 0.5, 0.5, &h));
}

TEST_CASE("group stability: perturbed dyads settle inside the social band") {
    const ProxemicsConfig prox;
    const WorldConfig world;
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<AgentState> shas = sha_only(100 + trial);
        shas[0].position += Vec2{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
        bool settled = false;
        for (int t = 0; t < 200 && !settled; ++t) {
            const std::vector<AgentState> before = shas;
            tick(shas, prox, world);
            double worst = 0.0;
            for (std::size_t i = 0; i < shas.size(); ++i)
                worst = std::max(worst, (shas[i].position - before[i].position).norm());
            settled = worst < 1e-3;
        }
        CHECK(settled);
        const double d = (shas[0].position - shas[1].position).norm();
        CHECK(d >= prox.d_personal);
        CHECK(d <= prox.d_social);
    }
}

TEST_CASE("reactivity: an intruding robot speeds the SHA up within 5 steps") {
    const ProxemicsConfig prox;
    const WorldConfig world;
    std::vector<AgentState> shas = sha_only(8);
    const Vec2 dir = (shas[0].position - shas[1].position).normalized();
    const AgentState robot{kRobotId, Role::Robot, shas[0].position + dir * 0.4, {}, 0.0};
    const double before = shas[0].velocity.norm();
    double best = before;
    for (int t = 0; t < 5; ++t) {
        std::vector<AgentState> all{robot, shas[0], shas[1]};
        const OSpace os = estimate_ospace(shas);
        std::vector<MotionCommand> cmds;
        for (const AgentState& s : shas) cmds.push_back(sha_policy(s, all, prox, os, ShaControllerConfig{}, world));
        for (std::size_t i = 0; i < shas.size(); ++i)
            shas[i] = integrate(shas[i], cmds[i].accel, cmds[i].turn_rate, world);
        best = std::max(best, shas[0].velocity.norm());
    }
    CHECK(best > before);
}
