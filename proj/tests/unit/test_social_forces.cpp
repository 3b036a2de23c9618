#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ssbl/error.hpp"
#include "ssbl/rng.hpp"
#include "ssbl/social_forces.hpp"

using namespace ssbl;

namespace {

AgentState at(int id, double x, double y, double heading = 0.0) { return {id, Role::Sha, {x, y}, {}, heading}; }

// Straightforward re-derivation of the equality force: explicit centroid and
// mean distance over the subject plus its social neighbors.
Vec2 equality_oracle(Vec2 p, const std::vector<Vec2>& neighbors) {
    double cx = p.x, cy = p.y;
    for (Vec2 q : neighbors) {
        cx += q.x;
        cy += q.y;
    }
    const double n = static_cast<double>(neighbors.size() + 1);
    cx /= n;
    cy /= n;
    double m = std::sqrt((p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy));
    for (Vec2 q : neighbors) m += std::sqrt((q.x - cx) * (q.x - cx) + (q.y - cy) * (q.y - cy));
    m /= n;
    const double dx = cx - p.x, dy = cy - p.y;
    const double r = std::sqrt(dx * dx + dy * dy);
    if (r <= 1e-9) return {};
    return {(1.0 - m / r) * dx, (1.0 - m / r) * dy};
}

}  // namespace

TEST_CASE("partition_neighbors: nested zones") {
    ProxemicsConfig prox;
    const AgentState s = at(1, 0, 0);
    std::vector<AgentState> o{at(2, 0.5, 0)};
    NeighborPartition p = partition_neighbors(s, o, prox);
    CHECK(p.personal.size() == 1);
    CHECK(p.social.size() == 1);
    CHECK(p.publik.size() == 1);
    o = {at(2, 2.0, 0)};
    p = partition_neighbors(s, o, prox);
    CHECK(p.personal.empty());
    CHECK(p.social.size() == 1);
    CHECK(p.publik.size() == 1);
    o = {at(2, 8.0, 0)};
    p = partition_neighbors(s, o, prox);
    CHECK(p.personal.empty());
    CHECK(p.social.empty());
    CHECK(p.publik.empty());
}

TEST_CASE("partition_neighbors: subject skipped by id, nesting holds under fuzz") {
    ProxemicsConfig prox;
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<AgentState> all;
        for (int i = 0; i < 6; ++i) all.push_back(at(i, rng.uniform(0, 10), rng.uniform(0, 10)));
        const NeighborPartition p = partition_neighbors(all[0], all, prox);
        CHECK(p.personal.size() <= p.social.size());
        CHECK(p.social.size() <= p.publik.size());
        for (const Neighbor& n : p.personal) {
            CHECK(n.id != 0);
            CHECK(std::any_of(p.social.begin(), p.social.end(), [&](const Neighbor& m) { return m.id == n.id; }));
        }
        for (const Neighbor& n : p.social)
            CHECK(std::any_of(p.publik.begin(), p.publik.end(), [&](const Neighbor& m) { return m.id == n.id; }));
    }
}

TEST_CASE("repulsion_force: hand values") {
    ProxemicsConfig prox;
    const AgentState s = at(1, 0, 0);
    std::vector<AgentState> none{at(2, 5, 0)};
    CHECK(repulsion_force(s, partition_neighbors(s, none, prox), prox) == Vec2{});

    std::vector<AgentState> one{at(2, 0.5, 0)};
    const Vec2 f = repulsion_force(s, partition_neighbors(s, one, prox), prox);
    CHECK(std::abs(f.x - -0.49) < 1e-9);
    CHECK(std::abs(f.y) < 1e-9);

    std::vector<AgentState> two{at(2, 0.5, 0), at(3, -0.5, 0)};
    CHECK(repulsion_force(s, partition_neighbors(s, two, prox), prox) == Vec2{});
}

TEST_CASE("repulsion_force: single intruder pushes straight away") {
    ProxemicsConfig prox;
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const AgentState s = at(1, 5, 5);
        const double r = rng.uniform(0.05, 1.19), a = rng.uniform(-3.1, 3.1);
        std::vector<AgentState> o{at(2, 5 + r * std::cos(a), 5 + r * std::sin(a))};
        const Vec2 f = repulsion_force(s, partition_neighbors(s, o, prox), prox);
        const Vec2 away = s.position - o[0].position;
        const double angle = std::atan2(f.cross(away), f.dot(away));
        CHECK(std::abs(angle) < 1e-9);
        CHECK(f.norm() == doctest::Approx((1.2 - r) * (1.2 - r)).epsilon(1e-12));
    }
}

TEST_CASE("equality_force: hand and brute-force values") {
    ProxemicsConfig prox;
    const AgentState s = at(1, 0, 0);
    std::vector<AgentState> o{at(2, 2, 0), at(3, 0, 2)};
    const DirectedForce f = equality_force(s, partition_neighbors(s, o, prox));
    CHECK(std::abs(f.force.x - -0.2583) < 1e-4);
    CHECK(std::abs(f.force.y - -0.2583) < 1e-4);
    const Vec2 oracle = equality_oracle({0, 0}, {{2, 0}, {0, 2}});
    CHECK(std::abs(f.force.x - oracle.x) < 1e-9);
    CHECK(std::abs(f.force.y - oracle.y) < 1e-9);
    CHECK(f.orientation.x == doctest::Approx(2.0));
    CHECK(f.orientation.y == doctest::Approx(2.0));
}

TEST_CASE("equality_force: matches the brute-force oracle under fuzz") {
    ProxemicsConfig prox;
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const AgentState s = at(0, 5, 5);
        std::vector<AgentState> o;
        std::vector<Vec2> social;
        const int n = 1 + trial % 4;
        for (int i = 0; i < n; ++i) {
            const double r = rng.uniform(0.3, 3.5), a = rng.uniform(-3.1, 3.1);
            o.push_back(at(i + 1, 5 + r * std::cos(a), 5 + r * std::sin(a)));
            social.push_back(o.back().position);
        }
        const Vec2 f = equality_force(s, partition_neighbors(s, o, prox)).force;
        const Vec2 g = equality_oracle(s.position, social);
        CHECK(std::abs(f.x - g.x) < 1e-9);
        CHECK(std::abs(f.y - g.y) < 1e-9);
    }
}

TEST_CASE("equality_force: dyads are balanced at any separation") {
    ProxemicsConfig prox;
    for (double d : {0.3, 1.0, 2.0, 3.5}) {
        const AgentState s = at(1, 1, 1);
        std::vector<AgentState> o{at(2, 1 + d * 0.6, 1 + d * 0.8)};
        CHECK(equality_force(s, partition_neighbors(s, o, prox)).force.norm() < 1e-12);
    }
}

TEST_CASE("equality_force: regular polygons are balanced") {
    ProxemicsConfig prox;
    for (int n = 2; n <= 6; ++n) {
        std::vector<AgentState> ring;
        const double radius = 1.5;
        for (int k = 0; k < n; ++k) {
            const double a = 0.37 + 2.0 * std::numbers::pi * k / n;
            ring.push_back(at(k, 5 + radius * std::cos(a), 5 + radius * std::sin(a)));
        }
        for (const AgentState& m : ring) CHECK(equality_force(m, partition_neighbors(m, ring, prox)).force.norm() < 1e-9);
    }
}

TEST_CASE("cohesion_force: hand values and signs") {
    ProxemicsConfig prox;
    // N_a = 1 public neighbor, N_s = 1 social neighbor: the same agent at 3 m.
    const AgentState s = at(1, 3, 0);
    std::vector<AgentState> o{at(2, 0.5, 0)};
    const NeighborPartition part = partition_neighbors(s, o, prox);
    REQUIRE(part.social.size() == 1);
    REQUIRE(part.publik.size() == 1);
    const DirectedForce f = cohesion_force(s, part, {{0, 0}, 1.5});
    CHECK(std::abs(f.force.x - -0.75) < 1e-9);
    CHECK(std::abs(f.force.y) < 1e-9);

    CHECK(cohesion_force(s, part, {{0, 0}, 3.0}).force.norm() < 1e-12);
    CHECK(cohesion_force(s, NeighborPartition{}, {{0, 0}, 1.5}).force == Vec2{});
    CHECK(cohesion_force(s, part, {{0, 0}, 4.0}).force.x > 0.0);  // inside: pushed out
}

TEST_CASE("combined_force: composition") {
    ProxemicsConfig prox;
    const AgentState lone = at(1, 5, 5);
    std::vector<AgentState> far{at(2, 0.1, 0.1)};
    const ForceBreakdown z = combined_force(lone, far, prox, {{5, 5}, 1.0});
    CHECK(z.combined == Vec2{});
    CHECK(z.repulsion == Vec2{});

    std::vector<AgentState> dyad{at(1, 4, 5), at(2, 6, 5)};
    const OSpace os = estimate_ospace(dyad);
    const ForceBreakdown b = combined_force(dyad[0], dyad, prox, os);
    CHECK(b.repulsion == Vec2{});
    CHECK(b.equality.norm() < 1e-12);
    CHECK((b.combined - b.cohesion).norm() < 1e-12);

    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<AgentState> all;
        for (int i = 0; i < 4; ++i) all.push_back(at(i, rng.uniform(2, 8), rng.uniform(2, 8)));
        const ForceBreakdown f = combined_force(all[0], all, prox, estimate_ospace(std::span(all).subspan(1)));
        const Vec2 sum = f.repulsion + f.equality + f.cohesion;
        CHECK(f.combined == sum);
    }
}

TEST_CASE("forces are translation and rotation equivariant") {
    ProxemicsConfig prox;
    Rng rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<AgentState> all;
        for (int i = 0; i < 4; ++i) all.push_back(at(i, rng.uniform(-3, 3), rng.uniform(-3, 3)));
        const double angle = rng.uniform(-3.1, 3.1);
        const Vec2 shift{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        std::vector<AgentState> moved = all;
        for (AgentState& a : moved) a.position = a.position.rotated(angle) + shift;
        const OSpace o1 = estimate_ospace(std::span(all).subspan(1));
        const OSpace o2 = estimate_ospace(std::span(moved).subspan(1));
        CHECK(std::abs(o1.radius - o2.radius) < 1e-9);
        const ForceBreakdown f1 = combined_force(all[0], all, prox, o1);
        const ForceBreakdown f2 = combined_force(moved[0], moved, prox, o2);
        for (auto [a, b] : {std::pair{f1.repulsion, f2.repulsion}, std::pair{f1.equality, f2.equality},
                            std::pair{f1.cohesion, f2.cohesion}, std::pair{f1.combined, f2.combined}})
            CHECK((a.rotated(angle) - b).norm() < 1e-9);
    }
}

TEST_CASE("estimate_ospace") {
    std::vector<AgentState> dyad{at(1, 0, 0), at(2, 2, 0)};
    const OSpace d = estimate_ospace(dyad);
    CHECK(d.center.x == doctest::Approx(1.0));
    CHECK(d.center.y == doctest::Approx(0.0));
    CHECK(d.radius == doctest::Approx(1.0));

    const double h = std::sqrt(3.0);
    std::vector<AgentState> tri{at(1, 0, 0), at(2, 2, 0), at(3, 1, h)};
    const OSpace t = estimate_ospace(tri);
    CHECK(t.center.x == doctest::Approx(1.0));
    CHECK(t.center.y == doctest::Approx(h / 3.0));
    CHECK(t.radius == doctest::Approx(2.0 / h).epsilon(1e-12));

    std::vector<AgentState> single{at(1, 0, 0)};
    CHECK_THROWS_AS(estimate_ospace(single), Error);
}
