#pragma once

// Per-step increments of the five shaped reward terms and their
// egoism/altruism weighted combination.
//
//   total = w_e * (w1*r1 + w2*r2 + w3*r3 + w4*r4) + w_a * w5 * r5

#include <functional>
#include <span>

#include "ssbl/geometry.hpp"

namespace ssbl {

struct RewardWeights {
    double w_e = 1.0;
    double w_a = 1.0;
    double w1 = 1.0;
    double w2 = 0.1;
    double w3 = 0.1;
    double w4 = 1.0;
    double w5 = 0.5;
    double success_bonus = 10.0;
    // Orientation switches for the two line-integral terms (+1 or -1).
    double r1_sign = 1.0;
    double r5_sign = 1.0;

    /// Throws Error(Config) on a negative weight or a sign other than +/-1.
    void validate() const;
};

struct RewardBreakdown {
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;
    double r4 = 0.0;
    double r5 = 0.0;
    double total = 0.0;

    bool operator==(const RewardBreakdown&) const = default;
};

using FieldFn = std::function<Vec2(Vec2)>;

/// Midpoint-rule work of `field` over the segment u_prev -> u_next.
double group_forming_increment(const FieldFn& field, Vec2 u_prev, Vec2 u_next);

/// dt when the field's work rate on the robot is non-negative, else 0.
double non_increasing_increment(double work_rate, double dt);

double time_penalty_increment(double dt);

double success_bonus(bool success, double bonus);

struct ShaSegment {
    Vec2 force;         // combined field on the SHA at its segment midpoint
    Vec2 displacement;  // this tick's displacement
};

/// -sum_j force_j . displacement_j
double sha_disturbance_increment(std::span<const ShaSegment> segments);

/// Weighted total; validates the weights first.
double total_reward(const RewardBreakdown& b, const RewardWeights& w);

/// Sums group_forming_increment over `substeps` equal pieces of a straight path.
double midpoint_line_integral(const FieldFn& field, Vec2 from, Vec2 to, int substeps);

}  // namespace ssbl
