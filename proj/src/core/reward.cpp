#include "ssbl/reward.hpp"

#include "ssbl/error.hpp"

namespace ssbl {

void RewardWeights::validate() const {
    for (double w : {w_e, w_a, w1, w2, w3, w4, w5, success_bonus})
        if (!(w >= 0.0)) throw Error(ErrorCode::Config, "reward_weights: weights must be >= 0");
    for (double s : {r1_sign, r5_sign})
        if (s != 1.0 && s != -1.0)
            throw Error(ErrorCode::Config, "reward_weights: sign switches must be +1 or -1");
}

double group_forming_increment(const FieldFn& field, Vec2 u_prev, Vec2 u_next) {
    const Vec2 step = u_next - u_prev;
    if (step == Vec2{}) return 0.0;
    return field((u_prev + u_next) * 0.5).dot(step);
}

double non_increasing_increment(double work_rate, double dt) { return work_rate >= 0.0 ? dt : 0.0; }

double time_penalty_increment(double dt) { return -dt; }

double success_bonus(bool success, double bonus) { return success ? bonus : 0.0; }

double sha_disturbance_increment(std::span<const ShaSegment> segments) {
    double acc = 0.0;
    for (const ShaSegment& s : segments) acc += s.force.dot(s.displacement);
    return -acc;
}

double total_reward(const RewardBreakdown& b, const RewardWeights& w) {
    w.validate();
    return w.w_e * (w.w1 * b.r1 + w.w2 * b.r2 + w.w3 * b.r3 + w.w4 * b.r4) + w.w_a * w.w5 * b.r5;
}

double midpoint_line_integral(const FieldFn& field, Vec2 from, Vec2 to, int substeps) {
    if (substeps < 1) throw Error(ErrorCode::InvalidArgument, "midpoint_line_integral: substeps < 1");
    double acc = 0.0;
    Vec2 prev = from;
    for (int k = 1; k <= substeps; ++k) {
        const double t = static_cast<double>(k) / substeps;
        const Vec2 next = from + (to - from) * t;
        acc += group_forming_increment(field, prev, next);
        prev = next;
    }
    return acc;
}

}  // namespace ssbl
