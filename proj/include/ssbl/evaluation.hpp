#pragma once

// Relative-performance normalization, objective social-appropriateness
// metrics over episode logs, and paired policy comparison.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssbl/policy.hpp"
#include "ssbl/trajectory_io.hpp"

namespace ssbl {

/// 100 * (model - random) / (baseline - random). Throws Error(InvalidArgument)
/// when the anchors coincide (|baseline - random| < 1e-12).
double relative_performance(double r_model, double r_baseline, double r_random);

/// s_0 = v_0, s_t = factor * s_{t-1} + (1 - factor) * v_t.
std::vector<double> ewma(const std::vector<double>& values, double factor);

struct EpisodeMetrics {
    std::uint64_t seed = 0;
    bool success = false;
    double total_return = 0.0;
    int time_to_join = 0;            // steps until success; max_steps when it never happened
    double path_length = 0.0;        // robot, m
    int personal_violation_steps = 0;
    double sha_total_displacement = 0.0;
    double final_formation_error = 0.0;
};

/// Means over episodes (success_rate is the fraction of successful ones).
struct SocialMetrics {
    int episodes = 0;
    double success_rate = 0.0;
    double mean_return = 0.0;
    double time_to_join = 0.0;
    double path_length = 0.0;
    double personal_violation_steps = 0.0;
    double sha_total_displacement = 0.0;
    double final_formation_error = 0.0;
};

EpisodeMetrics episode_metrics(const TrajectoryLog& log);
SocialMetrics aggregate(const std::vector<EpisodeMetrics>& episodes);
SocialMetrics compute_metrics(const std::vector<TrajectoryLog>& logs);

nlohmann::json to_json(const EpisodeMetrics& m);
nlohmann::json to_json(const SocialMetrics& m);

struct PolicyEvaluation {
    std::string label;
    std::vector<EpisodeMetrics> per_episode;
    SocialMetrics metrics;
};

PolicyEvaluation evaluate_policy(const SimConfig& cfg, const Policy& policy,
                                 const std::vector<std::uint64_t>& seeds);

struct CompareReport {
    std::string config_hash;
    std::vector<std::uint64_t> seeds;
    PolicyEvaluation a;
    PolicyEvaluation b;
    PolicyEvaluation baseline;  // SFFM anchor (100%)
    PolicyEvaluation random;    // uniform-random anchor (0%)
    double relative_a = 0.0;
    double relative_b = 0.0;
};

/// Evaluates both policies and both anchors on the identical seed list.
CompareReport compare_policies(const SimConfig& cfg, const Policy& a, const Policy& b,
                               const std::vector<std::uint64_t>& seeds);

nlohmann::json to_json(const CompareReport& r);

/// One row per (seed, policy) for a, b and both anchors.
std::string compare_csv(const CompareReport& r);

}  // namespace ssbl
