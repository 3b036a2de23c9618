#pragma once

// Policy optimization entry points shared by the CEM and PPO trainers.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssbl/config.hpp"
#include "ssbl/policy.hpp"

namespace ssbl {

struct IterationStats {
    int iteration = 0;
    double mean_return = 0.0;  // over the population (CEM) or batch episodes (PPO)
    double max_return = 0.0;
    double elite_mean = 0.0;   // CEM only
    double center_return = 0.0;  // return of the sampling mean (CEM) / current policy (PPO)
    int discarded = 0;
};

struct TrainReport {
    std::string algo;
    std::string config_hash;
    std::uint64_t master_seed = 0;
    int iterations = 0;
    std::vector<IterationStats> per_iteration;
    std::vector<double> smoothed_mean_return;  // EWMA of per-iteration mean_return
    std::vector<std::uint64_t> eval_seeds;     // held out, disjoint from training seeds
    double final_eval_return = 0.0;
    double baseline_eval_return = 0.0;
    double random_eval_return = 0.0;
    double relative_percent = 0.0;
    double wall_clock_seconds = 0.0;
};

/// `with_timing` = false drops wall-clock so equal runs serialize identically.
nlohmann::json to_json(const TrainReport& r, bool with_timing = true);

struct TrainResult {
    PolicyParams params;  // float32-representable, ready to checkpoint
    TrainReport report;
};

/// Cross-entropy method over the flattened network parameters.
TrainResult train_cem(const SimConfig& cfg);

/// Clipped-surrogate PPO with GAE; aborts (Error CheckFailed) if the
/// start-up gradient check fails.
TrainResult train_ppo(const SimConfig& cfg);

/// Dispatches on cfg.train.algo.
TrainResult train(const SimConfig& cfg);

/// Fills the held-out evaluation fields of `report` for `params`.
void finish_report(const SimConfig& cfg, const PolicyParams& params, TrainReport& report);

}  // namespace ssbl
