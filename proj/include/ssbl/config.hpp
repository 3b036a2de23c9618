#pragma once

// Run configuration: one JSON document with sections
//   world, proxemics, spawn, sffm, reward_weights, episode, train.
// Every section is optional; missing keys keep their defaults, unknown keys
// are rejected.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ssbl/geometry.hpp"
#include "ssbl/group_dynamics.hpp"
#include "ssbl/reward.hpp"

namespace ssbl {

struct EpisodeConfig {
    int max_steps = 500;                             // T
    double success_band = 0.3;                       // m
    double success_angle = std::numbers::pi / 6.0;   // rad
    int success_hold = 10;                           // K

    void validate() const;
};

/// Gains shared by the SHA controller, the robot's SFFM baseline, and the
/// o-space estimate.
struct SffmConfig {
    ShaControllerConfig sha;
    double baseline_gain = 1.0;
    double baseline_k_turn = 2.0;
    double ospace_min_radius = kDefaultOSpaceMinRadius;

    void validate() const;
};

enum class TrainAlgo { Cem, Ppo };

struct TrainConfig {
    TrainAlgo algo = TrainAlgo::Cem;
    int iterations = 200;
    std::vector<int> hidden_layers{64, 64};
    std::uint64_t master_seed = 1;
    int episodes_per_eval = 16;   // training episodes per candidate / per PPO batch
    int eval_episodes = 50;       // held-out episodes for the final report
    double smoothing = 0.9;       // EWMA factor for reported curves

    // CEM
    int population = 64;
    double elite_fraction = 0.125;
    double init_noise = 0.5;
    double noise_decay = 0.97;

    // PPO
    double clip_ratio = 0.2;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    int epochs = 10;
    int minibatch = 256;
    double step_size = 3e-4;
    double value_step_size = 1e-3;
    double init_log_std = -0.5;

    void validate() const;
};

const char* algo_name(TrainAlgo algo);
TrainAlgo parse_algo(const std::string& name);

struct SimConfig {
    WorldConfig world;
    ProxemicsConfig proxemics;
    GroupSpawnSpec spawn;
    SffmConfig sffm;
    RewardWeights reward_weights;
    EpisodeConfig episode;
    TrainConfig train;

    void validate() const;
};

nlohmann::json to_json(const SimConfig& cfg);

/// Overlays `j` onto the defaults, then validates. Throws Error(Config).
SimConfig config_from_json(const nlohmann::json& j);

/// Throws Error(Io) when unreadable or not JSON, Error(Config) when invalid.
SimConfig load_config(const std::string& path);

/// 16 hex digits of FNV-1a-64 over the canonical JSON dump.
std::string config_hash(const SimConfig& cfg);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace ssbl
