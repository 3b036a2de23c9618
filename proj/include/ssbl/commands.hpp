#pragma once

// High-level subcommand implementations shared by the C API and tests. Each
// writes its artifacts under an output directory and returns a JSON summary.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssbl/config.hpp"

namespace ssbl {

/// Episode i of a rollout command runs on evaluation_seed(seed, i).
std::vector<std::uint64_t> command_seeds(std::uint64_t seed, int episodes);

/// One JSONL file per episode (episode_NNN.jsonl) and manifest.json, written last.
nlohmann::json run_simulate(const SimConfig& cfg, const std::string& policy, std::uint64_t seed, int episodes,
                            const std::string& out_dir);

/// Writes policy.ckpt and train_report.json. The report file omits
/// wall-clock time so reruns are byte-identical; the returned summary has it.
nlohmann::json run_train(const SimConfig& cfg, const std::string& out_dir);

/// Rollout evaluation of a policy on command_seeds(seed, episodes); writes eval.json.
nlohmann::json run_eval_policy(const SimConfig& cfg, const std::string& policy, std::uint64_t seed,
                               int episodes, const std::string& out_dir);

/// Offline metrics over recorded trajectories. "rewards_verified" is false
/// when any logged reward differs from its recomputation.
nlohmann::json run_eval_trajectories(const std::vector<std::string>& files, const std::string& out_dir);

/// Writes compare.json and compare.csv.
nlohmann::json run_compare(const SimConfig& cfg, const std::string& policy_a, const std::string& policy_b,
                           std::uint64_t seed, int episodes, const std::string& out_dir);

/// Writes features_check.json.
nlohmann::json run_features_check(std::uint64_t seed, const std::string& out_dir);

/// Writes `text` to `path`, creating parent directories. Throws Error(Io).
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ssbl
