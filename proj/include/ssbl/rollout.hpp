#pragma once

// Episode rollouts and deterministic fan-out. Work items are indexed and
// results land in index order, so thread count never changes outputs.

#include <cstdint>
#include <functional>
#include <vector>

#include "ssbl/environment.hpp"
#include "ssbl/policy.hpp"
#include "ssbl/trajectory_io.hpp"

namespace ssbl {

/// Worker count: $SSBL_THREADS when set (>= 1), else hardware concurrency.
int thread_count();

/// Runs body(i) for i in [0, n) across thread_count() workers. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Training seeds are even, evaluation seeds odd: the two sets never meet.
std::uint64_t training_seed(std::uint64_t master_seed, std::uint64_t index);
std::uint64_t evaluation_seed(std::uint64_t master_seed, std::uint64_t index);
std::vector<std::uint64_t> evaluation_seeds(std::uint64_t master_seed, int count);

inline constexpr std::uint64_t kPolicyStream = 0x5EED'0001;

struct EpisodeOutcome {
    std::uint64_t seed = 0;
    double total_return = 0.0;
    bool success = false;
    int steps = 0;
    TrajectoryLog log;  // populated only when recorded
};

EpisodeOutcome run_episode(const SimConfig& cfg, const Policy& policy, std::uint64_t seed,
                           bool record, int episode_index = 0);

std::vector<EpisodeOutcome> run_episodes(const SimConfig& cfg, const Policy& policy,
                                         const std::vector<std::uint64_t>& seeds, bool record);

double mean_return(const std::vector<EpisodeOutcome>& outcomes);

}  // namespace ssbl
