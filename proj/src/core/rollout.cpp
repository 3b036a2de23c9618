#include "ssbl/rollout.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "ssbl/rng.hpp"

namespace ssbl {

int thread_count() {
    if (const char* env = std::getenv("SSBL_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::size_t err_index = n;
    std::exception_ptr err;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (err) std::rethrow_exception(err);
}

std::uint64_t training_seed(std::uint64_t master_seed, std::uint64_t index) {
    return derive_seed(master_seed, 1, index) & ~std::uint64_t{1};
}

std::uint64_t evaluation_seed(std::uint64_t master_seed, std::uint64_t index) {
    return derive_seed(master_seed, 2, index) | std::uint64_t{1};
}

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t master_seed, int count) {
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < count; ++i) seeds.push_back(evaluation_seed(master_seed, i));
    return seeds;
}

EpisodeOutcome run_episode(const SimConfig& cfg, const Policy& policy, std::uint64_t seed,
                           bool record, int episode_index) {
    Environment env(cfg);
    Observation obs = env.reset(seed);
    Rng rng(derive_seed(seed, kPolicyStream, 0));

    EpisodeOutcome out;
    out.seed = seed;
    if (record) {
        out.log.header = {config_hash(cfg), seed, episode_index, policy.label(), cfg, env.agents()};
        out.log.transitions.reserve(static_cast<std::size_t>(cfg.episode.max_steps));
    }
    while (!env.done()) {
        const Action a = policy.act(env, obs, rng);
        StepResult r = env.step(a);
        obs = std::move(r.observation);
        if (record) out.log.transitions.push_back(env.last_transition());
        out.success = r.success;
    }
    out.total_return = env.cumulative_reward();
    out.steps = env.t();
    return out;
}

std::vector<EpisodeOutcome> run_episodes(const SimConfig& cfg, const Policy& policy,
                                         const std::vector<std::uint64_t>& seeds, bool record) {
    std::vector<EpisodeOutcome> out(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        out[i] = run_episode(cfg, policy, seeds[i], record, static_cast<int>(i));
    });
    return out;
}

double mean_return(const std::vector<EpisodeOutcome>& outcomes) {
    if (outcomes.empty()) return 0.0;
    double acc = 0.0;
    for (const EpisodeOutcome& o : outcomes) acc += o.total_return;
    return acc / static_cast<double>(outcomes.size());
}

}  // namespace ssbl
