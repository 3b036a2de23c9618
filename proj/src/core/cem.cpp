#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "ssbl/error.hpp"
#include "ssbl/evaluation.hpp"
#include "ssbl/rollout.hpp"
#include "ssbl/training.hpp"

namespace ssbl {

using nlohmann::json;

json to_json(const TrainReport& r, bool with_timing) {
    json iters = json::array();
    for (const IterationStats& s : r.per_iteration)
        iters.push_back({{"iteration", s.iteration},
                         {"mean_return", s.mean_return},
                         {"max_return", s.max_return},
                         {"elite_mean", s.elite_mean},
                         {"center_return", s.center_return},
                         {"discarded", s.discarded}});
    json j = {{"algo", r.algo},
              {"config_hash", r.config_hash},
              {"master_seed", r.master_seed},
              {"iterations", r.iterations},
              {"per_iteration", iters},
              {"smoothed_mean_return", r.smoothed_mean_return},
              {"eval_seeds", r.eval_seeds},
              {"final_eval_return", r.final_eval_return},
              {"baseline_eval_return", r.baseline_eval_return},
              {"random_eval_return", r.random_eval_return},
              {"relative_percent", r.relative_percent}};
    if (with_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
    return j;
}

void finish_report(const SimConfig& cfg, const PolicyParams& params, TrainReport& report) {
    report.eval_seeds = evaluation_seeds(cfg.train.master_seed, cfg.train.eval_episodes);
    const NetworkPolicy learned(params, "learned");
    report.final_eval_return = mean_return(run_episodes(cfg, learned, report.eval_seeds, false));
    report.baseline_eval_return = mean_return(run_episodes(cfg, SffmPolicy{}, report.eval_seeds, false));
    report.random_eval_return = mean_return(run_episodes(cfg, RandomPolicy{}, report.eval_seeds, false));
    report.relative_percent = relative_performance(report.final_eval_return, report.baseline_eval_return,
                                                   report.random_eval_return);
    std::vector<double> means;
    for (const IterationStats& s : report.per_iteration) means.push_back(s.mean_return);
    report.smoothed_mean_return = ewma(means, cfg.train.smoothing);
}

namespace {

struct Candidate {
    std::vector<double> theta;
    double score = 0.0;
    bool scored = false;
};

}  // namespace

TrainResult train_cem(const SimConfig& cfg) {
    if (cfg.train.algo != TrainAlgo::Cem) throw Error(ErrorCode::Config, "train_cem: algo must be cem");
    const auto started = std::chrono::steady_clock::now();
    const TrainConfig& tc = cfg.train;
    const std::vector<int> layers = policy_layers(observation_size(cfg.spawn.n_shas), tc.hidden_layers);
    const std::size_t dim = PolicyParams::param_count(layers);
    const int n_elite = std::clamp(static_cast<int>(std::lround(tc.population * tc.elite_fraction)), 1,
                                   tc.population - 1);

    std::vector<std::uint64_t> train_seeds;
    for (int e = 0; e < tc.episodes_per_eval; ++e) train_seeds.push_back(training_seed(tc.master_seed, e));

    std::vector<double> mu(dim, 0.0);
    std::vector<double> sigma(dim, tc.init_noise);
    std::vector<Candidate> carried;
    Candidate best{mu, -std::numeric_limits<double>::infinity(), false};

    TrainReport report;
    report.algo = "cem";
    report.config_hash = config_hash(cfg);
    report.master_seed = tc.master_seed;
    report.iterations = tc.iterations;

    PolicyParams scratch = PolicyParams::zeros(layers);
    for (int it = 0; it < tc.iterations; ++it) {
        Rng rng(derive_seed(tc.master_seed, 3, static_cast<std::uint64_t>(it)));
        std::vector<Candidate> pop;
        pop.reserve(tc.population);
        pop.push_back({mu, 0.0, false});
        for (const Candidate& c : carried)
            if (static_cast<int>(pop.size()) < tc.population) pop.push_back(c);
        while (static_cast<int>(pop.size()) < tc.population) {
            Candidate c{std::vector<double>(dim), 0.0, false};
            for (std::size_t k = 0; k < dim; ++k) c.theta[k] = mu[k] + sigma[k] * rng.normal();
            pop.push_back(std::move(c));
        }

        // Score (candidate, episode) pairs; reduce in index order.
        std::vector<std::size_t> todo;
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (!pop[i].scored) todo.push_back(i);
        const std::size_t n_ep = train_seeds.size();
        std::vector<double> returns(todo.size() * n_ep, 0.0);
        parallel_for(returns.size(), [&](std::size_t k) {
            const Candidate& c = pop[todo[k / n_ep]];
            PolicyParams p{layers, c.theta, true};
            const NetworkPolicy pol(std::move(p), "cem");
            returns[k] = run_episode(cfg, pol, train_seeds[k % n_ep], false).total_return;
        });
        IterationStats st;
        st.iteration = it;
        for (std::size_t t = 0; t < todo.size(); ++t) {
            double acc = 0.0;
            for (std::size_t e = 0; e < n_ep; ++e) acc += returns[t * n_ep + e];
            Candidate& c = pop[todo[t]];
            c.score = acc / static_cast<double>(n_ep);
            c.scored = true;
            if (!std::isfinite(c.score)) {
                c.score = -std::numeric_limits<double>::infinity();
                ++st.discarded;
            }
        }

        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pop[a].score > pop[b].score; });

        double sum = 0.0;
        int finite = 0;
        st.max_return = -std::numeric_limits<double>::infinity();
        for (const Candidate& c : pop) {
            if (!std::isfinite(c.score)) continue;
            sum += c.score;
            ++finite;
            st.max_return = std::max(st.max_return, c.score);
        }
        st.mean_return = finite ? sum / finite : 0.0;
        st.center_return = pop.front().score;

        carried.clear();
        for (int e = 0; e < n_elite; ++e) carried.push_back(pop[order[e]]);
        double elite_sum = 0.0;
        for (const Candidate& c : carried) elite_sum += c.score;
        st.elite_mean = elite_sum / n_elite;
        if (carried.front().score > best.score) best = carried.front();

        // Refit: elite mean and variance plus a decaying noise floor.
        const double floor_sd = tc.init_noise * std::pow(tc.noise_decay, it + 1);
        for (std::size_t k = 0; k < dim; ++k) {
            double m = 0.0;
            for (const Candidate& c : carried) m += c.theta[k];
            m /= n_elite;
            double v = 0.0;
            for (const Candidate& c : carried) v += (c.theta[k] - m) * (c.theta[k] - m);
            v /= n_elite;
            mu[k] = m;
            sigma[k] = std::sqrt(v + floor_sd * floor_sd);
        }
        report.per_iteration.push_back(st);
    }

    TrainResult out;
    out.params = PolicyParams{layers, best.theta, true};
    quantize_f32(out.params);
    finish_report(cfg, out.params, report);
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.report = std::move(report);
    return out;
}

TrainResult train(const SimConfig& cfg) {
    return cfg.train.algo == TrainAlgo::Ppo ? train_ppo(cfg) : train_cem(cfg);
}

}  // namespace ssbl
