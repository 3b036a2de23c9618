#include "ssbl/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ssbl/error.hpp"
#include "ssbl/rollout.hpp"
#include "ssbl/training.hpp"

namespace ssbl {

double gaussian_log_prob(const double* action, const double* mean, const std::vector<double>& log_std) {
    double lp = 0.0;
    for (std::size_t k = 0; k < log_std.size(); ++k) {
        const double z = (action[k] - mean[k]) * std::exp(-log_std[k]);
        lp += -0.5 * z * z - log_std[k] - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    return lp;
}

namespace {

// Per-sample surrogate term and its coefficient on d(logp): the clipped
// branch is flat, so its coefficient is zero.
struct SurrogateTerm {
    double value = 0.0;
    double dlogp_coeff = 0.0;
};

SurrogateTerm surrogate_term(double log_prob, const PpoSample& s, double clip_ratio) {
    const double ratio = std::exp(log_prob - s.old_log_prob);
    const double a = s.advantage;
    const double unclipped = ratio * a;
    if (!std::isfinite(clip_ratio)) return {unclipped, unclipped};
    const double clipped = std::clamp(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio) * a;
    if (unclipped <= clipped) return {unclipped, unclipped};
    return {clipped, 0.0};
}

}  // namespace

double ppo_surrogate(const GaussianPolicy& pi, const PpoBatch& batch, double clip_ratio) {
    if (batch.empty()) return 0.0;
    double acc = 0.0;
    double mean[2];
    for (const PpoSample& s : batch) {
        mlp_forward(pi.mean, s.obs, mean);
        acc += surrogate_term(gaussian_log_prob(s.action, mean, pi.log_std), s, clip_ratio).value;
    }
    return acc / static_cast<double>(batch.size());
}

std::vector<double> ppo_surrogate_gradient(const GaussianPolicy& pi, const PpoBatch& batch,
                                           double clip_ratio) {
    const std::size_t n_net = pi.mean.flat_params.size();
    std::vector<double> grad(pi.size(), 0.0);
    if (batch.empty()) return grad;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    ForwardCache cache;
    double mean[2];
    for (const PpoSample& s : batch) {
        mlp_forward(pi.mean, s.obs, mean, &cache);
        const double lp = gaussian_log_prob(s.action, mean, pi.log_std);
        const double c = surrogate_term(lp, s, clip_ratio).dlogp_coeff * inv_n;
        if (c == 0.0) continue;
        double d_mean[2];
        for (std::size_t k = 0; k < 2; ++k) {
            const double inv_var = std::exp(-2.0 * pi.log_std[k]);
            const double diff = s.action[k] - mean[k];
            d_mean[k] = c * diff * inv_var;
            grad[n_net + k] += c * (diff * diff * inv_var - 1.0);
        }
        mlp_backward(pi.mean, cache, d_mean, std::span(grad).first(n_net));
    }
    return grad;
}

Adam::Adam(std::size_t dim, double beta1, double beta2, double eps)
    : m_(dim, 0.0), v_(dim, 0.0), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(std::span<double> params, std::span<const double> grad, double lr, double sign) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw Error(ErrorCode::InvalidArgument, "Adam::step: dimension mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double mh = m_[i] / c1;
        const double vh = v_[i] / c2;
        params[i] += sign * lr * mh / (std::sqrt(vh) + eps_);
    }
}

void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values, double gamma,
                 double lambda, std::vector<double>& advantages, std::vector<double>& returns) {
    if (values.size() != rewards.size() + 1)
        throw Error(ErrorCode::InvalidArgument, "compute_gae: need one bootstrap value");
    const std::size_t n = rewards.size();
    advantages.assign(n, 0.0);
    returns.assign(n, 0.0);
    double running = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        const double delta = rewards[t] + gamma * values[t + 1] - values[t];
        running = delta + gamma * lambda * running;
        advantages[t] = running;
        returns[t] = running + values[t];
    }
}

void ppo_policy_update(GaussianPolicy& pi, const PpoBatch& batch, const PpoUpdateConfig& cfg, Adam& opt) {
    if (batch.empty()) return;
    std::vector<std::size_t> order(batch.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.shuffle_seed);
    std::vector<double> flat(pi.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_u64() % i]);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.minibatch)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.minibatch));
            PpoBatch mb;
            mb.reserve(stop - start);
            for (std::size_t k = start; k < stop; ++k) mb.push_back(batch[order[k]]);
            double mean = 0.0;
            for (const PpoSample& s : mb) mean += s.advantage;
            mean /= static_cast<double>(mb.size());
            double var = 0.0;
            for (const PpoSample& s : mb) var += (s.advantage - mean) * (s.advantage - mean);
            const double sd = std::sqrt(var / static_cast<double>(mb.size()));
            if (sd > 1e-12)
                for (PpoSample& s : mb) s.advantage = (s.advantage - mean) / sd;

            const std::vector<double> grad = ppo_surrogate_gradient(pi, mb, cfg.clip_ratio);
            std::copy(pi.mean.flat_params.begin(), pi.mean.flat_params.end(), flat.begin());
            std::copy(pi.log_std.begin(), pi.log_std.end(), flat.begin() + pi.mean.flat_params.size());
            opt.step(flat, grad, cfg.step_size, +1.0);
            std::copy(flat.begin(), flat.begin() + pi.mean.flat_params.size(), pi.mean.flat_params.begin());
            std::copy(flat.begin() + pi.mean.flat_params.size(), flat.end(), pi.log_std.begin());
        }
    }
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric, double floor) {
    if (analytic.size() != numeric.size())
        throw Error(ErrorCode::InvalidArgument, "max_relative_error: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
    }
    return worst;
}

namespace {

void randomize(PolicyParams& p, Rng& rng, double output_scale) {
    const std::vector<int>& ls = p.layer_sizes;
    std::size_t off = 0;
    for (std::size_t l = 1; l < ls.size(); ++l) {
        const std::size_t n_w = static_cast<std::size_t>(ls[l - 1]) * ls[l];
        const double scale = (l + 1 == ls.size() ? output_scale : 1.0) / std::sqrt(static_cast<double>(ls[l - 1]));
        for (std::size_t k = 0; k < n_w; ++k) p.flat_params[off + k] = scale * rng.normal();
        for (int k = 0; k < ls[l]; ++k) p.flat_params[off + n_w + k] = 0.0;
        off += n_w + ls[l];
    }
}

std::vector<double> numeric_gradient(GaussianPolicy pi, const PpoBatch& batch, double clip, double h) {
    std::vector<double> g(pi.size());
    const std::size_t n_net = pi.mean.flat_params.size();
    for (std::size_t i = 0; i < g.size(); ++i) {
        double& slot = i < n_net ? pi.mean.flat_params[i] : pi.log_std[i - n_net];
        const double keep = slot;
        slot = keep + h;
        const double up = ppo_surrogate(pi, batch, clip);
        slot = keep - h;
        const double down = ppo_surrogate(pi, batch, clip);
        slot = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

}  // namespace

GradientCheckReport ppo_gradient_check(std::uint64_t seed, int cases) {
    GradientCheckReport rep;
    Rng rng(seed);
    constexpr double kStep = 1e-5;
    for (int c = 0; c < cases; ++c) {
        const int n_in = 3 + c % 3;
        GaussianPolicy pi{PolicyParams::zeros({n_in, 5, 4, 2}), {rng.uniform(-1.0, 0.0), rng.uniform(-1.0, 0.0)}};
        randomize(pi.mean, rng, 1.0);
        PpoBatch batch(12);
        double mean[2];
        for (PpoSample& s : batch) {
            s.obs.resize(static_cast<std::size_t>(n_in));
            for (double& v : s.obs) v = rng.uniform(-2.0, 2.0);
            mlp_forward(pi.mean, s.obs, mean);
            for (int k = 0; k < 2; ++k) s.action[k] = mean[k] + std::exp(pi.log_std[k]) * rng.normal();
            // Spread the ratios across both sides of the clip window.
            s.old_log_prob = gaussian_log_prob(s.action, mean, pi.log_std) + rng.uniform(-0.5, 0.5);
            s.advantage = rng.normal();
        }
        for (double clip : {std::numeric_limits<double>::infinity(), 0.2}) {
            const std::vector<double> a = ppo_surrogate_gradient(pi, batch, clip);
            const std::vector<double> n = numeric_gradient(pi, batch, clip, kStep);
            rep.max_relative_error = std::max(rep.max_relative_error, max_relative_error(a, n));
            rep.entries += a.size();
            ++rep.cases;
        }
    }
    rep.passed = rep.max_relative_error < kGradientTolerance;
    return rep;
}

namespace {

struct PpoEpisode {
    PpoBatch samples;
    std::vector<double> rewards;
    double total_return = 0.0;
};

PpoEpisode collect_episode(const SimConfig& cfg, const GaussianPolicy& pi, std::uint64_t seed) {
    Environment env(cfg);
    Observation obs = env.reset(seed);
    Rng rng(derive_seed(seed, kPolicyStream, 1));
    PpoEpisode ep;
    double mean[2];
    while (!env.done()) {
        PpoSample s;
        s.obs = obs;
        mlp_forward(pi.mean, obs, mean);
        for (int k = 0; k < 2; ++k) s.action[k] = mean[k] + std::exp(pi.log_std[k]) * rng.normal();
        s.old_log_prob = gaussian_log_prob(s.action, mean, pi.log_std);
        StepResult r = env.step({s.action[0], s.action[1]});
        obs = std::move(r.observation);
        ep.rewards.push_back(r.reward);
        ep.samples.push_back(std::move(s));
    }
    ep.total_return = env.cumulative_reward();
    return ep;
}

}  // namespace

TrainResult train_ppo(const SimConfig& cfg) {
    if (cfg.train.algo != TrainAlgo::Ppo) throw Error(ErrorCode::Config, "train_ppo: algo must be ppo");
    const auto started = std::chrono::steady_clock::now();
    const TrainConfig& tc = cfg.train;

    const GradientCheckReport check = ppo_gradient_check(derive_seed(tc.master_seed, 4, 0));
    if (!check.passed)
        throw Error(ErrorCode::CheckFailed, "train_ppo: policy-gradient check failed (max relative error " +
                                                std::to_string(check.max_relative_error) + ")");

    const std::size_t obs_size = observation_size(cfg.spawn.n_shas);
    Rng init(derive_seed(tc.master_seed, 5, 0));
    GaussianPolicy pi{PolicyParams::zeros(policy_layers(obs_size, tc.hidden_layers)),
                      {tc.init_log_std, tc.init_log_std}};
    randomize(pi.mean, init, 0.01);
    std::vector<int> value_layers{static_cast<int>(obs_size)};
    value_layers.insert(value_layers.end(), tc.hidden_layers.begin(), tc.hidden_layers.end());
    value_layers.push_back(1);
    PolicyParams value = PolicyParams::zeros(value_layers, false);
    randomize(value, init, 1.0);

    Adam pi_opt(pi.size());
    Adam v_opt(value.flat_params.size());

    TrainReport report;
    report.algo = "ppo";
    report.config_hash = config_hash(cfg);
    report.master_seed = tc.master_seed;
    report.iterations = tc.iterations;

    for (int it = 0; it < tc.iterations; ++it) {
        const std::size_t n_ep = static_cast<std::size_t>(tc.episodes_per_eval);
        std::vector<PpoEpisode> episodes(n_ep);
        parallel_for(n_ep, [&](std::size_t e) {
            episodes[e] = collect_episode(cfg, pi, training_seed(tc.master_seed, it * n_ep + e));
        });

        PpoBatch batch;
        IterationStats st;
        st.iteration = it;
        st.max_return = -std::numeric_limits<double>::infinity();
        for (PpoEpisode& ep : episodes) {
            std::vector<double> values(ep.samples.size() + 1, 0.0);
            for (std::size_t t = 0; t < ep.samples.size(); ++t) {
                double v;
                mlp_forward(value, ep.samples[t].obs, std::span(&v, 1));
                values[t] = v;
            }
            std::vector<double> adv, ret;
            compute_gae(ep.rewards, values, tc.gamma, tc.gae_lambda, adv, ret);
            for (std::size_t t = 0; t < ep.samples.size(); ++t) {
                ep.samples[t].advantage = adv[t];
                ep.samples[t].value_target = ret[t];
                batch.push_back(std::move(ep.samples[t]));
            }
            st.mean_return += ep.total_return / static_cast<double>(n_ep);
            st.max_return = std::max(st.max_return, ep.total_return);
        }
        st.center_return = st.mean_return;
        report.per_iteration.push_back(st);

        const PpoUpdateConfig ucfg{tc.clip_ratio, tc.epochs, tc.minibatch, tc.step_size,
                                   derive_seed(tc.master_seed, 6, static_cast<std::uint64_t>(it))};
        ppo_policy_update(pi, batch, ucfg, pi_opt);

        // Value regression on the GAE returns, same minibatching.
        Rng vrng(derive_seed(tc.master_seed, 7, static_cast<std::uint64_t>(it)));
        std::vector<std::size_t> order(batch.size());
        std::iota(order.begin(), order.end(), 0);
        ForwardCache cache;
        for (int epoch = 0; epoch < tc.epochs; ++epoch) {
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[vrng.next_u64() % i]);
            for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(tc.minibatch)) {
                const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(tc.minibatch));
                std::vector<double> grad(value.flat_params.size(), 0.0);
                const double inv = 1.0 / static_cast<double>(stop - start);
                for (std::size_t k = start; k < stop; ++k) {
                    const PpoSample& s = batch[order[k]];
                    double v;
                    mlp_forward(value, s.obs, std::span(&v, 1), &cache);
                    const double d = (v - s.value_target) * inv;
                    mlp_backward(value, cache, std::span(&d, 1), grad);
                }
                v_opt.step(value.flat_params, grad, tc.value_step_size, -1.0);
            }
        }
    }

    TrainResult out;
    out.params = pi.mean;
    quantize_f32(out.params);
    finish_report(cfg, out.params, report);
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.report = std::move(report);
    return out;
}

}  // namespace ssbl
