#pragma once

// Proximal policy optimization pieces: diagonal-Gaussian policy head over the
// squashed network mean, clipped surrogate with its analytic gradient,
// generalized advantage estimation, Adam, and the finite-difference gate.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ssbl/policy.hpp"

namespace ssbl {

struct GaussianPolicy {
    PolicyParams mean;            // obs -> 2, tanh output
    std::vector<double> log_std;  // one per action dimension

    std::size_t size() const { return mean.flat_params.size() + log_std.size(); }
};

double gaussian_log_prob(const double* action, const double* mean, const std::vector<double>& log_std);

struct PpoSample {
    std::vector<double> obs;
    double action[2] = {0.0, 0.0};  // unclipped sample
    double old_log_prob = 0.0;
    double advantage = 0.0;
    double value_target = 0.0;
};

using PpoBatch = std::vector<PpoSample>;

/// mean_t min(r_t A_t, clip(r_t, 1-eps, 1+eps) A_t), r_t = exp(logp - logp_old).
/// clip_ratio = +inf gives the unclipped surrogate mean_t r_t A_t.
double ppo_surrogate(const GaussianPolicy& pi, const PpoBatch& batch, double clip_ratio);

/// Gradient of ppo_surrogate: network parameters first, then log_std.
std::vector<double> ppo_surrogate_gradient(const GaussianPolicy& pi, const PpoBatch& batch,
                                           double clip_ratio);

/// In-place ascent (sign = +1) or descent (sign = -1) with bias correction.
class Adam {
public:
    explicit Adam(std::size_t dim, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step(std::span<double> params, std::span<const double> grad, double lr, double sign);

private:
    std::vector<double> m_, v_;
    double beta1_, beta2_, eps_;
    long t_ = 0;
};

/// Backward GAE over one episode. `values` has rewards.size() + 1 entries
/// (the last is the bootstrap value, 0 at a true terminal).
void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values, double gamma,
                 double lambda, std::vector<double>& advantages, std::vector<double>& returns);

struct PpoUpdateConfig {
    double clip_ratio = 0.2;
    int epochs = 10;
    int minibatch = 256;
    double step_size = 3e-4;
    std::uint64_t shuffle_seed = 0;
};

/// Epochs of shuffled minibatch ascent on the clipped surrogate. Advantages
/// are standardized per minibatch only when their spread is non-zero.
void ppo_policy_update(GaussianPolicy& pi, const PpoBatch& batch, const PpoUpdateConfig& cfg, Adam& opt);

struct GradientCheckReport {
    int cases = 0;
    std::size_t entries = 0;
    double max_relative_error = 0.0;
    bool passed = false;
};

inline constexpr double kGradientTolerance = 1e-4;

/// Analytic vs central-difference gradients of the surrogate (clipped and
/// unclipped) on random small networks and batches.
GradientCheckReport ppo_gradient_check(std::uint64_t seed, int cases = 5);

/// Entry-wise |a - n| / max(|a|, |n|, floor), maximized.
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                          double floor = 1e-6);

}  // namespace ssbl
