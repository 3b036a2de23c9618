#pragma once

// Robot policies: the SFFM baseline driven directly by the social forces, a
// uniform-random anchor, and feed-forward networks over the observation.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ssbl/environment.hpp"
#include "ssbl/rng.hpp"

namespace ssbl {

/// Fully connected net with tanh hidden units. Parameters are stored layer by
/// layer as W (input-major: W[i * n_out + o] connects input i to output o)
/// followed by b (n_out).
struct PolicyParams {
    std::vector<int> layer_sizes;  // input, hidden..., output
    std::vector<double> flat_params;
    bool squash_output = true;     // tanh on the output layer; false for value nets

    static std::size_t param_count(std::span<const int> layer_sizes);
    static PolicyParams zeros(std::vector<int> layer_sizes, bool squash_output = true);

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }

    /// Throws Error(InvalidArgument) on inconsistent sizes or non-finite values.
    void validate() const;
};

inline constexpr const char* kActivationTag = "tanh";

/// Pre- and post-activation values per layer, kept for back-propagation.
struct ForwardCache {
    std::vector<std::vector<double>> activations;  // [0] = input, [L] = output
};

/// The nonlinearity used by every squashed layer (tanh).
double activation(double z);

/// Writes the network output into `out` (size output_size()). Throws
/// Error(InvalidArgument) on a dimension mismatch.
void mlp_forward(const PolicyParams& params, std::span<const double> input, std::span<double> out,
                 ForwardCache* cache = nullptr);

/// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
void mlp_backward(const PolicyParams& params, const ForwardCache& cache,
                  std::span<const double> d_output, std::span<double> grad);

/// Deterministic action of a two-output squashed network.
Action policy_forward(const PolicyParams& params, std::span<const double> obs);

/// Standard feed-forward shapes: {obs, hidden..., 2}.
std::vector<int> policy_layers(std::size_t obs_size, std::span<const int> hidden);

/// Rounds every parameter to the nearest float; checkpoints store float32.
void quantize_f32(PolicyParams& params);

struct BaselineGains {
    double gain = 1.0;
    double k_turn = 2.0;
    double w_equality_dir = 0.5;
    double w_cohesion_dir = 0.5;
};

/// Forward command proportional to the combined force along the heading;
/// turn toward the blended orientation vectors.
Action sffm_baseline_policy(const AgentState& robot, const ForceBreakdown& forces,
                            const BaselineGains& gains, const WorldConfig& world);

class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string label() const = 0;
    /// `rng` is the episode's private policy stream.
    virtual Action act(const Environment& env, const Observation& obs, Rng& rng) const = 0;
};

class SffmPolicy final : public Policy {
public:
    std::string label() const override { return "sffm"; }
    Action act(const Environment& env, const Observation& obs, Rng& rng) const override;
};

class RandomPolicy final : public Policy {
public:
    std::string label() const override { return "random"; }
    Action act(const Environment& env, const Observation& obs, Rng& rng) const override;
};

class NetworkPolicy final : public Policy {
public:
    NetworkPolicy(PolicyParams params, std::string label);
    std::string label() const override { return label_; }
    Action act(const Environment& env, const Observation& obs, Rng& rng) const override;
    const PolicyParams& params() const { return params_; }

private:
    PolicyParams params_;
    std::string label_;
};

struct Checkpoint {
    PolicyParams params;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string algo;
};

inline constexpr const char* kCheckpointFormat = "ssbl-checkpoint/1";

/// Line 1: JSON header; line 2: base64 of the float32 little-endian parameters.
std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws Error(Io) for unreadable or malformed files.
Checkpoint load_checkpoint(const std::string& path);

/// "sffm", "random", or a checkpoint path. The network input size must
/// match the configured observation length.
std::unique_ptr<Policy> make_policy(const std::string& spec, const SimConfig& cfg);

}  // namespace ssbl
