#include "ssbl/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ssbl/base64.hpp"
#include "ssbl/error.hpp"
#include "ssbl/group_dynamics.hpp"

namespace ssbl {

std::size_t PolicyParams::param_count(std::span<const int> layer_sizes) {
    std::size_t n = 0;
    for (std::size_t l = 1; l < layer_sizes.size(); ++l)
        n += static_cast<std::size_t>(layer_sizes[l]) * (layer_sizes[l - 1] + 1);
    return n;
}

PolicyParams PolicyParams::zeros(std::vector<int> layer_sizes, bool squash_output) {
    PolicyParams p;
    p.flat_params.assign(param_count(layer_sizes), 0.0);
    p.layer_sizes = std::move(layer_sizes);
    p.squash_output = squash_output;
    return p;
}

void PolicyParams::validate() const {
    if (layer_sizes.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "policy: need at least input and output layers");
    for (int s : layer_sizes)
        if (s <= 0) throw Error(ErrorCode::InvalidArgument, "policy: layer sizes must be > 0");
    if (flat_params.size() != param_count(layer_sizes))
        throw Error(ErrorCode::InvalidArgument, "policy: parameter count does not match layer sizes");
    for (double v : flat_params)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "policy: non-finite parameter");
}

double activation(double z) {
    // tanh through one exp; glibc's tanh goes through expm1 and dominates rollouts.
    const double t = std::exp(-2.0 * std::abs(z));
    return std::copysign((1.0 - t) / (1.0 + t), z);
}

void mlp_forward(const PolicyParams& params, std::span<const double> input, std::span<double> out,
                 ForwardCache* cache) {
    const std::vector<int>& ls = params.layer_sizes;
    if (input.size() != static_cast<std::size_t>(ls.front()))
        throw Error(ErrorCode::InvalidArgument,
                    "policy_forward: observation length " + std::to_string(input.size()) +
                        " does not match input layer " + std::to_string(ls.front()));
    if (out.size() != static_cast<std::size_t>(ls.back()))
        throw Error(ErrorCode::InvalidArgument, "policy_forward: output buffer size mismatch");

    thread_local std::vector<double> cur, next;
    cur.assign(input.begin(), input.end());
    if (cache) {
        cache->activations.resize(ls.size());
        cache->activations[0] = cur;
    }
    const double* w = params.flat_params.data();
    const std::size_t layers = ls.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t n_in = static_cast<std::size_t>(ls[l]);
        const std::size_t n_out = static_cast<std::size_t>(ls[l + 1]);
        const double* b = w + n_in * n_out;
        next.assign(b, b + n_out);
        double* z = next.data();
        for (std::size_t i = 0; i < n_in; ++i) {
            const double xi = cur[i];
            const double* col = w + i * n_out;
            for (std::size_t o = 0; o < n_out; ++o) z[o] += col[o] * xi;
        }
        if (l + 1 < layers || params.squash_output)
            for (double& v : next) v = activation(v);
        w = b + n_out;
        std::swap(cur, next);
        if (cache) cache->activations[l + 1] = cur;
    }
    std::copy(cur.begin(), cur.end(), out.begin());
}

void mlp_backward(const PolicyParams& params, const ForwardCache& cache,
                  std::span<const double> d_output, std::span<double> grad) {
    const std::vector<int>& ls = params.layer_sizes;
    const std::size_t layers = ls.size() - 1;
    if (grad.size() != params.flat_params.size() || d_output.size() != static_cast<std::size_t>(ls.back()) ||
        cache.activations.size() != ls.size())
        throw Error(ErrorCode::InvalidArgument, "mlp_backward: size mismatch");

    std::vector<std::size_t> offsets(layers);
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        offsets[l] = off;
        off += static_cast<std::size_t>(ls[l + 1]) * (ls[l] + 1);
    }

    std::vector<double> delta(d_output.begin(), d_output.end());
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t n_in = static_cast<std::size_t>(ls[l]);
        const std::size_t n_out = static_cast<std::size_t>(ls[l + 1]);
        const std::vector<double>& a_out = cache.activations[l + 1];
        const std::vector<double>& a_in = cache.activations[l];
        if (l + 1 < layers || params.squash_output)
            for (std::size_t o = 0; o < n_out; ++o) delta[o] *= 1.0 - a_out[o] * a_out[o];

        const double* w = params.flat_params.data() + offsets[l];
        double* gw = grad.data() + offsets[l];
        double* gb = gw + n_in * n_out;
        for (std::size_t o = 0; o < n_out; ++o) gb[o] += delta[o];
        std::vector<double> d_in(n_in, 0.0);
        for (std::size_t i = 0; i < n_in; ++i) {
            const double* col = w + i * n_out;
            double* gcol = gw + i * n_out;
            double acc = 0.0;
            for (std::size_t o = 0; o < n_out; ++o) {
                gcol[o] += delta[o] * a_in[i];
                acc += delta[o] * col[o];
            }
            d_in[i] = acc;
        }
        delta = std::move(d_in);
    }
}

Action policy_forward(const PolicyParams& params, std::span<const double> obs) {
    if (params.output_size() != 2)
        throw Error(ErrorCode::InvalidArgument, "policy_forward: policy must have 2 outputs");
    double out[2];
    mlp_forward(params, obs, out);
    return Action{out[0], out[1]}.clamped();
}

std::vector<int> policy_layers(std::size_t obs_size, std::span<const int> hidden) {
    std::vector<int> ls{static_cast<int>(obs_size)};
    ls.insert(ls.end(), hidden.begin(), hidden.end());
    ls.push_back(2);
    return ls;
}

void quantize_f32(PolicyParams& params) {
    for (double& v : params.flat_params) v = static_cast<double>(static_cast<float>(v));
}

Action sffm_baseline_policy(const AgentState& robot, const ForceBreakdown& forces,
                            const BaselineGains& gains, const WorldConfig& world) {
    Action a;
    a.forward = gains.gain * forces.combined.dot(Vec2::from_angle(robot.heading));
    double target = 0.0;
    if (orientation_target(forces, gains.w_equality_dir, gains.w_cohesion_dir, &target))
        a.turn = gains.k_turn * wrap_angle(target - robot.heading) / world.omega_max;
    return a.clamped();
}

Action SffmPolicy::act(const Environment& env, const Observation&, Rng&) const {
    const SimConfig& c = env.config();
    const BaselineGains gains{c.sffm.baseline_gain, c.sffm.baseline_k_turn, c.sffm.sha.w_equality_dir,
                              c.sffm.sha.w_cohesion_dir};
    return sffm_baseline_policy(env.robot(), env.robot_forces(), gains, c.world);
}

Action RandomPolicy::act(const Environment&, const Observation&, Rng& rng) const {
    const double f = rng.uniform(-1.0, 1.0);
    const double t = rng.uniform(-1.0, 1.0);
    return {f, t};
}

NetworkPolicy::NetworkPolicy(PolicyParams params, std::string label)
    : params_(std::move(params)), label_(std::move(label)) {
    params_.validate();
    if (params_.output_size() != 2)
        throw Error(ErrorCode::InvalidArgument, "network policy must have 2 outputs");
}

Action NetworkPolicy::act(const Environment&, const Observation& obs, Rng&) const {
    return policy_forward(params_, obs);
}

std::string checkpoint_to_string(const Checkpoint& ckpt) {
    ckpt.params.validate();
    nlohmann::json h = {{"format", kCheckpointFormat},
                        {"layer_sizes", ckpt.params.layer_sizes},
                        {"activation", kActivationTag},
                        {"squash_output", ckpt.params.squash_output},
                        {"config_hash", ckpt.config_hash},
                        {"seed", ckpt.seed},
                        {"algo", ckpt.algo},
                        {"param_count", ckpt.params.flat_params.size()},
                        {"encoding", "base64 float32 little-endian"}};
    std::vector<std::uint8_t> bytes(ckpt.params.flat_params.size() * 4);
    for (std::size_t i = 0; i < ckpt.params.flat_params.size(); ++i) {
        const std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(ckpt.params.flat_params[i]));
        for (int k = 0; k < 4; ++k) bytes[4 * i + k] = static_cast<std::uint8_t>(u >> (8 * k));
    }
    return h.dump() + "\n" + base64_encode(bytes) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string header_line, block;
    if (!std::getline(in, header_line) || !std::getline(in, block))
        throw Error(ErrorCode::Io, "checkpoint: expected a header line and a parameter line");
    Checkpoint ckpt;
    try {
        const nlohmann::json h = nlohmann::json::parse(header_line);
        if (h.at("format").get<std::string>() != kCheckpointFormat)
            throw Error(ErrorCode::Io, "checkpoint: unsupported format");
        if (h.at("activation").get<std::string>() != kActivationTag)
            throw Error(ErrorCode::Io, "checkpoint: unsupported activation");
        ckpt.params.layer_sizes = h.at("layer_sizes").get<std::vector<int>>();
        ckpt.params.squash_output = h.value("squash_output", true);
        ckpt.config_hash = h.at("config_hash").get<std::string>();
        ckpt.seed = h.at("seed").get<std::uint64_t>();
        ckpt.algo = h.value("algo", "");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, std::string("checkpoint header: ") + e.what());
    }
    const std::vector<std::uint8_t> bytes = base64_decode(block);
    if (bytes.size() % 4 != 0) throw Error(ErrorCode::Io, "checkpoint: truncated parameter block");
    ckpt.params.flat_params.resize(bytes.size() / 4);
    for (std::size_t i = 0; i < ckpt.params.flat_params.size(); ++i) {
        std::uint32_t u = 0;
        for (int k = 0; k < 4; ++k) u |= static_cast<std::uint32_t>(bytes[4 * i + k]) << (8 * k);
        ckpt.params.flat_params[i] = static_cast<double>(std::bit_cast<float>(u));
    }
    try {
        ckpt.params.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::Io, std::string("checkpoint: ") + e.what());
    }
    return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const std::string text = checkpoint_to_string(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write checkpoint '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed for checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open checkpoint '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_string(ss.str());
}

std::unique_ptr<Policy> make_policy(const std::string& spec, const SimConfig& cfg) {
    if (spec == "sffm") return std::make_unique<SffmPolicy>();
    if (spec == "random") return std::make_unique<RandomPolicy>();
    Checkpoint ckpt = load_checkpoint(spec);
    const std::size_t obs = observation_size(cfg.spawn.n_shas);
    if (ckpt.params.input_size() != static_cast<int>(obs) || ckpt.params.output_size() != 2)
        throw Error(ErrorCode::Config, "checkpoint '" + spec + "' expects " +
                                           std::to_string(ckpt.params.input_size()) +
                                           " inputs but the configured observation has " +
                                           std::to_string(obs));
    return std::make_unique<NetworkPolicy>(std::move(ckpt.params), spec);
}

}  // namespace ssbl
