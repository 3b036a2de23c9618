#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "ssbl/error.hpp"
#include "ssbl/evaluation.hpp"
#include "ssbl/policy.hpp"
#include "ssbl/rng.hpp"
#include "ssbl/training.hpp"

using namespace ssbl;

namespace {

PolicyParams random_params(std::vector<int> layers, std::uint64_t seed, bool squash = true) {
    PolicyParams p = PolicyParams::zeros(std::move(layers), squash);
    Rng rng(seed);
    for (double& v : p.flat_params) v = rng.uniform(-0.6, 0.6);
    return p;
}

// Plain nested-loop evaluation with std::tanh, weights read from the
// documented input-major layout.
std::vector<double> naive_forward(const PolicyParams& p, std::vector<double> x) {
    std::size_t off = 0;
    for (std::size_t l = 1; l < p.layer_sizes.size(); ++l) {
        const int n_in = p.layer_sizes[l - 1], n_out = p.layer_sizes[l];
        std::vector<double> y(n_out, 0.0);
        for (int o = 0; o < n_out; ++o) {
            double z = p.flat_params[off + static_cast<std::size_t>(n_in) * n_out + o];
            for (int i = 0; i < n_in; ++i) z += x[i] * p.flat_params[off + static_cast<std::size_t>(i) * n_out + o];
            const bool last = l + 1 == p.layer_sizes.size();
            y[o] = (!last || p.squash_output) ? std::tanh(z) : z;
        }
        off += static_cast<std::size_t>(n_in) * n_out + n_out;
        x = std::move(y);
    }
    return x;
}

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

SimConfig tiny_cem() {
    SimConfig cfg;
    cfg.episode.max_steps = 40;
    cfg.train.hidden_layers = {4};
    cfg.train.population = 6;
    cfg.train.episodes_per_eval = 2;
    cfg.train.eval_episodes = 3;
    cfg.train.iterations = 2;
    return cfg;
}

}  // namespace

TEST_CASE("activation matches std::tanh") {
    for (double z = -30.0; z <= 30.0; z += 0.01) CHECK(std::abs(activation(z) - std::tanh(z)) < 1e-15);
    CHECK(activation(0.0) == 0.0);
}

TEST_CASE("mlp_forward: zero network gives a zero action") {
    const PolicyParams p = PolicyParams::zeros({22, 8, 8, 2});
    const Action a = policy_forward(p, std::vector<double>(22, 0.7));
    CHECK(a.forward == 0.0);
    CHECK(a.turn == 0.0);
}

TEST_CASE("mlp_forward: matches the independent implementation") {
    Rng rng(1);
    for (int trial = 0; trial < 30; ++trial) {
        const PolicyParams p = random_params({7, 9, 5, 3}, 100 + trial, trial % 2 == 0);
        std::vector<double> x(7), out(3);
        for (double& v : x) v = rng.uniform(-3, 3);
        mlp_forward(p, x, out);
        const std::vector<double> ref = naive_forward(p, x);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(out[k] - ref[k]) < 1e-12);
    }
}

TEST_CASE("mlp_forward: squashed outputs stay in [-1, 1]") {
    PolicyParams p = random_params({22, 16, 2}, 5);
    for (double& v : p.flat_params) v *= 40.0;
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(22);
        for (double& v : x) v = rng.uniform(-100, 100);
        const Action a = policy_forward(p, x);
        CHECK(std::abs(a.forward) <= 1.0);
        CHECK(std::abs(a.turn) <= 1.0);
    }
}

TEST_CASE("mlp_forward: dimension mismatch throws") {
    const PolicyParams p = PolicyParams::zeros({4, 3, 2});
    std::vector<double> out(2);
    CHECK_THROWS_AS(mlp_forward(p, std::vector<double>(5), out), Error);
}

TEST_CASE("mlp_backward matches central differences") {
    PolicyParams p = random_params({5, 6, 4, 2}, 9);
    Rng rng(3);
    std::vector<double> x(5);
    for (double& v : x) v = rng.uniform(-1, 1);
    const double w[2] = {0.7, -1.3};
    auto objective = [&](const PolicyParams& q) {
        std::vector<double> out(2);
        mlp_forward(q, x, out);
        return w[0] * out[0] + w[1] * out[1];
    };
    ForwardCache cache;
    std::vector<double> out(2), grad(p.flat_params.size(), 0.0);
    mlp_forward(p, x, out, &cache);
    mlp_backward(p, cache, std::vector<double>{w[0], w[1]}, grad);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double keep = p.flat_params[i];
        p.flat_params[i] = keep + 1e-6;
        const double up = objective(p);
        p.flat_params[i] = keep - 1e-6;
        const double down = objective(p);
        p.flat_params[i] = keep;
        CHECK(grad[i] == doctest::Approx((up - down) / 2e-6).epsilon(1e-6));
    }
}

TEST_CASE("sffm_baseline_policy") {
    const AgentState robot{0, Role::Robot, {5, 5}, {}, 0.0};
    ForceBreakdown f;
    f.cohesion = f.combined = {1.0, 0.0};
    f.cohesion_orientation = {1.0, 0.0};
    const Action a = sffm_baseline_policy(robot, f, BaselineGains{}, WorldConfig{});
    CHECK(a.forward > 0.0);
    CHECK(std::abs(a.turn) < 1e-12);
    const Action z = sffm_baseline_policy(robot, ForceBreakdown{}, BaselineGains{}, WorldConfig{});
    CHECK(z.forward == 0.0);
    CHECK(z.turn == 0.0);
}

TEST_CASE("checkpoint: round trip is bitwise") {
    Checkpoint c{random_params({22, 8, 2}, 4), "abc123", 99, "cem"};
    quantize_f32(c.params);
    const std::string path = temp_path("ssbl_unit_roundtrip.ckpt");
    save_checkpoint(path, c);
    const Checkpoint d = load_checkpoint(path);
    CHECK(d.params.flat_params == c.params.flat_params);
    CHECK(d.params.layer_sizes == c.params.layer_sizes);
    CHECK(d.config_hash == "abc123");
    CHECK(d.seed == 99);
    Rng rng(8);
    std::vector<double> x(22);
    for (double& v : x) v = rng.uniform(-2, 2);
    CHECK(policy_forward(c.params, x) == policy_forward(d.params, x));
    std::filesystem::remove(path);
}

TEST_CASE("checkpoint: malformed input is rejected") {
    Checkpoint c{PolicyParams::zeros({22, 3, 2}), "h", 1, "cem"};
    const std::string text = checkpoint_to_string(c);
    CHECK_THROWS_AS(checkpoint_from_string("not json\n"), Error);
    CHECK_THROWS_AS(checkpoint_from_string(text.substr(0, text.size() - 6)), Error);
    CHECK_THROWS_AS(load_checkpoint(temp_path("ssbl_does_not_exist.ckpt")), Error);
    try {
        load_checkpoint(temp_path("ssbl_does_not_exist.ckpt"));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
}

TEST_CASE("make_policy: specs and dimension checks") {
    SimConfig cfg;
    CHECK(make_policy("sffm", cfg)->label() == "sffm");
    CHECK(make_policy("random", cfg)->label() == "random");
    const std::string path = temp_path("ssbl_unit_wrong_dims.ckpt");
    save_checkpoint(path, {PolicyParams::zeros({10, 3, 2}), "h", 1, "cem"});
    try {
        make_policy(path, cfg);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
    }
    std::filesystem::remove(path);
}

TEST_CASE("relative_performance: table rows and anchors") {
    CHECK(std::abs(relative_performance(-0.544, -0.256, -1.684) - 100.0 * 1.14 / 1.428) < 1e-12);
    CHECK(relative_performance(-0.256, -0.256, -1.684) == doctest::Approx(100.0));
    CHECK(relative_performance(-1.684, -0.256, -1.684) == doctest::Approx(0.0));
    CHECK_THROWS_AS(relative_performance(1.0, 2.0, 2.0), Error);
}

TEST_CASE("ewma") {
    const std::vector<double> s = ewma({1.0, 3.0, 3.0}, 0.5);
    CHECK(s == std::vector<double>{1.0, 2.0, 2.5});
    CHECK(ewma({}, 0.9).empty());
}

TEST_CASE("train_cem: zero iterations returns the initial mean") {
    SimConfig cfg = tiny_cem();
    cfg.train.iterations = 0;
    const TrainResult r = train_cem(cfg);
    for (double v : r.params.flat_params) CHECK(v == 0.0);
    CHECK(r.report.per_iteration.empty());
}

TEST_CASE("train_cem: report shape and determinism") {
    const SimConfig cfg = tiny_cem();
    const TrainResult a = train_cem(cfg), b = train_cem(cfg);
    CHECK(a.report.per_iteration.size() == 2);
    CHECK(a.report.smoothed_mean_return.size() == 2);
    CHECK(a.params.flat_params == b.params.flat_params);
    CHECK(to_json(a.report, false) == to_json(b.report, false));
    CHECK(a.report.eval_seeds.size() == 3);
    for (std::uint64_t s : a.report.eval_seeds) CHECK(s % 2 == 1);
    for (std::size_t i = 1; i < a.report.per_iteration.size(); ++i)
        CHECK(a.report.per_iteration[i].elite_mean >= a.report.per_iteration[i - 1].elite_mean);
}
