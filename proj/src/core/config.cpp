#include "ssbl/config.hpp"

#include <cstdio>
#include <fstream>

#include "ssbl/error.hpp"

namespace ssbl {

using nlohmann::json;

void EpisodeConfig::validate() const {
    if (!(success_hold > 0 && max_steps > success_hold))
        throw Error(ErrorCode::Config, "episode: require max_steps > success_hold > 0");
    if (!(success_band > 0.0)) throw Error(ErrorCode::Config, "episode: success_band must be > 0");
    if (!(success_angle > 0.0 && success_angle <= std::numbers::pi))
        throw Error(ErrorCode::Config, "episode: success_angle must lie in (0, pi]");
}

void SffmConfig::validate() const {
    if (!(sha.gain_force >= 0.0 && sha.k_turn >= 0.0 && sha.force_deadband >= 0.0 &&
          sha.w_equality_dir >= 0.0 && sha.w_cohesion_dir >= 0.0))
        throw Error(ErrorCode::Config, "sffm: SHA controller gains must be >= 0");
    if (!(baseline_gain >= 0.0 && baseline_k_turn >= 0.0))
        throw Error(ErrorCode::Config, "sffm: baseline gains must be >= 0");
    if (!(ospace_min_radius > 0.0))
        throw Error(ErrorCode::Config, "sffm: ospace_min_radius must be > 0");
}

void TrainConfig::validate() const {
    if (iterations < 0) throw Error(ErrorCode::Config, "train: iterations must be >= 0");
    for (int h : hidden_layers)
        if (h <= 0) throw Error(ErrorCode::Config, "train: hidden layer sizes must be > 0");
    if (episodes_per_eval < 1 || eval_episodes < 1)
        throw Error(ErrorCode::Config, "train: episode counts must be >= 1");
    if (!(smoothing >= 0.0 && smoothing < 1.0))
        throw Error(ErrorCode::Config, "train: smoothing must lie in [0, 1)");
    if (population < 2) throw Error(ErrorCode::Config, "train: population must be >= 2");
    if (!(elite_fraction > 0.0 && elite_fraction < 1.0))
        throw Error(ErrorCode::Config, "train: elite_fraction must lie in (0, 1)");
    if (!(init_noise > 0.0 && noise_decay > 0.0 && noise_decay <= 1.0))
        throw Error(ErrorCode::Config, "train: require init_noise > 0 and noise_decay in (0, 1]");
    if (!(clip_ratio > 0.0)) throw Error(ErrorCode::Config, "train: clip_ratio must be > 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::Config, "train: gamma must lie in (0, 1]");
    if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
        throw Error(ErrorCode::Config, "train: gae_lambda must lie in [0, 1]");
    if (epochs < 1 || minibatch < 1) throw Error(ErrorCode::Config, "train: epochs/minibatch must be >= 1");
    if (!(step_size > 0.0 && value_step_size > 0.0))
        throw Error(ErrorCode::Config, "train: step sizes must be > 0");
}

const char* algo_name(TrainAlgo algo) { return algo == TrainAlgo::Ppo ? "ppo" : "cem"; }

TrainAlgo parse_algo(const std::string& name) {
    if (name == "cem") return TrainAlgo::Cem;
    if (name == "ppo") return TrainAlgo::Ppo;
    throw Error(ErrorCode::Config, "unknown training algorithm '" + name + "' (expected cem|ppo)");
}

void SimConfig::validate() const {
    world.validate();
    proxemics.validate();
    spawn.validate(proxemics);
    sffm.validate();
    reward_weights.validate();
    episode.validate();
    train.validate();
}

json to_json(const SimConfig& c) {
    json j;
    j["world"] = {{"floor_side", c.world.floor_side}, {"dt", c.world.dt},
                  {"v_max", c.world.v_max},           {"a_max", c.world.a_max},
                  {"omega_max", c.world.omega_max},   {"damping", c.world.damping}};
    j["proxemics"] = {{"d_personal", c.proxemics.d_personal},
                      {"d_social", c.proxemics.d_social},
                      {"d_public", c.proxemics.d_public}};
    j["spawn"] = {{"n_shas", c.spawn.n_shas},
                  {"separation", c.spawn.separation},
                  {"center_region", c.spawn.center_region},
                  {"robot_min_dist", c.spawn.robot_min_dist},
                  {"robot_max_dist", c.spawn.robot_max_dist}};
    j["sffm"] = {{"gain_force", c.sffm.sha.gain_force},
                 {"k_turn", c.sffm.sha.k_turn},
                 {"force_deadband", c.sffm.sha.force_deadband},
                 {"w_equality_dir", c.sffm.sha.w_equality_dir},
                 {"w_cohesion_dir", c.sffm.sha.w_cohesion_dir},
                 {"baseline_gain", c.sffm.baseline_gain},
                 {"baseline_k_turn", c.sffm.baseline_k_turn},
                 {"ospace_min_radius", c.sffm.ospace_min_radius}};
    const RewardWeights& w = c.reward_weights;
    j["reward_weights"] = {{"w_e", w.w_e}, {"w_a", w.w_a}, {"w1", w.w1},
                           {"w2", w.w2},   {"w3", w.w3},   {"w4", w.w4},
                           {"w5", w.w5},   {"success_bonus", w.success_bonus},
                           {"r1_sign", w.r1_sign}, {"r5_sign", w.r5_sign}};
    j["episode"] = {{"max_steps", c.episode.max_steps},
                    {"success_band", c.episode.success_band},
                    {"success_angle", c.episode.success_angle},
                    {"success_hold", c.episode.success_hold}};
    const TrainConfig& t = c.train;
    j["train"] = {{"algo", algo_name(t.algo)},
                  {"iterations", t.iterations},
                  {"hidden_layers", t.hidden_layers},
                  {"master_seed", t.master_seed},
                  {"episodes_per_eval", t.episodes_per_eval},
                  {"eval_episodes", t.eval_episodes},
                  {"smoothing", t.smoothing},
                  {"population", t.population},
                  {"elite_fraction", t.elite_fraction},
                  {"init_noise", t.init_noise},
                  {"noise_decay", t.noise_decay},
                  {"clip_ratio", t.clip_ratio},
                  {"gamma", t.gamma},
                  {"gae_lambda", t.gae_lambda},
                  {"epochs", t.epochs},
                  {"minibatch", t.minibatch},
                  {"step_size", t.step_size},
                  {"value_step_size", t.value_step_size},
                  {"init_log_std", t.init_log_std}};
    return j;
}

namespace {

// Reads section[key] into out when present; type errors become Config errors.
template <class T>
void read(const json& section, const char* sec_name, const char* key, T& out) {
    auto it = section.find(key);
    if (it == section.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string(sec_name) + "." + key + ": " + e.what());
    }
}

const json& section(const json& root, const char* name, const json& empty) {
    auto it = root.find(name);
    if (it == root.end()) return empty;
    if (!it->is_object()) throw Error(ErrorCode::Config, std::string("section '") + name + "' must be an object");
    return *it;
}

void reject_unknown(const json& actual, const json& known, const std::string& where) {
    for (auto it = actual.begin(); it != actual.end(); ++it)
        if (!known.contains(it.key()))
            throw Error(ErrorCode::Config, "unknown key '" + it.key() + "' in " + where);
}

}  // namespace

SimConfig config_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::Config, "config root must be a JSON object");
    SimConfig c;
    const json known = to_json(c);
    reject_unknown(j, known, "config root");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it->is_object()) reject_unknown(*it, known[it.key()], "section '" + it.key() + "'");

    const json empty = json::object();
    const json& w = section(j, "world", empty);
    read(w, "world", "floor_side", c.world.floor_side);
    read(w, "world", "dt", c.world.dt);
    read(w, "world", "v_max", c.world.v_max);
    read(w, "world", "a_max", c.world.a_max);
    read(w, "world", "omega_max", c.world.omega_max);
    read(w, "world", "damping", c.world.damping);

    const json& p = section(j, "proxemics", empty);
    read(p, "proxemics", "d_personal", c.proxemics.d_personal);
    read(p, "proxemics", "d_social", c.proxemics.d_social);
    read(p, "proxemics", "d_public", c.proxemics.d_public);

    const json& s = section(j, "spawn", empty);
    read(s, "spawn", "n_shas", c.spawn.n_shas);
    read(s, "spawn", "separation", c.spawn.separation);
    read(s, "spawn", "center_region", c.spawn.center_region);
    read(s, "spawn", "robot_min_dist", c.spawn.robot_min_dist);
    read(s, "spawn", "robot_max_dist", c.spawn.robot_max_dist);

    const json& f = section(j, "sffm", empty);
    read(f, "sffm", "gain_force", c.sffm.sha.gain_force);
    read(f, "sffm", "k_turn", c.sffm.sha.k_turn);
    read(f, "sffm", "force_deadband", c.sffm.sha.force_deadband);
    read(f, "sffm", "w_equality_dir", c.sffm.sha.w_equality_dir);
    read(f, "sffm", "w_cohesion_dir", c.sffm.sha.w_cohesion_dir);
    read(f, "sffm", "baseline_gain", c.sffm.baseline_gain);
    read(f, "sffm", "baseline_k_turn", c.sffm.baseline_k_turn);
    read(f, "sffm", "ospace_min_radius", c.sffm.ospace_min_radius);

    const json& r = section(j, "reward_weights", empty);
    RewardWeights& rw = c.reward_weights;
    read(r, "reward_weights", "w_e", rw.w_e);
    read(r, "reward_weights", "w_a", rw.w_a);
    read(r, "reward_weights", "w1", rw.w1);
    read(r, "reward_weights", "w2", rw.w2);
    read(r, "reward_weights", "w3", rw.w3);
    read(r, "reward_weights", "w4", rw.w4);
    read(r, "reward_weights", "w5", rw.w5);
    read(r, "reward_weights", "success_bonus", rw.success_bonus);
    read(r, "reward_weights", "r1_sign", rw.r1_sign);
    read(r, "reward_weights", "r5_sign", rw.r5_sign);

    const json& e = section(j, "episode", empty);
    read(e, "episode", "max_steps", c.episode.max_steps);
    read(e, "episode", "success_band", c.episode.success_band);
    read(e, "episode", "success_angle", c.episode.success_angle);
    read(e, "episode", "success_hold", c.episode.success_hold);

    const json& t = section(j, "train", empty);
    TrainConfig& tc = c.train;
    std::string algo = algo_name(tc.algo);
    read(t, "train", "algo", algo);
    tc.algo = parse_algo(algo);
    read(t, "train", "iterations", tc.iterations);
    read(t, "train", "hidden_layers", tc.hidden_layers);
    read(t, "train", "master_seed", tc.master_seed);
    read(t, "train", "episodes_per_eval", tc.episodes_per_eval);
    read(t, "train", "eval_episodes", tc.eval_episodes);
    read(t, "train", "smoothing", tc.smoothing);
    read(t, "train", "population", tc.population);
    read(t, "train", "elite_fraction", tc.elite_fraction);
    read(t, "train", "init_noise", tc.init_noise);
    read(t, "train", "noise_decay", tc.noise_decay);
    read(t, "train", "clip_ratio", tc.clip_ratio);
    read(t, "train", "gamma", tc.gamma);
    read(t, "train", "gae_lambda", tc.gae_lambda);
    read(t, "train", "epochs", tc.epochs);
    read(t, "train", "minibatch", tc.minibatch);
    read(t, "train", "step_size", tc.step_size);
    read(t, "train", "value_step_size", tc.value_step_size);
    read(t, "train", "init_log_std", tc.init_log_std);

    c.validate();
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, "config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const SimConfig& cfg) { return fnv1a_hex(to_json(cfg).dump()); }

}  // namespace ssbl
