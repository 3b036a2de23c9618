#include "ssbl/ssbl.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "ssbl/commands.hpp"
#include "ssbl/config.hpp"
#include "ssbl/environment.hpp"
#include "ssbl/error.hpp"
#include "ssbl/evaluation.hpp"
#include "ssbl/policy.hpp"
#include "ssbl/rng.hpp"

struct ssbl_config {
    ssbl::SimConfig cfg;
};

struct ssbl_env {
    ssbl::Environment env;
};

struct ssbl_policy {
    std::unique_ptr<ssbl::Policy> policy;
    ssbl::Rng rng;
};

namespace {

thread_local std::string g_last_error;

ssbl_status status_of(ssbl::ErrorCode code) {
    switch (code) {
        case ssbl::ErrorCode::InvalidArgument: return SSBL_ERR_INVALID_ARGUMENT;
        case ssbl::ErrorCode::Config: return SSBL_ERR_CONFIG;
        case ssbl::ErrorCode::Io: return SSBL_ERR_IO;
        case ssbl::ErrorCode::State: return SSBL_ERR_STATE;
        case ssbl::ErrorCode::CheckFailed: return SSBL_ERR_CHECK_FAILED;
        case ssbl::ErrorCode::Corrupt: return SSBL_ERR_CORRUPT;
    }
    return SSBL_ERR_INTERNAL;
}

ssbl_status fail(ssbl_status s, std::string msg) {
    g_last_error = std::move(msg);
    return s;
}

template <class F>
ssbl_status guarded(F&& body) {
    g_last_error.clear();
    try {
        return body();
    } catch (const ssbl::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(SSBL_ERR_CONFIG, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SSBL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SSBL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SSBL_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void put_json(char** out, const nlohmann::json& j) {
    if (out) *out = dup_string(j.dump(2));
}

#define SSBL_REQUIRE(cond, what) \
    if (!(cond)) return fail(SSBL_ERR_INVALID_ARGUMENT, what)

ssbl_status check_obs_buffer(const ssbl_env* env, const double* dst, std::size_t len) {
    const std::size_t need = ssbl::observation_size(env->env.config().spawn.n_shas);
    if (dst && len < need)
        return fail(SSBL_ERR_INVALID_ARGUMENT,
                    "observation buffer holds " + std::to_string(len) + " doubles, need " + std::to_string(need));
    return SSBL_OK;
}

void copy_obs(const ssbl::Observation& obs, double* dst) {
    if (dst) std::copy(obs.begin(), obs.end(), dst);
}

}  // namespace

extern "C" {

const char* ssbl_version(void) { return "0.1.0"; }

const char* ssbl_status_name(ssbl_status status) {
    switch (status) {
        case SSBL_OK: return "ok";
        case SSBL_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case SSBL_ERR_CONFIG: return "config";
        case SSBL_ERR_IO: return "io";
        case SSBL_ERR_STATE: return "state";
        case SSBL_ERR_CHECK_FAILED: return "check_failed";
        case SSBL_ERR_CORRUPT: return "corrupt";
        case SSBL_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* ssbl_last_error(void) { return g_last_error.c_str(); }

void ssbl_string_free(char* s) { std::free(s); }

ssbl_status ssbl_config_default(ssbl_config** out) {
    return guarded([&] {
        SSBL_REQUIRE(out, "out is NULL");
        *out = new ssbl_config{ssbl::SimConfig{}};
        return SSBL_OK;
    });
}

ssbl_status ssbl_config_load(const char* path, ssbl_config** out) {
    return guarded([&] {
        SSBL_REQUIRE(path && out, "path or out is NULL");
        *out = new ssbl_config{ssbl::load_config(path)};
        return SSBL_OK;
    });
}

ssbl_status ssbl_config_from_json(const char* json, ssbl_config** out) {
    return guarded([&] {
        SSBL_REQUIRE(json && out, "json or out is NULL");
        *out = new ssbl_config{ssbl::config_from_json(nlohmann::json::parse(json))};
        return SSBL_OK;
    });
}

ssbl_status ssbl_config_patch(ssbl_config* cfg, const char* json_patch) {
    return guarded([&] {
        SSBL_REQUIRE(cfg && json_patch, "cfg or patch is NULL");
        const nlohmann::json patch = nlohmann::json::parse(json_patch);
        if (!patch.is_object()) return fail(SSBL_ERR_CONFIG, "config patch must be a JSON object");
        nlohmann::json merged = ssbl::to_json(cfg->cfg);
        merged.merge_patch(patch);
        cfg->cfg = ssbl::config_from_json(merged);
        return SSBL_OK;
    });
}

ssbl_status ssbl_config_to_json(const ssbl_config* cfg, char** out) {
    return guarded([&] {
        SSBL_REQUIRE(cfg && out, "cfg or out is NULL");
        put_json(out, ssbl::to_json(cfg->cfg));
        return SSBL_OK;
    });
}

ssbl_status ssbl_config_hash(const ssbl_config* cfg, char** out) {
    return guarded([&] {
        SSBL_REQUIRE(cfg && out, "cfg or out is NULL");
        *out = dup_string(ssbl::config_hash(cfg->cfg));
        return SSBL_OK;
    });
}

ssbl_status ssbl_config_master_seed(const ssbl_config* cfg, uint64_t* out) {
    return guarded([&] {
        SSBL_REQUIRE(cfg && out, "cfg or out is NULL");
        *out = cfg->cfg.train.master_seed;
        return SSBL_OK;
    });
}

void ssbl_config_free(ssbl_config* cfg) { delete cfg; }

ssbl_status ssbl_env_create(const ssbl_config* cfg, ssbl_env** out) {
    return guarded([&] {
        SSBL_REQUIRE(cfg && out, "cfg or out is NULL");
        *out = new ssbl_env{ssbl::Environment(cfg->cfg)};
        return SSBL_OK;
    });
}

ssbl_status ssbl_env_observation_size(const ssbl_env* env, size_t* out) {
    return guarded([&] {
        SSBL_REQUIRE(env && out, "env or out is NULL");
        *out = ssbl::observation_size(env->env.config().spawn.n_shas);
        return SSBL_OK;
    });
}

ssbl_status ssbl_env_reset(ssbl_env* env, uint64_t seed, double* obs, size_t obs_len) {
    return guarded([&] {
        SSBL_REQUIRE(env, "env is NULL");
        if (const ssbl_status s = check_obs_buffer(env, obs, obs_len); s != SSBL_OK) return s;
        copy_obs(env->env.reset(seed), obs);
        return SSBL_OK;
    });
}

ssbl_status ssbl_env_step(ssbl_env* env, double forward, double turn, double* obs, size_t obs_len, double* reward,
                          int* done, int* success) {
    return guarded([&] {
        SSBL_REQUIRE(env, "env is NULL");
        if (const ssbl_status s = check_obs_buffer(env, obs, obs_len); s != SSBL_OK) return s;
        const ssbl::StepResult r = env->env.step({forward, turn});
        if (reward) *reward = r.reward;
        if (done) *done = r.done ? 1 : 0;
        if (success) *success = r.success ? 1 : 0;
        copy_obs(r.observation, obs);
        return SSBL_OK;
    });
}

void ssbl_env_free(ssbl_env* env) { delete env; }

ssbl_status ssbl_policy_load(const char* spec, const ssbl_config* cfg, uint64_t seed, ssbl_policy** out) {
    return guarded([&] {
        SSBL_REQUIRE(spec && cfg && out, "spec, cfg or out is NULL");
        *out = new ssbl_policy{ssbl::make_policy(spec, cfg->cfg), ssbl::Rng(seed)};
        return SSBL_OK;
    });
}

ssbl_status ssbl_policy_act(ssbl_policy* policy, const ssbl_env* env, double* forward, double* turn) {
    return guarded([&] {
        SSBL_REQUIRE(policy && env && forward && turn, "policy, env, forward or turn is NULL");
        if (!env->env.started()) return fail(SSBL_ERR_STATE, "policy_act: environment not reset");
        const ssbl::Action a = policy->policy->act(env->env, env->env.observation(), policy->rng);
        *forward = a.forward;
        *turn = a.turn;
        return SSBL_OK;
    });
}

void ssbl_policy_free(ssbl_policy* policy) { delete policy; }

ssbl_status ssbl_simulate(const ssbl_config* cfg, const char* policy, uint64_t seed, int episodes, const char* out_dir,
                          char** summary) {
    return guarded([&] {
        SSBL_REQUIRE(cfg && policy && out_dir, "cfg, policy or out_dir is NULL");
        put_json(summary, ssbl::run_simulate(cfg->cfg, policy, seed, episodes, out_dir));
        return SSBL_OK;
    });
}

ssbl_status ssbl_train(const ssbl_config* cfg, const char* out_dir, char** summary) {
    return guarded([&] {
        SSBL_REQUIRE(cfg && out_dir, "cfg or out_dir is NULL");
        put_json(summary, ssbl::run_train(cfg->cfg, out_dir));
        return SSBL_OK;
    });
}

ssbl_status ssbl_eval_policy(const ssbl_config* cfg, const char* policy, uint64_t seed, int episodes,
                             const char* out_dir, char** summary) {
    return guarded([&] {
        SSBL_REQUIRE(cfg && policy && out_dir, "cfg, policy or out_dir is NULL");
        put_json(summary, ssbl::run_eval_policy(cfg->cfg, policy, seed, episodes, out_dir));
        return SSBL_OK;
    });
}

ssbl_status ssbl_eval_trajectories(const char* const* files, size_t count, const char* out_dir, char** summary) {
    return guarded([&] {
        SSBL_REQUIRE(files && out_dir, "files or out_dir is NULL");
        std::vector<std::string> paths;
        for (size_t i = 0; i < count; ++i) {
            SSBL_REQUIRE(files[i], "file path is NULL");
            paths.emplace_back(files[i]);
        }
        const nlohmann::json report = ssbl::run_eval_trajectories(paths, out_dir);
        put_json(summary, report);
        if (!report.at("rewards_verified").get<bool>())
            return fail(SSBL_ERR_CHECK_FAILED, "logged rewards differ from their recomputation");
        return SSBL_OK;
    });
}

ssbl_status ssbl_compare(const ssbl_config* cfg, const char* policy_a, const char* policy_b, uint64_t seed,
                         int episodes, const char* out_dir, char** summary) {
    return guarded([&] {
        SSBL_REQUIRE(cfg && policy_a && policy_b && out_dir, "cfg, policies or out_dir is NULL");
        put_json(summary, ssbl::run_compare(cfg->cfg, policy_a, policy_b, seed, episodes, out_dir));
        return SSBL_OK;
    });
}

ssbl_status ssbl_features_check(uint64_t seed, const char* out_dir, char** summary) {
    return guarded([&] {
        SSBL_REQUIRE(out_dir, "out_dir is NULL");
        const nlohmann::json report = ssbl::run_features_check(seed, out_dir);
        put_json(summary, report);
        if (!report.at("passed").get<bool>()) return fail(SSBL_ERR_CHECK_FAILED, "feature checks failed");
        return SSBL_OK;
    });
}

ssbl_status ssbl_relative_performance(double model, double baseline, double random, double* out) {
    return guarded([&] {
        SSBL_REQUIRE(out, "out is NULL");
        *out = ssbl::relative_performance(model, baseline, random);
        return SSBL_OK;
    });
}

}  // extern "C"
