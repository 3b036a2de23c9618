/* C interface to the ssbl simulation, training and evaluation core.
 *
 * Every fallible call returns an ssbl_status; on failure a message is
 * available from ssbl_last_error() on the same thread until the next call.
 * Strings returned through char** are owned by the caller and released with
 * ssbl_string_free. Handles are not thread-safe; distinct handles may be
 * used from different threads. */
#ifndef SSBL_SSBL_H
#define SSBL_SSBL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SSBL_BUILDING_LIBRARY)
#    define SSBL_API __declspec(dllexport)
#  else
#    define SSBL_API __declspec(dllimport)
#  endif
#else
#  define SSBL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssbl_status {
    SSBL_OK = 0,
    SSBL_ERR_INVALID_ARGUMENT = 1,
    SSBL_ERR_CONFIG = 2,
    SSBL_ERR_IO = 3,
    SSBL_ERR_STATE = 4,
    SSBL_ERR_CHECK_FAILED = 5, /* a verification or property check did not pass */
    SSBL_ERR_CORRUPT = 6,      /* non-finite state or inconsistent data */
    SSBL_ERR_INTERNAL = 7
} ssbl_status;

typedef struct ssbl_config ssbl_config;
typedef struct ssbl_env ssbl_env;
typedef struct ssbl_policy ssbl_policy;

SSBL_API const char* ssbl_version(void);
SSBL_API const char* ssbl_status_name(ssbl_status status);
SSBL_API const char* ssbl_last_error(void);
SSBL_API void ssbl_string_free(char* s);

/* Configuration */
SSBL_API ssbl_status ssbl_config_default(ssbl_config** out);
SSBL_API ssbl_status ssbl_config_load(const char* path, ssbl_config** out);
SSBL_API ssbl_status ssbl_config_from_json(const char* json, ssbl_config** out);
/* Deep-merges a JSON object into the configuration and revalidates it. On
 * failure the configuration is unchanged. */
SSBL_API ssbl_status ssbl_config_patch(ssbl_config* cfg, const char* json_patch);
SSBL_API ssbl_status ssbl_config_to_json(const ssbl_config* cfg, char** out);
SSBL_API ssbl_status ssbl_config_hash(const ssbl_config* cfg, char** out);
SSBL_API ssbl_status ssbl_config_master_seed(const ssbl_config* cfg, uint64_t* out);
SSBL_API void ssbl_config_free(ssbl_config* cfg);

/* Environment. Observation buffers must hold ssbl_env_observation_size
 * doubles; pass NULL to skip the copy. */
SSBL_API ssbl_status ssbl_env_create(const ssbl_config* cfg, ssbl_env** out);
SSBL_API ssbl_status ssbl_env_observation_size(const ssbl_env* env, size_t* out);
SSBL_API ssbl_status ssbl_env_reset(ssbl_env* env, uint64_t seed, double* obs, size_t obs_len);
SSBL_API ssbl_status ssbl_env_step(ssbl_env* env, double forward, double turn, double* obs, size_t obs_len,
                                   double* reward, int* done, int* success);
SSBL_API void ssbl_env_free(ssbl_env* env);

/* Policies: "sffm", "random", or a checkpoint path. `seed` seeds the
 * policy's private random stream (used by "random"). */
SSBL_API ssbl_status ssbl_policy_load(const char* spec, const ssbl_config* cfg, uint64_t seed, ssbl_policy** out);
SSBL_API ssbl_status ssbl_policy_act(ssbl_policy* policy, const ssbl_env* env, double* forward, double* turn);
SSBL_API void ssbl_policy_free(ssbl_policy* policy);

/* Commands. Each writes its artifacts under out_dir and, when summary is
 * non-NULL, returns a JSON summary. */
SSBL_API ssbl_status ssbl_simulate(const ssbl_config* cfg, const char* policy, uint64_t seed, int episodes,
                                   const char* out_dir, char** summary);
SSBL_API ssbl_status ssbl_train(const ssbl_config* cfg, const char* out_dir, char** summary);
SSBL_API ssbl_status ssbl_eval_policy(const ssbl_config* cfg, const char* policy, uint64_t seed, int episodes,
                                      const char* out_dir, char** summary);
/* Returns SSBL_ERR_CHECK_FAILED (summary still filled) when a logged
 * reward does not match its recomputation. */
SSBL_API ssbl_status ssbl_eval_trajectories(const char* const* files, size_t count, const char* out_dir,
                                            char** summary);
SSBL_API ssbl_status ssbl_compare(const ssbl_config* cfg, const char* policy_a, const char* policy_b,
                                  uint64_t seed, int episodes, const char* out_dir, char** summary);
/* Returns SSBL_ERR_CHECK_FAILED (report still filled) when any check fails. */
SSBL_API ssbl_status ssbl_features_check(uint64_t seed, const char* out_dir, char** summary);

SSBL_API ssbl_status ssbl_relative_performance(double model, double baseline, double random, double* out);

#ifdef __cplusplus
}
#endif

#endif
