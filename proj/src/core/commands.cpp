#include "ssbl/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ssbl/error.hpp"
#include "ssbl/evaluation.hpp"
#include "ssbl/policy.hpp"
#include "ssbl/rollout.hpp"
#include "ssbl/saev.hpp"
#include "ssbl/training.hpp"
#include "ssbl/trajectory_io.hpp"

namespace ssbl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void require_episodes(int episodes) {
    if (episodes < 1) throw Error(ErrorCode::InvalidArgument, "episodes must be >= 1");
}

std::string episode_file(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "episode_%03zu.jsonl", i);
    return buf;
}

}  // namespace

std::vector<std::uint64_t> command_seeds(std::uint64_t seed, int episodes) {
    return evaluation_seeds(seed, episodes);
}

void write_text_file(const std::string& path, const std::string& text) {
    const fs::path p(path);
    if (p.has_parent_path()) ensure_dir(p.parent_path().string());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

json run_simulate(const SimConfig& cfg, const std::string& policy, std::uint64_t seed, int episodes,
                  const std::string& out_dir) {
    require_episodes(episodes);
    const std::unique_ptr<Policy> pol = make_policy(policy, cfg);
    ensure_dir(out_dir);
    const std::vector<std::uint64_t> seeds = command_seeds(seed, episodes);
    std::vector<json> entries(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        const EpisodeOutcome o = run_episode(cfg, *pol, seeds[i], true, static_cast<int>(i));
        write_trajectory(join(out_dir, episode_file(i)), o.log);
        entries[i] = {{"file", episode_file(i)},
                      {"episode_index", i},
                      {"seed", seeds[i]},
                      {"steps", o.steps},
                      {"success", o.success},
                      {"return", o.total_return}};
    });
    const json manifest = {{"config_hash", config_hash(cfg)},
                           {"seed", seed},
                           {"policy", pol->label()},
                           {"episodes", entries}};
    write_text_file(join(out_dir, "manifest.json"), manifest.dump(2) + "\n");
    return manifest;
}

json run_train(const SimConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const TrainResult r = train(cfg);
    const Checkpoint ckpt{r.params, r.report.config_hash, r.report.master_seed, r.report.algo};
    save_checkpoint(join(out_dir, "policy.ckpt"), ckpt);
    write_text_file(join(out_dir, "train_report.json"), to_json(r.report, false).dump(2) + "\n");
    json summary = to_json(r.report, true);
    summary["checkpoint"] = join(out_dir, "policy.ckpt");
    return summary;
}

json run_eval_policy(const SimConfig& cfg, const std::string& policy, std::uint64_t seed, int episodes,
                     const std::string& out_dir) {
    require_episodes(episodes);
    const std::unique_ptr<Policy> pol = make_policy(policy, cfg);
    const std::vector<std::uint64_t> seeds = command_seeds(seed, episodes);
    const PolicyEvaluation ev = evaluate_policy(cfg, *pol, seeds);
    json per = json::array();
    for (const EpisodeMetrics& m : ev.per_episode) per.push_back(to_json(m));
    const json report = {{"config_hash", config_hash(cfg)}, {"seed", seed},          {"seeds", seeds},
                         {"policy", ev.label},              {"metrics", to_json(ev.metrics)}, {"episodes", per}};
    write_text_file(join(out_dir, "eval.json"), report.dump(2) + "\n");
    return report;
}

json run_eval_trajectories(const std::vector<std::string>& files, const std::string& out_dir) {
    if (files.empty()) throw Error(ErrorCode::InvalidArgument, "eval: no trajectory files given");
    std::vector<EpisodeMetrics> per(files.size());
    json episodes = json::array();
    bool verified = true;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const TrajectoryLog log = read_trajectory(files[i]);
        per[i] = episode_metrics(log);
        const int mismatch = first_reward_mismatch(log);
        verified = verified && mismatch == 0;
        json e = to_json(per[i]);
        e["file"] = files[i];
        e["config_hash"] = log.header.config_hash;
        e["policy"] = log.header.policy;
        e["first_reward_mismatch"] = mismatch;
        episodes.push_back(std::move(e));
    }
    const json report = {{"metrics", to_json(aggregate(per))}, {"rewards_verified", verified}, {"episodes", episodes}};
    write_text_file(join(out_dir, "eval.json"), report.dump(2) + "\n");
    return report;
}

json run_compare(const SimConfig& cfg, const std::string& policy_a, const std::string& policy_b, std::uint64_t seed,
                 int episodes, const std::string& out_dir) {
    require_episodes(episodes);
    const std::unique_ptr<Policy> a = make_policy(policy_a, cfg);
    const std::unique_ptr<Policy> b = make_policy(policy_b, cfg);
    const CompareReport r = compare_policies(cfg, *a, *b, command_seeds(seed, episodes));
    json report = to_json(r);
    report["seed"] = seed;
    write_text_file(join(out_dir, "compare.json"), report.dump(2) + "\n");
    write_text_file(join(out_dir, "compare.csv"), compare_csv(r));
    return report;
}

json run_features_check(std::uint64_t seed, const std::string& out_dir) {
    const json report = features_check_report(seed);
    write_text_file(join(out_dir, "features_check.json"), report.dump(2) + "\n");
    return report;
}

}  // namespace ssbl
