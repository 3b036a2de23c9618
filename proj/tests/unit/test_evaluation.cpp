#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ssbl/commands.hpp"
#include "ssbl/error.hpp"
#include "ssbl/evaluation.hpp"
#include "ssbl/rollout.hpp"
#include "ssbl/trajectory_io.hpp"

using namespace ssbl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const char* name) {
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("seeds: training and evaluation sets are disjoint") {
    for (std::uint64_t i = 0; i < 200; ++i) {
        CHECK(training_seed(3, i) % 2 == 0);
        CHECK(evaluation_seed(3, i) % 2 == 1);
    }
    CHECK(evaluation_seeds(3, 5).size() == 5);
}

TEST_CASE("trajectory logs round-trip and recompute bit-exactly") {
    const SimConfig cfg;
    const auto pol = make_policy("random", cfg);
    const EpisodeOutcome o = run_episode(cfg, *pol, 17, true);
    const fs::path path = scratch("ssbl_unit_traj.jsonl");
    write_trajectory(path.string(), o.log);
    const TrajectoryLog back = read_trajectory(path.string());
    CHECK(back.header.seed == 17);
    CHECK(back.header.config_hash == config_hash(cfg));
    REQUIRE(back.transitions.size() == o.log.transitions.size());
    for (std::size_t i = 0; i < back.transitions.size(); ++i) {
        CHECK(back.transitions[i].states == o.log.transitions[i].states);
        CHECK(back.transitions[i].breakdown == o.log.transitions[i].breakdown);
    }
    CHECK(first_reward_mismatch(back) == 0);
    CHECK(episode_metrics(back).total_return == doctest::Approx(o.total_return).epsilon(1e-12));

    TrajectoryLog tampered = back;
    tampered.transitions[3].breakdown.r1 += 1e-9;
    CHECK(first_reward_mismatch(tampered) == 4);
    fs::remove(path);
}

TEST_CASE("parse_trajectory reports the failing line") {
    const SimConfig cfg;
    const auto pol = make_policy("sffm", cfg);
    const EpisodeOutcome o = run_episode(cfg, *pol, 3, true);
    const fs::path path = scratch("ssbl_unit_bad.jsonl");
    write_trajectory(path.string(), o.log);
    std::string text = slurp(path);
    const std::size_t second = text.find('\n', text.find('\n') + 1);
    text.insert(second + 1, "{broken\n");
    std::istringstream in(text);
    try {
        parse_trajectory(in, "bad.jsonl");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
        CHECK(std::string(e.what()).find("bad.jsonl:3") != std::string::npos);
    }
    fs::remove(path);
}

TEST_CASE("metrics: violations, displacement and formation error from logs") {
    const SimConfig cfg;
    const auto pol = make_policy("sffm", cfg);
    TrajectoryLog log = run_episode(cfg, *pol, 21, true).log;
    const EpisodeMetrics a = episode_metrics(log), b = episode_metrics(log);
    CHECK(a.total_return == b.total_return);
    CHECK(a.sha_total_displacement == b.sha_total_displacement);

    // Freeze the SHAs and park the robot far away: nothing to count.
    for (Transition& t : log.transitions) {
        t.states = log.header.initial;
        t.states[0].position = {0.0, 0.0};
    }
    const EpisodeMetrics still = episode_metrics(log);
    CHECK(still.personal_violation_steps == 0);
    CHECK(still.sha_total_displacement == 0.0);
    CHECK(still.path_length == doctest::Approx((log.header.initial[0].position).norm()));
}

TEST_CASE("aggregate: means and success rate") {
    EpisodeMetrics x, y;
    x.success = true;
    x.total_return = 2.0;
    x.time_to_join = 10;
    y.total_return = 4.0;
    y.time_to_join = 500;
    const SocialMetrics m = aggregate({x, y});
    CHECK(m.episodes == 2);
    CHECK(m.success_rate == 0.5);
    CHECK(m.mean_return == 3.0);
    CHECK(m.time_to_join == 255.0);
}

TEST_CASE("compare: identical policies have zero paired deltas and fixed anchors") {
    const SimConfig cfg;
    const auto a = make_policy("sffm", cfg);
    const std::vector<std::uint64_t> seeds = evaluation_seeds(1, 6);
    const CompareReport r = compare_policies(cfg, *a, *a, seeds);
    for (const auto& d : to_json(r).at("paired_deltas_b_minus_a"))
        for (const auto& [k, v] : d.items())
            if (k != "seed") CHECK(v.get<double>() == 0.0);
    CHECK(r.relative_a == doctest::Approx(100.0));
    const double rel_random = relative_performance(r.random.metrics.mean_return, r.baseline.metrics.mean_return,
                                                   r.random.metrics.mean_return);
    CHECK(rel_random == doctest::Approx(0.0));
    CHECK(r.a.per_episode.size() == seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        CHECK(r.a.per_episode[i].seed == seeds[i]);
        CHECK(r.random.per_episode[i].seed == seeds[i]);
    }
    const std::string csv = compare_csv(r);
    CHECK(csv.rfind("config_hash,seed,slot", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 6);
}

TEST_CASE("run_simulate: files, manifest and byte-identical reruns") {
    const SimConfig cfg;
    const fs::path a = scratch("ssbl_unit_sim_a"), b = scratch("ssbl_unit_sim_b");
    const nlohmann::json m = run_simulate(cfg, "sffm", 7, 3, a.string());
    run_simulate(cfg, "sffm", 7, 3, b.string());
    CHECK(m.at("episodes").size() == 3);
    for (const char* f : {"episode_000.jsonl", "episode_001.jsonl", "episode_002.jsonl", "manifest.json"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const nlohmann::json ev = run_eval_trajectories({(a / "episode_000.jsonl").string()}, (a / "ev").string());
    CHECK(ev.at("rewards_verified").get<bool>());
    try {
        run_simulate(cfg, (a / "missing.ckpt").string(), 7, 1, a.string());
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
    fs::remove_all(a);
    fs::remove_all(b);
}
