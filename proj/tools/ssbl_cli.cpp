// Command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssbl/ssbl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitIo = 2;

int exit_code(ssbl_status s) {
    switch (s) {
        case SSBL_OK: return kExitOk;
        case SSBL_ERR_INVALID_ARGUMENT:
        case SSBL_ERR_CONFIG:
        case SSBL_ERR_IO: return kExitIo;
        default: return kExitCheck;
    }
}

int report_failure(ssbl_status s) {
    std::fprintf(stderr, "ssbl: %s error: %s\n", ssbl_status_name(s), ssbl_last_error());
    return exit_code(s);
}

struct Owned {
    char* s = nullptr;
    ~Owned() { ssbl_string_free(s); }
    nlohmann::json json() const { return s ? nlohmann::json::parse(s) : nlohmann::json(); }
};

struct ConfigHandle {
    ssbl_config* cfg = nullptr;
    ~ConfigHandle() { ssbl_config_free(cfg); }
};

void print_metrics(const char* label, const nlohmann::json& m) {
    std::printf("%-10s success=%.3f return=%.4f violations=%.3f sha_disp=%.4f path=%.3f join=%.1f\n", label,
                m.at("success_rate").get<double>(), m.at("mean_return").get<double>(),
                m.at("personal_violation_steps").get<double>(), m.at("sha_total_displacement").get<double>(),
                m.at("path_length").get<double>(), m.at("time_to_join").get<double>());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Social force simulation, robot group-approach training and evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "ssbl_out";
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--seed", seed, "Seed (default: train.master_seed)");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::string policy = "sffm";
    int episodes = 1;
    auto* simulate = app.add_subcommand("simulate", "Record episodes as JSONL trajectories");
    simulate->add_option("--policy", policy, "sffm | random | checkpoint path")->capture_default_str();
    simulate->add_option("--episodes", episodes, "Episode count")->capture_default_str();

    std::string algo;
    std::optional<int> iters;
    auto* train = app.add_subcommand("train", "Train a policy; writes policy.ckpt and train_report.json");
    train->add_option("--algo", algo, "cem | ppo (default: from config)");
    train->add_option("--iters", iters, "Iterations (default: from config)");

    std::vector<std::string> trajectories;
    int eval_episodes = 50;
    auto* eval = app.add_subcommand("eval", "Social metrics for a policy or for recorded trajectories");
    eval->add_option("--policy", policy, "sffm | random | checkpoint path")->capture_default_str();
    eval->add_option("--episodes", eval_episodes, "Episode count")->capture_default_str();
    eval->add_option("--trajectories", trajectories, "JSONL files to score offline instead of rolling out");

    std::string policy_a = "sffm", policy_b = "random";
    int compare_episodes = 100;
    auto* compare = app.add_subcommand("compare", "Paired comparison of two policies with both anchors");
    compare->add_option("--a", policy_a, "First policy")->capture_default_str();
    compare->add_option("--b", policy_b, "Second policy")->capture_default_str();
    compare->add_option("--episodes", compare_episodes, "Shared seed count")->capture_default_str();

    auto* features = app.add_subcommand("features-check", "Feature-point property and gradient suite");

    for (CLI::App* sub : {simulate, train, eval, compare, features}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitIo;
    }

    ConfigHandle cfg;
    ssbl_status s = config_path.empty() ? ssbl_config_default(&cfg.cfg) : ssbl_config_load(config_path.c_str(), &cfg.cfg);
    if (s != SSBL_OK) return report_failure(s);

    std::uint64_t run_seed = 0;
    if (seed) {
        run_seed = *seed;
    } else if ((s = ssbl_config_master_seed(cfg.cfg, &run_seed)) != SSBL_OK) {
        return report_failure(s);
    }

    Owned summary;
    if (*simulate) {
        s = ssbl_simulate(cfg.cfg, policy.c_str(), run_seed, episodes, out_dir.c_str(), &summary.s);
        if (s != SSBL_OK) return report_failure(s);
        const nlohmann::json j = summary.json();
        for (const auto& e : j.at("episodes"))
            std::printf("%s seed=%llu steps=%d success=%d return=%.6f\n", e.at("file").get<std::string>().c_str(),
                        static_cast<unsigned long long>(e.at("seed").get<std::uint64_t>()), e.at("steps").get<int>(),
                        e.at("success").get<bool>() ? 1 : 0, e.at("return").get<double>());
        std::printf("manifest: %s/manifest.json\n", out_dir.c_str());
        return kExitOk;
    }

    if (*train) {
        nlohmann::json patch = {{"train", {{"master_seed", run_seed}}}};
        if (!algo.empty()) patch["train"]["algo"] = algo;
        if (iters) patch["train"]["iterations"] = *iters;
        if ((s = ssbl_config_patch(cfg.cfg, patch.dump().c_str())) != SSBL_OK) return report_failure(s);
        s = ssbl_train(cfg.cfg, out_dir.c_str(), &summary.s);
        if (s != SSBL_OK) return report_failure(s);
        const nlohmann::json j = summary.json();
        std::printf("algo=%s iterations=%d eval_return=%.4f baseline=%.4f random=%.4f relative=%.2f%% time=%.1fs\n",
                    j.at("algo").get<std::string>().c_str(), j.at("iterations").get<int>(),
                    j.at("final_eval_return").get<double>(), j.at("baseline_eval_return").get<double>(),
                    j.at("random_eval_return").get<double>(), j.at("relative_percent").get<double>(),
                    j.value("wall_clock_seconds", 0.0));
        std::printf("checkpoint: %s\n", j.at("checkpoint").get<std::string>().c_str());
        return kExitOk;
    }

    if (*eval) {
        if (!trajectories.empty()) {
            std::vector<const char*> files;
            for (const std::string& f : trajectories) files.push_back(f.c_str());
            s = ssbl_eval_trajectories(files.data(), files.size(), out_dir.c_str(), &summary.s);
        } else {
            s = ssbl_eval_policy(cfg.cfg, policy.c_str(), run_seed, eval_episodes, out_dir.c_str(), &summary.s);
        }
        if (summary.s) print_metrics("metrics", summary.json().at("metrics"));
        if (s != SSBL_OK) return report_failure(s);
        return kExitOk;
    }

    if (*compare) {
        s = ssbl_compare(cfg.cfg, policy_a.c_str(), policy_b.c_str(), run_seed, compare_episodes, out_dir.c_str(),
                         &summary.s);
        if (s != SSBL_OK) return report_failure(s);
        const nlohmann::json j = summary.json();
        print_metrics("a", j.at("policy_a").at("metrics"));
        print_metrics("b", j.at("policy_b").at("metrics"));
        print_metrics("baseline", j.at("anchor_baseline").at("metrics"));
        print_metrics("random", j.at("anchor_random").at("metrics"));
        std::printf("relative a=%.2f%% b=%.2f%%\n", j.at("relative_percent").at("policy_a").get<double>(),
                    j.at("relative_percent").at("policy_b").get<double>());
        return kExitOk;
    }

    s = ssbl_features_check(run_seed, out_dir.c_str(), &summary.s);
    const nlohmann::json report = summary.json();
    if (report.contains("checks"))
        for (const auto& c : report.at("checks"))
            std::printf("%-32s %s\n", c.at("name").get<std::string>().c_str(), c.at("passed").get<bool>() ? "PASS" : "FAIL");
    if (s != SSBL_OK) return report_failure(s);
    return kExitOk;
}
