#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#ifndef SSBL_CLI_PATH
#error "SSBL_CLI_PATH must name the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + SSBL_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

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

TEST_CASE("cli: simulate writes episodes and a manifest, reruns are identical") {
    const fs::path a = scratch("ssbl_cli_sim_a"), b = scratch("ssbl_cli_sim_b");
    REQUIRE(run("simulate --policy sffm --seed 7 --episodes 3 --out " + a.string()) == 0);
    REQUIRE(run("--seed 7 --out " + b.string() + " simulate --episodes 3") == 0);
    for (const char* f : {"episode_000.jsonl", "episode_001.jsonl", "episode_002.jsonl", "manifest.json"})
        CHECK(slurp(a / f) == slurp(b / f));
    CHECK(run("eval --trajectories " + (a / "episode_001.jsonl").string() + " --out " + (a / "ev").string()) == 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("cli: exit codes") {
    const fs::path d = scratch("ssbl_cli_codes");
    CHECK(run("simulate --policy /no/such/policy.ckpt --out " + d.string()) == 2);
    CHECK(run("--config /no/such/config.json simulate --out " + d.string()) == 2);
    fs::create_directories(d);
    std::ofstream(d / "bad.json") << R"({"reward_weights": {"w9": 1}})";
    CHECK(run("--config " + (d / "bad.json").string() + " simulate --out " + d.string()) == 2);
    std::ofstream(d / "junk.ckpt") << "garbage\n";
    CHECK(run("compare --a sffm --b " + (d / "junk.ckpt").string() + " --out " + d.string()) == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("--help") == 0);
    CHECK(run("features-check --out " + d.string()) == 0);

    // A tampered log fails reward recomputation: a property failure.
    REQUIRE(run("simulate --episodes 1 --out " + (d / "sim").string()) == 0);
    std::string text = slurp(d / "sim" / "episode_000.jsonl");
    const std::size_t pos = text.find("\"r3\":");
    REQUIRE(pos != std::string::npos);
    REQUIRE(text[pos + 5] == '-');
    text.insert(pos + 6, "1");
    std::ofstream(d / "tampered.jsonl", std::ios::binary) << text;
    CHECK(run("eval --trajectories " + (d / "tampered.jsonl").string() + " --out " + d.string()) == 1);
    fs::remove_all(d);
}

TEST_CASE("cli: train writes a loadable checkpoint, identical across reruns") {
    const fs::path d = scratch("ssbl_cli_train");
    fs::create_directories(d);
    std::ofstream(d / "small.json") << R"({"episode": {"max_steps": 40},
        "train": {"hidden_layers": [6], "population": 6, "episodes_per_eval": 2, "eval_episodes": 2}})";
    const std::string cfg = "--config " + (d / "small.json").string();
    REQUIRE(run(cfg + " train --algo cem --iters 1 --seed 5 --out " + (d / "a").string()) == 0);
    REQUIRE(run(cfg + " train --algo cem --iters 1 --seed 5 --out " + (d / "b").string()) == 0);
    CHECK(slurp(d / "a" / "policy.ckpt") == slurp(d / "b" / "policy.ckpt"));
    CHECK(slurp(d / "a" / "train_report.json") == slurp(d / "b" / "train_report.json"));
    const nlohmann::json report = nlohmann::json::parse(slurp(d / "a" / "train_report.json"));
    CHECK(report.at("iterations").get<int>() == 1);
    CHECK(report.at("per_iteration").size() == 1);
    CHECK(run(cfg + " simulate --policy " + (d / "a" / "policy.ckpt").string() + " --out " + (d / "s").string()) == 0);
    fs::remove_all(d);
}
