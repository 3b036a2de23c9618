#include "ssbl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ssbl/error.hpp"
#include "ssbl/rollout.hpp"

namespace ssbl {

using nlohmann::json;

double relative_performance(double r_model, double r_baseline, double r_random) {
    const double span = r_baseline - r_random;
    if (!(std::abs(span) >= 1e-12))
        throw Error(ErrorCode::InvalidArgument, "relative_performance: baseline and random anchors coincide");
    return 100.0 * (r_model - r_random) / span;
}

std::vector<double> ewma(const std::vector<double>& values, double factor) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(out.empty() ? v : factor * out.back() + (1.0 - factor) * v);
    return out;
}

EpisodeMetrics episode_metrics(const TrajectoryLog& log) {
    const SimConfig& cfg = log.header.config;
    EpisodeMetrics m;
    m.seed = log.header.seed;
    m.time_to_join = cfg.episode.max_steps;
    const std::vector<AgentState>* prev = &log.header.initial;
    for (const Transition& t : log.transitions) {
        if (t.states.size() != prev->size())
            throw Error(ErrorCode::Io, "trajectory: agent count changes between records");
        m.total_return += t.breakdown.total;
        m.path_length += (t.states[0].position - (*prev)[0].position).norm();
        bool violated = false;
        for (std::size_t j = 1; j < t.states.size(); ++j) {
            m.sha_total_displacement += (t.states[j].position - (*prev)[j].position).norm();
            if ((t.states[j].position - t.states[0].position).norm() <= cfg.proxemics.d_personal)
                violated = true;
        }
        if (violated) ++m.personal_violation_steps;
        if (t.success) {
            m.success = true;
            m.time_to_join = t.t;
        }
        prev = &t.states;
    }
    const std::vector<AgentState>& last = *prev;
    const OSpace os = estimate_ospace(std::span(last).subspan(1), cfg.sffm.ospace_min_radius);
    for (const AgentState& a : last)
        m.final_formation_error =
            std::max(m.final_formation_error, std::abs((a.position - os.center).norm() - os.radius));
    return m;
}

SocialMetrics aggregate(const std::vector<EpisodeMetrics>& episodes) {
    SocialMetrics s;
    s.episodes = static_cast<int>(episodes.size());
    if (episodes.empty()) return s;
    for (const EpisodeMetrics& e : episodes) {
        s.success_rate += e.success ? 1.0 : 0.0;
        s.mean_return += e.total_return;
        s.time_to_join += e.time_to_join;
        s.path_length += e.path_length;
        s.personal_violation_steps += e.personal_violation_steps;
        s.sha_total_displacement += e.sha_total_displacement;
        s.final_formation_error += e.final_formation_error;
    }
    const double n = static_cast<double>(episodes.size());
    s.success_rate /= n;
    s.mean_return /= n;
    s.time_to_join /= n;
    s.path_length /= n;
    s.personal_violation_steps /= n;
    s.sha_total_displacement /= n;
    s.final_formation_error /= n;
    return s;
}

SocialMetrics compute_metrics(const std::vector<TrajectoryLog>& logs) {
    std::vector<EpisodeMetrics> eps;
    eps.reserve(logs.size());
    for (const TrajectoryLog& l : logs) eps.push_back(episode_metrics(l));
    return aggregate(eps);
}

json to_json(const EpisodeMetrics& m) {
    return {{"seed", m.seed},
            {"success", m.success},
            {"return", m.total_return},
            {"time_to_join", m.time_to_join},
            {"path_length", m.path_length},
            {"personal_violation_steps", m.personal_violation_steps},
            {"sha_total_displacement", m.sha_total_displacement},
            {"final_formation_error", m.final_formation_error}};
}

json to_json(const SocialMetrics& m) {
    return {{"episodes", m.episodes},
            {"success_rate", m.success_rate},
            {"mean_return", m.mean_return},
            {"time_to_join", m.time_to_join},
            {"path_length", m.path_length},
            {"personal_violation_steps", m.personal_violation_steps},
            {"sha_total_displacement", m.sha_total_displacement},
            {"final_formation_error", m.final_formation_error}};
}

PolicyEvaluation evaluate_policy(const SimConfig& cfg, const Policy& policy,
                                 const std::vector<std::uint64_t>& seeds) {
    PolicyEvaluation ev;
    ev.label = policy.label();
    ev.per_episode.resize(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        const EpisodeOutcome o = run_episode(cfg, policy, seeds[i], true, static_cast<int>(i));
        ev.per_episode[i] = episode_metrics(o.log);
    });
    ev.metrics = aggregate(ev.per_episode);
    return ev;
}

CompareReport compare_policies(const SimConfig& cfg, const Policy& a, const Policy& b,
                               const std::vector<std::uint64_t>& seeds) {
    CompareReport r;
    r.config_hash = config_hash(cfg);
    r.seeds = seeds;
    r.a = evaluate_policy(cfg, a, seeds);
    r.b = evaluate_policy(cfg, b, seeds);
    r.baseline = evaluate_policy(cfg, SffmPolicy{}, seeds);
    r.random = evaluate_policy(cfg, RandomPolicy{}, seeds);
    r.relative_a = relative_performance(r.a.metrics.mean_return, r.baseline.metrics.mean_return,
                                        r.random.metrics.mean_return);
    r.relative_b = relative_performance(r.b.metrics.mean_return, r.baseline.metrics.mean_return,
                                        r.random.metrics.mean_return);
    return r;
}

namespace {

json policy_block(const PolicyEvaluation& ev) {
    return {{"label", ev.label}, {"metrics", to_json(ev.metrics)}};
}

}  // namespace

json to_json(const CompareReport& r) {
    json deltas = json::array();
    for (std::size_t i = 0; i < r.seeds.size(); ++i) {
        const EpisodeMetrics& ea = r.a.per_episode[i];
        const EpisodeMetrics& eb = r.b.per_episode[i];
        deltas.push_back({{"seed", r.seeds[i]},
                          {"return", eb.total_return - ea.total_return},
                          {"time_to_join", eb.time_to_join - ea.time_to_join},
                          {"path_length", eb.path_length - ea.path_length},
                          {"personal_violation_steps", eb.personal_violation_steps - ea.personal_violation_steps},
                          {"sha_total_displacement", eb.sha_total_displacement - ea.sha_total_displacement},
                          {"final_formation_error", eb.final_formation_error - ea.final_formation_error}});
    }
    return {{"config_hash", r.config_hash},
            {"seeds", r.seeds},
            {"policy_a", policy_block(r.a)},
            {"policy_b", policy_block(r.b)},
            {"anchor_baseline", policy_block(r.baseline)},
            {"anchor_random", policy_block(r.random)},
            {"relative_percent", {{"policy_a", r.relative_a}, {"policy_b", r.relative_b}}},
            {"paired_deltas_b_minus_a", deltas}};
}

std::string compare_csv(const CompareReport& r) {
    std::ostringstream out;
    out << "config_hash,seed,slot,policy,success,return,time_to_join,path_length,personal_violation_steps,"
           "sha_total_displacement,final_formation_error\n";
    char buf[512];
    auto rows = [&](const char* slot, const PolicyEvaluation& ev) {
        for (const EpisodeMetrics& m : ev.per_episode) {
            std::snprintf(buf, sizeof buf, "%s,%llu,%s,%s,%d,%.17g,%d,%.17g,%d,%.17g,%.17g\n",
                          r.config_hash.c_str(), static_cast<unsigned long long>(m.seed), slot, ev.label.c_str(), m.success ? 1 : 0,
                          m.total_return, m.time_to_join, m.path_length, m.personal_violation_steps,
                          m.sha_total_displacement, m.final_formation_error);
            out << buf;
        }
    };
    rows("a", r.a);
    rows("b", r.b);
    rows("baseline", r.baseline);
    rows("random", r.random);
    return out.str();
}

}  // namespace ssbl
