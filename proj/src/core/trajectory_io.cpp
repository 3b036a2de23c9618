#include "ssbl/trajectory_io.hpp"

#include <fstream>

#include "ssbl/error.hpp"

namespace ssbl {

using nlohmann::json;

json agents_to_json(std::span<const AgentState> agents) {
    json arr = json::array();
    for (const AgentState& a : agents)
        arr.push_back({{"id", a.id},
                       {"role", role_name(a.role)},
                       {"x", a.position.x},
                       {"y", a.position.y},
                       {"vx", a.velocity.x},
                       {"vy", a.velocity.y},
                       {"theta", a.heading}});
    return arr;
}

std::vector<AgentState> agents_from_json(const json& j) {
    std::vector<AgentState> out;
    for (const json& a : j) {
        AgentState s;
        s.id = a.at("id").get<int>();
        const std::string role = a.at("role").get<std::string>();
        if (role == "robot")
            s.role = Role::Robot;
        else if (role == "sha")
            s.role = Role::Sha;
        else
            throw Error(ErrorCode::Io, "unknown agent role '" + role + "'");
        s.position = {a.at("x").get<double>(), a.at("y").get<double>()};
        s.velocity = {a.at("vx").get<double>(), a.at("vy").get<double>()};
        s.heading = a.at("theta").get<double>();
        out.push_back(s);
    }
    return out;
}

json header_to_json(const TrajectoryHeader& h) {
    return {{"type", "header"},
            {"format", kTrajectoryFormat},
            {"config_hash", h.config_hash},
            {"seed", h.seed},
            {"episode", h.episode_index},
            {"policy", h.policy},
            {"config", to_json(h.config)},
            {"agents", agents_to_json(h.initial)}};
}

json transition_to_json(const Transition& t) {
    const RewardBreakdown& b = t.breakdown;
    return {{"t", t.t},
            {"agents", agents_to_json(t.states)},
            {"action", {t.action.forward, t.action.turn}},
            {"reward",
             {{"r1", b.r1}, {"r2", b.r2}, {"r3", b.r3}, {"r4", b.r4}, {"r5", b.r5}, {"total", b.total}}},
            {"done", t.done},
            {"success", t.success}};
}

Transition transition_from_json(const json& j) {
    Transition t;
    t.t = j.at("t").get<int>();
    t.states = agents_from_json(j.at("agents"));
    const json& a = j.at("action");
    if (!a.is_array() || a.size() != 2) throw Error(ErrorCode::Io, "action must be a 2-element array");
    t.action = {a[0].get<double>(), a[1].get<double>()};
    const json& r = j.at("reward");
    t.breakdown = {r.at("r1").get<double>(), r.at("r2").get<double>(), r.at("r3").get<double>(),
                   r.at("r4").get<double>(), r.at("r5").get<double>(), r.at("total").get<double>()};
    t.done = j.at("done").get<bool>();
    t.success = j.at("success").get<bool>();
    return t;
}

void write_trajectory(const std::string& path, const TrajectoryLog& log) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write trajectory '" + path + "'");
    out << header_to_json(log.header).dump() << '\n';
    for (const Transition& t : log.transitions) out << transition_to_json(t).dump() << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

TrajectoryLog parse_trajectory(std::istream& in, const std::string& name) {
    TrajectoryLog log;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            if (!have_header) {
                if (j.value("type", "") != "header" || j.value("format", "") != kTrajectoryFormat)
                    throw Error(ErrorCode::Io, "missing trajectory header");
                TrajectoryHeader& h = log.header;
                h.config_hash = j.at("config_hash").get<std::string>();
                h.seed = j.at("seed").get<std::uint64_t>();
                h.episode_index = j.value("episode", 0);
                h.policy = j.value("policy", "");
                h.config = config_from_json(j.at("config"));
                h.initial = agents_from_json(j.at("agents"));
                have_header = true;
            } else {
                log.transitions.push_back(transition_from_json(j));
            }
        } catch (const json::exception& e) {
            throw Error(ErrorCode::Io, name + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::Io, name + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) throw Error(ErrorCode::Io, name + ": empty trajectory");
    return log;
}

TrajectoryLog read_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open trajectory '" + path + "'");
    return parse_trajectory(in, path);
}

int first_reward_mismatch(const TrajectoryLog& log) {
    const std::vector<AgentState>* prev = &log.header.initial;
    for (std::size_t i = 0; i < log.transitions.size(); ++i) {
        const Transition& t = log.transitions[i];
        const RewardBreakdown b = step_reward(log.header.config, *prev, t.states, t.success);
        if (!(b == t.breakdown)) return static_cast<int>(i) + 1;
        prev = &t.states;
    }
    return 0;
}

}  // namespace ssbl
