#pragma once

// JSONL episode logs. Line 1 is a header carrying the config (and its hash),
// the episode seed, the policy label and the spawned agents; every further
// line is one Transition:
//   {"t":int,"agents":[{"id","role","x","y","vx","vy","theta"}],
//    "action":[f,f],"reward":{"r1".."r5","total"},"done":bool,"success":bool}
// Doubles are written with round-trip precision so logs can be replayed and
// rewards recomputed bit-exactly.

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssbl/environment.hpp"

namespace ssbl {

inline constexpr const char* kTrajectoryFormat = "ssbl-trajectory/1";

struct TrajectoryHeader {
    std::string config_hash;
    std::uint64_t seed = 0;
    int episode_index = 0;
    std::string policy;
    SimConfig config;
    std::vector<AgentState> initial;
};

struct TrajectoryLog {
    TrajectoryHeader header;
    std::vector<Transition> transitions;
};

nlohmann::json agents_to_json(std::span<const AgentState> agents);
std::vector<AgentState> agents_from_json(const nlohmann::json& j);

nlohmann::json header_to_json(const TrajectoryHeader& h);
nlohmann::json transition_to_json(const Transition& t);
Transition transition_from_json(const nlohmann::json& j);

void write_trajectory(const std::string& path, const TrajectoryLog& log);

/// Throws Error(Io) naming the 1-based line number of the first malformed line.
TrajectoryLog parse_trajectory(std::istream& in, const std::string& name);
TrajectoryLog read_trajectory(const std::string& path);

/// Recomputes every logged reward breakdown from the logged states.
/// Returns the 1-based index of the first mismatching transition, or 0.
int first_reward_mismatch(const TrajectoryLog& log);

}  // namespace ssbl
