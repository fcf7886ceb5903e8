#pragma once

#include <filesystem>
#include <iosfwd>

#include "darc/rl/agent.hpp"

namespace darc::rl {

// Agent checkpoint, text, version 1:
//
//   DARCAGENT 1 algo=<name> obs_dim=<n> action_dim=<n> steps=<n> critic_updates=<n> actor_updates=<n> config_hash=<hex>
//   CONFIG <agent config as one-line JSON>
//   NET actor|critic <index>
//   <online ParamSet> <target ParamSet> <adam m ParamSet> <adam v ParamSet>
//   ADAM <t>
//   ... one NET block per network, actors first ...
//   END
//
// ParamSet blocks use the num::write_params format. Random-number streams
// are not stored; a restored agent reproduces parameters, optimizer state
// and counters exactly.

void write_agent(std::ostream& out, const Agent& agent);
Agent read_agent(std::istream& in);

void save_agent(const std::filesystem::path& path, const Agent& agent);
/// Throws num::FormatError (with the path) on malformed files.
Agent load_agent(const std::filesystem::path& path);

/// Parameters, optimizer state, configs, dims and counters all equal.
bool same_agent_state(const Agent& a, const Agent& b);

}  // namespace darc::rl
