#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "loom/engine.hpp"

namespace loom {

/// JSON document with every memory component of `agent`: instances and VIs
/// with their overlays (by concept name), salience, succession and context
/// edges, relations, identity links and the scenes they lived in.
std::string memory_snapshot_json(const Agent& agent);

/// Adds the memory of a snapshot to `agent`. Snapshot ids are shifted past
/// the agent's own ids; restored scenes cannot be named by new sentences.
void restore_memory_json(Agent& agent, std::string_view json);

void save_memory_snapshot(const Agent& agent, const std::filesystem::path& path);
void load_memory_snapshot(Agent& agent, const std::filesystem::path& path);

}  // namespace loom
