#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "loom/ids.hpp"
#include "loom/world.hpp"

namespace loom {

/// One SA or DA event. Kinds: `vi`, `inferred`, `create`, `demote`, `link`,
/// `scene`, `tick`.
struct TraceRecord {
  std::uint64_t seq = 0;
  double clock = 0.0;
  std::string kind;
  std::string scene;
  std::string subject;
  std::string verb;
  std::string object;
  /// Component the record is about, when there is one.
  std::optional<Id> id;
  /// FNV-1a digest of the focus weights right after the event.
  std::string digest;
};

std::string to_json_line(const TraceRecord& record);

/// Digest over (id, weight bits) of every focus entry in id order.
std::string focus_digest(const World& world);

}  // namespace loom
