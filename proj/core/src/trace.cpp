#include "loom/trace.hpp"

#include <bit>
#include <cstdio>
#include <json.hpp>

namespace loom {
namespace {

struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ull;

  void add(std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
      state ^= (value >> (8 * i)) & 0xffu;
      state *= 0x100000001b3ull;
    }
  }
};

}  // namespace

std::string to_json_line(const TraceRecord& r) {
  nlohmann::ordered_json j;
  j["seq"] = r.seq;
  j["clock"] = r.clock;
  j["kind"] = r.kind;
  j["scene"] = r.scene;
  j["subject"] = r.subject;
  j["verb"] = r.verb;
  j["object"] = r.object;
  if (r.id) j["id"] = r.id->value;
  j["digest"] = r.digest;
  return j.dump();
}

std::string focus_digest(const World& world) {
  Fnv1a h;
  for (const auto& [id, entry] : world.focus) {
    h.add(id.value);
    h.add(std::bit_cast<std::uint64_t>(entry.weight));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.state));
  return buf;
}

}  // namespace loom
