#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace loom {

/// Identifier shared by instances, verb instances and scenes of one agent.
/// Ids are never reused, so a demoted component can be recognised forever.
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}

  constexpr auto operator<=>(const Id&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, Id id) {
  return os << '#' << id.value;
}

struct ConceptId {
  std::uint32_t value = 0;

  constexpr ConceptId() = default;
  constexpr explicit ConceptId(std::uint32_t v) : value(v) {}

  constexpr auto operator<=>(const ConceptId&) const = default;
};

}  // namespace loom

template <>
struct std::hash<loom::Id> {
  std::size_t operator()(loom::Id id) const noexcept { return id.value; }
};

template <>
struct std::hash<loom::ConceptId> {
  std::size_t operator()(loom::ConceptId id) const noexcept { return id.value; }
};
