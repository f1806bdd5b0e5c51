#include "loom/world.hpp"

#include <cmath>

#include "loom/errors.hpp"

namespace loom {

std::string_view to_string(VerbKind kind) {
  switch (kind) {
    case VerbKind::action: return "action";
    case VerbKind::attribute_set: return "attribute-set";
    case VerbKind::relation_set: return "relation-set";
    case VerbKind::quote: return "quote";
    case VerbKind::question: return "question";
  }
  return "?";
}

double MemoryStore::demote(Id id, const FocusStats& stats, double w_time, double w_part) {
  if (!stats.was_in_focus) throw SemanticError("component was never in focus");
  if (salience_.contains(id)) throw SemanticError("component demoted twice");
  double s = w_time * std::max(0.0, stats.time_in_focus) + w_part * stats.participation;
  salience_.emplace(id, s);
  return s;
}

void MemoryStore::restore(Id id, double salience) { salience_.insert_or_assign(id, salience); }

double MemoryStore::salience(Id id) const {
  auto it = salience_.find(id);
  return it == salience_.end() ? 0.0 : it->second;
}

void MemoryStore::decay(double dt, double rate) {
  if (dt <= 0.0 || rate <= 0.0) return;
  double factor = std::exp(-rate * dt);
  for (auto& [id, s] : salience_) s *= factor;
}

double World::weight(Id id) const {
  auto it = focus.find(id);
  return it == focus.end() ? 0.0 : it->second.weight;
}

std::optional<Id> World::find_scene(std::string_view name) const {
  auto all = scenes_named(name);
  if (all.empty()) return std::nullopt;
  return all.back();
}

std::vector<Id> World::scenes_named(std::string_view name) const {
  std::string key = normalize_word(name);
  std::vector<Id> out;
  for (const auto& [id, scene] : scenes) {
    if (!scene.archived && scene.name == key) out.push_back(id);
  }
  return out;
}

}  // namespace loom
