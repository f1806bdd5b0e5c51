#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "loom/ids.hpp"
#include "loom/knowledge.hpp"

namespace loom {

enum class VerbKind { action, attribute_set, relation_set, quote, question };

std::string_view to_string(VerbKind kind);

/// Quote inquits take part in succession like actions do.
constexpr bool is_action_like(VerbKind kind) {
  return kind == VerbKind::action || kind == VerbKind::quote;
}

/// A story entity, valid for as long as its attributes only grow.
struct Instance {
  Id id;
  ConceptOverlay attributes{ConceptKind::attribute};
  /// Scenes the instance currently belongs to.
  std::set<Id> scenes;
  double created = 0.0;
  int participation = 0;
  /// Bumped on every attribute change; lets caches detect stale matches.
  std::uint64_t revision = 0;
};

/// Event record created by one sentence (or one nesting level of a quote).
struct VerbInstance {
  Id id;
  ConceptOverlay verb{ConceptKind::verb};
  VerbKind kind = VerbKind::action;
  /// Instance or scene; empty for a `wh` subject.
  std::optional<Id> subject;
  /// Instance or scene argument.
  std::optional<Id> object;
  /// Attribute argument of `is-a` and `changes`.
  std::optional<ConceptOverlay> object_attributes;
  /// Quoted content, present exactly for quote VIs.
  std::optional<Id> quoted;
  /// The quote VI whose content this VI is.
  std::optional<Id> inquit;
  Id scene;
  std::vector<Id> successors;
  std::vector<Id> predecessors;
  /// Stative VIs that were stated while this action VI was the latest one
  /// of its scene.
  std::vector<Id> followers;
  std::optional<Id> anchor;
  /// Instance produced by a `changes` side effect.
  std::optional<Id> result;
  bool inferred = false;
  bool authoritative = true;
  double created = 0.0;
  int participation = 0;
  /// Surprise recorded when the VI entered the focus.
  double surprise = 1.0;
};

struct Scene {
  Id id;
  std::string name;
  std::set<Id> members;
  /// Every instance that was ever a member.
  std::set<Id> ever_members;
  std::optional<Id> last_action;
  double created = 0.0;
  /// Loaded from a memory snapshot; not reachable by name.
  bool archived = false;
};

struct SceneLink {
  std::string kind;
  Id from;
  Id to;
};

/// Directed relation between instances, e.g. `has`, `is-parent-of`, `of`.
struct RelationEdge {
  std::string name;
  Id from;
  Id to;
  std::optional<Id> vi;
};

struct FocusEntry {
  double weight = 1.0;
  double entered = 0.0;
  double refreshed_at = 0.0;
  bool refresh_pending = false;
  int pending_pushes = 0;
};

/// Demoted components and their salience. Memory components never change
/// again; only their salience decays.
class MemoryStore {
 public:
  struct FocusStats {
    bool was_in_focus = true;
    double time_in_focus = 0.0;
    int participation = 0;
  };

  /// Records a demotion and returns the salience
  /// w_time * time_in_focus + w_part * participation.
  double demote(Id id, const FocusStats& stats, double w_time, double w_part);

  /// Inserts a component restored from a snapshot.
  void restore(Id id, double salience);

  bool contains(Id id) const { return salience_.contains(id); }
  double salience(Id id) const;
  void decay(double dt, double rate);
  const std::map<Id, double>& entries() const { return salience_; }
  std::size_t size() const { return salience_.size(); }

 private:
  std::map<Id, double> salience_;
};

/// Complete mutable state of one agent apart from knowledge, identity and
/// shadows.
struct World {
  std::map<Id, Instance> instances;
  std::map<Id, VerbInstance> vis;
  std::map<Id, Scene> scenes;
  std::vector<SceneLink> scene_links;
  std::vector<RelationEdge> relations;

  std::map<Id, FocusEntry> focus;
  /// Everything that ever left the focus; never re-admitted.
  std::set<Id> demoted;
  MemoryStore memory;

  std::optional<Id> current_scene;
  double clock = 0.0;
  std::uint32_t next_id = 1;

  Id allocate() { return Id(next_id++); }

  bool in_focus(Id id) const { return focus.contains(id); }
  bool is_instance(Id id) const { return instances.contains(id); }
  bool is_vi(Id id) const { return vis.contains(id); }
  bool is_scene(Id id) const { return scenes.contains(id); }
  double weight(Id id) const;

  /// Most recent non-archived scene with this (case-insensitive) name.
  std::optional<Id> find_scene(std::string_view name) const;
  std::vector<Id> scenes_named(std::string_view name) const;
};

}  // namespace loom
