#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "loom/identity.hpp"
#include "loom/knowledge.hpp"
#include "loom/params.hpp"
#include "loom/world.hpp"

namespace loom {

/// Memory component -> weight.
using ShadowBody = std::map<Id, double>;

/// A predicted continuation: a cluster of memory VIs that followed the
/// shadows of the current focus VIs.
struct HeadlessShadow {
  ShadowBody body;
  Id representative;
  /// Scene of the focus VI whose shadow produced the votes.
  Id scene;
  VerbKind kind = VerbKind::action;
  ConceptOverlay verb{ConceptKind::verb};
  /// Focus instances the memory arguments map to, when they map at all.
  std::optional<Id> subject;
  std::optional<Id> object;
  std::optional<ConceptOverlay> object_attributes;
  double support = 0.0;
};

struct MatchOutcome {
  bool combined = false;
  double support = 0.0;
  double surprise = 1.0;
  std::optional<HeadlessShadow> cluster;
};

/// Similarity of two VIs: verb overlay match, scaled by agreement of their
/// attribute arguments. VIs of different kinds never match.
double vi_similarity(const KnowledgeBase& kb, const VerbInstance& a, const VerbInstance& b);

/// 1/(1+support) for a matched cluster.
double surprise_for_support(double support);

class ShadowSystem {
 public:
  /// One diffusion step of length dt over every focus component.
  void tick(const World& world, const IdentityGraph& identity, const KnowledgeBase& kb,
            const Params& params, double dt);

  /// Current predictions, strongest first.
  std::vector<HeadlessShadow> headless(const World& world, const KnowledgeBase& kb,
                                       const Params& params) const;

  /// Compares a just-inserted VI against the predictions and absorbs the
  /// best compatible one into its shadow.
  MatchOutcome match_incoming(Id vi, const World& world, const KnowledgeBase& kb,
                              const Params& params);

  void drop(Id focus_component) { bodies_.erase(focus_component); }
  void clear() { bodies_.clear(); }

  const ShadowBody* body(Id focus_component) const;
  const std::map<Id, ShadowBody>& bodies() const { return bodies_; }

 private:
  double instance_match(const World& world, const KnowledgeBase& kb, Id focus, Id memory);
  ShadowBody instance_targets(const World& world, const IdentityGraph& identity,
                              const KnowledgeBase& kb, const Params& params, Id id);
  ShadowBody vi_targets(const World& world, const KnowledgeBase& kb, const Params& params,
                        Id id);

  std::map<Id, ShadowBody> bodies_;
  struct CachedMatch {
    std::uint64_t revision;
    double value;
  };
  std::map<std::pair<Id, Id>, CachedMatch> match_cache_;
  std::map<std::pair<Id, Id>, double> vi_cache_;
};

}  // namespace loom
