#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string_view>
#include <string>
#include <vector>

#include "loom/identity.hpp"
#include "loom/knowledge.hpp"
#include "loom/params.hpp"
#include "loom/parser.hpp"
#include "loom/shadows.hpp"
#include "loom/trace.hpp"
#include "loom/world.hpp"

namespace loom {

struct EffectReport {
  std::vector<Id> vis;
  std::vector<Id> created;
  /// Instances that left their scene or the focus because of the sentence.
  std::vector<Id> removed;
  std::vector<Id> scenes;
  std::size_t links = 0;
};

/// Where and on whose behalf a (possibly quoted) sentence is executed.
struct ExecContext {
  std::optional<Id> scene;
  /// Speaker of the innermost inquit; what `I` refers to.
  std::optional<Id> speaker;
  /// False inside says/asks/thinks/writes/reads quotations: scene switches
  /// stated there do not move the listener.
  bool authoritative = true;
};

/// Result of binding a sentence part.
struct Reference {
  enum class Kind { none, instance, scene };
  Kind kind = Kind::none;
  Id id;

  bool is_instance() const { return kind == Kind::instance; }
  bool is_scene() const { return kind == Kind::scene; }
};

/// Events predicted well enough to be inserted into the focus without being
/// narrated.
struct InferenceStep {
  Id vi;
  double support = 0.0;
};

/// One reasoning agent: knowledge, focus, memory, identity graph and
/// shadows. Sentences are executed one at a time (SA); between sentences the
/// focus and the shadows evolve in small diffusion sub-steps (DA).
class Agent {
 public:
  explicit Agent(KnowledgeBase kb = {}, Params params = {});

  /// Executes one sentence as a single SA.
  EffectReport execute(const SentenceAst& sentence);

  /// Executes a sentence and lets `pacing` seconds of DA elapse. When the
  /// pause reaches the respiro threshold, predicted events are instantiated
  /// half way through it.
  EffectReport step(const SentenceAst& sentence, double pacing);

  void run_story(const std::vector<SentenceAst>& story, double pacing);

  /// Decay, refresh, push-out and eviction over dt seconds.
  std::vector<Id> focus_tick(double dt);

  /// DA burst of `duration` seconds: focus and shadow sub-steps.
  void diffuse(double duration);

  /// Runs `max_n` rounds; each instantiates at most one prediction with
  /// support >= theta_inst and then lets `settle` seconds of DA elapse. With
  /// no settle time it stops at the first round without a candidate.
  std::vector<InferenceStep> instantiate_inferences(std::size_t max_n, double settle = 0.0);

  /// Demotes every focus component (end of an episode).
  void flush_focus();

  /// End of an episode: lets the focus decay without new input for at most
  /// `max_seconds`, then flushes whatever is left.
  void rest(double max_seconds = 120.0);

  Reference resolve_reference(const PartAst& part, const ExecContext& ctx);
  Id create_instance(const ConceptOverlay& overlay, Id scene);
  /// Replaces `subject` by a new instance carrying the extra attributes.
  Id apply_changes(Id subject, const ConceptOverlay& overlay, std::optional<Id> scene = {});

  const IdentityLink& link_identity(IdentityKind kind, Id a, Id b, LinkOrigin origin);

  std::vector<HeadlessShadow> headless_shadows() const;

  /// Instances bearing the proper noun, together with everything linked to
  /// them by any identity relation.
  std::set<Id> proper_noun_closure(std::string_view name) const;

  /// Called after every SA and every DA sub-step.
  void set_observer(std::function<void(const Agent&)> observer) { observer_ = std::move(observer); }
  void set_trace_sink(std::function<void(const TraceRecord&)> sink) { sink_ = std::move(sink); }

  const World& world() const { return world_; }
  const KnowledgeBase& knowledge() const { return kb_; }
  KnowledgeBase& knowledge() { return kb_; }
  const IdentityGraph& identity() const { return identity_; }
  const ShadowSystem& shadows() const { return shadows_; }
  const Params& params() const { return params_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

  /// Short human readable name of a component, e.g. `lrrh#12`.
  std::string label(Id id) const;
  std::string scene_name(Id scene) const;

  /// Memory contents for snapshots. Only demoted components are exported.
  World& mutable_world() { return world_; }
  IdentityGraph& mutable_identity() { return identity_; }

 private:
  enum class Role {
    action,
    exists,
    is_a,
    changes,
    leaves_scene,
    current_scene,
    only_scene,
    future_hypothetical,
    somatic,
    fictional,
    view,
    ingest,
    relation,
  };

  struct Bound {
    Role role = Role::action;
    VerbKind kind = VerbKind::action;
    ConceptOverlay verb{ConceptKind::verb};
    std::optional<Id> subject;
    std::optional<Id> object;
    std::optional<ConceptOverlay> object_attributes;
    Id scene;
    bool inferred = false;
    bool authoritative = true;
  };

  struct ResolveOptions {
    std::optional<Id> exclude;
    /// Identity verbs may name instances that already left the focus.
    bool allow_memory = false;
  };

  Reference resolve(const PartAst& part, const ExecContext& ctx, const ResolveOptions& opts);

  void register_builtins();
  Role role_of(const ConceptOverlay& verb) const;
  ConceptOverlay verb_overlay(const VerbAst& verb);
  ConceptOverlay part_overlay(const PartAst& part);

  Id execute_in(const SentenceAst& s, const ExecContext& ctx, EffectReport& report);
  Id insert_vi(Bound b, EffectReport& report, std::optional<Id> inquit = {});
  void apply_side_effects(Id vi, Role role, EffectReport& report);

  Id create_scene(std::string name, EffectReport* report);
  Id scene_for(const PartAst& part, const ExecContext& ctx);
  Id require_scene(const ExecContext& ctx) const;
  void switch_scene(Id scene, bool exclusive);
  void remove_from_scenes(Id instance);
  void demote(Id id);
  void touch(Id id);
  void enter_focus(Id id);

  std::optional<Id> best_candidate(const std::vector<Id>& candidates, const ConceptOverlay& overlay,
                                   bool pronoun, bool use_weight, const std::string& what);

  void record(std::string kind, std::optional<Id> id, std::optional<Id> scene = {},
              std::string subject = {}, std::string verb = {}, std::string object = {});
  void notify() const;

  KnowledgeBase kb_;
  Params params_;
  World world_;
  IdentityGraph identity_;
  ShadowSystem shadows_;
  std::vector<TraceRecord> trace_;
  std::function<void(const Agent&)> observer_;
  std::function<void(const TraceRecord&)> sink_;
  std::uint64_t seq_ = 0;
  EffectReport* active_report_ = nullptr;
};

}  // namespace loom
