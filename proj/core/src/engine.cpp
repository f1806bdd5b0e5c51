#include "loom/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "loom/errors.hpp"

namespace loom {
namespace {

constexpr double kTie = 1e-12;

struct BuiltinWord {
  std::string_view name;
  std::string_view alias;
};

// Communicative verbs have concepts of their own; quotation handling is
// decided by the syntax, so they carry no role.
constexpr BuiltinWord kCommunicative[] = {
    {"says", "say"},     {"asks", "ask"},   {"thinks", "think"},
    {"writes", "write"}, {"reads", "read"}, {"implies", "imply"},
};

const std::set<std::string, std::less<>>& pronouns() {
  static const std::set<std::string, std::less<>> words = {"she", "he", "it", "her", "him"};
  return words;
}

bool single_word(const PartAst& p, std::string_view w) {
  return !p.proper_noun && p.words.size() == 1 && p.words.front() == w;
}

bool mentions_scene(const PartAst& p) {
  return std::find(p.words.begin(), p.words.end(), "scene") != p.words.end();
}

bool relation_matches(std::string_view edge, std::string_view word) {
  return edge == word || (edge.size() == word.size() + 3 && edge.starts_with("is-") &&
                          edge.substr(3) == word);
}

const std::map<std::string, int, std::less<>>& builtin_roles() {
  static const std::map<std::string, int, std::less<>> roles = {
      {"exists", 1},
      {"is-a", 2},
      {"changes", 3},
      {"leaves-scene", 4},
      {"is-current-scene", 5},
      {"is-only-scene", 6},
      {"is-future-hypothetical", 7},
      {"is-somatically-identical", 8},
      {"is-fictionally-identical", 9},
      {"is-view-identical", 10},
      {"eats", 11},
  };
  return roles;
}

}  // namespace

Agent::Agent(KnowledgeBase kb, Params params) : kb_(std::move(kb)), params_(params) {
  kb_.set_proper_noun_area(params_.proper_noun_area);
  register_builtins();
}

void Agent::register_builtins() {
  auto ensure_word = [&](std::string_view name, std::string_view word) {
    const Concept& c = kb_.ensure_concept(name, ConceptKind::verb);
    if (!kb_.knows_word(word, ConceptKind::verb)) {
      ConceptOverlay o(ConceptKind::verb);
      o.activate(c.id, 1.0);
      kb_.define_word(word, o);
    }
  };
  for (const auto& [name, role] : builtin_roles()) ensure_word(name, name);
  for (const auto& w : kCommunicative) {
    ensure_word(w.name, w.name);
    ensure_word(w.name, w.alias);
  }
}

Agent::Role Agent::role_of(const ConceptOverlay& verb) const {
  static constexpr Role by_code[] = {Role::action,       Role::exists,        Role::is_a,
                                     Role::changes,      Role::leaves_scene,  Role::current_scene,
                                     Role::only_scene,   Role::future_hypothetical,
                                     Role::somatic,      Role::fictional,     Role::view,
                                     Role::ingest};
  Role best = Role::action;
  double best_energy = 0.0;
  bool relation = false;
  for (const auto& [c, e] : verb.energies()) {
    const Concept& def = kb_.concept_at(c);
    relation = relation || def.relation;
    auto it = builtin_roles().find(def.name);
    if (it != builtin_roles().end() && e > best_energy) {
      best = by_code[it->second];
      best_energy = e;
    }
  }
  if (best_energy > 0.0) return best;
  return relation ? Role::relation : Role::action;
}

ConceptOverlay Agent::verb_overlay(const VerbAst& verb) {
  Strictness s = params_.strict || params_.strict_verbs ? Strictness::strict : Strictness::lenient;
  ConceptOverlay out(ConceptKind::verb);
  for (const auto& w : verb.words) out.merge(kb_.word_to_overlay(w, ConceptKind::verb, s));
  return out;
}

ConceptOverlay Agent::part_overlay(const PartAst& part) {
  Strictness s = params_.strict || params_.strict_nouns ? Strictness::strict : Strictness::lenient;
  ConceptOverlay out(ConceptKind::attribute);
  for (const auto& w : part.words) {
    if (pronouns().contains(w) && !kb_.knows_word(w, ConceptKind::attribute)) continue;
    out.merge(kb_.word_to_overlay(w, ConceptKind::attribute, s));
  }
  if (part.proper_noun) out.merge(kb_.intern_proper_noun(*part.proper_noun));
  return out;
}

// ---------------------------------------------------------------------------
// Scenes and focus bookkeeping

Id Agent::create_scene(std::string name, EffectReport* report) {
  Id id = world_.allocate();
  Scene scene;
  scene.id = id;
  scene.name = normalize_word(name);
  scene.created = world_.clock;
  world_.scenes.emplace(id, std::move(scene));
  if (report) report->scenes.push_back(id);
  record("scene", id, id);
  return id;
}

Id Agent::require_scene(const ExecContext& ctx) const {
  if (!ctx.scene) throw SemanticError("there is no current scene");
  return *ctx.scene;
}

Id Agent::scene_for(const PartAst& part, const ExecContext& ctx) {
  if (part.scene_ref) {
    auto s = world_.find_scene(*part.scene_ref);
    if (!s) throw SemanticError("unknown scene \"" + *part.scene_ref + "\"");
    return *s;
  }
  return require_scene(ctx);
}

void Agent::enter_focus(Id id) {
  if (world_.demoted.contains(id)) {
    std::ostringstream msg;
    msg << "component " << id << " left the focus and cannot return";
    throw SemanticError(msg.str());
  }
  FocusEntry e;
  e.entered = world_.clock;
  e.refreshed_at = world_.clock;
  world_.focus.insert_or_assign(id, e);
}

void Agent::touch(Id id) {
  auto it = world_.focus.find(id);
  if (it == world_.focus.end()) return;
  it->second.refresh_pending = true;
  it->second.refreshed_at = world_.clock;
  if (auto inst = world_.instances.find(id); inst != world_.instances.end()) {
    ++inst->second.participation;
  }
}

void Agent::remove_from_scenes(Id instance) {
  Instance& inst = world_.instances.at(instance);
  for (Id s : inst.scenes) world_.scenes.at(s).members.erase(instance);
  inst.scenes.clear();
}

void Agent::demote(Id id) {
  auto it = world_.focus.find(id);
  if (it == world_.focus.end()) throw SemanticError("demoting a component outside the focus");
  FocusEntry entry = it->second;
  int participation = 0;
  if (auto inst = world_.instances.find(id); inst != world_.instances.end()) {
    participation = inst->second.participation;
    for (Id s : inst->second.scenes) world_.scenes.at(s).members.erase(id);
  } else if (auto vi = world_.vis.find(id); vi != world_.vis.end()) {
    participation = vi->second.participation;
  }
  world_.focus.erase(it);
  world_.demoted.insert(id);
  world_.memory.demote(id, {true, world_.clock - entry.entered, participation}, params_.w_time,
                       params_.w_part);
  shadows_.drop(id);
  if (active_report_ && world_.is_instance(id)) active_report_->removed.push_back(id);
  record("demote", id);
}

void Agent::switch_scene(Id scene, bool exclusive) {
  world_.current_scene = scene;
  if (!exclusive) return;
  std::vector<Id> doomed;
  for (const auto& [id, entry] : world_.focus) {
    if (auto inst = world_.instances.find(id); inst != world_.instances.end()) {
      const auto& scenes = inst->second.scenes;
      if (!scenes.empty() && !scenes.contains(scene)) doomed.push_back(id);
    } else if (auto vi = world_.vis.find(id); vi != world_.vis.end()) {
      if (vi->second.scene != scene) doomed.push_back(id);
    }
  }
  for (Id id : doomed) demote(id);
}

Id Agent::create_instance(const ConceptOverlay& overlay, Id scene) {
  auto sit = world_.scenes.find(scene);
  if (sit == world_.scenes.end()) throw SemanticError("unknown scene");
  Id id = world_.allocate();
  Instance inst;
  inst.id = id;
  inst.attributes = overlay;
  inst.scenes.insert(scene);
  inst.created = world_.clock;
  world_.instances.emplace(id, std::move(inst));
  sit->second.members.insert(id);
  sit->second.ever_members.insert(id);
  enter_focus(id);
  if (active_report_) active_report_->created.push_back(id);
  record("create", id, scene, label(id));
  return id;
}

Id Agent::apply_changes(Id subject, const ConceptOverlay& overlay, std::optional<Id> scene) {
  if (!world_.is_instance(subject) || !world_.in_focus(subject)) {
    throw SemanticError("only an instance in focus can change");
  }
  const Instance& old = world_.instances.at(subject);
  ConceptOverlay attributes = old.attributes;
  attributes.merge(overlay);
  std::set<Id> scenes = old.scenes;
  if (scene) scenes.insert(*scene);
  if (scenes.empty() && world_.current_scene) scenes.insert(*world_.current_scene);
  if (scenes.empty()) throw SemanticError("changed instance has no scene to live in");

  demote(subject);
  Id fresh = create_instance(attributes, *scenes.begin());
  for (Id s : scenes) {
    world_.instances.at(fresh).scenes.insert(s);
    world_.scenes.at(s).members.insert(fresh);
    world_.scenes.at(s).ever_members.insert(fresh);
  }
  link_identity(IdentityKind::somatic, subject, fresh, LinkOrigin::changes);
  identity_.inherit_view_links(subject, fresh, world_.clock);
  return fresh;
}

const IdentityLink& Agent::link_identity(IdentityKind kind, Id a, Id b, LinkOrigin origin) {
  if (!world_.is_instance(a) || !world_.is_instance(b)) {
    throw SemanticError("identity links connect instances");
  }
  std::size_t before = identity_.links().size();
  const IdentityLink& link = identity_.link(
      kind, a, b, world_.clock, origin, [this](Id id) { return world_.in_focus(id); },
      params_.strict);
  if (identity_.links().size() != before) {
    if (active_report_) ++active_report_->links;
    record("link", std::nullopt, std::nullopt, label(a), std::string(to_string(kind)), label(b));
  }
  return link;
}

// ---------------------------------------------------------------------------
// Reference resolution

std::optional<Id> Agent::best_candidate(const std::vector<Id>& candidates,
                                        const ConceptOverlay& overlay, bool pronoun,
                                        bool use_weight, const std::string& what) {
  std::optional<Id> best;
  double best_score = 0.0;
  double best_match = 0.0;
  bool tied = false;
  for (Id c : candidates) {
    const Instance& inst = world_.instances.at(c);
    double match = overlay.empty() ? (pronoun ? 1.0 : 0.0)
                                   : kb_.overlay_match(overlay, inst.attributes);
    if (!(match > 0.0)) continue;
    double weight = use_weight ? world_.weight(c) : 1.0;
    double score = pronoun ? weight : match * weight;
    if (!best || score > best_score + kTie) {
      best = c;
      best_score = score;
      best_match = match;
      tied = false;
      continue;
    }
    if (score < best_score - kTie) continue;
    if (pronoun && std::abs(match - best_match) > kTie) {
      if (match > best_match) {
        best = c;
        best_score = score;
        best_match = match;
        tied = false;
      }
      continue;
    }
    tied = true;
    double mine = world_.in_focus(c) ? world_.focus.at(c).refreshed_at : -1.0;
    double theirs = world_.in_focus(*best) ? world_.focus.at(*best).refreshed_at : -1.0;
    if (mine > theirs || (mine == theirs && c > *best)) {
      best = c;
      best_score = score;
      best_match = match;
    }
  }
  if (tied && params_.strict) throw ResolutionError("ambiguous reference '" + what + "'");
  return best;
}

Reference Agent::resolve_reference(const PartAst& part, const ExecContext& ctx) {
  return resolve(part, ctx, {});
}

Reference Agent::resolve(const PartAst& part, const ExecContext& ctx, const ResolveOptions& opts) {
  using Kind = Reference::Kind;
  if (part.wh) return {};
  const std::string what = to_xapi(part);

  if (mentions_scene(part)) {
    if (part.article == Article::indefinite) {
      return {Kind::scene, create_scene(part.proper_noun.value_or(""), active_report_)};
    }
    if (part.proper_noun) {
      auto s = world_.find_scene(*part.proper_noun);
      if (!s) throw ResolutionError("unknown scene \"" + *part.proper_noun + "\"");
      return {Kind::scene, *s};
    }
    return {Kind::scene, require_scene(ctx)};
  }

  Id search = scene_for(part, ctx);

  if (single_word(part, "i") || single_word(part, "me")) {
    if (!ctx.speaker) throw ResolutionError("'" + what + "' used outside a quotation");
    Id speaker = *ctx.speaker;
    const Scene& scene = world_.scenes.at(search);
    if (scene.members.contains(speaker) || !world_.is_instance(speaker)) {
      return {Kind::instance, speaker};
    }
    std::optional<Id> alter;
    for (auto kind : {IdentityKind::fictional, IdentityKind::view}) {
      for (Id p : identity_.partners(speaker, kind)) {
        if (!scene.members.contains(p)) continue;
        if (!alter || world_.weight(p) > world_.weight(*alter) + kTie) alter = p;
      }
    }
    return {Kind::instance, alter.value_or(speaker)};
  }

  if (single_word(part, "you")) {
    const Scene& scene = world_.scenes.at(search);
    std::set<Id> self;
    if (ctx.speaker) self = identity_.closure(*ctx.speaker);
    std::optional<Id> best;
    for (Id m : scene.members) {
      if (self.contains(m)) continue;
      if (!best || world_.weight(m) > world_.weight(*best) + kTie) best = m;
    }
    if (!best) throw ResolutionError("nobody to address as 'you' in scene " + scene_name(search));
    return {Kind::instance, *best};
  }

  std::optional<Id> rel_target;
  std::string rel_word;
  if (part.relation) {
    ExecContext inner = ctx;
    inner.scene = search;
    Reference right = resolve(*part.relation->right, inner, {});
    if (right.is_scene()) {
      search = right.id;
    } else if (right.is_instance()) {
      rel_target = right.id;
      rel_word = part.relation->word;
    } else {
      throw ResolutionError("relation '" + part.relation->word + "' needs a right-hand part");
    }
  }

  ConceptOverlay overlay = part_overlay(part);
  bool pronoun = !part.proper_noun && part.words.size() == 1 && pronouns().contains(part.words[0]);

  auto add_relation = [&](Id from) {
    if (rel_target) world_.relations.push_back({rel_word, from, *rel_target, std::nullopt});
  };

  if (part.article == Article::indefinite) {
    Id id = create_instance(overlay, search);
    add_relation(id);
    return {Kind::instance, id};
  }

  auto admissible = [&](Id c) {
    if (!world_.is_instance(c) || c == opts.exclude) return false;
    if (!rel_target) return true;
    return std::any_of(world_.relations.begin(), world_.relations.end(), [&](const RelationEdge& e) {
      return e.from == c && e.to == *rel_target && relation_matches(e.name, rel_word);
    });
  };

  std::vector<Id> scenes{search};
  if (part.scene_ref) scenes = world_.scenes_named(*part.scene_ref);

  // Instances that left the scene without leaving the focus (an eaten
  // character) can still be named there.
  std::vector<Id> members;
  for (Id m : world_.scenes.at(search).ever_members) {
    if (!world_.in_focus(m) || !admissible(m)) continue;
    if (world_.scenes.at(search).members.contains(m) || !pronoun) members.push_back(m);
  }
  if (auto best = best_candidate(members, overlay, pronoun, true, what)) return {Kind::instance, *best};

  // Former members of other scenes with the same name.
  std::vector<Id> former;
  for (Id s : scenes) {
    for (Id m : world_.scenes.at(s).ever_members) {
      if (world_.in_focus(m) && admissible(m) &&
          std::find(former.begin(), former.end(), m) == former.end()) {
        former.push_back(m);
      }
    }
  }
  if (auto best = best_candidate(former, overlay, pronoun, true, what)) return {Kind::instance, *best};

  if (opts.allow_memory) {
    std::vector<Id> remembered;
    for (Id s : scenes) {
      for (Id m : world_.scenes.at(s).ever_members) {
        if (!world_.in_focus(m) && admissible(m)) remembered.push_back(m);
      }
    }
    std::sort(remembered.begin(), remembered.end());
    remembered.erase(std::unique(remembered.begin(), remembered.end()), remembered.end());
    if (auto best = best_candidate(remembered, overlay, pronoun, false, what)) {
      return {Kind::instance, *best};
    }
  }

  if (!part.relation && part.proper_noun && part.words.empty()) {
    if (auto s = world_.find_scene(*part.proper_noun)) return {Kind::scene, *s};
  }

  if (rel_target) {
    Id id = create_instance(overlay, search);
    add_relation(id);
    return {Kind::instance, id};
  }

  throw ResolutionError("no instance matches '" + what + "' in scene " + scene_name(search));
}

// ---------------------------------------------------------------------------
// Execution

EffectReport Agent::execute(const SentenceAst& sentence) {
  EffectReport report;
  active_report_ = &report;
  try {
    ExecContext ctx;
    ctx.scene = world_.current_scene;
    execute_in(sentence, ctx, report);
  } catch (...) {
    active_report_ = nullptr;
    throw;
  }
  active_report_ = nullptr;
  notify();
  return report;
}

Id Agent::execute_in(const SentenceAst& s, const ExecContext& ctx, EffectReport& report) {
  ConceptOverlay verb = verb_overlay(s.verb);

  if (s.kind == SentenceKind::quote) {
    Bound b;
    b.kind = VerbKind::quote;
    b.verb = verb;
    b.scene = require_scene(ctx);
    b.authoritative = ctx.authoritative;
    Reference subject = resolve(s.subject, ctx, {});
    if (subject.kind != Reference::Kind::none) b.subject = subject.id;
    Id target = b.scene;
    if (s.verb.scene_ref) {
      auto found = world_.find_scene(*s.verb.scene_ref);
      if (!found) throw SemanticError("unknown scene \"" + *s.verb.scene_ref + "\"");
      target = *found;
    }
    auto implies = kb_.find_concept("implies", ConceptKind::verb);
    bool authoritative = ctx.authoritative && implies && verb.contains(*implies);

    Id inquit = insert_vi(std::move(b), report);
    ExecContext inner;
    inner.scene = target;
    inner.speaker = subject.is_instance() ? std::optional<Id>(subject.id) : ctx.speaker;
    inner.authoritative = authoritative;
    Id content = execute_in(**s.quoted, inner, report);
    world_.vis.at(inquit).quoted = content;
    VerbInstance& c = world_.vis.at(content);
    c.inquit = inquit;
    ++c.participation;
    return inquit;
  }

  Role role = role_of(verb);
  bool question = s.kind == SentenceKind::question;

  Bound b;
  b.role = role;
  b.verb = verb;
  b.authoritative = ctx.authoritative;

  Reference subject;
  if (role == Role::exists && !question && !mentions_scene(s.subject)) {
    PartAst fresh = s.subject;
    fresh.article = Article::indefinite;
    subject = resolve(fresh, ctx, {});
  } else {
    subject = resolve(s.subject, ctx, {});
  }
  if (subject.kind != Reference::Kind::none) b.subject = subject.id;

  if (s.object) {
    switch (role) {
      case Role::is_a:
      case Role::changes:
        b.object_attributes = part_overlay(*s.object);
        break;
      case Role::somatic:
      case Role::fictional:
      case Role::view: {
        ResolveOptions opts;
        opts.exclude = b.subject;
        opts.allow_memory = true;
        Reference object = resolve(*s.object, ctx, opts);
        if (object.kind != Reference::Kind::none) b.object = object.id;
        break;
      }
      default: {
        Reference object = resolve(*s.object, ctx, {});
        if (object.kind != Reference::Kind::none) b.object = object.id;
        break;
      }
    }
  }

  if ((role == Role::current_scene || role == Role::only_scene) && subject.is_scene()) {
    b.scene = subject.id;
  } else if (ctx.scene) {
    b.scene = *ctx.scene;
  } else if (subject.is_scene()) {
    b.scene = subject.id;
  } else {
    throw SemanticError("there is no current scene");
  }

  if (question) {
    b.kind = VerbKind::question;
  } else {
    switch (role) {
      case Role::action:
      case Role::changes:
      case Role::leaves_scene:
      case Role::ingest:
        b.kind = VerbKind::action;
        break;
      case Role::exists:
      case Role::is_a:
        b.kind = VerbKind::attribute_set;
        break;
      default:
        b.kind = VerbKind::relation_set;
        break;
    }
  }
  return insert_vi(std::move(b), report);
}

Id Agent::insert_vi(Bound b, EffectReport& report, std::optional<Id> inquit) {
  Id id = world_.allocate();
  VerbInstance v;
  v.id = id;
  v.verb = b.verb;
  v.kind = b.kind;
  v.subject = b.subject;
  v.object = b.object;
  v.object_attributes = b.object_attributes;
  v.inquit = inquit;
  v.scene = b.scene;
  v.inferred = b.inferred;
  v.authoritative = b.authoritative;
  v.created = world_.clock;
  world_.vis.emplace(id, std::move(v));
  enter_focus(id);

  for (const auto& arg : {b.subject, b.object}) {
    if (arg && world_.is_instance(*arg)) touch(*arg);
  }

  Scene& scene = world_.scenes.at(b.scene);
  VerbInstance& self = world_.vis.at(id);
  if (scene.last_action && world_.in_focus(*scene.last_action)) {
    VerbInstance& prev = world_.vis.at(*scene.last_action);
    if (is_action_like(b.kind)) {
      prev.successors.push_back(id);
      self.predecessors.push_back(prev.id);
      ++world_.focus.at(prev.id).pending_pushes;
    } else {
      prev.followers.push_back(id);
      self.anchor = prev.id;
    }
    ++prev.participation;
  }
  if (is_action_like(b.kind)) scene.last_action = id;

  if (b.kind != VerbKind::question && b.kind != VerbKind::quote) {
    apply_side_effects(id, b.role, report);
  }

  MatchOutcome outcome = shadows_.match_incoming(id, world_, kb_, params_);
  VerbInstance& done = world_.vis.at(id);
  done.surprise = outcome.surprise;

  std::string object;
  if (done.object) {
    object = label(*done.object);
  } else if (done.object_attributes) {
    object = kb_.dominant_name(*done.object_attributes);
  }
  record(done.inferred ? "inferred" : "vi", id, done.scene,
         done.subject ? label(*done.subject) : std::string("wh"), kb_.dominant_name(done.verb),
         object);
  report.vis.push_back(id);
  return id;
}

void Agent::apply_side_effects(Id vi, Role role, EffectReport& report) {
  VerbInstance& v = world_.vis.at(vi);
  auto instance_arg = [&](const std::optional<Id>& arg, const char* what) {
    if (!arg || !world_.is_instance(*arg)) {
      throw SemanticError(std::string("verb needs an instance as ") + what);
    }
    return *arg;
  };
  auto scene_arg = [&](const std::optional<Id>& arg, const char* what) {
    if (!arg || !world_.is_scene(*arg)) throw SemanticError(std::string("verb needs a scene as ") + what);
    return *arg;
  };

  switch (role) {
    case Role::action:
    case Role::exists:
      break;
    case Role::is_a: {
      Id s = instance_arg(v.subject, "subject");
      if (!world_.in_focus(s)) throw SemanticError("attributes of a remembered instance are frozen");
      if (!v.object_attributes) throw SemanticError("is-a needs attributes");
      Instance& inst = world_.instances.at(s);
      inst.attributes.merge(*v.object_attributes);
      ++inst.revision;
      break;
    }
    case Role::changes: {
      Id s = instance_arg(v.subject, "subject");
      ConceptOverlay extra = v.object_attributes.value_or(ConceptOverlay(ConceptKind::attribute));
      Id fresh = apply_changes(s, extra, v.scene);
      world_.vis.at(vi).result = fresh;
      break;
    }
    case Role::leaves_scene: {
      Id s = instance_arg(v.subject, "subject");
      remove_from_scenes(s);
      report.removed.push_back(s);
      break;
    }
    case Role::current_scene:
    case Role::only_scene: {
      Id s = scene_arg(v.subject, "subject");
      if (v.authoritative) switch_scene(s, role == Role::only_scene);
      break;
    }
    case Role::future_hypothetical: {
      Id a = scene_arg(v.subject, "subject");
      Id b = scene_arg(v.object, "object");
      world_.scene_links.push_back({"future-hypothetical", a, b});
      break;
    }
    case Role::somatic: {
      Id a = instance_arg(v.subject, "subject");
      Id b = instance_arg(v.object, "object");
      Id older = std::min(a, b);
      Id newer = std::max(a, b);
      Id tail = identity_.somatic_tail(older);
      if (tail == newer) break;
      if (world_.in_focus(tail) && world_.in_focus(newer)) demote(tail);
      link_identity(IdentityKind::somatic, tail, newer, LinkOrigin::sentence);
      break;
    }
    case Role::fictional:
      link_identity(IdentityKind::fictional, instance_arg(v.subject, "subject"),
                    instance_arg(v.object, "object"), LinkOrigin::sentence);
      break;
    case Role::view:
      link_identity(IdentityKind::view, instance_arg(v.subject, "subject"),
                    instance_arg(v.object, "object"), LinkOrigin::sentence);
      break;
    case Role::ingest: {
      Id o = instance_arg(v.object, "object");
      Instance& inst = world_.instances.at(o);
      if (inst.scenes.erase(v.scene)) {
        world_.scenes.at(v.scene).members.erase(o);
        report.removed.push_back(o);
      }
      break;
    }
    case Role::relation: {
      Id a = instance_arg(v.subject, "subject");
      Id b = instance_arg(v.object, "object");
      world_.relations.push_back({kb_.dominant_name(v.verb), a, b, vi});
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Dynamics

std::vector<Id> Agent::focus_tick(double dt) {
  if (dt < 0.0) throw SemanticError("negative time step");
  std::vector<Id> evicted;
  for (auto& [id, e] : world_.focus) {
    if (e.refresh_pending) {
      e.weight = 1.0;
      e.refresh_pending = false;
    }
    if (e.pending_pushes > 0) {
      e.weight *= std::pow(params_.push_out, e.pending_pushes);
      e.pending_pushes = 0;
    }
    double lambda = params_.lambda_instance;
    if (auto vi = world_.vis.find(id); vi != world_.vis.end()) {
      lambda = is_action_like(vi->second.kind) ? params_.lambda_action : params_.lambda_stative;
    }
    e.weight *= std::exp(-lambda * dt);
    if (e.weight < params_.evict) evicted.push_back(id);
  }
  for (Id id : evicted) demote(id);
  world_.memory.decay(dt, params_.salience_decay);
  return evicted;
}

void Agent::diffuse(double duration) {
  if (duration < 0.0) throw SemanticError("negative pause");
  if (duration == 0.0) {
    focus_tick(0.0);
    shadows_.tick(world_, identity_, kb_, params_, 0.0);
    notify();
    return;
  }
  std::size_t n = std::max<std::size_t>(
      std::max<std::size_t>(params_.da_substeps, 1),
      static_cast<std::size_t>(std::ceil(duration / std::max(params_.max_da_step, 1e-9) - 1e-9)));
  double dt = duration / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    world_.clock += dt;
    focus_tick(dt);
    shadows_.tick(world_, identity_, kb_, params_, dt);
    notify();
  }
  record("tick", std::nullopt);
}

std::vector<InferenceStep> Agent::instantiate_inferences(std::size_t max_n, double settle) {
  std::vector<InferenceStep> out;
  std::set<Id> tried;
  for (std::size_t round = 0; round < max_n; ++round) {
    std::optional<InferenceStep> made;
    for (const auto& hs : headless_shadows()) {
      if (hs.support < params_.theta_inst) break;
      if (tried.contains(hs.representative)) continue;
      if (hs.kind == VerbKind::quote || hs.kind == VerbKind::question) continue;
      const VerbInstance& rep = world_.vis.at(hs.representative);
      if (!hs.subject || !world_.in_focus(*hs.subject)) continue;
      if (rep.object && !world_.is_instance(*rep.object)) continue;
      if (rep.object && (!hs.object || !world_.in_focus(*hs.object))) continue;
      if (!world_.scenes.contains(hs.scene)) continue;

      Bound b;
      b.role = role_of(hs.verb);
      b.verb = hs.verb;
      b.kind = rep.kind;
      b.subject = hs.subject;
      if (rep.object) b.object = hs.object;
      b.object_attributes = rep.object_attributes;
      b.scene = hs.scene;
      b.inferred = true;
      if ((b.role == Role::is_a || b.role == Role::changes) && !b.object_attributes) continue;

      tried.insert(hs.representative);
      EffectReport report;
      active_report_ = &report;
      try {
        Id id = insert_vi(std::move(b), report);
        made = InferenceStep{id, hs.support};
      } catch (const Error&) {
        active_report_ = nullptr;
        continue;
      }
      active_report_ = nullptr;
      break;
    }
    if (made) {
      out.push_back(*made);
      notify();
    } else if (settle <= 0.0) {
      break;
    }
    if (settle > 0.0) diffuse(settle);
  }
  return out;
}

EffectReport Agent::step(const SentenceAst& sentence, double pacing) {
  if (pacing < 0.0) throw SemanticError("pacing must be non-negative");
  EffectReport report = execute(sentence);
  if (pacing >= params_.respiro && pacing > 0.0) {
    double half = pacing / 2.0;
    diffuse(half);
    double settle = half / static_cast<double>(std::max<std::size_t>(params_.max_inferences, 1));
    instantiate_inferences(params_.max_inferences, settle);
  } else {
    diffuse(pacing);
  }
  return report;
}

void Agent::run_story(const std::vector<SentenceAst>& story, double pacing) {
  for (const auto& s : story) step(s, pacing);
}

void Agent::flush_focus() {
  std::vector<Id> all;
  for (const auto& [id, e] : world_.focus) all.push_back(id);
  for (Id id : all) demote(id);
  shadows_.clear();
}

void Agent::rest(double max_seconds) {
  double elapsed = 0.0;
  while (!world_.focus.empty() && elapsed < max_seconds) {
    double d = std::min(1.0, max_seconds - elapsed);
    diffuse(d);
    elapsed += d;
  }
  flush_focus();
}

std::vector<HeadlessShadow> Agent::headless_shadows() const {
  return shadows_.headless(world_, kb_, params_);
}

std::set<Id> Agent::proper_noun_closure(std::string_view name) const {
  std::set<Id> out;
  auto c = kb_.find_concept("\"" + normalize_word(name), ConceptKind::attribute);
  if (!c) return out;
  for (const auto& [id, inst] : world_.instances) {
    if (inst.attributes.energy(*c) <= 0.0 || out.contains(id)) continue;
    auto linked = identity_.closure(id);
    out.insert(linked.begin(), linked.end());
    out.insert(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reporting

std::string Agent::label(Id id) const {
  std::ostringstream os;
  if (auto it = world_.instances.find(id); it != world_.instances.end()) {
    std::string name;
    for (const auto& [c, e] : it->second.attributes.energies()) {
      const Concept& def = kb_.concept_at(c);
      if (def.proper_noun) name = def.name.substr(1);
    }
    if (name.empty()) name = kb_.dominant_name(it->second.attributes);
    os << (name.empty() ? "instance" : name) << id;
  } else if (auto vi = world_.vis.find(id); vi != world_.vis.end()) {
    os << kb_.dominant_name(vi->second.verb) << id;
  } else if (world_.scenes.contains(id)) {
    os << "scene:" << scene_name(id);
  } else {
    os << id;
  }
  return os.str();
}

std::string Agent::scene_name(Id scene) const {
  auto it = world_.scenes.find(scene);
  if (it == world_.scenes.end()) return {};
  if (!it->second.name.empty()) return it->second.name;
  std::ostringstream os;
  os << scene;
  return os.str();
}

void Agent::record(std::string kind, std::optional<Id> id, std::optional<Id> scene,
                   std::string subject, std::string verb, std::string object) {
  TraceRecord r;
  r.seq = seq_++;
  r.clock = world_.clock;
  r.kind = std::move(kind);
  if (scene) r.scene = scene_name(*scene);
  r.subject = std::move(subject);
  r.verb = std::move(verb);
  r.object = std::move(object);
  r.id = id;
  r.digest = focus_digest(world_);
  if (sink_) sink_(r);
  trace_.push_back(std::move(r));
}

void Agent::notify() const {
  if (observer_) observer_(*this);
}

}  // namespace loom
