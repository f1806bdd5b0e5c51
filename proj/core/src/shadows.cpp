#include "loom/shadows.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace loom {
namespace {

constexpr double kNegligible = 1e-12;
constexpr double kTie = 1e-12;

bool is_memory(const World& world, Id id) {
  return world.memory.contains(id) && !world.in_focus(id);
}

void truncate(ShadowBody& body, std::size_t k) {
  for (auto it = body.begin(); it != body.end();) {
    if (!(it->second > kNegligible) || !std::isfinite(it->second)) {
      it = body.erase(it);
    } else {
      ++it;
    }
  }
  if (k == 0) {
    body.clear();
    return;
  }
  if (body.size() <= k) return;
  std::vector<std::pair<Id, double>> entries(body.begin(), body.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  entries.resize(k);
  body = ShadowBody(entries.begin(), entries.end());
}

// Argument slots that take part in shadow consistency.
struct Slots {
  std::optional<Id> subject;
  std::optional<Id> object;
  std::optional<Id> result;
};

Slots slots(const VerbInstance& vi) { return {vi.subject, vi.object, vi.result}; }

}  // namespace

double vi_similarity(const KnowledgeBase& kb, const VerbInstance& a, const VerbInstance& b) {
  if (a.kind != b.kind) return 0.0;
  double m = kb.overlay_match(a.verb, b.verb);
  if (m <= 0.0) return 0.0;
  if (a.object_attributes && b.object_attributes) {
    m *= 0.5 + 0.5 * kb.overlay_match(*a.object_attributes, *b.object_attributes);
  } else if (a.object_attributes || b.object_attributes) {
    m *= 0.5;
  }
  return m;
}

double surprise_for_support(double support) { return 1.0 / (1.0 + std::max(0.0, support)); }

const ShadowBody* ShadowSystem::body(Id focus_component) const {
  auto it = bodies_.find(focus_component);
  return it == bodies_.end() ? nullptr : &it->second;
}

double ShadowSystem::instance_match(const World& world, const KnowledgeBase& kb, Id focus,
                                    Id memory) {
  const Instance& a = world.instances.at(focus);
  auto key = std::pair{focus, memory};
  if (auto it = match_cache_.find(key); it != match_cache_.end() &&
                                         it->second.revision == a.revision) {
    return it->second.value;
  }
  double v = kb.overlay_match(a.attributes, world.instances.at(memory).attributes);
  match_cache_[key] = CachedMatch{a.revision, v};
  return v;
}

ShadowBody ShadowSystem::instance_targets(const World& world, const IdentityGraph& identity,
                                          const KnowledgeBase& kb, const Params& params, Id id) {
  ShadowBody targets;
  for (const auto& [m, salience] : world.memory.entries()) {
    if (!world.is_instance(m) || world.in_focus(m)) continue;
    double base = instance_match(world, kb, id, m) * salience;
    if (base > 0.0) targets[m] += base;
  }
  for (const auto& [fid, entry] : world.focus) {
    auto vit = world.vis.find(fid);
    if (vit == world.vis.end()) continue;
    auto bit = bodies_.find(fid);
    if (bit == bodies_.end()) continue;
    Slots fs = slots(vit->second);
    for (const auto& [s, w] : bit->second) {
      auto sit = world.vis.find(s);
      if (sit == world.vis.end()) continue;
      Slots ss = slots(sit->second);
      auto add = [&](const std::optional<Id>& mine, const std::optional<Id>& theirs) {
        if (mine == id && theirs && world.is_instance(*theirs) && *theirs != id) {
          targets[*theirs] += params.beta * w;
        }
      };
      add(fs.subject, ss.subject);
      add(fs.object, ss.object);
      add(fs.result, ss.result);
    }
  }
  for (Id partner : identity.partners(id, IdentityKind::fictional)) {
    if (!world.is_instance(partner)) continue;
    if (world.in_focus(partner) || world.memory.contains(partner)) targets[partner] += params.gamma;
  }
  return targets;
}

ShadowBody ShadowSystem::vi_targets(const World& world, const KnowledgeBase& kb,
                                    const Params& params, Id id) {
  ShadowBody targets;
  const VerbInstance& f = world.vis.at(id);
  Slots fs = slots(f);
  auto weight_in = [&](const std::optional<Id>& owner, const std::optional<Id>& member) {
    if (!owner || !member) return 0.0;
    auto bit = bodies_.find(*owner);
    if (bit == bodies_.end()) return 0.0;
    auto wit = bit->second.find(*member);
    return wit == bit->second.end() ? 0.0 : wit->second;
  };
  for (const auto& [s, salience] : world.memory.entries()) {
    auto sit = world.vis.find(s);
    if (sit == world.vis.end() || world.in_focus(s)) continue;
    auto key = std::pair{id, s};
    double sim;
    if (auto cit = vi_cache_.find(key); cit != vi_cache_.end()) {
      sim = cit->second;
    } else {
      sim = vi_similarity(kb, f, sit->second);
      vi_cache_.emplace(key, sim);
    }
    if (sim <= 0.0) continue;
    Slots ss = slots(sit->second);
    double agree = weight_in(fs.subject, ss.subject) + weight_in(fs.object, ss.object) +
                   weight_in(fs.result, ss.result) + weight_in(f.quoted, sit->second.quoted);
    targets[s] = sim * salience + params.beta * agree;
  }
  return targets;
}

void ShadowSystem::tick(const World& world, const IdentityGraph& identity,
                        const KnowledgeBase& kb, const Params& params, double dt) {
  for (auto it = bodies_.begin(); it != bodies_.end();) {
    it = world.in_focus(it->first) ? std::next(it) : bodies_.erase(it);
  }
  if (dt <= 0.0) return;
  double rate = std::min(1.0, params.alpha * dt);
  std::map<Id, ShadowBody> next;
  for (const auto& [id, entry] : world.focus) {
    ShadowBody targets;
    if (world.is_instance(id)) {
      targets = instance_targets(world, identity, kb, params, id);
    } else if (world.is_vi(id)) {
      targets = vi_targets(world, kb, params, id);
    } else {
      continue;
    }
    ShadowBody updated;
    if (auto bit = bodies_.find(id); bit != bodies_.end()) {
      for (const auto& [m, w] : bit->second) updated[m] = (1.0 - rate) * w;
    }
    for (const auto& [m, t] : targets) updated[m] += rate * t;
    truncate(updated, params.shadow_top_k);
    if (!updated.empty()) next.emplace(id, std::move(updated));
  }
  bodies_ = std::move(next);
}

std::vector<HeadlessShadow> ShadowSystem::headless(const World& world, const KnowledgeBase& kb,
                                                   const Params& params) const {
  std::set<Id> paired;
  std::map<Id, std::pair<double, Id>> holder;
  for (const auto& [fid, body] : bodies_) {
    if (!world.in_focus(fid)) continue;
    if (auto vit = world.vis.find(fid); vit != world.vis.end()) {
      for (const auto& [s, w] : body) {
        auto sit = world.vis.find(s);
        if (sit == world.vis.end()) continue;
        // A quoted event never stands in for a narrated one, or the reverse.
        if (sit->second.inquit.has_value() != vit->second.inquit.has_value()) continue;
        if (vi_similarity(kb, vit->second, sit->second) > params.theta_hs) {
          paired.insert(s);
        }
      }
    } else if (world.is_instance(fid)) {
      for (const auto& [m, w] : body) {
        auto it = holder.find(m);
        if (it == holder.end() || w > it->second.first + kTie) holder[m] = {w, fid};
      }
    }
  }

  // A memory argument that filled a slot of the paired memory VI maps to the
  // same slot of the focus VI; otherwise to the focus instance shadowing it.
  auto map_arg = [&](const std::optional<Id>& arg, const VerbInstance& f,
                     const VerbInstance& s) -> std::optional<Id> {
    if (!arg || !world.is_instance(*arg)) return std::nullopt;
    if (world.in_focus(*arg)) return arg;
    const std::pair<const std::optional<Id>*, const std::optional<Id>*> slots[] = {
        {&s.subject, &f.subject}, {&s.object, &f.object}, {&s.result, &f.result}};
    for (const auto& [mem, foc] : slots) {
      if (*mem == arg && *foc && world.is_instance(**foc) && world.in_focus(**foc)) return *foc;
    }
    auto it = holder.find(*arg);
    if (it == holder.end()) return std::nullopt;
    return it->second.second;
  };

  auto next_of = [&](const VerbInstance& s) {
    std::vector<Id> out;
    auto add_from = [&](const VerbInstance& v) {
      out.insert(out.end(), v.successors.begin(), v.successors.end());
      out.insert(out.end(), v.followers.begin(), v.followers.end());
    };
    add_from(s);
    if (s.inquit) {
      auto iit = world.vis.find(*s.inquit);
      if (iit != world.vis.end() && !world.in_focus(*s.inquit)) add_from(iit->second);
    }
    return out;
  };

  struct Cluster {
    HeadlessShadow hs;
    Id seed;
  };
  std::vector<Cluster> clusters;

  for (const auto& [fid, body] : bodies_) {
    auto fit = world.vis.find(fid);
    if (fit == world.vis.end() || !world.in_focus(fid)) continue;
    const VerbInstance& f = fit->second;
    for (const auto& [s, w] : body) {
      auto sit = world.vis.find(s);
      if (sit == world.vis.end()) continue;
      for (Id t : next_of(sit->second)) {
        if (!is_memory(world, t) || paired.contains(t)) continue;
        const VerbInstance& tv = world.vis.at(t);
        std::optional<Id> subject = map_arg(tv.subject, f, sit->second);
        std::optional<Id> object = map_arg(tv.object, f, sit->second);
        Cluster* target = nullptr;
        for (auto& c : clusters) {
          if (c.hs.scene != f.scene || c.hs.kind != tv.kind || c.hs.subject != subject ||
              c.hs.object != object) {
            continue;
          }
          if (c.seed == t || vi_similarity(kb, world.vis.at(c.seed), tv) > params.theta_hs) {
            target = &c;
            break;
          }
        }
        if (!target) {
          Cluster c;
          c.seed = t;
          c.hs.scene = f.scene;
          c.hs.kind = tv.kind;
          c.hs.subject = subject;
          c.hs.object = object;
          clusters.push_back(std::move(c));
          target = &clusters.back();
        }
        target->hs.body[t] += w;
      }
    }
  }

  std::vector<HeadlessShadow> out;
  out.reserve(clusters.size());
  for (auto& c : clusters) {
    HeadlessShadow hs = std::move(c.hs);
    double best = -1.0;
    for (const auto& [t, w] : hs.body) {
      double contribution = w * world.memory.salience(t);
      hs.support += contribution;
      if (contribution > best + kTie) {
        best = contribution;
        hs.representative = t;
      }
    }
    const VerbInstance& rep = world.vis.at(hs.representative);
    hs.verb = rep.verb;
    hs.object_attributes = rep.object_attributes;
    out.push_back(std::move(hs));
  }
  std::stable_sort(out.begin(), out.end(), [](const HeadlessShadow& a, const HeadlessShadow& b) {
    if (std::abs(a.support - b.support) > kTie) return a.support > b.support;
    if (a.scene != b.scene) return a.scene < b.scene;
    return a.representative < b.representative;
  });
  return out;
}

MatchOutcome ShadowSystem::match_incoming(Id vi, const World& world, const KnowledgeBase& kb,
                                          const Params& params) {
  MatchOutcome outcome;
  const VerbInstance& v = world.vis.at(vi);
  auto compatible = [](const std::optional<Id>& predicted, const std::optional<Id>& actual) {
    return !predicted || predicted == actual;
  };
  for (auto& hs : headless(world, kb, params)) {
    if (hs.kind != v.kind) continue;
    if (vi_similarity(kb, v, world.vis.at(hs.representative)) <= params.theta_hs) continue;
    if (!compatible(hs.subject, v.subject) || !compatible(hs.object, v.object)) continue;
    outcome.combined = true;
    outcome.support = hs.support;
    outcome.surprise = surprise_for_support(hs.support);
    outcome.cluster = std::move(hs);
    break;
  }
  if (!outcome.combined) return outcome;

  ShadowBody& own = bodies_[vi];
  for (const auto& [t, w] : outcome.cluster->body) own[t] = std::max(own[t], w);
  truncate(own, params.shadow_top_k);

  Slots vs = slots(v);
  auto seed = [&](const std::optional<Id>& mine, const std::optional<Id>& theirs, double w) {
    if (!mine || !theirs || !world.is_instance(*mine) || !world.in_focus(*mine)) return;
    if (!world.is_instance(*theirs) || *theirs == *mine) return;
    double& slot = bodies_[*mine][*theirs];
    slot = std::max(slot, w);
  };
  for (const auto& [t, w] : outcome.cluster->body) {
    Slots ts = slots(world.vis.at(t));
    seed(vs.subject, ts.subject, w);
    seed(vs.object, ts.object, w);
    seed(vs.result, ts.result, w);
  }
  for (const auto& arg : {vs.subject, vs.object, vs.result}) {
    if (!arg) continue;
    if (auto it = bodies_.find(*arg); it != bodies_.end()) truncate(it->second, params.shadow_top_k);
  }
  return outcome;
}

}  // namespace loom
