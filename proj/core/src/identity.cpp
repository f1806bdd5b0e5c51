#include "loom/identity.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <sstream>

#include "loom/errors.hpp"

namespace loom {

std::string_view to_string(IdentityKind kind) {
  switch (kind) {
    case IdentityKind::somatic: return "somatic";
    case IdentityKind::fictional: return "fictional";
    case IdentityKind::view: return "view";
  }
  return "?";
}

std::string_view to_string(LinkOrigin origin) {
  switch (origin) {
    case LinkOrigin::sentence: return "sentence";
    case LinkOrigin::changes: return "changes";
    case LinkOrigin::inferred: return "inferred";
    case LinkOrigin::restored: return "restored";
  }
  return "?";
}

std::optional<IdentityKind> identity_kind_from_string(std::string_view name) {
  if (name == "somatic") return IdentityKind::somatic;
  if (name == "fictional") return IdentityKind::fictional;
  if (name == "view") return IdentityKind::view;
  return std::nullopt;
}

const IdentityLink& IdentityGraph::link(IdentityKind kind, Id a, Id b, double clock,
                                        LinkOrigin origin, const FocusProbe& in_focus,
                                        bool strict) {
  if (a == b) throw SemanticError("an instance cannot be linked to itself");
  for (const auto& l : links_) {
    if (l.kind != kind) continue;
    if ((l.a == a && l.b == b) || (kind != IdentityKind::somatic && l.a == b && l.b == a)) {
      return l;
    }
  }
  if (kind == IdentityKind::somatic) {
    if (in_focus && in_focus(a) && in_focus(b)) {
      throw SemanticError("somatically identical instances cannot share the focus");
    }
    bool branch = !somatic_successors(a).empty() || !somatic_predecessors(b).empty();
    if (branch) {
      std::ostringstream msg;
      msg << "somatic chain branches at " << a << " -> " << b;
      if (strict) throw SemanticError(msg.str());
      warnings_.push_back(msg.str());
    }
  }
  links_.push_back(IdentityLink{kind, a, b, clock, origin});
  return links_.back();
}

void IdentityGraph::restore(const IdentityLink& link) { links_.push_back(link); }

std::set<Id> IdentityGraph::closure(Id id, std::span<const IdentityKind> kinds) const {
  std::set<Id> seen{id};
  std::deque<Id> todo{id};
  while (!todo.empty()) {
    Id cur = todo.front();
    todo.pop_front();
    for (const auto& l : links_) {
      if (std::find(kinds.begin(), kinds.end(), l.kind) == kinds.end()) continue;
      Id other;
      if (l.a == cur) {
        other = l.b;
      } else if (l.b == cur) {
        other = l.a;
      } else {
        continue;
      }
      if (seen.insert(other).second) todo.push_back(other);
    }
  }
  return seen;
}

std::set<Id> IdentityGraph::closure(Id id) const {
  static constexpr std::array all{IdentityKind::somatic, IdentityKind::fictional,
                                  IdentityKind::view};
  return closure(id, all);
}

std::size_t IdentityGraph::inherit_view_links(Id from, Id to, double clock) {
  std::size_t added = 0;
  for (Id partner : partners(from, IdentityKind::view)) {
    if (partner == to || linked(IdentityKind::view, to, partner)) continue;
    links_.push_back(IdentityLink{IdentityKind::view, to, partner, clock, LinkOrigin::changes});
    ++added;
  }
  return added;
}

bool IdentityGraph::linked(IdentityKind kind, Id a, Id b) const {
  return std::any_of(links_.begin(), links_.end(), [&](const IdentityLink& l) {
    return l.kind == kind && ((l.a == a && l.b == b) || (l.a == b && l.b == a));
  });
}

std::vector<Id> IdentityGraph::partners(Id id, IdentityKind kind) const {
  std::vector<Id> out;
  for (const auto& l : links_) {
    if (l.kind != kind) continue;
    if (l.a == id) out.push_back(l.b);
    if (l.b == id) out.push_back(l.a);
  }
  return out;
}

std::vector<Id> IdentityGraph::somatic_successors(Id id) const {
  std::vector<Id> out;
  for (const auto& l : links_) {
    if (l.kind == IdentityKind::somatic && l.a == id) out.push_back(l.b);
  }
  return out;
}

std::vector<Id> IdentityGraph::somatic_predecessors(Id id) const {
  std::vector<Id> out;
  for (const auto& l : links_) {
    if (l.kind == IdentityKind::somatic && l.b == id) out.push_back(l.a);
  }
  return out;
}

Id IdentityGraph::somatic_tail(Id id) const {
  std::set<Id> seen{id};
  Id cur = id;
  for (;;) {
    auto next = somatic_successors(cur);
    if (next.empty()) return cur;
    Id newest = *std::max_element(next.begin(), next.end());
    if (!seen.insert(newest).second) return cur;
    cur = newest;
  }
}

}  // namespace loom
