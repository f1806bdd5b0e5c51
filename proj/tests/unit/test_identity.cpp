#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>

#include "helpers.hpp"
#include "loom/errors.hpp"
#include "loom/identity.hpp"

using namespace loom;

namespace {

const auto none_in_focus = [](Id) { return false; };

/// Breadth-first reachability over the link list, ignoring link kinds.
std::set<Id> reachable(const std::vector<IdentityLink>& links, Id from) {
  std::set<Id> seen{from};
  std::queue<Id> todo;
  todo.push(from);
  while (!todo.empty()) {
    Id x = todo.front();
    todo.pop();
    for (const auto& l : links) {
      for (auto [p, q] : {std::pair{l.a, l.b}, std::pair{l.b, l.a}}) {
        if (p == x && seen.insert(q).second) todo.push(q);
      }
    }
  }
  return seen;
}

}  // namespace

TEST_CASE("closure of an unlinked instance is itself") {
  IdentityGraph g;
  CHECK(g.closure(Id(4)) == std::set<Id>{Id(4)});
}

TEST_CASE("somatic links refuse two bodies in focus") {
  IdentityGraph g;
  auto both = [](Id) { return true; };
  CHECK_THROWS_AS(g.link(IdentityKind::somatic, Id(1), Id(2), 0.0, LinkOrigin::sentence, both, false),
                  SemanticError);
  CHECK_NOTHROW(g.link(IdentityKind::fictional, Id(1), Id(2), 0.0, LinkOrigin::sentence, both, false));
  CHECK_THROWS_AS(g.link(IdentityKind::view, Id(3), Id(3), 0.0, LinkOrigin::sentence, both, false),
                  SemanticError);
}

TEST_CASE("somatic branching: strict error, lenient warning") {
  IdentityGraph strict, lenient;
  for (IdentityGraph* g : {&strict, &lenient}) {
    g->link(IdentityKind::somatic, Id(1), Id(2), 0.0, LinkOrigin::sentence, none_in_focus, false);
  }
  CHECK_THROWS_AS(strict.link(IdentityKind::somatic, Id(1), Id(3), 0.0, LinkOrigin::sentence,
                              none_in_focus, true),
                  SemanticError);
  lenient.link(IdentityKind::somatic, Id(1), Id(3), 0.0, LinkOrigin::sentence, none_in_focus, false);
  CHECK(lenient.warnings().size() == 1);
  CHECK(lenient.somatic_successors(Id(1)).size() == 2);
}

TEST_CASE("duplicate links are ignored") {
  IdentityGraph g;
  g.link(IdentityKind::view, Id(1), Id(2), 0.0, LinkOrigin::sentence, none_in_focus, false);
  g.link(IdentityKind::view, Id(1), Id(2), 1.0, LinkOrigin::sentence, none_in_focus, false);
  CHECK(g.links().size() == 1);
}

TEST_CASE("view links are inherited") {
  IdentityGraph g;
  CHECK(g.inherit_view_links(Id(1), Id(9), 0.0) == 0);
  g.link(IdentityKind::view, Id(1), Id(2), 0.0, LinkOrigin::sentence, none_in_focus, false);
  g.link(IdentityKind::view, Id(3), Id(1), 0.0, LinkOrigin::sentence, none_in_focus, false);
  CHECK(g.inherit_view_links(Id(1), Id(9), 1.0) == 2);
  CHECK(g.linked(IdentityKind::view, Id(9), Id(2)));
  CHECK(g.linked(IdentityKind::view, Id(3), Id(9)));
}

TEST_CASE("closure agrees with plain reachability") {
  IdentityGraph g;
  std::vector<std::pair<int, int>> edges{{1, 2}, {2, 3}, {5, 6}, {3, 7}, {8, 9}, {9, 1}};
  for (auto [x, y] : edges) {
    g.link(IdentityKind::fictional, Id(x), Id(y), 0.0, LinkOrigin::sentence, none_in_focus, false);
  }
  for (int i = 1; i <= 9; ++i) CHECK(g.closure(Id(i)) == reachable(g.links(), Id(i)));
  const IdentityKind somatic_only[] = {IdentityKind::somatic};
  CHECK(g.closure(Id(1), somatic_only) == std::set<Id>{Id(1)});
}

TEST_CASE("identity does not copy attributes") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"fairytale\" / is-current-scene.");
  say(a, "A little girl / exists.");
  say(a, "A scene \"orders\" / is-current-scene.");
  say(a, "A girl / exists.");
  say(a, "The girl / is-a / red.");
  auto r = say(a, "The girl / is-fictionally-identical / the girl in \"fairytale\".");
  const auto& v = a.world().vis.at(r.vis.back());
  REQUIRE(v.subject);
  REQUIRE(v.object);
  CHECK(a.identity().linked(IdentityKind::fictional, *v.subject, *v.object));
  CHECK_FALSE(a.world().instances.at(*v.subject).attributes ==
              a.world().instances.at(*v.object).attributes);
}

TEST_CASE("re-identification after swallowing") {
  Agent a = agent_with("lrrh.kb");
  for (const char* s :
       {"A scene \"GrandmasHouse\" / is-current-scene.", "A wolf / exists.",
        "A little girl \"LRRH\" / exists.", "The wolf / swallows / \"LRRH\".", "A hunter / exists.",
        "The hunter / cuts / the belly --of-- wolf.", "An \"LRRH\" / exits / the belly."}) {
    say(a, s);
  }
  auto r = say(a, "\"LRRH\" / is-somatically-identical / \"LRRH\" --in-- \"Grandmashouse\".");
  const auto& v = a.world().vis.at(r.vis.back());
  REQUIRE(v.subject);
  REQUIRE(v.object);
  CHECK(v.subject != v.object);
  CHECK(a.identity().links().size() == 1);
  const auto& link = a.identity().links().front();
  CHECK(link.kind == IdentityKind::somatic);
  CHECK_FALSE((a.world().in_focus(link.a) && a.world().in_focus(link.b)));
}

TEST_CASE("the dead wolf keeps the wolf's view link") {
  Agent a = agent_with("lrrh.kb");
  for (const char* s : {"A scene \"GrandmasHouse\" / is-current-scene.", "A wolf / exists.",
                        "A scene \"conversation\" / exists.",
                        "Scene \"conversation\" / is-current-scene.",
                        "An old woman \"Grandma\" / exists.",
                        "\"Grandma\" / is-view-identical / the wolf -- in -- \"GrandmasHouse\".",
                        "Scene \"GrandmasHouse\" / is-current-scene."}) {
    say(a, s);
  }
  auto r = say(a, "The wolf / changes / dead.");
  Id dead = r.created.at(0);
  auto grandma = a.identity().partners(dead, IdentityKind::view);
  REQUIRE(grandma.size() == 1);
  CHECK(a.label(grandma[0]).starts_with("grandma"));
}
