#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "loom/errors.hpp"

using namespace loom;

namespace {

Id only_created(const EffectReport& r) {
  REQUIRE(r.created.size() == 1);
  return r.created.front();
}

}  // namespace

TEST_CASE("a scene must exist before anything else") {
  Agent a = agent_with("base.kb");
  CHECK_THROWS_AS(say(a, "A wolf / exists."), Error);
  say(a, "A scene \"forest\" / is-current-scene.");
  CHECK_NOTHROW(say(a, "A wolf / exists."));
}

TEST_CASE("indefinite article creates, definite article resolves") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"forest\" / is-current-scene.");
  Id wolf = only_created(say(a, "A wolf / exists."));
  CHECK(a.world().weight(wolf) == 1.0);
  auto r = say(a, "The wolf / sleeps.");
  CHECK(r.created.empty());
  CHECK(a.world().vis.at(r.vis.back()).subject == wolf);
  CHECK_THROWS_AS(say(a, "The hunter / sleeps."), ResolutionError);
}

TEST_CASE("resolution picks the best match times weight") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"forest\" / is-current-scene.");
  Id first = only_created(say(a, "A wolf / exists."));
  Id second = only_created(say(a, "A wolf / exists."));
  Id girl = only_created(say(a, "A girl / exists."));
  World& w = a.mutable_world();
  w.focus.at(first).weight = 0.9;
  w.focus.at(second).weight = 0.4;
  w.focus.at(girl).weight = 1.0;

  PartAst part = parse_story("The wolf / sleeps.").at(0).subject;
  auto overlay = a.knowledge().word_to_overlay("wolf", ConceptKind::attribute, Strictness::strict);
  std::optional<Id> oracle;
  double best = 0.0;
  for (Id m : w.scenes.at(*w.current_scene).members) {
    double match = a.knowledge().overlay_match(overlay, w.instances.at(m).attributes);
    if (match <= 0.0) continue;
    double score = match * w.weight(m);
    if (!oracle || score > best) {
      oracle = m;
      best = score;
    }
  }
  ExecContext ctx;
  ctx.scene = w.current_scene;
  Reference got = a.resolve_reference(part, ctx);
  CHECK(got.is_instance());
  CHECK(got.id == oracle);
  CHECK(got.id == first);
}

TEST_CASE("resolution ties: strict mode errors, lenient prefers the latest") {
  Params strict;
  strict.strict = true;
  for (bool is_strict : {true, false}) {
    Agent a = agent_with("base.kb", is_strict ? strict : Params{});
    say(a, "A scene \"forest\" / is-current-scene.");
    say(a, "A wolf / exists.");
    Id later = only_created(say(a, "A wolf / exists."));
    if (is_strict) {
      CHECK_THROWS_AS(say(a, "The wolf / sleeps."), ResolutionError);
    } else {
      auto r = say(a, "The wolf / sleeps.");
      CHECK(a.world().vis.at(r.vis.back()).subject == later);
    }
  }
}

TEST_CASE("an indefinite proper noun makes a new instance") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"house\" / is-current-scene.");
  Id lrrh = only_created(say(a, "A little girl \"LRRH\" / exists."));
  Id again = only_created(say(a, "An \"LRRH\" / exists."));
  CHECK(lrrh != again);
  CHECK(a.identity().links().empty());
}

TEST_CASE("has with a new object creates the object") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"house\" / is-current-scene.");
  say(a, "A girl \"LRRH\" / exists.");
  auto r = say(a, "\"LRRH\" / has / a hood.");
  Id hood = only_created(r);
  auto hood_concept = a.knowledge().find_concept("clothing", ConceptKind::attribute);
  CHECK(a.world().instances.at(hood).attributes.contains(*hood_concept));
  REQUIRE(a.world().relations.size() == 1);
  CHECK(a.world().relations[0].to == hood);
}

TEST_CASE("actions are linked by succession, attribute setting is not") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"house\" / is-current-scene.");
  say(a, "A wolf / exists.");
  say(a, "A door / exists.");
  say(a, "An old woman \"Grandma\" / exists.");
  Id knocks = say(a, "The wolf / knocks / the door.").vis.back();
  Id opens = say(a, "\"Grandma\" / opens / the door.").vis.back();
  const auto& vis = a.world().vis;
  CHECK(vis.at(knocks).successors == std::vector<Id>{opens});
  CHECK(vis.at(opens).predecessors == std::vector<Id>{knocks});
  Id isa = say(a, "\"Grandma\" / is-a / small.").vis.back();
  CHECK(vis.at(isa).successors.empty());
  CHECK(vis.at(isa).predecessors.empty());
  CHECK(vis.at(opens).successors.empty());
}

TEST_CASE("is-a adds attributes to the same instance") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"house\" / is-current-scene.");
  Id girl = only_created(say(a, "A girl \"LRRH\" / exists."));
  say(a, "\"LRRH\" / is-a / red.");
  auto red = a.knowledge().find_concept("red", ConceptKind::attribute);
  CHECK(a.world().instances.at(girl).attributes.energy(*red) == 1.0);
  CHECK(a.world().in_focus(girl));
}

TEST_CASE("changes makes a new instance and retires the old one") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"house\" / is-current-scene.");
  Id wolf = only_created(say(a, "A wolf / exists."));
  auto r = say(a, "The wolf / changes / dead.");
  Id dead = only_created(r);
  const World& w = a.world();
  CHECK_FALSE(w.in_focus(wolf));
  CHECK(w.in_focus(dead));
  CHECK(w.scenes.at(*w.current_scene).members.contains(dead));
  CHECK_FALSE(w.scenes.at(*w.current_scene).members.contains(wolf));
  CHECK(a.identity().linked(IdentityKind::somatic, wolf, dead));
  const auto& old_attrs = w.instances.at(wolf).attributes;
  for (const auto& [c, e] : old_attrs.energies()) {
    CHECK(w.instances.at(dead).attributes.energy(c) >= e);
  }
}

TEST_CASE("a changes chain links every step") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"house\" / is-current-scene.");
  Id grandma = only_created(say(a, "An old woman \"Grandma\" / exists."));
  Id dead = only_created(say(a, "\"Grandma\" / changes / not-alive."));
  Id food = only_created(say(a, "\"Grandma\" / changes / chewed-food."));
  say(a, "The chewed-food / leaves-scene.");
  CHECK(a.identity().links().size() == 2);
  CHECK(a.identity().somatic_tail(grandma) == food);
  CHECK(a.identity().somatic_successors(grandma) == std::vector<Id>{dead});
  CHECK(a.world().in_focus(food));
  CHECK(a.world().scenes.at(*a.world().current_scene).members.empty());
}

TEST_CASE("a change with nothing new still makes a new instance") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"house\" / is-current-scene.");
  Id wolf = only_created(say(a, "A wolf / exists."));
  Id same = a.apply_changes(wolf, ConceptOverlay{});
  CHECK(same != wolf);
  CHECK(a.world().instances.at(same).attributes == a.world().instances.at(wolf).attributes);
  CHECK(a.identity().linked(IdentityKind::somatic, wolf, same));
}

TEST_CASE("quotations run in their scene") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"fairytale\" / is-current-scene.");
  say(a, "A woman / exists.");
  say(a, "A girl \"LRRH\" / exists.");
  auto r = say(a,
               "Woman --parent-of-- \"LRRH\" / implies in \"fairytale\" // a scene \"orders\" / "
               "exists.");
  CHECK(r.vis.size() == 2);
  CHECK(a.world().find_scene("orders").has_value());
  const auto& inquit = a.world().vis.at(r.vis.front());
  CHECK(inquit.kind == VerbKind::quote);
  CHECK(inquit.quoted == r.vis.back());
}

TEST_CASE("scene switches stated inside a says quotation do not move the listener") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"bedroom\" / is-current-scene.");
  say(a, "A man / exists.");
  say(a, "A scene \"story\" / exists.");
  Id bedroom = *a.world().current_scene;
  say(a, "The man / says in \"story\" // scene / is-current-scene.");
  CHECK(a.world().current_scene == bedroom);
}

TEST_CASE("is-only-scene retires everything else") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"one\" / is-current-scene.");
  Id wolf = only_created(say(a, "A wolf / exists."));
  say(a, "A scene \"two\" / is-only-scene.");
  CHECK_FALSE(a.world().in_focus(wolf));
}

TEST_CASE("focus decay follows the exponential law") {
  Params p;
  p.lambda_instance = 0.1;
  Agent a = agent_with("base.kb", p);
  say(a, "A scene \"s\" / is-current-scene.");
  Id wolf = only_created(say(a, "A wolf / exists."));
  a.focus_tick(0.0);
  CHECK(a.world().weight(wolf) == 1.0);
  a.focus_tick(0.0);
  CHECK(a.world().weight(wolf) == 1.0);
  a.focus_tick(1.0);
  CHECK(a.world().weight(wolf) == doctest::Approx(std::exp(-0.1)).epsilon(1e-12));
  CHECK(a.world().weight(wolf) == doctest::Approx(0.904837).epsilon(1e-6));
}

TEST_CASE("a successor pushes the previous action out") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"s\" / is-current-scene.");
  say(a, "A wolf / exists.");
  Id first = say(a, "The wolf / sleeps.").vis.back();
  a.focus_tick(0.0);
  a.mutable_world().focus.at(first).weight = 0.8;
  say(a, "The wolf / dances.");
  a.focus_tick(0.0);
  CHECK(a.world().weight(first) == doctest::Approx(0.8 * 0.5).epsilon(1e-12));
}

TEST_CASE("components below the eviction threshold are demoted and never return") {
  Agent a = agent_with("base.kb");
  say(a, "A scene \"s\" / is-current-scene.");
  Id wolf = only_created(say(a, "A wolf / exists."));
  a.focus_tick(0.0);
  a.mutable_world().focus.at(wolf).weight = 0.051;
  a.focus_tick(1.0);
  CHECK_FALSE(a.world().in_focus(wolf));
  CHECK(a.world().memory.contains(wolf));
  CHECK_THROWS_AS(say(a, "The wolf / sleeps."), ResolutionError);
}

TEST_CASE("fast pacing never instantiates predictions") {
  Agent a = agent_with("lrrh.kb");
  say(a, "A scene \"s\" / is-current-scene.");
  CHECK(a.instantiate_inferences(0).empty());
  tell(a, "A wolf / exists.", 0.0);
  for (const auto& [id, v] : a.world().vis) CHECK_FALSE(v.inferred);
}

TEST_CASE("empty story leaves an empty trace") {
  Agent a = agent_with("base.kb");
  a.run_story({}, 1.0);
  CHECK(a.trace().empty());
}

TEST_CASE("negative pacing is rejected") {
  Agent a = agent_with("base.kb");
  CHECK_THROWS_AS(tell(a, "A scene \"s\" / is-current-scene.", -1.0), SemanticError);
}

TEST_CASE("the trace is deterministic") {
  auto run = [] {
    Agent a = agent_with("base.kb");
    for (const char* s : {"A scene \"s\" / is-current-scene.", "A wolf / exists.",
                          "A girl / exists.", "The wolf / eats / the girl.",
                          "The wolf / changes / dead."}) {
      tell(a, s, 0.7);
    }
    std::string out;
    for (const auto& r : a.trace()) out += to_json_line(r) + "\n";
    return out;
  };
  CHECK(run() == run());
}
