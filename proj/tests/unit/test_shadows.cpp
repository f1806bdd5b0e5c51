#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "loom/errors.hpp"
#include "loom/shadows.hpp"
#include "loom/snapshot.hpp"

using namespace loom;

namespace {

/// Memory of one wolf with salience 1 and nothing else.
const char* kLoneWolf = R"({
  "format": 1, "next_id": 3,
  "scenes": [{"id": 1, "name": "old", "members": [2]}],
  "instances": [{"id": 2, "attributes": {"animal": 1.0, "canine": 1.0, "wild": 1.0, "predator": 0.5},
                 "scenes": [1], "created": 0.0, "participation": 0, "salience": 1.0}],
  "vis": [], "relations": [], "identity": []
})";

}  // namespace

TEST_CASE("salience is time plus participation") {
  MemoryStore m;
  CHECK(m.demote(Id(1), {true, 30.0, 4}, 0.01, 0.2) == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(m.demote(Id(2), {true, 0.0, 0}, 0.01, 0.2) == 0.0);
  CHECK(m.contains(Id(2)));
  CHECK_THROWS(m.demote(Id(3), {false, 0.0, 0}, 0.01, 0.2));
  CHECK_THROWS(m.demote(Id(1), {true, 1.0, 0}, 0.01, 0.2));
}

TEST_CASE("surprise from support") {
  CHECK(surprise_for_support(9.0) == doctest::Approx(0.1));
  CHECK(surprise_for_support(0.0) == 1.0);
  for (double s = 0.0; s < 5.0; s += 0.25) CHECK(surprise_for_support(s + 0.1) < surprise_for_support(s));
}

TEST_CASE("empty memory gives empty shadows and no predictions") {
  Agent a = agent_with("base.kb");
  tell(a, "A scene \"s\" / is-current-scene.", 1.0);
  tell(a, "A wolf / exists.", 1.0);
  auto r = tell(a, "The wolf / dances.", 1.0);
  for (const auto& [id, body] : a.shadows().bodies()) CHECK(body.empty());
  CHECK(a.headless_shadows().empty());
  CHECK(a.world().vis.at(r.vis.back()).surprise == 1.0);
}

TEST_CASE("an instance shadow follows the scalar recurrence") {
  Params p;
  p.salience_decay = 0.0;
  Agent a = agent_with("base.kb", p);
  restore_memory_json(a, kLoneWolf);
  Id memory_wolf(2);
  say(a, "A scene \"s\" / is-current-scene.");
  Id wolf = say(a, "A wolf / exists.").created.at(0);

  double w = 0.0;
  const double dt = 1.0 / static_cast<double>(p.da_substeps);
  for (int burst = 0; burst < 5; ++burst) {
    a.diffuse(1.0);
    for (std::size_t k = 0; k < p.da_substeps; ++k) w = (1.0 - p.alpha * dt) * w + p.alpha * dt * 1.0;
    const ShadowBody* body = a.shadows().body(wolf);
    REQUIRE(body != nullptr);
    REQUIRE(body->contains(memory_wolf));
    CHECK(body->at(memory_wolf) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("fictional partners appear in each other's shadows") {
  Agent a = agent_with("lrrh.kb");
  std::ifstream in(std::filesystem::path(LOOM_SOURCE_DIR) / "corpus/lrrh/01_narrative_voice.xapi");
  std::stringstream ss;
  ss << in.rdbuf();
  a.run_story(parse_story(ss.str()), 1.0);
  auto cindy_concept = a.knowledge().find_concept("\"cindy", ConceptKind::attribute);
  auto lrrh_concept = a.knowledge().find_concept("\"lrrh", ConceptKind::attribute);
  std::optional<Id> cindy, lrrh;
  for (const auto& [id, inst] : a.world().instances) {
    if (inst.attributes.contains(*cindy_concept)) cindy = id;
    if (inst.attributes.contains(*lrrh_concept)) lrrh = id;
  }
  REQUIRE(cindy);
  REQUIRE(lrrh);
  const ShadowBody* body = a.shadows().body(*lrrh);
  REQUIRE(body != nullptr);
  REQUIRE(body->contains(*cindy));
  CHECK(body->at(*cindy) > 0.0);
  const ShadowBody* back = a.shadows().body(*cindy);
  REQUIRE(back != nullptr);
  CHECK(back->contains(*lrrh));
}

TEST_CASE("a predicted event is combined with its prediction") {
  Agent teller = agent_with("lrrh.kb");
  for (const char* s : {"A scene \"yard\" / is-current-scene.", "A fox / exists.", "A hen / exists.",
                        "The fox / chases / the hen.", "The fox / eats / the hen."}) {
    tell(teller, s, 1.0);
  }
  teller.rest();
  std::string memory = memory_snapshot_json(teller);

  Agent a = agent_with("lrrh.kb");
  restore_memory_json(a, memory);
  for (const char* s : {"A scene \"field\" / is-current-scene.", "A fox / exists.",
                        "A hen / exists.", "The fox / chases / the hen."}) {
    tell(a, s, 1.0);
  }
  auto before = a.headless_shadows();
  REQUIRE_FALSE(before.empty());
  CHECK(a.knowledge().dominant_name(before.front().verb) == "eats");
  Id rep = before.front().representative;

  auto r = tell(a, "The fox / eats / the hen.", 0.0);
  const VerbInstance& v = a.world().vis.at(r.vis.back());
  CHECK(v.surprise < 1.0);
  CHECK(v.surprise == doctest::Approx(surprise_for_support(before.front().support)));
  for (const auto& hs : a.headless_shadows()) CHECK(hs.representative != rep);
}

TEST_CASE("vi similarity respects kinds") {
  KnowledgeBase kb;
  load_knowledge_text(kb, "verb eats\nverb swallow\nverb swallows = eats:1 swallow:1\n");
  VerbInstance x, y;
  x.verb = kb.word_to_overlay("eats", ConceptKind::verb, Strictness::strict);
  y.verb = kb.word_to_overlay("swallows", ConceptKind::verb, Strictness::strict);
  CHECK(vi_similarity(kb, x, y) == doctest::Approx(kb.overlay_match(x.verb, y.verb)));
  y.kind = VerbKind::question;
  CHECK(vi_similarity(kb, x, y) == 0.0);
}
