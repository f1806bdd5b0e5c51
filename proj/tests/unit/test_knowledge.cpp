#include <doctest.h>

#include <cmath>
#include <random>

#include "loom/errors.hpp"
#include "loom/knowledge.hpp"

using namespace loom;

namespace {

KnowledgeBase small_kb() {
  KnowledgeBase kb;
  load_knowledge_text(kb, R"(
concept human
concept female
concept young
concept small
concept man
overlap man human full
concept courageous
concept fearless
overlap fearless courageous 0.5
concept girl = human:1.0 female:1.0 young:0.5 small:0.5
overlap young small 0.3
verb eats
)");
  return kb;
}

ConceptId attr(const KnowledgeBase& kb, const char* name) {
  return *kb.find_concept(name, ConceptKind::attribute);
}

/// Bilinear form written out over every pair of concepts in the base.
double brute_product(const KnowledgeBase& kb, const ConceptOverlay& x, const ConceptOverlay& y) {
  double sum = 0.0;
  for (const auto& a : kb.concepts()) {
    for (const auto& b : kb.concepts()) {
      double ea = x.energy(a.id), eb = y.energy(b.id);
      if (ea == 0.0 || eb == 0.0) continue;
      sum += ea * eb * kb.overlap(a.id, b.id);
    }
  }
  return sum;
}

double brute_match(const KnowledgeBase& kb, const ConceptOverlay& x, const ConceptOverlay& y) {
  double xy = brute_product(kb, x, y), xx = brute_product(kb, x, x), yy = brute_product(kb, y, y);
  if (xx <= 0.0 || yy <= 0.0) return 0.0;
  return xy / std::sqrt(xx * yy);
}

}  // namespace

TEST_CASE("concepts get the default area and are unique per kind") {
  KnowledgeBase kb;
  const Concept& human = kb.define_concept("human", ConceptKind::attribute);
  CHECK(human.area == 1.0);
  CHECK_THROWS_AS(kb.define_concept("human", ConceptKind::attribute), KnowledgeError);
  const Concept& eats = kb.define_concept("eats", ConceptKind::verb);
  CHECK(eats.id != kb.find_concept("human", ConceptKind::attribute));
  CHECK_FALSE(kb.find_concept("eats", ConceptKind::attribute).has_value());
}

TEST_CASE("overlaps are symmetric and capped by the smaller area") {
  KnowledgeBase kb = small_kb();
  CHECK(kb.overlap(attr(kb, "man"), attr(kb, "human")) == doctest::Approx(1.0));
  CHECK(kb.overlap(attr(kb, "courageous"), attr(kb, "fearless")) == doctest::Approx(0.5));
  CHECK(kb.overlap(attr(kb, "fearless"), attr(kb, "courageous")) == doctest::Approx(0.5));
  CHECK_THROWS_AS(kb.define_overlap(attr(kb, "man"), attr(kb, "human"), 2.0), KnowledgeError);
}

TEST_CASE("query_attribute follows overlaps") {
  KnowledgeBase kb = small_kb();
  auto man = kb.word_to_overlay("man", ConceptKind::attribute, Strictness::strict);
  auto fearless = kb.word_to_overlay("fearless", ConceptKind::attribute, Strictness::strict);
  CHECK(kb.query_attribute(man, attr(kb, "human")) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kb.query_attribute(fearless, attr(kb, "courageous")) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(kb.query_attribute(ConceptOverlay{}, attr(kb, "human")) == 0.0);
}

TEST_CASE("nouns expand to overlays") {
  KnowledgeBase kb = small_kb();
  auto girl = kb.word_to_overlay("girl", ConceptKind::attribute, Strictness::strict);
  CHECK(girl.size() == 4);
  CHECK(girl.energy(attr(kb, "human")) == 1.0);
  CHECK(girl.energy(attr(kb, "female")) == 1.0);
  CHECK(girl.energy(attr(kb, "young")) == 0.5);
  CHECK(girl.energy(attr(kb, "small")) == 0.5);
}

TEST_CASE("unknown words: error when strict, fresh concept when lenient") {
  KnowledgeBase kb = small_kb();
  CHECK_THROWS_AS(kb.word_to_overlay("xyzzy", ConceptKind::attribute, Strictness::strict),
                  KnowledgeError);
  std::size_t before = kb.concept_count();
  auto g = kb.word_to_overlay("gobbles-up", ConceptKind::verb, Strictness::lenient);
  CHECK(kb.concept_count() == before + 1);
  CHECK(g.size() == 1);
  CHECK(kb.knows_word("gobbles-up", ConceptKind::verb));
  auto eats = kb.word_to_overlay("eats", ConceptKind::verb, Strictness::strict);
  CHECK(kb.overlay_match(g, eats) == 0.0);
}

TEST_CASE("proper nouns get one small concept each") {
  KnowledgeBase kb = small_kb();
  auto first = kb.intern_proper_noun("LRRH");
  std::size_t count = kb.concept_count();
  auto second = kb.intern_proper_noun("lrrh");
  CHECK(first == second);
  CHECK(kb.concept_count() == count);
  REQUIRE(first.size() == 1);
  CHECK(kb.area(first.energies().begin()->first) == doctest::Approx(0.1));
  CHECK(first.energies().begin()->second == 1.0);
}

TEST_CASE("overlay_match equals the brute-force bilinear cosine") {
  KnowledgeBase kb = small_kb();
  auto girl = kb.word_to_overlay("girl", ConceptKind::attribute, Strictness::strict);
  auto human = kb.word_to_overlay("human", ConceptKind::attribute, Strictness::strict);
  CHECK(kb.overlay_match(girl, human) == doctest::Approx(brute_match(kb, girl, human)).epsilon(1e-12));
  CHECK(kb.overlay_match(human, human) == doctest::Approx(1.0));

  auto female = kb.word_to_overlay("female", ConceptKind::attribute, Strictness::strict);
  auto man = kb.word_to_overlay("man", ConceptKind::attribute, Strictness::strict);
  CHECK(kb.overlay_match(female, man) == 0.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> energy(0.0, 1.0);
  std::vector<ConceptId> ids;
  for (const auto& c : kb.concepts()) {
    if (c.kind == ConceptKind::attribute) ids.push_back(c.id);
  }
  for (int trial = 0; trial < 200; ++trial) {
    ConceptOverlay x, y;
    for (ConceptId c : ids) {
      if (energy(rng) < 0.5) x.activate(c, energy(rng));
      if (energy(rng) < 0.5) y.activate(c, energy(rng));
    }
    CHECK(kb.overlay_match(x, y) == doctest::Approx(brute_match(kb, x, y)).epsilon(1e-9));
  }
}

TEST_CASE("overlays max-combine and clamp") {
  KnowledgeBase kb = small_kb();
  ConceptOverlay o;
  o.activate(attr(kb, "human"), 0.4);
  o.activate(attr(kb, "human"), 0.2);
  CHECK(o.energy(attr(kb, "human")) == 0.4);
  o.activate(attr(kb, "human"), 3.0);
  CHECK(o.energy(attr(kb, "human")) == 1.0);
  o.activate(attr(kb, "female"), 0.0);
  CHECK_FALSE(o.contains(attr(kb, "female")));
}

TEST_CASE("loader reports malformed lines") {
  KnowledgeBase kb;
  CHECK_THROWS_AS(load_knowledge_text(kb, "concept\n"), KnowledgeError);
  CHECK_THROWS_AS(load_knowledge_text(kb, "concept a = human:1.5\n"), KnowledgeError);
  CHECK_THROWS_AS(load_knowledge_text(kb, "frobnicate x\n"), KnowledgeError);
}
