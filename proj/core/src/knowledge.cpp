#include "loom/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "loom/errors.hpp"

namespace loom {

std::string_view to_string(ConceptKind kind) {
  return kind == ConceptKind::attribute ? "attribute" : "verb";
}

std::string normalize_word(std::string_view word) {
  std::string out(word);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

double ConceptOverlay::energy(ConceptId c) const {
  auto it = energies_.find(c);
  return it == energies_.end() ? 0.0 : it->second;
}

void ConceptOverlay::activate(ConceptId c, double energy) {
  if (!(energy > 0.0)) return;
  energy = std::min(energy, 1.0);
  auto [it, inserted] = energies_.try_emplace(c, energy);
  if (!inserted) it->second = std::max(it->second, energy);
}

void ConceptOverlay::merge(const ConceptOverlay& other) {
  for (const auto& [c, e] : other.energies_) activate(c, e);
}

void OverlapTable::set(ConceptId a, ConceptId b, double amount) {
  entries_[key(a, b)] = amount;
}

std::optional<double> OverlapTable::get(ConceptId a, ConceptId b) const {
  auto it = entries_.find(key(a, b));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const Concept& KnowledgeBase::define_concept(std::string_view name, ConceptKind kind,
                                             double area, bool relation) {
  std::string key = normalize_word(name);
  if (key.empty()) throw KnowledgeError("concept name is empty");
  if (!(area > 0.0) || !std::isfinite(area)) {
    throw KnowledgeError("concept '" + key + "' needs a positive area");
  }
  auto& names = index(kind);
  if (names.contains(key)) {
    throw KnowledgeError("duplicate " + std::string(to_string(kind)) + " concept '" + key + "'");
  }
  ConceptId id(static_cast<std::uint32_t>(concepts_.size()));
  concepts_.push_back(Concept{id, key, kind, area, relation && kind == ConceptKind::verb, false});
  names.emplace(key, id);
  return concepts_.back();
}

const Concept& KnowledgeBase::ensure_concept(std::string_view name, ConceptKind kind) {
  if (auto id = find_concept(name, kind)) return concepts_[id->value];
  return define_concept(name, kind);
}

void KnowledgeBase::define_overlap(ConceptId a, ConceptId b, std::optional<double> amount) {
  const Concept& ca = concept_at(a);
  const Concept& cb = concept_at(b);
  if (ca.kind != cb.kind) {
    throw KnowledgeError("overlap between '" + ca.name + "' and '" + cb.name +
                         "' mixes attribute and verb concepts");
  }
  double cap = std::min(ca.area, cb.area);
  double value = amount.value_or(cap);
  if (value < 0.0 || !std::isfinite(value)) {
    throw KnowledgeError("overlap between '" + ca.name + "' and '" + cb.name +
                         "' must be non-negative");
  }
  if (value > cap + 1e-12) {
    throw KnowledgeError("overlap between '" + ca.name + "' and '" + cb.name +
                         "' exceeds the smaller area");
  }
  if (a == b) {
    if (std::abs(value - ca.area) > 1e-12) {
      throw KnowledgeError("self overlap of '" + ca.name + "' must equal its area");
    }
    return;
  }
  overlaps_.set(a, b, value);
}

double KnowledgeBase::overlap(ConceptId a, ConceptId b) const {
  if (a == b) return concept_at(a).area;
  return overlaps_.get(a, b).value_or(0.0);
}

const Concept& KnowledgeBase::concept_at(ConceptId c) const {
  if (c.value >= concepts_.size()) throw KnowledgeError("unknown concept id");
  return concepts_[c.value];
}

std::optional<ConceptId> KnowledgeBase::find_concept(std::string_view name,
                                                     ConceptKind kind) const {
  const auto& names = index(kind);
  auto it = names.find(normalize_word(name));
  if (it == names.end()) return std::nullopt;
  return it->second;
}

void KnowledgeBase::define_word(std::string_view word, ConceptOverlay overlay) {
  for (const auto& [c, e] : overlay.energies()) {
    if (concept_at(c).kind != overlay.kind()) {
      throw KnowledgeError("overlay for '" + std::string(word) + "' mixes concept kinds");
    }
  }
  auto& table = overlay.kind() == ConceptKind::attribute ? lexicon_.nouns : lexicon_.verbs;
  table.insert_or_assign(normalize_word(word), std::move(overlay));
}

bool KnowledgeBase::knows_word(std::string_view word, ConceptKind kind) const {
  const auto& table = kind == ConceptKind::attribute ? lexicon_.nouns : lexicon_.verbs;
  return table.contains(normalize_word(word));
}

ConceptOverlay KnowledgeBase::word_to_overlay(std::string_view word, ConceptKind kind,
                                              Strictness strictness) {
  std::string key = normalize_word(word);
  const auto& table = kind == ConceptKind::attribute ? lexicon_.nouns : lexicon_.verbs;
  if (auto it = table.find(key); it != table.end()) return it->second;
  if (strictness == Strictness::strict) {
    throw KnowledgeError("unknown " +
                         std::string(kind == ConceptKind::attribute ? "noun" : "verb") +
                         " '" + key + "'");
  }
  const Concept& fresh = ensure_concept(key, kind);
  ConceptOverlay overlay(kind);
  overlay.activate(fresh.id, 1.0);
  define_word(key, overlay);
  return overlay;
}

ConceptOverlay KnowledgeBase::intern_proper_noun(std::string_view name) {
  std::string key = normalize_word(name);
  if (auto it = lexicon_.proper_nouns.find(key); it != lexicon_.proper_nouns.end()) {
    return it->second;
  }
  // A proper noun gets its own concept even when a common noun shares the
  // spelling, so the concept is keyed with a quote prefix.
  const Concept& c = define_concept("\"" + key, ConceptKind::attribute, proper_noun_area_);
  concepts_[c.id.value].proper_noun = true;
  ConceptOverlay overlay(ConceptKind::attribute);
  overlay.activate(c.id, 1.0);
  lexicon_.proper_nouns.emplace(key, overlay);
  return overlay;
}

bool KnowledgeBase::is_proper_noun(std::string_view name) const {
  return lexicon_.proper_nouns.contains(normalize_word(name));
}

double KnowledgeBase::query_attribute(const ConceptOverlay& attrs, ConceptId c) const {
  double best = 0.0;
  for (const auto& [a, e] : attrs.energies()) {
    double implied = e * overlap(a, c) / area(a);
    best = std::max(best, implied);
  }
  return std::clamp(best, 0.0, 1.0);
}

double KnowledgeBase::overlap_product(const ConceptOverlay& x, const ConceptOverlay& y) const {
  double sum = 0.0;
  for (const auto& [a, ea] : x.energies()) {
    for (const auto& [b, eb] : y.energies()) {
      double o = overlap(a, b);
      if (o != 0.0) sum += ea * eb * o;
    }
  }
  return sum;
}

double KnowledgeBase::overlay_match(const ConceptOverlay& x, const ConceptOverlay& y) const {
  if (x.kind() != y.kind()) {
    throw KnowledgeError("cannot match an attribute overlay against a verb overlay");
  }
  if (x.empty() || y.empty()) return 0.0;
  double xy = overlap_product(x, y);
  if (xy <= 0.0) return 0.0;
  double xx = overlap_product(x, x);
  double yy = overlap_product(y, y);
  return std::clamp(xy / std::sqrt(xx * yy), 0.0, 1.0);
}

std::string KnowledgeBase::describe(const ConceptOverlay& overlay) const {
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (const auto& [c, e] : overlay.energies()) {
    if (!first) os << ", ";
    first = false;
    os << concept_at(c).name << '=' << e;
  }
  os << ']';
  return os.str();
}

std::string KnowledgeBase::dominant_name(const ConceptOverlay& overlay) const {
  const Concept* best = nullptr;
  double best_energy = -1.0;
  for (const auto& [c, e] : overlay.energies()) {
    const Concept& def = concept_at(c);
    if (e > best_energy || (e == best_energy && def.name < best->name)) {
      best = &def;
      best_energy = e;
    }
  }
  return best ? best->name : std::string{};
}

void KnowledgeBase::set_proper_noun_area(double area) {
  if (!(area > 0.0)) throw KnowledgeError("proper-noun area must be positive");
  proper_noun_area_ = area;
}

}  // namespace loom
