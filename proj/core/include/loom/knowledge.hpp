#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "loom/ids.hpp"

namespace loom {

enum class ConceptKind { attribute, verb };

std::string_view to_string(ConceptKind kind);

struct Concept {
  ConceptId id;
  std::string name;
  ConceptKind kind = ConceptKind::attribute;
  double area = 1.0;
  /// Verb concepts only: the verb sets up a relation instead of an action.
  bool relation = false;
  bool proper_noun = false;
};

/// Simultaneous activation of several concepts of one kind. Energies live in
/// (0,1]; concepts with zero energy are simply absent.
class ConceptOverlay {
 public:
  explicit ConceptOverlay(ConceptKind kind = ConceptKind::attribute) : kind_(kind) {}

  ConceptKind kind() const { return kind_; }
  bool empty() const { return energies_.empty(); }
  std::size_t size() const { return energies_.size(); }
  const std::map<ConceptId, double>& energies() const { return energies_; }

  double energy(ConceptId c) const;
  bool contains(ConceptId c) const { return energies_.contains(c); }

  /// Raise the energy of `c` to `energy` if it is lower (max-combine).
  /// Energies are clamped to 1; non-positive energies are ignored.
  void activate(ConceptId c, double energy);

  /// Max-combine every activation of `other` into this overlay.
  void merge(const ConceptOverlay& other);

  bool operator==(const ConceptOverlay&) const = default;

 private:
  ConceptKind kind_;
  std::map<ConceptId, double> energies_;
};

/// Symmetric pairwise overlap between concepts. The diagonal is implicit:
/// overlap(a,a) equals the area of a and is answered by the knowledge base.
class OverlapTable {
 public:
  void set(ConceptId a, ConceptId b, double amount);
  std::optional<double> get(ConceptId a, ConceptId b) const;
  std::size_t size() const { return entries_.size(); }

 private:
  static std::pair<ConceptId, ConceptId> key(ConceptId a, ConceptId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }

  std::map<std::pair<ConceptId, ConceptId>, double> entries_;
};

/// Words to overlays, kept separately for noun/adjective words (attribute
/// overlays), verb/adverb words (verb overlays) and quoted proper nouns, so a
/// proper noun never shadows a common noun with the same spelling.
struct Lexicon {
  std::map<std::string, ConceptOverlay, std::less<>> nouns;
  std::map<std::string, ConceptOverlay, std::less<>> verbs;
  std::map<std::string, ConceptOverlay, std::less<>> proper_nouns;
};

enum class Strictness { strict, lenient };

/// Agent-specific domain knowledge: concepts, overlaps and the lexicon.
class KnowledgeBase {
 public:
  static constexpr double default_area = 1.0;

  const Concept& define_concept(std::string_view name, ConceptKind kind,
                                double area = default_area, bool relation = false);

  /// Returns the concept called `name`, creating it with the default area when
  /// it does not exist yet.
  const Concept& ensure_concept(std::string_view name, ConceptKind kind);

  /// Stores a symmetric overlap. An empty `amount` means full overlap, which is
  /// the smaller of the two areas.
  void define_overlap(ConceptId a, ConceptId b, std::optional<double> amount);

  double overlap(ConceptId a, ConceptId b) const;
  double area(ConceptId c) const { return concept_at(c).area; }

  const Concept& concept_at(ConceptId c) const;
  std::optional<ConceptId> find_concept(std::string_view name, ConceptKind kind) const;
  std::size_t concept_count() const { return concepts_.size(); }
  const std::vector<Concept>& concepts() const { return concepts_; }

  void define_word(std::string_view word, ConceptOverlay overlay);
  bool knows_word(std::string_view word, ConceptKind kind) const;

  /// Looks a word up. Unknown words raise KnowledgeError in strict mode; in
  /// lenient mode a fresh concept named after the word is created together
  /// with its lexicon entry.
  ConceptOverlay word_to_overlay(std::string_view word, ConceptKind kind,
                                 Strictness strictness);

  /// First use creates a concept with the proper-noun area and a lexicon
  /// entry; later uses return the same overlay.
  ConceptOverlay intern_proper_noun(std::string_view name);
  bool is_proper_noun(std::string_view name) const;

  /// Degree in [0,1] to which `attrs` implies concept `c`.
  double query_attribute(const ConceptOverlay& attrs, ConceptId c) const;

  /// Bilinear form sum_a sum_b e_x(a) e_y(b) overlap(a,b).
  double overlap_product(const ConceptOverlay& x, const ConceptOverlay& y) const;

  /// Cosine similarity under the overlap bilinear form; 0 for empty overlays.
  double overlay_match(const ConceptOverlay& x, const ConceptOverlay& y) const;

  /// Human readable form, e.g. `[human=1, female=1, young=0.5]`.
  std::string describe(const ConceptOverlay& overlay) const;

  /// Name of the strongest concept, ties broken by name.
  std::string dominant_name(const ConceptOverlay& overlay) const;

  const Lexicon& lexicon() const { return lexicon_; }
  const OverlapTable& overlaps() const { return overlaps_; }

  double proper_noun_area() const { return proper_noun_area_; }
  void set_proper_noun_area(double area);

 private:
  using NameIndex = std::map<std::string, ConceptId, std::less<>>;
  NameIndex& index(ConceptKind kind) {
    return kind == ConceptKind::attribute ? attribute_names_ : verb_names_;
  }
  const NameIndex& index(ConceptKind kind) const {
    return kind == ConceptKind::attribute ? attribute_names_ : verb_names_;
  }

  std::vector<Concept> concepts_;
  NameIndex attribute_names_;
  NameIndex verb_names_;
  OverlapTable overlaps_;
  Lexicon lexicon_;
  double proper_noun_area_ = 0.1;
};

/// Lowercases ASCII letters; words and proper nouns are case-insensitive.
std::string normalize_word(std::string_view word);

/// Parses the line-oriented knowledge format:
///
///     # comment
///     concept human
///     concept tiny area 0.2
///     concept girl = human:1.0 female:1.0 young:0.5 small:0.5
///     verb hits
///     verb gobbles-up = eats:1.0
///     relation loves
///     overlap man human full
///     overlap fearless courageous 0.5
///     include other.kb
///
/// `include` paths are relative to `base_dir`.
void load_knowledge_text(KnowledgeBase& kb, std::string_view text,
                         const std::filesystem::path& base_dir = {},
                         std::string_view source = "<text>");

void load_knowledge_file(KnowledgeBase& kb, const std::filesystem::path& path);

}  // namespace loom
