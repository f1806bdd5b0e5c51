#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "loom/errors.hpp"
#include "loom/knowledge.hpp"

namespace loom {
namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw KnowledgeError(where + ": expected a number, got '" + text + "'");
  }
  return value;
}

struct Loader {
  KnowledgeBase& kb;
  std::string source;
  std::filesystem::path base_dir;
  int depth = 0;

  std::string where(int line) const { return source + ":" + std::to_string(line); }

  ConceptOverlay parse_overlay(const std::vector<std::string>& toks, std::size_t from,
                               ConceptKind kind, int line) {
    ConceptOverlay overlay(kind);
    if (from >= toks.size()) throw KnowledgeError(where(line) + ": empty overlay");
    for (std::size_t i = from; i < toks.size(); ++i) {
      const std::string& tok = toks[i];
      auto colon = tok.rfind(':');
      std::string name = colon == std::string::npos ? tok : tok.substr(0, colon);
      double energy =
          colon == std::string::npos ? 1.0 : parse_number(tok.substr(colon + 1), where(line));
      if (!(energy > 0.0) || energy > 1.0) {
        throw KnowledgeError(where(line) + ": energy of '" + name + "' must be in (0,1]");
      }
      overlay.activate(kb.ensure_concept(name, kind).id, energy);
    }
    return overlay;
  }

  void declaration(const std::vector<std::string>& toks, ConceptKind kind, bool relation,
                   int line) {
    if (toks.size() < 2) throw KnowledgeError(where(line) + ": missing name");
    const std::string& name = toks[1];
    if (toks.size() >= 3 && toks[2] == "=") {
      kb.define_word(name, parse_overlay(toks, 3, kind, line));
      return;
    }
    double area = KnowledgeBase::default_area;
    if (toks.size() == 4 && toks[2] == "area") {
      area = parse_number(toks[3], where(line));
    } else if (toks.size() != 2) {
      throw KnowledgeError(where(line) + ": expected '" + toks[0] + " NAME [area A]' or '" +
                           toks[0] + " WORD = concept:energy ...'");
    }
    try {
      const Concept& c = kb.define_concept(name, kind, area, relation);
      ConceptOverlay overlay(kind);
      overlay.activate(c.id, 1.0);
      kb.define_word(name, overlay);
    } catch (const KnowledgeError& e) {
      throw KnowledgeError(where(line) + ": " + e.what());
    }
  }

  std::optional<ConceptId> lookup_any(const std::string& name) const {
    if (auto id = kb.find_concept(name, ConceptKind::attribute)) return id;
    return kb.find_concept(name, ConceptKind::verb);
  }

  void overlap(const std::vector<std::string>& toks, int line) {
    if (toks.size() != 4) {
      throw KnowledgeError(where(line) + ": expected 'overlap A B (full|AMOUNT)'");
    }
    auto a = lookup_any(toks[1]);
    auto b = lookup_any(toks[2]);
    if (!a) throw KnowledgeError(where(line) + ": unknown concept '" + toks[1] + "'");
    if (!b) throw KnowledgeError(where(line) + ": unknown concept '" + toks[2] + "'");
    // Prefer a same-kind pairing when a name exists as both kinds.
    if (kb.concept_at(*a).kind != kb.concept_at(*b).kind) {
      if (auto alt = kb.find_concept(toks[2], kb.concept_at(*a).kind)) b = alt;
    }
    std::optional<double> amount;
    if (normalize_word(toks[3]) != "full") amount = parse_number(toks[3], where(line));
    try {
      kb.define_overlap(*a, *b, amount);
    } catch (const KnowledgeError& e) {
      throw KnowledgeError(where(line) + ": " + e.what());
    }
  }

  void run(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      auto toks = split_ws(raw);
      if (toks.empty()) continue;
      std::string keyword = normalize_word(toks[0]);
      if (keyword == "concept") {
        declaration(toks, ConceptKind::attribute, false, line);
      } else if (keyword == "verb") {
        declaration(toks, ConceptKind::verb, false, line);
      } else if (keyword == "relation") {
        declaration(toks, ConceptKind::verb, true, line);
      } else if (keyword == "overlap") {
        overlap(toks, line);
      } else if (keyword == "include") {
        if (toks.size() != 2) throw KnowledgeError(where(line) + ": expected 'include PATH'");
        if (depth > 16) throw KnowledgeError(where(line) + ": include nesting too deep");
        auto path = base_dir / toks[1];
        std::ifstream file(path);
        if (!file) throw IoError(where(line) + ": cannot open '" + path.string() + "'");
        std::stringstream buffer;
        buffer << file.rdbuf();
        Loader nested{kb, path.string(), path.parent_path(), depth + 1};
        nested.run(buffer.str());
      } else {
        throw KnowledgeError(where(line) + ": unknown directive '" + toks[0] + "'");
      }
    }
  }
};

}  // namespace

void load_knowledge_text(KnowledgeBase& kb, std::string_view text,
                         const std::filesystem::path& base_dir, std::string_view source) {
  Loader{kb, std::string(source), base_dir}.run(text);
}

void load_knowledge_file(KnowledgeBase& kb, const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open knowledge file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  load_knowledge_text(kb, buffer.str(), path.parent_path(), path.string());
}

}  // namespace loom
