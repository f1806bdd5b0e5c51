#include <sstream>

#include "loom/parser.hpp"

namespace loom {
namespace {

void print_part(std::ostream& os, const PartAst& p) {
  bool space = false;
  auto sep = [&] {
    if (space) os << ' ';
    space = true;
  };
  if (p.article == Article::indefinite) {
    sep();
    os << "a";
  } else if (p.article == Article::definite) {
    sep();
    os << "the";
  }
  if (p.wh) {
    sep();
    os << "wh";
  }
  for (const auto& w : p.words) {
    sep();
    os << w;
  }
  if (p.proper_noun) {
    sep();
    os << '"' << *p.proper_noun << '"';
  }
  if (p.scene_ref) {
    sep();
    os << "in \"" << *p.scene_ref << '"';
  }
  if (p.relation) {
    os << " --" << p.relation->word << "-- ";
    print_part(os, *p.relation->right);
  }
}

void print_sentence(std::ostream& os, const SentenceAst& s) {
  print_part(os, s.subject);
  os << " / ";
  if (s.verb.wh) os << "wh ";
  for (std::size_t i = 0; i < s.verb.words.size(); ++i) {
    if (i) os << ' ';
    os << s.verb.words[i];
  }
  if (s.verb.scene_ref) os << " in \"" << *s.verb.scene_ref << '"';
  if (s.quoted) {
    os << " // ";
    print_sentence(os, **s.quoted);
    return;
  }
  if (s.object) {
    os << " / ";
    print_part(os, *s.object);
  }
  os << (s.kind == SentenceKind::question ? "?" : ".");
}

}  // namespace

std::string to_xapi(const SentenceAst& sentence) {
  std::ostringstream os;
  print_sentence(os, sentence);
  return os.str();
}

std::string to_xapi(const PartAst& part) {
  std::ostringstream os;
  print_part(os, part);
  return os.str();
}

}  // namespace loom
