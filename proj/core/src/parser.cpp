#include <array>
#include <sstream>

#include "loom/errors.hpp"
#include "loom/knowledge.hpp"
#include "loom/parser.hpp"

namespace loom {
namespace {

bool is_terminator(TokenKind kind) {
  return kind == TokenKind::period || kind == TokenKind::question;
}

bool ends_part(TokenKind kind) {
  return kind == TokenKind::slash || kind == TokenKind::quote_sep || is_terminator(kind);
}

class SentenceParser {
 public:
  explicit SentenceParser(const std::vector<Token>& tokens) : toks_(tokens) {}

  SentenceAst parse() {
    if (toks_.empty()) throw ParseError("empty sentence");
    SentenceAst s = sentence();
    if (pos_ != toks_.size()) {
      throw ParseError("unexpected '" + toks_[pos_].text + "' after the end of the sentence",
                       toks_[pos_].line);
    }
    return s;
  }

 private:
  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& peek() const { return toks_[pos_]; }
  int line() const { return at_end() ? toks_.back().line : peek().line; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line()); }

  void expect(TokenKind kind, const char* what) {
    if (at_end() || peek().kind != kind) fail(std::string("expected ") + what);
    ++pos_;
  }

  SentenceAst sentence() {
    SentenceAst s;
    s.line = line();
    s.subject = part(true);
    expect(TokenKind::slash, "'/' after the subject");
    s.verb = verb();
    if (at_end()) fail("missing sentence terminator");

    if (peek().kind == TokenKind::quote_sep) {
      if (!s.verb.communicative) {
        fail("'//' requires a communicative verb, got '" +
             (s.verb.words.empty() ? std::string{} : s.verb.words.front()) + "'");
      }
      ++pos_;
      s.kind = SentenceKind::quote;
      s.quoted = sentence();
      return s;
    }
    if (s.verb.scene_ref) fail("a scene adjunct on the verb needs a '//' quotation");

    if (peek().kind == TokenKind::slash) {
      ++pos_;
      s.object = part(true);
      if (!at_end() && peek().kind == TokenKind::slash) fail("too many sentence parts");
    }
    if (at_end() || !is_terminator(peek().kind)) fail("missing sentence terminator");
    bool question = peek().kind == TokenKind::question;
    ++pos_;
    bool wh = s.subject.wh || s.verb.wh || (s.object && s.object->wh);
    s.kind = question || wh ? SentenceKind::question : SentenceKind::action;
    return s;
  }

  VerbAst verb() {
    VerbAst v;
    while (!at_end() && !ends_part(peek().kind)) {
      const Token& t = peek();
      if (t.kind == TokenKind::word) {
        std::string w = normalize_word(t.text);
        ++pos_;
        if (w == "in" && !at_end() && peek().kind == TokenKind::quoted) {
          if (v.scene_ref) fail("duplicate scene adjunct");
          v.scene_ref = peek().text;
          ++pos_;
        } else if (w == "wh") {
          v.wh = true;
        } else {
          v.words.push_back(std::move(w));
        }
      } else {
        fail("unexpected '" + t.text + "' in the verb");
      }
    }
    if (v.words.empty()) fail("missing verb");
    v.communicative = is_communicative_verb(v.words.front());
    return v;
  }

  PartAst part(bool allow_relation) {
    PartAst p;
    if (!at_end() && peek().kind == TokenKind::word) {
      std::string w = normalize_word(peek().text);
      bool has_more = pos_ + 1 < toks_.size() && !ends_part(toks_[pos_ + 1].kind);
      if (has_more && (w == "a" || w == "an")) {
        p.article = Article::indefinite;
        ++pos_;
      } else if (has_more && w == "the") {
        p.article = Article::definite;
        ++pos_;
      }
    }
    while (!at_end() && !ends_part(peek().kind)) {
      const Token& t = peek();
      switch (t.kind) {
        case TokenKind::word: {
          std::string w = normalize_word(t.text);
          ++pos_;
          if (w == "in" && !at_end() && peek().kind == TokenKind::quoted) {
            set_scene(p, peek().text);
            ++pos_;
          } else if (w == "wh") {
            p.wh = true;
          } else {
            p.words.push_back(std::move(w));
          }
          break;
        }
        case TokenKind::quoted:
          if (p.proper_noun) fail("a part can carry only one proper noun");
          p.proper_noun = t.text;
          ++pos_;
          break;
        case TokenKind::relation: {
          std::string rel = normalize_word(t.text);
          ++pos_;
          if (rel == "in") {
            if (at_end() || peek().kind != TokenKind::quoted) fail("expected a scene after --in--");
            set_scene(p, peek().text);
            ++pos_;
          } else {
            if (!allow_relation || p.relation) fail("only one relation infix per part");
            PartAst right = part(false);
            p.relation = RelationInfix{rel, std::move(right)};
          }
          break;
        }
        default:
          fail("unexpected '" + t.text + "'");
      }
    }
    if (p.words.empty() && !p.proper_noun && !p.wh) fail("empty sentence part");
    return p;
  }

  void set_scene(PartAst& p, const std::string& scene) {
    if (p.scene_ref) fail("duplicate scene adjunct");
    p.scene_ref = scene;
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

}  // namespace

bool is_communicative_verb(std::string_view word) {
  static constexpr std::array<std::string_view, 12> verbs = {
      "says", "say", "asks", "ask", "thinks", "think",
      "writes", "write", "reads", "read", "implies", "imply"};
  std::string w = normalize_word(word);
  for (auto v : verbs) {
    if (v == w) return true;
  }
  return false;
}

SentenceAst parse_sentence(const std::vector<Token>& tokens) {
  return SentenceParser(tokens).parse();
}

std::vector<SentenceAst> parse_story(std::string_view text) {
  std::vector<Token> tokens = tokenize(text);
  std::vector<SentenceAst> out;
  std::vector<Token> current;
  for (auto& t : tokens) {
    bool end = is_terminator(t.kind);
    current.push_back(std::move(t));
    if (end) {
      out.push_back(parse_sentence(current));
      current.clear();
    }
  }
  if (!current.empty()) {
    throw ParseError("sentence without terminator", current.front().line);
  }
  return out;
}

}  // namespace loom
