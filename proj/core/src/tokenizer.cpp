#include <cctype>

#include "loom/errors.hpp"
#include "loom/parser.hpp"

namespace loom {
namespace {

bool is_word_char(char ch) {
  auto u = static_cast<unsigned char>(ch);
  return std::isalnum(u) || ch == '-' || ch == '_' || ch == '\'' || u >= 0x80;
}

class Lexer {
 public:
  Lexer(std::string_view text, int line) : text_(text), line_(line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (at_end()) break;
      char ch = peek();
      if (ch == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else if (ch == '"') {
        out.push_back(quoted());
      } else if (ch == '/') {
        ++pos_;
        if (!at_end() && peek() == '/') {
          ++pos_;
          out.push_back({TokenKind::quote_sep, "//", line_});
        } else {
          out.push_back({TokenKind::slash, "/", line_});
        }
      } else if (ch == '-' && peek(1) == '-') {
        out.push_back(relation());
      } else if (ch == '.') {
        ++pos_;
        out.push_back({TokenKind::period, ".", line_});
      } else if (ch == '?') {
        ++pos_;
        out.push_back({TokenKind::question, "?", line_});
      } else if (is_word_char(ch)) {
        out.push_back({TokenKind::word, word(), line_});
      } else {
        throw ParseError(std::string("stray character '") + ch + "'", line_);
      }
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
      if (peek() == '\n') ++line_;
      ++pos_;
    }
  }

  // A word stops at whitespace, punctuation, or a `--` relation marker.
  std::string word() {
    std::size_t start = pos_;
    while (!at_end() && is_word_char(peek()) && !(peek() == '-' && peek(1) == '-')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Token quoted() {
    int line = line_;
    ++pos_;
    std::size_t start = pos_;
    while (!at_end() && peek() != '"' && peek() != '\n') ++pos_;
    if (at_end() || peek() != '"') throw ParseError("unterminated quote", line);
    std::string body(text_.substr(start, pos_ - start));
    ++pos_;
    if (body.empty()) throw ParseError("empty proper noun", line);
    return {TokenKind::quoted, body, line};
  }

  Token relation() {
    int line = line_;
    pos_ += 2;
    skip_space();
    std::string name = word();
    skip_space();
    if (name.empty() || peek() != '-' || peek(1) != '-') {
      throw ParseError("malformed relation marker, expected --word--", line);
    }
    pos_ += 2;
    return {TokenKind::relation, name, line};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, int first_line) {
  return Lexer(text, first_line).run();
}

}  // namespace loom
