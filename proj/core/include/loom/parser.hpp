#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace loom {

/// Heap-allocated value with deep copy and value equality, used for the
/// recursive parts of the syntax tree.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(implicit)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

enum class TokenKind {
  word,
  quoted,     // "Proper Noun"
  slash,      // /
  quote_sep,  // //
  relation,   // --word--
  period,
  question,
};

struct Token {
  TokenKind kind;
  std::string text;
  int line = 1;

  bool operator==(const Token&) const = default;
};

/// Splits Xapi text into tokens. Whitespace around `/`, `//` and `--` is
/// insignificant; `-- of --` and `--of--` give the same relation token.
std::vector<Token> tokenize(std::string_view text, int first_line = 1);

enum class Article { none, indefinite, definite };

struct PartAst;

struct RelationInfix {
  std::string word;
  Box<PartAst> right;

  bool operator==(const RelationInfix&) const = default;
};

/// One sentence part: a reference to (or introduction of) an instance.
struct PartAst {
  Article article = Article::none;
  std::vector<std::string> words;
  std::optional<std::string> proper_noun;
  std::optional<RelationInfix> relation;
  /// Scene named by `in "scene"` or `-- in -- "scene"`.
  std::optional<std::string> scene_ref;
  bool wh = false;

  bool operator==(const PartAst&) const = default;
};

struct VerbAst {
  /// Verb word followed by any adverbs, e.g. {"sees", "good"}.
  std::vector<std::string> words;
  bool communicative = false;
  /// Scene of a quotation, from `says in "scene"`.
  std::optional<std::string> scene_ref;
  bool wh = false;

  bool operator==(const VerbAst&) const = default;
};

enum class SentenceKind { action, question, quote };

struct SentenceAst {
  SentenceKind kind = SentenceKind::action;
  PartAst subject;
  VerbAst verb;
  std::optional<PartAst> object;
  /// Present exactly when kind is quote.
  std::optional<Box<SentenceAst>> quoted;
  int line = 0;

  /// Nesting depth of quotations: 1 for a plain sentence.
  int depth() const { return quoted ? 1 + (*quoted)->depth() : 1; }

  /// Structural equality; source line numbers are ignored.
  bool operator==(const SentenceAst& other) const {
    return kind == other.kind && subject == other.subject && verb == other.verb &&
           object == other.object && quoted == other.quoted;
  }
};

/// Verbs that introduce a quotation with `//`.
bool is_communicative_verb(std::string_view word);

/// Parses the tokens of exactly one sentence, terminator included.
SentenceAst parse_sentence(const std::vector<Token>& tokens);

/// Parses a whole story; `#` comments and blank lines are skipped and a
/// sentence may span several lines.
std::vector<SentenceAst> parse_story(std::string_view text);

/// Canonical Xapi rendering; parsing it gives back an equal tree.
std::string to_xapi(const SentenceAst& sentence);
std::string to_xapi(const PartAst& part);

}  // namespace loom
