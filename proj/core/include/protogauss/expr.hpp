#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace protogauss {

enum class ConceptKind { Atomic, And, Or, Exists, Forall, Top };

// A description-logic concept expression. `name` holds the concept name for
// Atomic nodes and the role name for Exists/Forall nodes. And/Or children
// are kept sorted by canonical rendering so structurally equal expressions
// compare equal; duplicates are preserved.
struct ConceptExpr {
  ConceptKind kind = ConceptKind::Top;
  std::string name;
  std::vector<ConceptExpr> children;

  static ConceptExpr atomic(std::string name);
  static ConceptExpr top();
  static ConceptExpr conj(std::vector<ConceptExpr> parts);
  static ConceptExpr disj(std::vector<ConceptExpr> parts);
  static ConceptExpr exists(std::string role, ConceptExpr filler);
  static ConceptExpr forall(std::string role, ConceptExpr filler);

  bool is_atomic() const { return kind == ConceptKind::Atomic; }
  bool is_top() const { return kind == ConceptKind::Top; }
  bool is_restriction() const {
    return kind == ConceptKind::Exists || kind == ConceptKind::Forall;
  }
  bool is_composite() const { return !is_atomic() && !is_top(); }
};

bool operator==(const ConceptExpr& a, const ConceptExpr& b);
inline bool operator!=(const ConceptExpr& a, const ConceptExpr& b) {
  return !(a == b);
}

// Stable text form: TOP | name | and(c1,...,ck) | or(...) |
// exists(role,c) | forall(role,c), with And/Or children in sorted order.
std::string canonical(const ConceptExpr& e);

// Parses one expression spanning the whole string. Grammar:
//   expr ::= NAME | TOP | and(expr,expr,...) | or(expr,expr,...)
//          | exists(ROLE,expr) | forall(ROLE,expr)
// Names match [A-Za-z0-9_.-]+. Throws ParseError (line 0).
ConceptExpr parse_concept_expr(std::string_view text);

namespace detail {

struct Token {
  enum Type { Name, LParen, RParen, Comma, Assign, End } type = End;
  std::string text;
};

// Shared by the expression parser and the ontology line parser.
class TokenStream {
 public:
  explicit TokenStream(std::string_view text);
  const Token& peek() const { return tokens_[pos_]; }
  Token take();
  bool at_end() const { return tokens_[pos_].type == Token::End; }
  // next token must be a bare name
  std::string expect_name(const char* what);
  void expect(Token::Type type, const char* what);

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

ConceptExpr parse_expr(TokenStream& ts);

}  // namespace detail

}  // namespace protogauss
