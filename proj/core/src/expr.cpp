#include "protogauss/expr.hpp"

#include <algorithm>
#include <utility>

#include "protogauss/errors.hpp"

namespace protogauss {

namespace {

bool name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
}

void sort_children(std::vector<ConceptExpr>& parts) {
  std::sort(parts.begin(), parts.end(),
            [](const ConceptExpr& a, const ConceptExpr& b) {
              return canonical(a) < canonical(b);
            });
}

}  // namespace

ConceptExpr ConceptExpr::atomic(std::string name) {
  ConceptExpr e;
  e.kind = ConceptKind::Atomic;
  e.name = std::move(name);
  return e;
}

ConceptExpr ConceptExpr::top() {
  return ConceptExpr{};
}

ConceptExpr ConceptExpr::conj(std::vector<ConceptExpr> parts) {
  if (parts.size() < 2)
    throw ValidationError("and() needs at least two arguments");
  ConceptExpr e;
  e.kind = ConceptKind::And;
  sort_children(parts);
  e.children = std::move(parts);
  return e;
}

ConceptExpr ConceptExpr::disj(std::vector<ConceptExpr> parts) {
  if (parts.size() < 2)
    throw ValidationError("or() needs at least two arguments");
  ConceptExpr e;
  e.kind = ConceptKind::Or;
  sort_children(parts);
  e.children = std::move(parts);
  return e;
}

ConceptExpr ConceptExpr::exists(std::string role, ConceptExpr filler) {
  ConceptExpr e;
  e.kind = ConceptKind::Exists;
  e.name = std::move(role);
  e.children.push_back(std::move(filler));
  return e;
}

ConceptExpr ConceptExpr::forall(std::string role, ConceptExpr filler) {
  ConceptExpr e;
  e.kind = ConceptKind::Forall;
  e.name = std::move(role);
  e.children.push_back(std::move(filler));
  return e;
}

bool operator==(const ConceptExpr& a, const ConceptExpr& b) {
  if (a.kind != b.kind || a.name != b.name ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!(a.children[i] == b.children[i])) return false;
  return true;
}

std::string canonical(const ConceptExpr& e) {
  switch (e.kind) {
    case ConceptKind::Top:
      return "TOP";
    case ConceptKind::Atomic:
      return e.name;
    case ConceptKind::And:
    case ConceptKind::Or: {
      std::string out = e.kind == ConceptKind::And ? "and(" : "or(";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += ',';
        out += canonical(e.children[i]);
      }
      out += ')';
      return out;
    }
    case ConceptKind::Exists:
    case ConceptKind::Forall: {
      std::string out = e.kind == ConceptKind::Exists ? "exists(" : "forall(";
      out += e.name;
      out += ',';
      out += canonical(e.children.front());
      out += ')';
      return out;
    }
  }
  throw ValidationError("canonical: malformed expression");
}

namespace detail {

TokenStream::TokenStream(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    Token t;
    if (c == '(') {
      t.type = Token::LParen;
      ++i;
    } else if (c == ')') {
      t.type = Token::RParen;
      ++i;
    } else if (c == ',') {
      t.type = Token::Comma;
      ++i;
    } else if (c == ':' && i + 1 < text.size() && text[i + 1] == '=') {
      t.type = Token::Assign;
      i += 2;
    } else if (name_char(c)) {
      std::size_t j = i;
      while (j < text.size() && name_char(text[j])) ++j;
      t.type = Token::Name;
      t.text = std::string(text.substr(i, j - i));
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'");
    }
    tokens_.push_back(std::move(t));
  }
  tokens_.push_back(Token{});
}

Token TokenStream::take() {
  Token t = tokens_[pos_];
  if (t.type != Token::End) ++pos_;
  return t;
}

std::string TokenStream::expect_name(const char* what) {
  Token t = take();
  if (t.type != Token::Name)
    throw ParseError(std::string("expected ") + what);
  return t.text;
}

void TokenStream::expect(Token::Type type, const char* what) {
  Token t = take();
  if (t.type != type) throw ParseError(std::string("expected ") + what);
}

ConceptExpr parse_expr(TokenStream& ts) {
  Token t = ts.take();
  if (t.type != Token::Name)
    throw ParseError("expected a concept expression");
  const std::string& head = t.text;

  const bool call = ts.peek().type == Token::LParen;
  if (!call) {
    if (head == "TOP") return ConceptExpr::top();
    return ConceptExpr::atomic(head);
  }

  ts.take();  // (
  if (head == "and" || head == "or") {
    std::vector<ConceptExpr> parts;
    parts.push_back(parse_expr(ts));
    while (ts.peek().type == Token::Comma) {
      ts.take();
      parts.push_back(parse_expr(ts));
    }
    ts.expect(Token::RParen, "')'");
    if (parts.size() < 2)
      throw ParseError(head + "() needs at least two arguments");
    return head == "and" ? ConceptExpr::conj(std::move(parts))
                         : ConceptExpr::disj(std::move(parts));
  }
  if (head == "exists" || head == "forall") {
    std::string role = ts.expect_name("a role name");
    ts.expect(Token::Comma, "','");
    ConceptExpr filler = parse_expr(ts);
    ts.expect(Token::RParen, "')'");
    return head == "exists" ? ConceptExpr::exists(std::move(role), std::move(filler))
                            : ConceptExpr::forall(std::move(role), std::move(filler));
  }
  throw ParseError("unknown constructor '" + head + "'");
}

}  // namespace detail

ConceptExpr parse_concept_expr(std::string_view text) {
  detail::TokenStream ts(text);
  ConceptExpr e = detail::parse_expr(ts);
  if (!ts.at_end())
    throw ParseError("trailing input after expression");
  return e;
}

}  // namespace protogauss
