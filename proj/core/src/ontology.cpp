#include "protogauss/ontology.hpp"

#include <algorithm>
#include <deque>

#include "protogauss/errors.hpp"

namespace protogauss {

namespace {

using detail::Token;
using detail::TokenStream;

void collect_constituents(const ConceptExpr& e, std::set<std::string>& seen,
                          std::vector<ConceptExpr>& out) {
  if (seen.insert(canonical(e)).second) out.push_back(e);
  for (const ConceptExpr& child : e.children)
    collect_constituents(child, seen, out);
}

}  // namespace

KnowledgeBase parse_ontology(std::string_view text) {
  KnowledgeBase kb;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);

    try {
      TokenStream ts(line);
      if (ts.at_end()) continue;
      const std::string directive = ts.expect_name("a directive");
      if (directive == "SUB") {
        ConceptExpr lhs = detail::parse_expr(ts);
        ConceptExpr rhs = detail::parse_expr(ts);
        if (!ts.at_end()) throw ParseError("trailing input after SUB");
        // reflexive axioms carry no information
        if (!(lhs == rhs))
          kb.subsumptions.emplace_back(std::move(lhs), std::move(rhs));
      } else if (directive == "DEF") {
        std::string name = ts.expect_name("a concept name");
        if (name == "TOP") throw ParseError("TOP cannot be defined");
        ts.expect(Token::Assign, "':='");
        ConceptExpr body = detail::parse_expr(ts);
        if (!ts.at_end()) throw ParseError("trailing input after DEF");
        if (!kb.definitions.emplace(name, std::move(body)).second)
          throw ParseError("duplicate definition of '" + name + "'");
      } else if (directive == "INST") {
        std::string individual = ts.expect_name("an individual name");
        std::string concept_name = ts.expect_name("a concept name");
        if (!ts.at_end()) throw ParseError("trailing input after INST");
        kb.asserted_instances[concept_name].insert(individual);
        kb.individuals.insert(std::move(individual));
      } else if (directive == "ROLE") {
        std::string role = ts.expect_name("a role name");
        std::string head = ts.expect_name("an individual name");
        std::string tail = ts.expect_name("an individual name");
        if (!ts.at_end()) throw ParseError("trailing input after ROLE");
        kb.individuals.insert(head);
        kb.individuals.insert(tail);
        kb.role_instances[role].emplace_back(std::move(head), std::move(tail));
      } else {
        throw ParseError("unknown directive '" + directive + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError(e.what(), e.line() ? e.line() : line_no);
    }
  }
  return kb;
}

ConceptId ConceptRegistry::id_of(const std::string& rendering) const {
  const auto it = index.find(rendering);
  return it == index.end() ? kNoConcept : it->second;
}

ConceptId ConceptRegistry::require(const ConceptExpr& e) const {
  const ConceptId id = id_of(e);
  if (id == kNoConcept)
    throw ValidationError("unregistered concept '" + canonical(e) + "'");
  return id;
}

ConceptRegistry register_concepts(const KnowledgeBase& kb) {
  ConceptRegistry reg;
  if (kb.empty()) return reg;

  std::set<std::string> seen;
  std::vector<ConceptExpr> found;
  collect_constituents(ConceptExpr::top(), seen, found);
  for (const auto& [lhs, rhs] : kb.subsumptions) {
    collect_constituents(lhs, seen, found);
    collect_constituents(rhs, seen, found);
  }
  for (const auto& [name, body] : kb.definitions) {
    collect_constituents(ConceptExpr::atomic(name), seen, found);
    collect_constituents(body, seen, found);
  }
  for (const auto& [name, members] : kb.asserted_instances)
    collect_constituents(ConceptExpr::atomic(name), seen, found);

  std::sort(found.begin(), found.end(),
            [](const ConceptExpr& a, const ConceptExpr& b) {
              return canonical(a) < canonical(b);
            });
  for (ConceptId id = 0; id < static_cast<ConceptId>(found.size()); ++id) {
    reg.renderings.push_back(canonical(found[id]));
    reg.index.emplace(reg.renderings.back(), id);
    if (found[id].is_top()) reg.top_id = id;
  }
  reg.concepts = std::move(found);
  return reg;
}

bool ClosureIndex::is_subsumed_by(ConceptId sub, ConceptId super) const {
  const auto& row = supers[sub];
  return std::binary_search(row.begin(), row.end(), super);
}

ClosureIndex compute_closure(const KnowledgeBase& kb,
                             const ConceptRegistry& reg) {
  const std::size_t n = reg.size();
  std::vector<std::set<ConceptId>> direct(n);

  const auto add_edge = [&](const ConceptExpr& sub, const ConceptExpr& super) {
    const ConceptId s = reg.require(sub);
    const ConceptId p = reg.require(super);
    if (s != p) direct[s].insert(p);
  };

  for (const auto& [lhs, rhs] : kb.subsumptions) add_edge(lhs, rhs);
  for (const auto& [name, body] : kb.definitions) {
    const ConceptExpr defined = ConceptExpr::atomic(name);
    if (body.kind == ConceptKind::And) {
      for (const ConceptExpr& part : body.children) add_edge(defined, part);
    } else if (body.kind == ConceptKind::Or) {
      for (const ConceptExpr& part : body.children) add_edge(part, defined);
    }
  }

  ClosureIndex out;
  out.direct_supers.resize(n);
  out.supers.resize(n);
  out.subs.resize(n);
  for (std::size_t c = 0; c < n; ++c)
    out.direct_supers[c].assign(direct[c].begin(), direct[c].end());

  // breadth-first reachability from each concept
  for (ConceptId c = 0; c < static_cast<ConceptId>(n); ++c) {
    std::vector<char> reached(n, 0);
    reached[c] = 1;
    std::deque<ConceptId> queue{c};
    while (!queue.empty()) {
      const ConceptId cur = queue.front();
      queue.pop_front();
      for (const ConceptId next : out.direct_supers[cur]) {
        if (!reached[next]) {
          reached[next] = 1;
          queue.push_back(next);
        }
      }
    }
    for (ConceptId d = 0; d < static_cast<ConceptId>(n); ++d)
      if (reached[d]) out.supers[c].push_back(d);
  }

  for (ConceptId c = 0; c < static_cast<ConceptId>(n); ++c)
    for (const ConceptId d : out.supers[c]) {
      if (d != c && out.is_subsumed_by(d, c))
        throw ValidationError("subsumption cycle between '" +
                              reg.renderings[c] + "' and '" +
                              reg.renderings[d] + "'");
      out.subs[d].push_back(c);
    }

  out.closed_instances.resize(n);
  for (ConceptId c = 0; c < static_cast<ConceptId>(n); ++c) {
    if (c == reg.top_id) {
      out.closed_instances[c] = kb.individuals;
      continue;
    }
    for (const ConceptId sub : out.subs[c]) {
      if (!reg.concepts[sub].is_atomic()) continue;
      const auto it = kb.asserted_instances.find(reg.concepts[sub].name);
      if (it == kb.asserted_instances.end()) continue;
      out.closed_instances[c].insert(it->second.begin(), it->second.end());
    }
  }
  return out;
}

std::vector<ConceptId> parents(const ClosureIndex& closure,
                               const ConceptRegistry& reg, ConceptId c) {
  std::vector<ConceptId> out;
  for (const ConceptId d : closure.supers[c])
    if (d != c) out.push_back(d);
  if (out.empty() && reg.top_id != kNoConcept) out.push_back(reg.top_id);
  return out;
}

std::vector<ConceptId> siblings_wrt(const ClosureIndex& closure,
                                    const ConceptRegistry& reg,
                                    ConceptId atomic, ConceptId c) {
  std::vector<ConceptId> out;
  if (c == reg.top_id) {
    for (ConceptId b = 0; b < static_cast<ConceptId>(reg.size()); ++b)
      if (b != atomic && reg.concepts[b].is_atomic()) out.push_back(b);
    return out;
  }
  for (const ConceptId b : closure.subs[c])
    if (b != atomic && b != c && reg.concepts[b].is_atomic())
      out.push_back(b);
  return out;
}

std::vector<ConceptId> atomic_siblings(const ClosureIndex& closure,
                                       const ConceptRegistry& reg,
                                       ConceptId atomic) {
  std::set<ConceptId> merged;
  for (const ConceptId parent : closure.direct_supers[atomic])
    for (const ConceptId b : siblings_wrt(closure, reg, atomic, parent))
      merged.insert(b);
  return {merged.begin(), merged.end()};
}

std::vector<ConceptId> parents_first_order(const ClosureIndex& closure) {
  const std::size_t n = closure.supers.size();
  std::vector<ConceptId> order;
  std::vector<char> done(n, 0);
  order.reserve(n);
  while (order.size() < n) {
    const std::size_t before = order.size();
    for (ConceptId c = 0; c < static_cast<ConceptId>(n); ++c) {
      if (done[c]) continue;
      bool ready = true;
      for (const ConceptId d : closure.supers[c])
        if (d != c && !done[d]) {
          ready = false;
          break;
        }
      if (ready) {
        done[c] = 1;
        order.push_back(c);
      }
    }
    if (order.size() == before)
      throw ValidationError("parents_first_order: subsumption graph has a cycle");
  }
  return order;
}

}  // namespace protogauss
