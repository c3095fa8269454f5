#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "protogauss/expr.hpp"

namespace protogauss {

// Parsed ontology text: TBox axioms plus ABox assertions.
struct KnowledgeBase {
  std::vector<std::pair<ConceptExpr, ConceptExpr>> subsumptions;
  // definition axioms, name -> defining expression
  std::map<std::string, ConceptExpr> definitions;
  // atomic concept name -> asserted member individuals
  std::map<std::string, std::set<std::string>> asserted_instances;
  // role name -> (head, tail) pairs
  std::map<std::string, std::vector<std::pair<std::string, std::string>>>
      role_instances;
  std::set<std::string> individuals;

  bool empty() const {
    return subsumptions.empty() && definitions.empty() &&
           asserted_instances.empty() && role_instances.empty();
  }
};

// Line format, one statement per line, '#' starts a comment:
//   SUB <expr> <expr>          left is subsumed by right
//   DEF <name> := <expr>       definition (duplicate names rejected)
//   INST <individual> <name>   concept membership assertion
//   ROLE <role> <head> <tail>  role assertion
// Throws ParseError carrying the 1-based line number.
KnowledgeBase parse_ontology(std::string_view text);

using ConceptId = int;
inline constexpr ConceptId kNoConcept = -1;

// Every concept mentioned anywhere in the KB plus all constituent
// subexpressions, identified by canonical rendering and sorted by it.
// TOP is registered whenever the KB is non-empty.
struct ConceptRegistry {
  std::vector<ConceptExpr> concepts;
  std::vector<std::string> renderings;
  std::map<std::string, ConceptId> index;
  ConceptId top_id = kNoConcept;

  std::size_t size() const { return concepts.size(); }
  ConceptId id_of(const std::string& rendering) const;
  ConceptId id_of(const ConceptExpr& e) const { return id_of(canonical(e)); }
  // throws ValidationError when absent
  ConceptId require(const ConceptExpr& e) const;
};

ConceptRegistry register_concepts(const KnowledgeBase& kb);

// Reflexive-transitive subsumption closure over the declared rules:
// asserted SUBs; DEF C := and(D1..Dk) gives C <= Di; DEF C := or(D1..Dk)
// gives Di <= C. No other structural edges and no implicit TOP edges.
struct ClosureIndex {
  // supers[c] contains c itself plus every closure superconcept, sorted
  std::vector<std::vector<ConceptId>> supers;
  // transpose of supers
  std::vector<std::vector<ConceptId>> subs;
  // one-step axiom edges (asserted SUBs and definition edges), sorted
  std::vector<std::vector<ConceptId>> direct_supers;
  // asserted instances of all closure subconcepts; TOP holds every individual
  std::vector<std::set<std::string>> closed_instances;

  bool is_subsumed_by(ConceptId sub, ConceptId super) const;
  bool has_strict_super(ConceptId c) const { return supers[c].size() > 1; }
};

// Throws ValidationError on a subsumption cycle between distinct concepts.
ClosureIndex compute_closure(const KnowledgeBase& kb,
                             const ConceptRegistry& reg);

// Strict closure superconcepts of c; {TOP} when there are none.
std::vector<ConceptId> parents(const ClosureIndex& closure,
                               const ConceptRegistry& reg, ConceptId c);

// Atomic concepts other than `atomic` that are closure-subsumed by c.
// For c = TOP this is every other atomic concept.
std::vector<ConceptId> siblings_wrt(const ClosureIndex& closure,
                                    const ConceptRegistry& reg,
                                    ConceptId atomic, ConceptId c);

// Union of siblings_wrt over the direct-axiom parents of `atomic`.
std::vector<ConceptId> atomic_siblings(const ClosureIndex& closure,
                                       const ConceptRegistry& reg,
                                       ConceptId atomic);

// Concept ids ordered so every strict superconcept precedes its subconcepts;
// ties resolved by ascending id.
std::vector<ConceptId> parents_first_order(const ClosureIndex& closure);

}  // namespace protogauss
