#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "protogauss/model.hpp"

namespace protogauss {

// A candidate membership statement: individual belongs to the concept
// named by its canonical rendering.
struct Assertion {
  std::string concept_rendering;
  std::string individual;
};

inline bool operator<(const Assertion& a, const Assertion& b) {
  if (a.concept_rendering != b.concept_rendering)
    return a.concept_rendering < b.concept_rendering;
  return a.individual < b.individual;
}
inline bool operator==(const Assertion& a, const Assertion& b) {
  return a.concept_rendering == b.concept_rendering &&
         a.individual == b.individual;
}

// Membership probability lambda * p(v), p averaged over the kept samples,
// capped at 1. nullopt for unscorable concepts.
std::optional<double> score(const FittedModel& model, ConceptId c,
                            std::span<const double> v);

struct Decision {
  bool accept = false;
  bool unscorable = false;
  double score = 0.0;
};

// accept iff the concept is scorable and score >= threshold
Decision classify(const FittedModel& model, ConceptId c,
                  std::span<const double> v, double threshold = 0.5);

struct RankedAssertion {
  Assertion assertion;
  std::optional<double> score;
};

// Scores every assertion and sorts by descending score; unscorable
// assertions sink to the bottom. Ties (and the unscorable tail) order by
// (concept rendering, individual) ascending, so the output is a
// deterministic function of the inputs. Throws ValidationError on an
// unknown concept rendering or an individual without a vector.
std::vector<RankedAssertion> rank(std::span<const Assertion> assertions,
                                  const FittedModel& model,
                                  const EmbeddingStore& store);

}  // namespace protogauss
