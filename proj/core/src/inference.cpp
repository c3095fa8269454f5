#include "protogauss/inference.hpp"

#include <algorithm>
#include <cmath>

#include "protogauss/calibration.hpp"
#include "protogauss/errors.hpp"

namespace protogauss {

ConceptId FittedModel::id_of(const std::string& rendering) const {
  const auto it =
      std::lower_bound(renderings.begin(), renderings.end(), rendering);
  if (it == renderings.end() || *it != rendering) return kNoConcept;
  return static_cast<ConceptId>(it - renderings.begin());
}

std::optional<double> score(const FittedModel& model, ConceptId c,
                            std::span<const double> v) {
  const ConceptPosterior& cp = model.posterior.concepts[c];
  if (!cp.scorable) return std::nullopt;
  if (!(cp.lambda > 0.0)) return 0.0;
  const double lp = average_log_density(cp.samples, v);
  return std::min(std::exp(std::log(cp.lambda) + lp), 1.0);
}

Decision classify(const FittedModel& model, ConceptId c,
                  std::span<const double> v, double threshold) {
  Decision d;
  const auto s = score(model, c, v);
  if (!s) {
    d.unscorable = true;
    return d;
  }
  d.score = *s;
  d.accept = *s >= threshold;
  return d;
}

std::vector<RankedAssertion> rank(std::span<const Assertion> assertions,
                                  const FittedModel& model,
                                  const EmbeddingStore& store) {
  std::vector<RankedAssertion> out;
  out.reserve(assertions.size());
  for (const Assertion& a : assertions) {
    const ConceptId c = model.id_of(a.concept_rendering);
    if (c == kNoConcept)
      throw ValidationError("unknown concept '" + a.concept_rendering + "'");
    const std::vector<double>* v = store.individual(a.individual);
    if (!v)
      throw ValidationError("missing embedding for individual '" +
                            a.individual + "'");
    out.push_back(RankedAssertion{a, score(model, c, *v)});
  }
  std::sort(out.begin(), out.end(),
            [](const RankedAssertion& a, const RankedAssertion& b) {
              const bool a_has = a.score.has_value();
              const bool b_has = b.score.has_value();
              if (a_has != b_has) return a_has;
              if (a_has && *a.score != *b.score) return *a.score > *b.score;
              return a.assertion < b.assertion;
            });
  return out;
}

}  // namespace protogauss
