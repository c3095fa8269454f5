#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "protogauss/model.hpp"
#include "protogauss/sampler.hpp"

namespace protogauss {

struct FitSummary {
  // (canonical rendering, closed training instance count), by ConceptId
  std::vector<std::pair<std::string, std::size_t>> concept_counts;
  double sampling_seconds = 0.0;
  double calibration_seconds = 0.0;
};

// Registry + closure + Gibbs run + per-concept lambda calibration against
// the training individuals not in each concept's closed instance set.
// `train` restricts the ABox view (defaults to every KB individual).
// Calibration is deterministic for any thread count.
FittedModel fit_model(const KnowledgeBase& kb, const EmbeddingStore& store,
                      const SamplerConfig& config,
                      std::vector<std::string> train, int threads = 1,
                      FitSummary* summary = nullptr);
FittedModel fit_model(const KnowledgeBase& kb, const EmbeddingStore& store,
                      const SamplerConfig& config);

// Flat "key = value" config text ('#' comments). Recognized keys match the
// SamplerConfig fields: seed, burn_in_samples, kept_samples,
// thin_iterations, mode (full|flat|emb|dl), kappa, eta, variance_floor.
// Unspecified keys keep the values in `base`; unknown keys are a
// ParseError with the line number.
SamplerConfig parse_config_text(std::string_view text,
                                const SamplerConfig& base);

// Deterministic helper: runs fn(i) for i in [0, n) on `threads` threads,
// any exception rethrown on the caller.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace protogauss
