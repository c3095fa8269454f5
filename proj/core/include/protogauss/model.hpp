#pragma once

#include <map>
#include <string>
#include <vector>

#include "protogauss/embeddings.hpp"
#include "protogauss/sampler.hpp"

namespace protogauss {

// Everything needed to score assertions after a fit: the concept registry
// renderings, kept posterior samples, calibrated lambdas and the role
// Gaussians. Entity vectors are not stored; scoring callers supply an
// embedding store.
struct FittedModel {
  SamplerConfig config;
  int dim = 0;
  std::vector<std::string> renderings;  // canonical, ascending, by ConceptId
  PosteriorSamples posterior;
  std::map<std::string, RoleGaussian> roles;

  ConceptId id_of(const std::string& rendering) const;
  std::size_t size() const { return renderings.size(); }
};

}  // namespace protogauss
