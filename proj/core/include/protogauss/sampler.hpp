#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "protogauss/embeddings.hpp"
#include "protogauss/gaussian.hpp"
#include "protogauss/ontology.hpp"
#include "protogauss/priors.hpp"

namespace protogauss {

// burn_in_samples and kept_samples count thinned records; thin_iterations
// is the number of Gibbs sweeps between consecutive records, so a run
// performs (burn_in_samples + kept_samples) * thin_iterations sweeps.
struct SamplerConfig {
  std::uint64_t seed = 0;
  int burn_in_samples = 200;
  int kept_samples = 1000;
  int thin_iterations = 25;
  PriorMode mode = PriorMode::Full;
  int kappa = 5;
  double eta = 2.0;
  double variance_floor = kVarianceFloor;
};

// fast settings for tests and small experiments
SamplerConfig desk_preset();
// reference settings: burn 200, keep 1000, thin 25
SamplerConfig paper_preset();

long total_iterations(const SamplerConfig& config);

// throws ValidationError when the config is unusable
void validate_config(const SamplerConfig& config);

struct ConceptPosterior {
  std::vector<DiagGaussian> samples;
  double lambda = 1.0;
  bool scorable = true;
};

struct PosteriorSamples {
  std::vector<ConceptPosterior> concepts;  // indexed by ConceptId
};

// Immutable per-fit inputs: the ontology views, the training individuals
// with their vectors, per-concept closed-instance sufficient statistics
// and the flat prior. Built once, shared by every sweep.
struct FitContext {
  const KnowledgeBase* kb = nullptr;
  const ConceptRegistry* registry = nullptr;
  const ClosureIndex* closure = nullptr;
  const EmbeddingStore* store = nullptr;
  int dim = 0;

  std::vector<std::string> train_individuals;  // sorted, all with vectors

  struct ConceptData {
    std::vector<std::string> instances;  // closed training instances, sorted
    // per-dimension sufficient statistics of the instance vectors
    std::vector<double> mean;
    std::vector<double> m2;  // sum of squared deviations from mean
    std::size_t n() const { return instances.size(); }
  };
  std::vector<ConceptData> data;  // indexed by ConceptId

  // role pairs restricted to training individuals
  std::map<std::string, std::vector<std::pair<std::string, std::string>>>
      role_pairs;

  FlatPriorSpec flat;

  PriorContext prior_context(const SamplerConfig& config) const;
};

// Validates that every asserted training instance has a vector (throws
// ValidationError naming the first missing individual) and precomputes
// the per-concept statistics. `train` is taken as given; an empty list
// means fitting from the priors alone (fit_model's short overload passes
// every KB individual).
FitContext make_fit_context(const KnowledgeBase& kb,
                            const ConceptRegistry& registry,
                            const ClosureIndex& closure,
                            const EmbeddingStore& store,
                            std::vector<std::string> train);

// Deterministic starting point. Concepts with k >= 2 closed training
// instances get their empirical fit; k == 1 takes the instance vector as
// mean and the parent-average variance; k == 0 averages the parents'
// parameters. Parents are initialized first; TOP uses the flat prior
// parameters when it has no usable instances. Also fits role Gaussians.
SamplerState initialize(const FitContext& ctx, const SamplerConfig& config);

// One sweep over all concepts in id order. Per concept and dimension the
// variance is drawn first from its scaled inverse chi-squared posterior
// (conditioned on the previous mean), then the mean from its Gaussian
// posterior (conditioned on the new variance). Draws come from streams
// derived from (seed, tag, concept, dimension, iteration), so a sweep is
// reproducible in isolation. `iteration` is 1-based.
void gibbs_iteration(SamplerState& state, const FitContext& ctx,
                     const SamplerConfig& config, long iteration);

// Runs burn-in plus kept records and returns the kept per-concept samples
// with scorable flags set (lambda calibration happens elsewhere).
PosteriorSamples run(const FitContext& ctx, const SamplerConfig& config);

}  // namespace protogauss
