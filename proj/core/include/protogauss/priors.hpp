#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "protogauss/embeddings.hpp"
#include "protogauss/gaussian.hpp"
#include "protogauss/ontology.hpp"

namespace protogauss {

// Which prior ingredients are informative.
//   Full          superconcept densities + concept-vector terms
//   Flat          fixed wide prior, ontology and vectors ignored
//   EmbeddingOnly analogy and combined-complex terms only
//   DLOnly        superconcept and sibling terms only, no concept vectors
enum class PriorMode { Full, Flat, EmbeddingOnly, DLOnly };

const char* to_string(PriorMode mode);
// accepts full | flat | emb | dl
std::optional<PriorMode> prior_mode_from_string(const std::string& token);

// Mode-independent fallback prior, computed once per fit from the training
// vectors: mean prior N(global mean, 10x global variance), variance prior
// scale = global per-dimension variance.
struct FlatPriorSpec {
  DiagGaussian mean_prior;
  std::vector<double> var_scale;
};

FlatPriorSpec make_flat_prior_spec(std::span<const std::vector<double>> vectors,
                                   int dim, double floor = kVarianceFloor);

// Most recent per-concept Gaussians plus the fixed role Gaussians; the
// Gibbs sweep reads and rewrites `current` in concept-id order.
struct SamplerState {
  std::vector<DiagGaussian> current;
  std::map<std::string, RoleGaussian> role_gaussians;
};

// Everything the prior constructors need besides the evolving state.
struct PriorContext {
  const KnowledgeBase* kb = nullptr;
  const ConceptRegistry* registry = nullptr;
  const ClosureIndex* closure = nullptr;
  const EmbeddingStore* store = nullptr;
  const FlatPriorSpec* flat = nullptr;
  PriorMode mode = PriorMode::Full;
  int kappa = 5;
  double eta = 2.0;
  double floor = kVarianceFloor;
};

// The structure a concept is treated under: composite expressions yield
// themselves, defined atomic names yield their defining expression,
// undefined atomics and TOP yield nullptr (plain atomic treatment).
const ConceptExpr* complex_structure(const PriorContext& ctx, ConceptId c);

// Analogy Gaussian for an atomic concept `a` w.r.t. superconcept `c`: the
// concept vector of `a` translated by the mean sibling offset
// mean_B* - v_B, with the unbiased offset variance. With one sibling the
// variance is borrowed by averaging the analogy Gaussians w.r.t. the
// direct superconcepts of `c`. Absent when `a` has no concept vector or
// no sibling with a vector is available.
std::optional<DiagGaussian> analogy_gaussian(const PriorContext& ctx,
                                             const SamplerState& state,
                                             ConceptId a, ConceptId c);

// Mean prior for an undefined atomic concept: product of the superconcept
// densities and analogy Gaussians admitted by the mode, falling back to
// the flat prior when no term applies.
DiagGaussian mean_prior_atomic(const PriorContext& ctx,
                               const SamplerState& state, ConceptId c);

// Structure-derived Gaussian for a composite concept: And = product of the
// constituents' current densities, Or = moment-matched mixture,
// Exists/Forall = filler minus role difference Gaussian. Absent when the
// structure is a restriction whose role Gaussian is missing.
std::optional<DiagGaussian> combined_gaussian_complex(const PriorContext& ctx,
                                                      const SamplerState& state,
                                                      ConceptId c);

// Mean prior for a composite (or defined) concept: combined Gaussian times
// the admitted superconcept densities, flat when nothing applies.
DiagGaussian mean_prior_complex(const PriorContext& ctx,
                                const SamplerState& state, ConceptId c);

// Dispatches on complex_structure.
DiagGaussian mean_prior(const PriorContext& ctx, const SamplerState& state,
                        ConceptId c);

// Variance prior scales, one per dimension: minimum of the admitted
// superconcept variances and the sibling-average (atomic) or combined
// Gaussian (composite) term; flat scale when nothing applies. nu is eta.
std::vector<double> var_prior_scales(const PriorContext& ctx,
                                     const SamplerState& state, ConceptId c);

ScaledInvChiSq var_prior(const PriorContext& ctx, const SamplerState& state,
                         ConceptId c, int dim_index);

}  // namespace protogauss
