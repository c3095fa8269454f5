#include "protogauss/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "protogauss/errors.hpp"

namespace protogauss {

namespace {

bool uses_dl_terms(PriorMode mode) {
  return mode == PriorMode::Full || mode == PriorMode::DLOnly;
}

bool uses_embedding_terms(PriorMode mode) {
  return mode == PriorMode::Full || mode == PriorMode::EmbeddingOnly;
}

const std::string& concept_name(const PriorContext& ctx, ConceptId c) {
  return ctx.registry->concepts[c].name;
}

// direct-axiom superconcepts, falling back to the closure parents
std::vector<ConceptId> asserted_parents(const PriorContext& ctx, ConceptId c) {
  const auto& direct = ctx.closure->direct_supers[c];
  if (!direct.empty()) return direct;
  return parents(*ctx.closure, *ctx.registry, c);
}

double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    total += d * d;
  }
  return total;
}

}  // namespace

const char* to_string(PriorMode mode) {
  switch (mode) {
    case PriorMode::Full:
      return "full";
    case PriorMode::Flat:
      return "flat";
    case PriorMode::EmbeddingOnly:
      return "emb";
    case PriorMode::DLOnly:
      return "dl";
  }
  return "full";
}

std::optional<PriorMode> prior_mode_from_string(const std::string& token) {
  if (token == "full") return PriorMode::Full;
  if (token == "flat") return PriorMode::Flat;
  if (token == "emb") return PriorMode::EmbeddingOnly;
  if (token == "dl") return PriorMode::DLOnly;
  return std::nullopt;
}

FlatPriorSpec make_flat_prior_spec(std::span<const std::vector<double>> vectors,
                                   int dim, double floor) {
  FlatPriorSpec spec;
  spec.mean_prior.mean.assign(dim, 0.0);
  spec.mean_prior.var.assign(dim, 10.0);
  spec.var_scale.assign(dim, 1.0);
  if (vectors.size() < 2) {
    if (vectors.size() == 1) spec.mean_prior.mean = vectors.front();
    return spec;
  }
  const DiagGaussian global = empirical_fit(vectors, floor);
  spec.mean_prior.mean = global.mean;
  for (int j = 0; j < dim; ++j) {
    spec.mean_prior.var[j] = std::max(10.0 * global.var[j], floor);
    spec.var_scale[j] = global.var[j];
  }
  return spec;
}

const ConceptExpr* complex_structure(const PriorContext& ctx, ConceptId c) {
  const ConceptExpr& e = ctx.registry->concepts[c];
  if (e.is_composite()) return &e;
  if (e.is_atomic()) {
    const auto it = ctx.kb->definitions.find(e.name);
    if (it != ctx.kb->definitions.end()) return &it->second;
  }
  return nullptr;
}

std::optional<DiagGaussian> analogy_gaussian(const PriorContext& ctx,
                                             const SamplerState& state,
                                             ConceptId a, ConceptId c) {
  const std::vector<double>* va =
      ctx.store->concept_vector(concept_name(ctx, a));
  if (!va) return std::nullopt;
  const int dim = ctx.store->dim;

  std::vector<const std::vector<double>*> sib_vec;
  std::vector<ConceptId> sib_id;
  for (const ConceptId b : siblings_wrt(*ctx.closure, *ctx.registry, a, c)) {
    const std::vector<double>* vb =
        ctx.store->concept_vector(concept_name(ctx, b));
    if (!vb) continue;
    sib_vec.push_back(vb);
    sib_id.push_back(b);
  }
  const std::size_t r = sib_id.size();
  if (r == 0) return std::nullopt;

  // offsets mean_B* - v_B, averaged and applied to v_a
  std::vector<std::vector<double>> offsets(r, std::vector<double>(dim));
  DiagGaussian out;
  out.mean.assign(dim, 0.0);
  out.var.assign(dim, 0.0);
  for (std::size_t u = 0; u < r; ++u) {
    const DiagGaussian& sampled = state.current[sib_id[u]];
    for (int j = 0; j < dim; ++j) {
      offsets[u][j] = sampled.mean[j] - (*sib_vec[u])[j];
      out.mean[j] += offsets[u][j] / static_cast<double>(r);
    }
  }
  for (int j = 0; j < dim; ++j) out.mean[j] += (*va)[j];

  if (r >= 2) {
    for (std::size_t u = 0; u < r; ++u)
      for (int j = 0; j < dim; ++j) {
        const double d = offsets[u][j] - (out.mean[j] - (*va)[j]);
        out.var[j] += d * d / static_cast<double>(r - 1);
      }
    for (int j = 0; j < dim; ++j) out.var[j] = std::max(out.var[j], ctx.floor);
    return out;
  }

  // single sibling: borrow the variance from the analogy Gaussians w.r.t.
  // the direct superconcepts of c
  std::size_t borrowed = 0;
  for (const ConceptId d : ctx.closure->direct_supers[c]) {
    const auto up = analogy_gaussian(ctx, state, a, d);
    if (!up) continue;
    ++borrowed;
    for (int j = 0; j < dim; ++j) out.var[j] += up->var[j];
  }
  if (borrowed == 0) return std::nullopt;
  for (int j = 0; j < dim; ++j)
    out.var[j] = std::max(out.var[j] / static_cast<double>(borrowed), ctx.floor);
  return out;
}

DiagGaussian mean_prior_atomic(const PriorContext& ctx,
                               const SamplerState& state, ConceptId c) {
  if (ctx.mode == PriorMode::Flat) return ctx.flat->mean_prior;
  std::vector<DiagGaussian> terms;
  for (const ConceptId cu : parents(*ctx.closure, *ctx.registry, c)) {
    if (cu == c) continue;
    if (uses_dl_terms(ctx.mode)) terms.push_back(state.current[cu]);
    if (uses_embedding_terms(ctx.mode)) {
      if (auto e = analogy_gaussian(ctx, state, c, cu))
        terms.push_back(std::move(*e));
    }
  }
  if (terms.empty()) return ctx.flat->mean_prior;
  return product_gaussians(terms, ctx.floor);
}

std::optional<DiagGaussian> combined_gaussian_complex(const PriorContext& ctx,
                                                      const SamplerState& state,
                                                      ConceptId c) {
  const ConceptExpr* structure = complex_structure(ctx, c);
  if (!structure) return std::nullopt;

  if (structure->kind == ConceptKind::And ||
      structure->kind == ConceptKind::Or) {
    std::vector<DiagGaussian> parts;
    for (const ConceptExpr& child : structure->children)
      parts.push_back(state.current[ctx.registry->require(child)]);
    return structure->kind == ConceptKind::And
               ? product_gaussians(parts, ctx.floor)
               : mixture_moments(parts, ctx.floor);
  }

  // role restriction: filler density shifted back through the role
  const auto role = state.role_gaussians.find(structure->name);
  if (role == state.role_gaussians.end()) return std::nullopt;
  const DiagGaussian& filler =
      state.current[ctx.registry->require(structure->children.front())];
  return difference_gaussian(filler, role->second.gaussian, ctx.floor);
}

DiagGaussian mean_prior_complex(const PriorContext& ctx,
                                const SamplerState& state, ConceptId c) {
  if (ctx.mode == PriorMode::Flat) return ctx.flat->mean_prior;
  std::vector<DiagGaussian> terms;
  if (auto h = combined_gaussian_complex(ctx, state, c))
    terms.push_back(std::move(*h));
  if (uses_dl_terms(ctx.mode))
    for (const ConceptId cu : parents(*ctx.closure, *ctx.registry, c)) {
      if (cu == c) continue;
      terms.push_back(state.current[cu]);
    }
  if (terms.empty()) return ctx.flat->mean_prior;
  return product_gaussians(terms, ctx.floor);
}

DiagGaussian mean_prior(const PriorContext& ctx, const SamplerState& state,
                        ConceptId c) {
  if (complex_structure(ctx, c)) return mean_prior_complex(ctx, state, c);
  return mean_prior_atomic(ctx, state, c);
}

std::vector<double> var_prior_scales(const PriorContext& ctx,
                                     const SamplerState& state, ConceptId c) {
  const int dim = ctx.store->dim;
  if (ctx.mode == PriorMode::Flat) return ctx.flat->var_scale;

  std::vector<double> scales(dim, std::numeric_limits<double>::infinity());
  bool any = false;
  const ConceptExpr* structure = complex_structure(ctx, c);

  const auto take_min = [&](const std::vector<double>& vars) {
    any = true;
    for (int j = 0; j < dim; ++j) scales[j] = std::min(scales[j], vars[j]);
  };

  // superconcept variances cap the scale in every informative mode; the
  // mode only decides how the sibling set below is picked
  const std::vector<ConceptId> supers =
      structure ? parents(*ctx.closure, *ctx.registry, c)
                : asserted_parents(ctx, c);
  for (const ConceptId cu : supers) {
    if (cu == c) continue;
    take_min(state.current[cu].var);
  }

  if (structure) {
    if (const auto h = combined_gaussian_complex(ctx, state, c))
      take_min(h->var);
  } else {
    // sibling average; kappa nearest by concept vector when available
    std::vector<ConceptId> sibs =
        atomic_siblings(*ctx.closure, *ctx.registry, c);
    if (!sibs.empty()) {
      const std::vector<double>* vc =
          ctx.mode == PriorMode::DLOnly
              ? nullptr
              : ctx.store->concept_vector(concept_name(ctx, c));
      if (vc) {
        std::vector<std::pair<double, ConceptId>> ranked;
        for (const ConceptId b : sibs) {
          const std::vector<double>* vb =
              ctx.store->concept_vector(concept_name(ctx, b));
          if (vb) ranked.emplace_back(squared_distance(*vc, *vb), b);
        }
        if (!ranked.empty()) {
          std::sort(ranked.begin(), ranked.end());
          sibs.clear();
          const std::size_t keep =
              std::min<std::size_t>(ranked.size(),
                                    static_cast<std::size_t>(ctx.kappa));
          for (std::size_t u = 0; u < keep; ++u) sibs.push_back(ranked[u].second);
        }
      }
      std::vector<double> avg(dim, 0.0);
      for (const ConceptId b : sibs)
        for (int j = 0; j < dim; ++j)
          avg[j] += state.current[b].var[j] / static_cast<double>(sibs.size());
      take_min(avg);
    }
  }

  if (!any) return ctx.flat->var_scale;
  for (int j = 0; j < dim; ++j) scales[j] = std::max(scales[j], ctx.floor);
  return scales;
}

ScaledInvChiSq var_prior(const PriorContext& ctx, const SamplerState& state,
                         ConceptId c, int dim_index) {
  const std::vector<double> scales = var_prior_scales(ctx, state, c);
  return ScaledInvChiSq{ctx.eta, scales[dim_index]};
}

}  // namespace protogauss
