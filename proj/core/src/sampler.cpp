#include "protogauss/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "protogauss/errors.hpp"

namespace protogauss {

SamplerConfig desk_preset() {
  SamplerConfig config;
  config.burn_in_samples = 20;
  config.kept_samples = 100;
  config.thin_iterations = 5;
  return config;
}

SamplerConfig paper_preset() {
  return SamplerConfig{};
}

long total_iterations(const SamplerConfig& config) {
  return static_cast<long>(config.burn_in_samples + config.kept_samples) *
         config.thin_iterations;
}

void validate_config(const SamplerConfig& config) {
  if (config.burn_in_samples < 0)
    throw ValidationError("burn_in_samples must be >= 0");
  if (config.kept_samples < 1)
    throw ValidationError("kept_samples must be >= 1");
  if (config.thin_iterations < 1)
    throw ValidationError("thin_iterations must be >= 1");
  if (config.kappa < 1) throw ValidationError("kappa must be >= 1");
  if (!(config.eta > 0.0)) throw ValidationError("eta must be positive");
  if (!(config.variance_floor > 0.0))
    throw ValidationError("variance_floor must be positive");
}

PriorContext FitContext::prior_context(const SamplerConfig& config) const {
  PriorContext prior;
  prior.kb = kb;
  prior.registry = registry;
  prior.closure = closure;
  prior.store = store;
  prior.flat = &flat;
  prior.mode = config.mode;
  prior.kappa = config.kappa;
  prior.eta = config.eta;
  prior.floor = config.variance_floor;
  return prior;
}

FitContext make_fit_context(const KnowledgeBase& kb,
                            const ConceptRegistry& registry,
                            const ClosureIndex& closure,
                            const EmbeddingStore& store,
                            std::vector<std::string> train) {
  if (store.dim <= 0) throw ValidationError("embedding store is empty");

  FitContext ctx;
  ctx.kb = &kb;
  ctx.registry = &registry;
  ctx.closure = &closure;
  ctx.store = &store;
  ctx.dim = store.dim;

  std::sort(train.begin(), train.end());
  train.erase(std::unique(train.begin(), train.end()), train.end());

  // individuals asserted into some concept must have vectors; role-only
  // individuals may go without (their pairs are skipped by the role fit)
  std::set<std::string> asserted;
  for (const auto& [name, members] : kb.asserted_instances)
    asserted.insert(members.begin(), members.end());
  std::vector<std::string> embedded;
  for (const std::string& id : train) {
    if (store.individual(id)) {
      embedded.push_back(id);
    } else if (asserted.count(id)) {
      throw ValidationError("missing embedding for training individual '" +
                            id + "'");
    }
  }
  const std::set<std::string> train_set(train.begin(), train.end());
  ctx.train_individuals = std::move(embedded);

  std::vector<std::vector<double>> train_vectors;
  train_vectors.reserve(ctx.train_individuals.size());
  for (const std::string& id : ctx.train_individuals)
    train_vectors.push_back(*store.individual(id));
  ctx.flat = make_flat_prior_spec(train_vectors, ctx.dim);

  ctx.data.resize(registry.size());
  for (ConceptId c = 0; c < static_cast<ConceptId>(registry.size()); ++c) {
    auto& slot = ctx.data[c];
    if (c == registry.top_id) {
      slot.instances = ctx.train_individuals;
    } else {
      for (const std::string& id : closure.closed_instances[c])
        if (train_set.count(id) && store.individual(id))
          slot.instances.push_back(id);
    }
    slot.mean.assign(ctx.dim, 0.0);
    slot.m2.assign(ctx.dim, 0.0);
    const double k = static_cast<double>(slot.instances.size());
    for (const std::string& id : slot.instances) {
      const std::vector<double>& v = *store.individual(id);
      for (int j = 0; j < ctx.dim; ++j) slot.mean[j] += v[j] / k;
    }
    for (const std::string& id : slot.instances) {
      const std::vector<double>& v = *store.individual(id);
      for (int j = 0; j < ctx.dim; ++j) {
        const double d = v[j] - slot.mean[j];
        slot.m2[j] += d * d;
      }
    }
  }

  for (const auto& [role, pairs] : kb.role_instances) {
    auto& kept = ctx.role_pairs[role];
    for (const auto& pair : pairs)
      if (train_set.count(pair.first) && train_set.count(pair.second))
        kept.push_back(pair);
  }
  return ctx;
}

SamplerState initialize(const FitContext& ctx, const SamplerConfig& config) {
  validate_config(config);
  const ConceptRegistry& reg = *ctx.registry;
  SamplerState state;
  state.current.resize(reg.size());

  for (const auto& [role, pairs] : ctx.role_pairs)
    if (auto fitted =
            fit_role_gaussian(role, pairs, *ctx.store, config.variance_floor))
      state.role_gaussians.emplace(role, std::move(*fitted));

  // TOP first so concepts whose parent fallback is TOP can read it
  std::vector<ConceptId> order = parents_first_order(*ctx.closure);
  if (reg.top_id != kNoConcept) {
    order.erase(std::find(order.begin(), order.end(), reg.top_id));
    order.insert(order.begin(), reg.top_id);
  }

  std::vector<char> ready(reg.size(), 0);
  for (const ConceptId c : order) {
    const auto& slot = ctx.data[c];
    DiagGaussian& g = state.current[c];

    // parent average over already-initialized strict supers; flat otherwise
    const auto parent_average = [&](bool fill_mean) {
      g.mean.assign(ctx.dim, 0.0);
      g.var.assign(ctx.dim, 0.0);
      std::size_t used = 0;
      for (const ConceptId p : parents(*ctx.closure, reg, c)) {
        if (p == c || !ready[p]) continue;
        ++used;
        for (int j = 0; j < ctx.dim; ++j) {
          if (fill_mean) g.mean[j] += state.current[p].mean[j];
          g.var[j] += state.current[p].var[j];
        }
      }
      if (used == 0) {
        if (fill_mean) g.mean = ctx.flat.mean_prior.mean;
        g.var = ctx.flat.var_scale;
        return;
      }
      for (int j = 0; j < ctx.dim; ++j) {
        if (fill_mean) g.mean[j] /= static_cast<double>(used);
        g.var[j] = std::max(g.var[j] / static_cast<double>(used),
                            config.variance_floor);
      }
    };

    if (slot.n() >= 2) {
      std::vector<std::vector<double>> vectors;
      vectors.reserve(slot.n());
      for (const std::string& id : slot.instances)
        vectors.push_back(*ctx.store->individual(id));
      g = empirical_fit(vectors, config.variance_floor);
    } else if (slot.n() == 1) {
      parent_average(false);
      g.mean = *ctx.store->individual(slot.instances.front());
    } else {
      parent_average(true);
    }
    ready[c] = 1;
  }
  return state;
}

void gibbs_iteration(SamplerState& state, const FitContext& ctx,
                     const SamplerConfig& config, long iteration) {
  const PriorContext prior = ctx.prior_context(config);
  const std::size_t n_concepts = ctx.registry->size();
  for (ConceptId c = 0; c < static_cast<ConceptId>(n_concepts); ++c) {
    const DiagGaussian mean_p = mean_prior(prior, state, c);
    const std::vector<double> scales = var_prior_scales(prior, state, c);
    const auto& slot = ctx.data[c];
    const double k = static_cast<double>(slot.n());

    DiagGaussian next;
    next.mean.resize(ctx.dim);
    next.var.resize(ctx.dim);
    for (int j = 0; j < ctx.dim; ++j) {
      RngStream var_rng = RngStream::derive(
          config.seed, {stream_tag::kVarDraw, static_cast<std::uint64_t>(c),
                        static_cast<std::uint64_t>(j),
                        static_cast<std::uint64_t>(iteration)});
      const ScaledInvChiSq var_post = posterior_var_stats(
          ScaledInvChiSq{config.eta, scales[j]}, state.current[c].mean[j],
          slot.n(), slot.mean[j], slot.m2[j]);
      next.var[j] = sample_var(var_rng, var_post, config.variance_floor);

      RngStream mean_rng = RngStream::derive(
          config.seed, {stream_tag::kMeanDraw, static_cast<std::uint64_t>(c),
                        static_cast<std::uint64_t>(j),
                        static_cast<std::uint64_t>(iteration)});
      const MeanPosterior mean_post =
          posterior_mean_stats(mean_p.mean[j], mean_p.var[j], next.var[j],
                               slot.n(), slot.mean[j] * k);
      next.mean[j] = sample_mean(mean_rng, mean_post.mean, mean_post.var);
    }
    state.current[c] = std::move(next);
  }
}

PosteriorSamples run(const FitContext& ctx, const SamplerConfig& config) {
  validate_config(config);
  SamplerState state = initialize(ctx, config);
  const std::size_t n_concepts = ctx.registry->size();
  const PriorContext prior = ctx.prior_context(config);

  PosteriorSamples out;
  out.concepts.resize(n_concepts);
  for (auto& cp : out.concepts) cp.samples.reserve(config.kept_samples);

  long iteration = 0;
  const int records = config.burn_in_samples + config.kept_samples;
  for (int rec = 0; rec < records; ++rec) {
    for (int t = 0; t < config.thin_iterations; ++t)
      gibbs_iteration(state, ctx, config, ++iteration);
    if (rec >= config.burn_in_samples)
      for (std::size_t c = 0; c < n_concepts; ++c)
        out.concepts[c].samples.push_back(state.current[c]);
  }

  // restrictions with no role Gaussian and no superconcept cannot be scored
  for (ConceptId c = 0; c < static_cast<ConceptId>(n_concepts); ++c) {
    const ConceptExpr* structure = complex_structure(prior, c);
    if (!structure || !structure->is_restriction()) continue;
    if (state.role_gaussians.count(structure->name)) continue;
    if (!ctx.closure->has_strict_super(c)) {
      out.concepts[c].scorable = false;
      out.concepts[c].lambda = 0.0;
    }
  }
  return out;
}

}  // namespace protogauss
