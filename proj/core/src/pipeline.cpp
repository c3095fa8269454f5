#include "protogauss/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

#include "protogauss/calibration.hpp"
#include "protogauss/errors.hpp"

namespace protogauss {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const int workers = static_cast<int>(
      std::min(static_cast<std::size_t>(threads), n));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

FittedModel fit_model(const KnowledgeBase& kb, const EmbeddingStore& store,
                      const SamplerConfig& config,
                      std::vector<std::string> train, int threads,
                      FitSummary* summary) {
  validate_config(config);
  const ConceptRegistry registry = register_concepts(kb);
  if (registry.size() == 0)
    throw ValidationError("ontology mentions no concepts");
  const ClosureIndex closure = compute_closure(kb, registry);
  const FitContext ctx =
      make_fit_context(kb, registry, closure, store, std::move(train));

  const auto t0 = std::chrono::steady_clock::now();
  PosteriorSamples posterior = run(ctx, config);
  const double sampling_seconds = seconds_since(t0);

  // negatives for concept c: training individuals outside its closed set
  const auto t1 = std::chrono::steady_clock::now();
  const std::size_t n_concepts = registry.size();
  std::vector<double> lambdas(n_concepts, 0.0);
  parallel_for(n_concepts, threads, [&](std::size_t c) {
    ConceptPosterior& cp = posterior.concepts[c];
    if (!cp.scorable) return;
    const auto& members = ctx.data[c].instances;
    std::vector<std::vector<double>> negatives;
    negatives.reserve(ctx.train_individuals.size() - members.size());
    for (const std::string& id : ctx.train_individuals)
      if (!std::binary_search(members.begin(), members.end(), id))
        negatives.push_back(*ctx.store->individual(id));
    const CalibrationResult cal =
        estimate_lambda(members.size(), negatives, cp.samples);
    if (cal.all_densities_zero)
      std::cerr << "warning: concept " << registry.renderings[c]
                << ": every negative had zero density, lambda set to "
                << cal.lambda << "\n";
    lambdas[c] = cal.lambda;
  });
  for (std::size_t c = 0; c < n_concepts; ++c)
    if (posterior.concepts[c].scorable)
      posterior.concepts[c].lambda = lambdas[c];

  FittedModel model;
  model.config = config;
  model.dim = ctx.dim;
  model.renderings = registry.renderings;
  model.posterior = std::move(posterior);
  for (const auto& [role, pairs] : ctx.role_pairs)
    if (auto fitted =
            fit_role_gaussian(role, pairs, store, config.variance_floor))
      model.roles.emplace(role, std::move(*fitted));

  if (summary) {
    summary->sampling_seconds = sampling_seconds;
    summary->calibration_seconds = seconds_since(t1);
    summary->concept_counts.clear();
    for (std::size_t c = 0; c < n_concepts; ++c)
      summary->concept_counts.emplace_back(registry.renderings[c],
                                           ctx.data[c].n());
  }
  return model;
}

FittedModel fit_model(const KnowledgeBase& kb, const EmbeddingStore& store,
                      const SamplerConfig& config) {
  return fit_model(kb, store, config,
                   {kb.individuals.begin(), kb.individuals.end()});
}

SamplerConfig parse_config_text(std::string_view text,
                                const SamplerConfig& base) {
  SamplerConfig config = base;
  int line_no = 0;
  std::size_t pos = 0;

  const auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
      s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.remove_suffix(1);
    return s;
  };

  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected 'key = value'", line_no);
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty() || value.empty())
      throw ParseError("expected 'key = value'", line_no);

    const auto as_long = [&](long lo, long hi) {
      long v = 0;
      const auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size() || v < lo ||
          v > hi)
        throw ParseError("bad value for " + key + ": '" + value + "'", line_no);
      return v;
    };
    const auto as_double = [&]() {
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ParseError("bad value for " + key + ": '" + value + "'", line_no);
      return v;
    };

    if (key == "seed") {
      std::uint64_t v = 0;
      const auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ParseError("bad value for seed: '" + value + "'", line_no);
      config.seed = v;
    } else if (key == "burn_in_samples") {
      config.burn_in_samples = static_cast<int>(as_long(0, 1000000));
    } else if (key == "kept_samples") {
      config.kept_samples = static_cast<int>(as_long(1, 1000000));
    } else if (key == "thin_iterations") {
      config.thin_iterations = static_cast<int>(as_long(1, 1000000));
    } else if (key == "mode") {
      const auto mode = prior_mode_from_string(value);
      if (!mode)
        throw ParseError("bad value for mode: '" + value + "'", line_no);
      config.mode = *mode;
    } else if (key == "kappa") {
      config.kappa = static_cast<int>(as_long(1, 1000000));
    } else if (key == "eta") {
      config.eta = as_double();
      if (!(config.eta > 0.0))
        throw ParseError("eta must be positive", line_no);
    } else if (key == "variance_floor") {
      config.variance_floor = as_double();
      if (!(config.variance_floor > 0.0))
        throw ParseError("variance_floor must be positive", line_no);
    } else {
      throw ParseError("unknown config key '" + key + "'", line_no);
    }
  }
  return config;
}

}  // namespace protogauss
