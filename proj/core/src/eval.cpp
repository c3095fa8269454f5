#include "protogauss/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "protogauss/errors.hpp"

namespace protogauss {

const std::array<const char*, kBucketCount> kBucketNames = {
    "zero_shot", "1_5", "6_10", "11_50", "51_plus"};

EvalSplit split(std::span<const std::string> individuals, std::uint64_t seed,
                double ratio) {
  if (!(ratio >= 0.0) || !(ratio <= 1.0))
    throw ValidationError("split ratio must be in [0, 1]");
  std::vector<std::string> ids(individuals.begin(), individuals.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  RngStream rng = RngStream::derive(seed, {stream_tag::kSplit});
  for (std::size_t i = ids.size(); i > 1; --i)
    std::swap(ids[i - 1], ids[rng.next_below(i)]);

  const std::size_t n_train =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(ids.size())));
  EvalSplit out;
  out.train.assign(ids.begin(), ids.begin() + n_train);
  out.test.assign(ids.begin() + n_train, ids.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  if (out.test.empty() && !ids.empty())
    std::cerr << "warning: split ratio " << ratio << " leaves no test individuals\n";
  return out;
}

std::vector<Assertion> generate_negatives(std::span<const Assertion> positives,
                                          const ConceptRegistry& registry,
                                          const ClosureIndex& closure,
                                          std::span<const std::string> pool,
                                          std::uint64_t seed,
                                          NegativeStrategy strategy) {
  std::vector<Assertion> sorted_positives(positives.begin(), positives.end());
  std::sort(sorted_positives.begin(), sorted_positives.end());
  sorted_positives.erase(
      std::unique(sorted_positives.begin(), sorted_positives.end()),
      sorted_positives.end());

  const bool swap_on = strategy != NegativeStrategy::RandomNonMember;
  const bool random_on = strategy != NegativeStrategy::SuperconceptSwap;

  std::set<Assertion> out;
  for (std::size_t p = 0; p < sorted_positives.size(); ++p) {
    const Assertion& positive = sorted_positives[p];
    const ConceptId a = registry.id_of(positive.concept_rendering);
    if (a == kNoConcept)
      throw ValidationError("unknown concept '" + positive.concept_rendering +
                            "'");
    const auto& members = closure.closed_instances[a];

    if (swap_on) {
      for (const ConceptId b : closure.supers[a]) {
        if (b == a) continue;
        const auto& super_members = closure.closed_instances[b];
        std::vector<const std::string*> eligible;
        for (const std::string& x : pool)
          if (super_members.count(x) && !members.count(x))
            eligible.push_back(&x);
        if (eligible.empty()) continue;
        RngStream rng = RngStream::derive(
            seed, {stream_tag::kNegativeSwap, static_cast<std::uint64_t>(p),
                   static_cast<std::uint64_t>(b)});
        out.insert(Assertion{positive.concept_rendering,
                             *eligible[rng.next_below(eligible.size())]});
      }
    }

    if (random_on) {
      std::vector<const std::string*> eligible;
      for (const std::string& x : pool)
        if (!members.count(x)) eligible.push_back(&x);
      if (eligible.empty()) continue;
      RngStream rng = RngStream::derive(
          seed, {stream_tag::kNegativeRandom, static_cast<std::uint64_t>(p)});
      for (int draw = 0; draw < 10; ++draw)
        out.insert(Assertion{positive.concept_rendering,
                             *eligible[rng.next_below(eligible.size())]});
    }
  }
  return {out.begin(), out.end()};
}

double average_precision(const std::vector<bool>& ranked_labels) {
  std::size_t hits = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < ranked_labels.size(); ++i) {
    if (!ranked_labels[i]) continue;
    ++hits;
    total += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return hits == 0 ? 0.0 : total / static_cast<double>(hits);
}

MicroPrf micro_prf(std::span<const std::pair<bool, bool>> decisions) {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (const auto& [predicted, actual] : decisions) {
    if (predicted && actual) ++tp;
    if (predicted && !actual) ++fp;
    if (!predicted && actual) ++fn;
  }
  MicroPrf out;
  out.precision = tp + fp == 0 ? 0.0
                               : static_cast<double>(tp) /
                                     static_cast<double>(tp + fp);
  out.recall = tp + fn == 0
                   ? 0.0
                   : static_cast<double>(tp) / static_cast<double>(tp + fn);
  out.f1 = out.precision + out.recall == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall /
                     (out.precision + out.recall);
  return out;
}

int bucket_of(std::size_t train_count) {
  if (train_count == 0) return 0;
  if (train_count <= 5) return 1;
  if (train_count <= 10) return 2;
  if (train_count <= 50) return 3;
  return 4;
}

namespace {

BucketMetrics bucket_metrics(const std::vector<RankedAssertion>& ranked,
                             const std::set<Assertion>& positive_set,
                             double threshold) {
  BucketMetrics out;
  std::vector<bool> labels;
  std::vector<std::pair<bool, bool>> decisions;
  std::set<std::string> concepts;
  labels.reserve(ranked.size());
  decisions.reserve(ranked.size());
  for (const RankedAssertion& ra : ranked) {
    const bool actual = positive_set.count(ra.assertion) > 0;
    const bool predicted = ra.score && *ra.score >= threshold;
    labels.push_back(actual);
    decisions.emplace_back(predicted, actual);
    concepts.insert(ra.assertion.concept_rendering);
    if (actual)
      ++out.positives;
    else
      ++out.negatives;
  }
  out.concepts = concepts.size();
  out.prf = micro_prf(decisions);
  out.ap = average_precision(labels);
  return out;
}

}  // namespace

EvalOutcome evaluate(const KnowledgeBase& kb, const EmbeddingStore& store,
                     const EvalOptions& options) {
  const ConceptRegistry registry = register_concepts(kb);
  if (registry.size() == 0)
    throw ValidationError("ontology mentions no concepts");
  const ClosureIndex closure = compute_closure(kb, registry);

  EvalOutcome outcome;
  const std::vector<std::string> all_individuals(kb.individuals.begin(),
                                                 kb.individuals.end());
  outcome.split = split(all_individuals, options.sampler.seed,
                        options.train_ratio);
  const std::set<std::string> test_set(outcome.split.test.begin(),
                                       outcome.split.test.end());

  outcome.model = fit_model(kb, store, options.sampler, outcome.split.train,
                            options.threads);

  // positives: asserted memberships of test individuals
  std::vector<Assertion> positives;
  for (const auto& [name, members] : kb.asserted_instances) {
    const std::string rendering = canonical(ConceptExpr::atomic(name));
    for (const std::string& id : members)
      if (test_set.count(id)) positives.push_back(Assertion{rendering, id});
  }
  std::sort(positives.begin(), positives.end());

  const std::vector<Assertion> negatives =
      generate_negatives(positives, registry, closure, outcome.split.test,
                         options.sampler.seed, options.strategy);

  std::vector<Assertion> assertions = positives;
  assertions.insert(assertions.end(), negatives.begin(), negatives.end());
  for (const Assertion& a : assertions)
    if (!store.individual(a.individual))
      throw ValidationError("missing embedding for individual '" +
                            a.individual + "'");

  // per-concept closed training counts decide the bucket
  const std::set<std::string> train_set(outcome.split.train.begin(),
                                        outcome.split.train.end());
  const auto train_count = [&](const std::string& rendering) {
    const ConceptId c = registry.id_of(rendering);
    std::size_t count = 0;
    for (const std::string& id : closure.closed_instances[c])
      if (train_set.count(id)) ++count;
    return count;
  };

  std::vector<std::vector<Assertion>> by_bucket(kBucketCount);
  std::map<std::string, int> bucket_cache;
  for (const Assertion& a : assertions) {
    auto it = bucket_cache.find(a.concept_rendering);
    if (it == bucket_cache.end())
      it = bucket_cache
               .emplace(a.concept_rendering,
                        bucket_of(train_count(a.concept_rendering)))
               .first;
    by_bucket[it->second].push_back(a);
  }

  const std::set<Assertion> positive_set(positives.begin(), positives.end());
  EvaluationReport& report = outcome.report;
  for (int b = 0; b < kBucketCount; ++b) {
    if (by_bucket[b].empty()) continue;
    const std::vector<RankedAssertion> ranked =
        rank(by_bucket[b], outcome.model, store);
    report.buckets[b] = bucket_metrics(ranked, positive_set, options.threshold);
  }
  const std::vector<RankedAssertion> ranked_all =
      rank(assertions, outcome.model, store);
  report.overall = bucket_metrics(ranked_all, positive_set, options.threshold);

  report.train_individuals = outcome.split.train.size();
  report.test_individuals = outcome.split.test.size();
  for (const auto& cp : outcome.model.posterior.concepts)
    if (cp.scorable)
      ++report.scored_concepts;
    else
      ++report.unscorable_concepts;
  report.seed = options.sampler.seed;
  report.mode = to_string(options.sampler.mode);
  report.threshold = options.threshold;
  return outcome;
}

std::string render_report(const EvaluationReport& report) {
  std::ostringstream out;
  char buf[64];
  const auto fmt = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return std::string(buf);
  };

  out << "bucket      concepts  positives  negatives  precision  recall    "
         "f1        ap\n";
  const auto row = [&](const char* name, const BucketMetrics& m) {
    std::snprintf(buf, sizeof buf, "%-10s  %8zu  %9zu  %9zu", name, m.concepts,
                  m.positives, m.negatives);
    out << buf;
    out << "  " << fmt(m.prf.precision) << "   " << fmt(m.prf.recall) << "  "
        << fmt(m.prf.f1) << "  " << fmt(m.ap) << "\n";
  };
  for (int b = 0; b < kBucketCount; ++b)
    row(kBucketNames[b], report.buckets[b]);
  row("all", report.overall);

  out << "\n";
  out << "seed=" << report.seed << "\n";
  out << "mode=" << report.mode << "\n";
  out << "threshold=" << fmt(report.threshold) << "\n";
  out << "train_individuals=" << report.train_individuals << "\n";
  out << "test_individuals=" << report.test_individuals << "\n";
  out << "scored_concepts=" << report.scored_concepts << "\n";
  out << "unscorable_concepts=" << report.unscorable_concepts << "\n";
  const auto keys = [&](const std::string& prefix, const BucketMetrics& m) {
    out << prefix << ".concepts=" << m.concepts << "\n";
    out << prefix << ".positives=" << m.positives << "\n";
    out << prefix << ".negatives=" << m.negatives << "\n";
    out << prefix << ".precision=" << fmt(m.prf.precision) << "\n";
    out << prefix << ".recall=" << fmt(m.prf.recall) << "\n";
    out << prefix << ".f1=" << fmt(m.prf.f1) << "\n";
    out << prefix << ".ap=" << fmt(m.ap) << "\n";
  };
  for (int b = 0; b < kBucketCount; ++b)
    keys(std::string("bucket.") + kBucketNames[b], report.buckets[b]);
  keys("overall", report.overall);
  return out.str();
}

}  // namespace protogauss
