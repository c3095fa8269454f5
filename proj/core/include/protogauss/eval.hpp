#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "protogauss/inference.hpp"
#include "protogauss/model.hpp"
#include "protogauss/pipeline.hpp"

namespace protogauss {

struct EvalSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Deterministic shuffle of the sorted individuals by seed; the first
// floor(ratio * n) go to train. ratio 1 leaves the test side empty (a
// warning is printed).
EvalSplit split(std::span<const std::string> individuals, std::uint64_t seed,
                double ratio = 2.0 / 3.0);

enum class NegativeStrategy { SuperconceptSwap, RandomNonMember, Both };

// Negative assertions for the given positives, drawn from `pool` (the test
// individuals), deduplicated and sorted. SuperconceptSwap picks, per
// positive (A, a) and per strict superconcept B of A, one pool individual
// that is in closed(B) but not in closed(A); RandomNonMember picks ten
// pool individuals outside closed(A). Nothing deducible from the closed
// ABox is ever emitted.
std::vector<Assertion> generate_negatives(
    std::span<const Assertion> positives, const ConceptRegistry& registry,
    const ClosureIndex& closure, std::span<const std::string> pool,
    std::uint64_t seed, NegativeStrategy strategy = NegativeStrategy::Both);

// Mean precision at the positions of the positives in a ranked label
// sequence; 0 when there are none.
double average_precision(const std::vector<bool>& ranked_labels);

struct MicroPrf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Micro-averaged metrics over (predicted, actual) pairs. Empty denominators
// yield 0.
MicroPrf micro_prf(std::span<const std::pair<bool, bool>> decisions);

// Buckets by closed training instance count: 0 is the supplementary
// zero-shot bucket, then [1,5], (5,10], (10,50], (50, inf).
int bucket_of(std::size_t train_count);
inline constexpr int kBucketCount = 5;
extern const std::array<const char*, kBucketCount> kBucketNames;

struct BucketMetrics {
  std::size_t concepts = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  MicroPrf prf;
  double ap = 0.0;
};

struct EvaluationReport {
  std::array<BucketMetrics, kBucketCount> buckets;
  BucketMetrics overall;
  std::size_t train_individuals = 0;
  std::size_t test_individuals = 0;
  std::size_t scored_concepts = 0;
  std::size_t unscorable_concepts = 0;
  std::uint64_t seed = 0;
  std::string mode;
  double threshold = 0.5;
};

struct EvalOptions {
  SamplerConfig sampler;
  double train_ratio = 2.0 / 3.0;
  double threshold = 0.5;
  NegativeStrategy strategy = NegativeStrategy::Both;
  int threads = 1;
};

struct EvalOutcome {
  EvaluationReport report;
  FittedModel model;
  EvalSplit split;
};

// Full protocol: split the individuals, fit on the training view, build
// positives from the test-side assertions and negatives per the strategy,
// score everything, then report per-bucket metrics. Deterministic for a
// fixed (kb, store, options).
EvalOutcome evaluate(const KnowledgeBase& kb, const EmbeddingStore& store,
                     const EvalOptions& options);

// Aligned human-readable table followed by machine-readable key=value
// lines; byte-identical across runs on identical inputs.
std::string render_report(const EvaluationReport& report);

}  // namespace protogauss
