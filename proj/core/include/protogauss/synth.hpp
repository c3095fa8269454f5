#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace protogauss {

// Complete taxonomy tree with Gaussian leaves. Internal concepts are exact
// uniform mixtures of their children, so every concept's true moments are
// recoverable from pooled instance data. Concept vectors are the true
// means shifted by one shared offset plus optional noise, giving the
// vector-offset analogy something exact to learn at noise 0.
struct SynthSpec {
  int depth = 3;       // root at depth 0, leaves at `depth`
  int branching = 3;   // children per internal node
  int dim = 10;
  int instances_per_leaf = 100;
  // concept-vector noise sd in units of the node's level scale, so the
  // offset-analogy assumption degrades uniformly across tree depths
  double translation_noise = 0.05;
  std::uint64_t seed = 0;
  // this many leaves (taken from the end of the leaf order) keep their
  // individuals out of the ABox: vectors and ground truth only
  int zero_shot_leaves = 0;
  double gap = 2.0;     // sibling mean separation in units of the level scale
  double shrink = 0.5;  // per-level scale decay
};

struct SynthWorld {
  std::string ontology_text;
  std::string embedding_text;

  struct ConceptTruth {
    std::vector<double> mean;
    std::vector<double> var;
    int depth = 0;
    bool leaf = false;
  };
  std::map<std::string, ConceptTruth> concepts;
  // individual -> generating leaf (includes zero-shot individuals)
  std::map<std::string, std::string> individual_leaf;
  std::vector<double> shared_offset;
  std::vector<std::string> zero_shot;  // leaf names without ABox instances
};

SynthWorld synth_world(const SynthSpec& spec);

// Ground truth serialized as JSON (spec echo, per-concept moments,
// individual origins, shared offset, zero-shot list).
std::string ground_truth_json(const SynthWorld& world, const SynthSpec& spec);

}  // namespace protogauss
