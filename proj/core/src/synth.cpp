#include "protogauss/synth.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "protogauss/errors.hpp"
#include "protogauss/gaussian.hpp"
#include "protogauss/rng.hpp"

namespace protogauss {

namespace {

struct Node {
  std::string name;
  int depth = 0;
  int parent = -1;
  std::vector<int> children;
  std::vector<double> mean;
  std::vector<double> var;
};

// substream ids under stream_tag::kSynth
enum : std::uint64_t {
  kRootMean = 1,
  kChildJitter = 2,
  kLeafSigma = 3,
  kInstance = 4,
  kSharedOffset = 5,
  kConceptNoise = 6,
};

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SynthWorld synth_world(const SynthSpec& spec) {
  if (spec.depth < 1 || spec.branching < 2 || spec.dim < 1 ||
      spec.instances_per_leaf < 0 || spec.zero_shot_leaves < 0 ||
      !(spec.gap > 0.0) || !(spec.shrink > 0.0) ||
      !(spec.translation_noise >= 0.0))
    throw ValidationError("synth_world: bad spec");

  const int dim = spec.dim;
  std::vector<Node> nodes;
  nodes.push_back(Node{"C", 0, -1, {}, {}, {}});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].depth == spec.depth) continue;
    for (int b = 0; b < spec.branching; ++b) {
      Node child;
      child.name = nodes[i].name + "." + std::to_string(b);
      child.depth = nodes[i].depth + 1;
      child.parent = static_cast<int>(i);
      nodes[i].children.push_back(static_cast<int>(nodes.size()));
      nodes.push_back(std::move(child));
    }
  }

  // means top-down: children fan out along one split dimension per level
  {
    RngStream rng = RngStream::derive(spec.seed, {stream_tag::kSynth, kRootMean});
    nodes[0].mean.resize(dim);
    for (int j = 0; j < dim; ++j) nodes[0].mean[j] = rng.next_normal();
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].children.empty()) continue;
    const int split_dim = nodes[i].depth % dim;
    const double scale = std::pow(spec.shrink, nodes[i].depth);
    for (int b = 0; b < spec.branching; ++b) {
      Node& child = nodes[nodes[i].children[b]];
      RngStream rng = RngStream::derive(
          spec.seed, {stream_tag::kSynth, kChildJitter,
                      static_cast<std::uint64_t>(nodes[i].children[b])});
      child.mean = nodes[i].mean;
      child.mean[split_dim] +=
          spec.gap * scale * (static_cast<double>(b) -
                               0.5 * static_cast<double>(spec.branching - 1));
      for (int j = 0; j < dim; ++j)
        child.mean[j] += 0.1 * scale * rng.next_normal();
    }
  }

  // leaf spreads, then internal moments bottom-up as exact mixtures
  std::vector<int> leaves;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].children.empty()) continue;
    leaves.push_back(static_cast<int>(i));
    RngStream rng = RngStream::derive(
        spec.seed,
        {stream_tag::kSynth, kLeafSigma, static_cast<std::uint64_t>(i)});
    nodes[i].var.resize(dim);
    const double base = std::pow(spec.shrink, spec.depth);
    for (int j = 0; j < dim; ++j) {
      const double sd = base * (0.8 + 0.45 * rng.next_unit());
      nodes[i].var[j] = sd * sd;
    }
  }
  for (std::size_t k = nodes.size(); k-- > 0;) {
    if (nodes[k].children.empty()) continue;
    std::vector<DiagGaussian> parts;
    for (const int c : nodes[k].children)
      parts.push_back(DiagGaussian{nodes[c].mean, nodes[c].var});
    const DiagGaussian mix = mixture_moments(parts);
    nodes[k].mean = mix.mean;
    nodes[k].var = mix.var;
  }

  SynthWorld world;
  for (const Node& node : nodes)
    world.concepts.emplace(
        node.name, SynthWorld::ConceptTruth{node.mean, node.var, node.depth,
                                            node.children.empty()});

  const int zero_from =
      static_cast<int>(leaves.size()) -
      std::min<int>(spec.zero_shot_leaves, static_cast<int>(leaves.size()));
  for (std::size_t l = zero_from; l < leaves.size(); ++l)
    world.zero_shot.push_back(nodes[leaves[l]].name);

  {
    RngStream rng =
        RngStream::derive(spec.seed, {stream_tag::kSynth, kSharedOffset});
    world.shared_offset.resize(dim);
    for (int j = 0; j < dim; ++j) world.shared_offset[j] = rng.next_normal();
  }

  // ontology: SUB per child, INST for non-zero-shot leaf instances
  std::ostringstream ontology;
  ontology << "# synthetic taxonomy: depth " << spec.depth << ", branching "
           << spec.branching << ", " << spec.instances_per_leaf
           << " instances per leaf\n";
  for (const Node& node : nodes)
    if (node.parent >= 0)
      ontology << "SUB " << node.name << " " << nodes[node.parent].name << "\n";

  // instances: id width keeps lexicographic == numeric order
  std::ostringstream embeddings;
  const long n_individuals =
      static_cast<long>(leaves.size()) * spec.instances_per_leaf;
  embeddings << n_individuals + static_cast<long>(nodes.size()) << ' ' << dim
             << '\n';

  long serial = 0;
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    const Node& leaf = nodes[leaves[l]];
    const bool held_out = static_cast<int>(l) >= zero_from;
    for (int k = 0; k < spec.instances_per_leaf; ++k, ++serial) {
      char id[16];
      std::snprintf(id, sizeof id, "x%06ld", serial);
      RngStream rng = RngStream::derive(
          spec.seed,
          {stream_tag::kSynth, kInstance, static_cast<std::uint64_t>(serial)});
      embeddings << "I " << id;
      for (int j = 0; j < dim; ++j)
        embeddings << ' '
                   << format_double(leaf.mean[j] +
                                    std::sqrt(leaf.var[j]) * rng.next_normal());
      embeddings << '\n';
      world.individual_leaf.emplace(id, leaf.name);
      if (!held_out) ontology << "INST " << id << " " << leaf.name << "\n";
    }
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    RngStream rng = RngStream::derive(
        spec.seed,
        {stream_tag::kSynth, kConceptNoise, static_cast<std::uint64_t>(i)});
    const double noise =
        spec.translation_noise * std::pow(spec.shrink, nodes[i].depth);
    embeddings << "C " << nodes[i].name;
    for (int j = 0; j < dim; ++j)
      embeddings << ' '
                 << format_double(nodes[i].mean[j] + world.shared_offset[j] +
                                  noise * rng.next_normal());
    embeddings << '\n';
  }

  world.ontology_text = ontology.str();
  world.embedding_text = embeddings.str();
  return world;
}

std::string ground_truth_json(const SynthWorld& world, const SynthSpec& spec) {
  nlohmann::ordered_json j;
  j["spec"] = {{"depth", spec.depth},
               {"branching", spec.branching},
               {"dim", spec.dim},
               {"instances_per_leaf", spec.instances_per_leaf},
               {"translation_noise", spec.translation_noise},
               {"seed", spec.seed},
               {"zero_shot_leaves", spec.zero_shot_leaves},
               {"gap", spec.gap},
               {"shrink", spec.shrink}};
  j["shared_offset"] = world.shared_offset;
  nlohmann::ordered_json concepts = nlohmann::ordered_json::object();
  for (const auto& [name, truth] : world.concepts)
    concepts[name] = {{"depth", truth.depth},
                      {"leaf", truth.leaf},
                      {"mean", truth.mean},
                      {"var", truth.var}};
  j["concepts"] = std::move(concepts);
  nlohmann::ordered_json members = nlohmann::ordered_json::object();
  for (const auto& [id, leaf] : world.individual_leaf) members[id] = leaf;
  j["individual_leaf"] = std::move(members);
  j["zero_shot"] = world.zero_shot;
  return j.dump(2) + "\n";
}

}  // namespace protogauss
