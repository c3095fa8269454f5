#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "protogauss/gaussian.hpp"
#include "protogauss/ontology.hpp"

namespace protogauss {

// Fixed-dimension vectors for individuals and (optionally) concept names,
// kept in separate namespaces as text kinds I and C.
struct EmbeddingStore {
  int dim = 0;
  std::map<std::string, std::vector<double>> individuals;
  std::map<std::string, std::vector<double>> concepts;

  // nullptr when the id has no vector
  const std::vector<double>* individual(const std::string& id) const;
  const std::vector<double>* concept_vector(const std::string& name) const;
};

// Format: header "<count> <dim>", then one row per line:
//   <kind I|C> <id> <dim whitespace-separated coordinates>
// Rejects count/dim mismatches, duplicate ids within a kind, and
// non-finite coordinates. Throws ParseError with the line number.
EmbeddingStore load_embeddings(std::string_view text);

// Inverse of load_embeddings; coordinates written with 17 significant
// digits so a reload is bit-exact. Individuals precede concepts, each
// block sorted by id.
std::string save_embeddings(const EmbeddingStore& store);

// Gaussian over tail - head difference vectors of a role's pairs.
struct RoleGaussian {
  std::string role;
  DiagGaussian gaussian;
  // number of pairs with both vectors present
  std::size_t support = 0;
};

// Fits from the given pairs; pairs with a missing member vector are
// skipped with a warning on stderr. Fewer than two usable pairs -> absent.
std::optional<RoleGaussian> fit_role_gaussian(
    const std::string& role,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const EmbeddingStore& store, double floor = kVarianceFloor);

std::optional<RoleGaussian> fit_role_gaussian(const std::string& role,
                                              const KnowledgeBase& kb,
                                              const EmbeddingStore& store,
                                              double floor = kVarianceFloor);

}  // namespace protogauss
