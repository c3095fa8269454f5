#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "protogauss/embeddings.hpp"
#include "protogauss/errors.hpp"
#include "protogauss/gaussian.hpp"
#include "protogauss/ontology.hpp"

using namespace protogauss;

namespace {

struct VecGen {
  std::uint64_t state;

  explicit VecGen(std::uint64_t seed) : state(seed) {}

  double unit() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
};

}  // namespace

TEST_CASE("embedding file loads both namespaces") {
  const EmbeddingStore store = load_embeddings(
      "2 3\n"
      "I a 0.1 0.2 0.3\n"
      "C A 1 2 3\n");
  CHECK(store.dim == 3);
  REQUIRE(store.individual("a") != nullptr);
  CHECK((*store.individual("a"))[0] == doctest::Approx(0.1));
  CHECK((*store.individual("a"))[2] == doctest::Approx(0.3));
  REQUIRE(store.concept_vector("A") != nullptr);
  CHECK((*store.concept_vector("A"))[1] == doctest::Approx(2.0));
  CHECK(store.individual("A") == nullptr);
  CHECK(store.concept_vector("a") == nullptr);
}

TEST_CASE("embedding load errors") {
  CHECK_THROWS_AS(load_embeddings("1 3\nI a 0.1 0.2\n"), ParseError);
  CHECK_THROWS_AS(load_embeddings("2 2\nI a 1 2\nI a 3 4\n"), ParseError);
  CHECK_THROWS_AS(load_embeddings("1 2\nI a 1 nan\n"), ParseError);
  CHECK_THROWS_AS(load_embeddings("1 2\nQ a 1 2\n"), ParseError);
  CHECK_THROWS_AS(load_embeddings("2 2\nI a 1 2\n"), ParseError);
  CHECK_THROWS_AS(load_embeddings(""), ParseError);

  try {
    load_embeddings("2 2\nI a 1 2\nI b 3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("save then load round-trips bit-exactly") {
  VecGen gen(31337);
  EmbeddingStore store;
  store.dim = 4;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> v;
    for (int j = 0; j < 4; ++j)
      v.push_back(gen.uniform(-10.0, 10.0) * std::pow(10.0, i % 5 - 2));
    if (i % 3 == 0)
      store.concepts["K" + std::to_string(i)] = v;
    else
      store.individuals["x" + std::to_string(i)] = v;
  }
  const std::string text = save_embeddings(store);
  const EmbeddingStore back = load_embeddings(text);
  CHECK(back.dim == store.dim);
  REQUIRE(back.individuals.size() == store.individuals.size());
  REQUIRE(back.concepts.size() == store.concepts.size());
  for (const auto& [id, v] : store.individuals) {
    REQUIRE(back.individual(id) != nullptr);
    for (std::size_t j = 0; j < v.size(); ++j)
      CHECK((*back.individual(id))[j] == v[j]);
  }
  for (const auto& [name, v] : store.concepts) {
    REQUIRE(back.concept_vector(name) != nullptr);
    for (std::size_t j = 0; j < v.size(); ++j)
      CHECK((*back.concept_vector(name))[j] == v[j]);
  }
}

TEST_CASE("role Gaussian from pair differences") {
  const EmbeddingStore store = load_embeddings(
      "4 2\n"
      "I h1 0 0\n"
      "I t1 0 0\n"
      "I h2 1 1\n"
      "I t2 3 3\n");
  const std::vector<std::pair<std::string, std::string>> pairs{{"h1", "t1"},
                                                               {"h2", "t2"}};
  const auto fitted = fit_role_gaussian("r", pairs, store);
  REQUIRE(fitted.has_value());
  CHECK(fitted->role == "r");
  CHECK(fitted->support == 2);
  CHECK(fitted->gaussian.mean[0] == doctest::Approx(1.0));
  CHECK(fitted->gaussian.mean[1] == doctest::Approx(1.0));
  CHECK(fitted->gaussian.var[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fitted->gaussian.var[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("role Gaussian needs at least two usable pairs") {
  const EmbeddingStore store = load_embeddings(
      "3 2\n"
      "I h1 0 0\n"
      "I t1 1 1\n"
      "I h2 2 2\n");
  const std::vector<std::pair<std::string, std::string>> single{{"h1", "t1"}};
  CHECK_FALSE(fit_role_gaussian("r", single, store).has_value());

  // second pair skipped for the missing tail vector, leaving only one
  const std::vector<std::pair<std::string, std::string>> partial{
      {"h1", "t1"}, {"h2", "missing"}};
  CHECK_FALSE(fit_role_gaussian("r", partial, store).has_value());
}

TEST_CASE("degenerate role differences hit the variance floor") {
  const EmbeddingStore store = load_embeddings(
      "4 1\n"
      "I h1 0\n"
      "I t1 1\n"
      "I h2 5\n"
      "I t2 6\n");
  const std::vector<std::pair<std::string, std::string>> pairs{{"h1", "t1"},
                                                               {"h2", "t2"}};
  const auto fitted = fit_role_gaussian("r", pairs, store);
  REQUIRE(fitted.has_value());
  CHECK(fitted->gaussian.mean[0] == doctest::Approx(1.0));
  CHECK(fitted->gaussian.var[0] == doctest::Approx(kVarianceFloor));
}

TEST_CASE("role Gaussian matches the long-double oracle on random pairs") {
  VecGen gen(777);
  for (int rep = 0; rep < 15; ++rep) {
    EmbeddingStore store;
    store.dim = 3;
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::vector<double>> diffs;
    const int k = 2 + static_cast<int>(gen.unit() * 10.0);
    for (int i = 0; i < k; ++i) {
      std::vector<double> h{gen.uniform(-5, 5), gen.uniform(-5, 5),
                            gen.uniform(-5, 5)};
      std::vector<double> t{gen.uniform(-5, 5), gen.uniform(-5, 5),
                            gen.uniform(-5, 5)};
      const std::string hid = "h" + std::to_string(i);
      const std::string tid = "t" + std::to_string(i);
      store.individuals[hid] = h;
      store.individuals[tid] = t;
      pairs.emplace_back(hid, tid);
      diffs.push_back({t[0] - h[0], t[1] - h[1], t[2] - h[2]});
    }
    const auto fitted = fit_role_gaussian("r", pairs, store);
    REQUIRE(fitted.has_value());
    const std::vector<oracles::Moments> want = oracles::exact_fit(diffs);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(fitted->gaussian.mean[j] - want[j].mean) < 1e-10);
      CHECK(std::abs(fitted->gaussian.var[j] - want[j].var) /
                std::max(want[j].var, kVarianceFloor) <
            1e-10);
    }
  }
}

TEST_CASE("role Gaussian can be fitted straight from the knowledge base") {
  const KnowledgeBase kb = parse_ontology(
      "ROLE r h1 t1\n"
      "ROLE r h2 t2\n"
      "ROLE lonely h1 t1\n");
  const EmbeddingStore store = load_embeddings(
      "4 2\n"
      "I h1 0 0\n"
      "I t1 0 0\n"
      "I h2 1 1\n"
      "I t2 3 3\n");
  const auto fitted = fit_role_gaussian("r", kb, store);
  REQUIRE(fitted.has_value());
  CHECK(fitted->gaussian.mean[0] == doctest::Approx(1.0));
  CHECK_FALSE(fit_role_gaussian("lonely", kb, store).has_value());
  CHECK_FALSE(fit_role_gaussian("absent", kb, store).has_value());
}
