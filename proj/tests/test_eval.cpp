#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "protogauss/embeddings.hpp"
#include "protogauss/eval.hpp"
#include "protogauss/gaussian.hpp"
#include "protogauss/ontology.hpp"
#include "protogauss/synth.hpp"

using namespace protogauss;

namespace {

struct LabelGen {
  std::uint64_t state;

  explicit LabelGen(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return state >> 17;
  }
  bool flip() { return (next() & 1) != 0; }
  std::size_t below(std::size_t n) { return next() % n; }
};

std::vector<std::string> numbered(const char* prefix, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("split sizes, determinism, and partition") {
  const std::vector<std::string> nine = numbered("i", 9);
  const EvalSplit s = split(nine, 42);
  CHECK(s.train.size() == 6);
  CHECK(s.test.size() == 3);

  std::vector<std::string> all;
  all.insert(all.end(), s.train.begin(), s.train.end());
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  CHECK(all == nine);

  const EvalSplit again = split(nine, 42);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);

  const EvalSplit other = split(nine, 43);
  CHECK(other.train != s.train);

  const EvalSplit everything = split(nine, 7, 1.0);
  CHECK(everything.train.size() == 9);
  CHECK(everything.test.empty());
}

TEST_CASE("negative generation follows both strategies") {
  // closure: A <= B <= C; x is a B-but-not-A individual
  const KnowledgeBase kb = parse_ontology(
      "SUB A B\nSUB B C\n"
      "INST a1 A\nINST x B\nINST c1 C\n"
      "INST f1 Free\nINST f2 Free\n");
  const ConceptRegistry reg = register_concepts(kb);
  const ClosureIndex closure = compute_closure(kb, reg);

  const std::vector<Assertion> positives{{"A", "a1"}};
  const std::vector<std::string> pool{"a1", "c1", "f1", "f2", "x"};

  SUBCASE("superconcept swap picks the forced candidate") {
    // B's only pool member outside closed(A) is x; C adds c1 or x
    const std::vector<Assertion> negs =
        generate_negatives(positives, reg, closure, pool, 1,
                           NegativeStrategy::SuperconceptSwap);
    REQUIRE(!negs.empty());
    bool found_b_swap = false;
    for (const Assertion& n : negs) {
      CHECK(n.concept_rendering == "A");
      const ConceptId a = reg.id_of("A");
      CHECK(closure.closed_instances[a].count(n.individual) == 0);
      if (n.individual == "x") found_b_swap = true;
    }
    CHECK(found_b_swap);
    CHECK(negs.size() <= 2);
  }

  SUBCASE("random strategy adds up to ten non-members") {
    const std::vector<Assertion> negs =
        generate_negatives(positives, reg, closure, pool, 1,
                           NegativeStrategy::RandomNonMember);
    CHECK(!negs.empty());
    CHECK(negs.size() <= 10);
    for (const Assertion& n : negs)
      CHECK(n.individual != "a1");
  }

  SUBCASE("combined strategies cap at twelve per positive") {
    const std::vector<Assertion> negs = generate_negatives(
        positives, reg, closure, pool, 1, NegativeStrategy::Both);
    CHECK(negs.size() <= 12);
  }

  SUBCASE("deterministic in the seed") {
    const std::vector<Assertion> a = generate_negatives(
        positives, reg, closure, pool, 9, NegativeStrategy::Both);
    const std::vector<Assertion> b = generate_negatives(
        positives, reg, closure, pool, 9, NegativeStrategy::Both);
    CHECK(a == b);
  }
}

TEST_CASE("negatives are never deducible") {
  LabelGen gen(13131);
  for (int rep = 0; rep < 20; ++rep) {
    // random chain ontology with scattered instances
    std::string text;
    const int chain = 3 + static_cast<int>(gen.below(4));
    for (int i = 0; i + 1 < chain; ++i)
      text += "SUB L" + std::to_string(i) + " L" + std::to_string(i + 1) + "\n";
    const int individuals = 6 + static_cast<int>(gen.below(10));
    for (int i = 0; i < individuals; ++i)
      text += "INST u" + std::to_string(i) + " L" +
              std::to_string(gen.below(static_cast<std::size_t>(chain))) + "\n";
    const KnowledgeBase kb = parse_ontology(text);
    const ConceptRegistry reg = register_concepts(kb);
    const ClosureIndex closure = compute_closure(kb, reg);

    std::vector<Assertion> positives;
    for (const auto& [name, insts] : kb.asserted_instances)
      for (const std::string& i : insts) positives.push_back({name, i});
    std::vector<std::string> pool(kb.individuals.begin(),
                                  kb.individuals.end());

    const std::vector<Assertion> negs = generate_negatives(
        positives, reg, closure, pool, 500 + static_cast<std::uint64_t>(rep),
        NegativeStrategy::Both);
    for (const Assertion& n : negs) {
      const ConceptId c = reg.id_of(n.concept_rendering);
      REQUIRE(c != kNoConcept);
      CHECK(closure.closed_instances[c].count(n.individual) == 0);
    }

    // deduplicated output
    std::set<std::pair<std::string, std::string>> seen;
    for (const Assertion& n : negs)
      CHECK(seen.insert({n.concept_rendering, n.individual}).second);
  }
}

TEST_CASE("average precision worked examples") {
  CHECK(average_precision({true, false, true}) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(average_precision({true, true, false, false}) == doctest::Approx(1.0));
  CHECK(average_precision({false, false}) == 0.0);
  CHECK(average_precision({}) == 0.0);
  CHECK(average_precision({false, true}) == doctest::Approx(0.5));
}

TEST_CASE("average precision equals the brute-force recount") {
  LabelGen gen(999);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<bool> labels;
    const std::size_t n = 1 + gen.below(40);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(gen.flip());
    CHECK(average_precision(labels) ==
          oracles::brute_average_precision(labels));
  }
}

TEST_CASE("micro precision recall f1") {
  // TP=2, FP=2, FN=0
  const std::vector<std::pair<bool, bool>> mixed{
      {true, true}, {true, true}, {true, false}, {true, false}};
  const MicroPrf m = micro_prf(mixed);
  CHECK(m.precision == doctest::Approx(0.5));
  CHECK(m.recall == doctest::Approx(1.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const MicroPrf empty = micro_prf({});
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);

  const std::vector<std::pair<bool, bool>> perfect{{true, true},
                                                   {false, false}};
  const MicroPrf p = micro_prf(perfect);
  CHECK(p.precision == doctest::Approx(1.0));
  CHECK(p.recall == doctest::Approx(1.0));
  CHECK(p.f1 == doctest::Approx(1.0));
}

TEST_CASE("micro metrics match the brute confusion counts") {
  LabelGen gen(2024);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::pair<bool, bool>> decisions;
    const std::size_t n = gen.below(30);
    for (std::size_t i = 0; i < n; ++i)
      decisions.push_back({gen.flip(), gen.flip()});
    const MicroPrf m = micro_prf(decisions);
    const oracles::BruteCounts c = oracles::brute_confusion(decisions);
    const double precision =
        c.tp + c.fp == 0 ? 0.0
                         : static_cast<double>(c.tp) /
                               static_cast<double>(c.tp + c.fp);
    const double recall =
        c.tp + c.fn == 0 ? 0.0
                         : static_cast<double>(c.tp) /
                               static_cast<double>(c.tp + c.fn);
    CHECK(m.precision == doctest::Approx(precision).epsilon(1e-12));
    CHECK(m.recall == doctest::Approx(recall).epsilon(1e-12));
    if (precision + recall > 0)
      CHECK(m.f1 == doctest::Approx(2 * precision * recall /
                                    (precision + recall))
                        .epsilon(1e-12));
    else
      CHECK(m.f1 == 0.0);
  }
}

TEST_CASE("bucket boundaries") {
  CHECK(bucket_of(0) == 0);
  CHECK(bucket_of(1) == 1);
  CHECK(bucket_of(5) == 1);
  CHECK(bucket_of(6) == 2);
  CHECK(bucket_of(10) == 2);
  CHECK(bucket_of(11) == 3);
  CHECK(bucket_of(50) == 3);
  CHECK(bucket_of(51) == 4);
  CHECK(bucket_of(5000) == 4);
  CHECK(std::string(kBucketNames[0]) == "zero_shot");
  CHECK(std::string(kBucketNames[4]) == "51_plus");
}

TEST_CASE("synthetic world arithmetic and exactness") {
  SynthSpec spec;
  spec.depth = 3;
  spec.branching = 2;
  spec.dim = 3;
  spec.instances_per_leaf = 10;
  spec.translation_noise = 0.0;
  spec.seed = 99;
  const SynthWorld world = synth_world(spec);

  // 1 + 2 + 4 + 8 concepts
  CHECK(world.concepts.size() == 15);
  std::size_t leaves = 0;
  for (const auto& [name, truth] : world.concepts) leaves += truth.leaf;
  CHECK(leaves == 8);
  CHECK(world.individual_leaf.size() == 80);
  CHECK(world.zero_shot.empty());

  const KnowledgeBase kb = parse_ontology(world.ontology_text);
  const EmbeddingStore store = load_embeddings(world.embedding_text);
  CHECK(kb.individuals.size() == 80);
  CHECK(store.individuals.size() == 80);
  CHECK(store.concepts.size() == 15);

  SUBCASE("zero translation noise recovers true means exactly") {
    for (const auto& [name, truth] : world.concepts) {
      const std::vector<double>* v = store.concept_vector(name);
      REQUIRE(v != nullptr);
      for (int j = 0; j < spec.dim; ++j)
        CHECK((*v)[static_cast<std::size_t>(j)] -
                  world.shared_offset[static_cast<std::size_t>(j)] ==
              doctest::Approx(truth.mean[static_cast<std::size_t>(j)])
                  .epsilon(1e-12));
    }
  }

  SUBCASE("internal truths are exact child mixtures") {
    const ConceptRegistry reg = register_concepts(kb);
    const ClosureIndex closure = compute_closure(kb, reg);
    for (const auto& [name, truth] : world.concepts) {
      if (truth.leaf) continue;
      std::vector<DiagGaussian> children;
      for (const auto& [child, child_truth] : world.concepts) {
        if (child == name) continue;
        // direct children have this concept as a direct axiom parent
        const ConceptId child_id = reg.id_of(child);
        const ConceptId parent_id = reg.id_of(name);
        const auto& direct = closure.direct_supers[child_id];
        if (std::find(direct.begin(), direct.end(), parent_id) != direct.end())
          children.push_back(DiagGaussian{child_truth.mean, child_truth.var});
      }
      REQUIRE(children.size() == 2);
      const DiagGaussian mixed = mixture_moments(children, 0.0);
      for (int j = 0; j < spec.dim; ++j) {
        CHECK(truth.mean[static_cast<std::size_t>(j)] ==
              doctest::Approx(mixed.mean[static_cast<std::size_t>(j)])
                  .epsilon(1e-10));
        CHECK(truth.var[static_cast<std::size_t>(j)] ==
              doctest::Approx(mixed.var[static_cast<std::size_t>(j)])
                  .epsilon(1e-10));
      }
    }
  }

  SUBCASE("instances sample the leaf Gaussians") {
    // pooled check: each individual's leaf mean is within 6 sd
    for (const auto& [id, leaf] : world.individual_leaf) {
      const std::vector<double>* v = store.individual(id);
      REQUIRE(v != nullptr);
      const SynthWorld::ConceptTruth& truth = world.concepts.at(leaf);
      for (int j = 0; j < spec.dim; ++j) {
        const std::size_t u = static_cast<std::size_t>(j);
        CHECK(std::abs((*v)[u] - truth.mean[u]) <
              6.0 * std::sqrt(truth.var[u]) + 1e-9);
      }
    }
  }

  SUBCASE("determinism and seed sensitivity") {
    const SynthWorld same = synth_world(spec);
    CHECK(same.ontology_text == world.ontology_text);
    CHECK(same.embedding_text == world.embedding_text);
    SynthSpec other = spec;
    other.seed = 100;
    CHECK(synth_world(other).embedding_text != world.embedding_text);
  }
}

TEST_CASE("zero-shot leaves keep instances out of the ABox") {
  SynthSpec spec;
  spec.depth = 2;
  spec.branching = 2;
  spec.dim = 2;
  spec.instances_per_leaf = 5;
  spec.translation_noise = 0.0;
  spec.seed = 3;
  spec.zero_shot_leaves = 1;
  const SynthWorld world = synth_world(spec);
  REQUIRE(world.zero_shot.size() == 1);
  const std::string& held_out = world.zero_shot.front();

  const KnowledgeBase kb = parse_ontology(world.ontology_text);
  CHECK(kb.asserted_instances.count(held_out) == 0);

  // the held-out leaf's individuals still exist with vectors and truth
  const EmbeddingStore store = load_embeddings(world.embedding_text);
  std::size_t held_out_individuals = 0;
  for (const auto& [id, leaf] : world.individual_leaf)
    if (leaf == held_out) {
      ++held_out_individuals;
      CHECK(store.individual(id) != nullptr);
      CHECK(kb.individuals.count(id) == 0);
    }
  CHECK(held_out_individuals == 5);

  // other leaves keep their assertions
  std::size_t asserted = 0;
  for (const auto& [name, insts] : kb.asserted_instances)
    asserted += insts.size();
  CHECK(asserted == 15);
}

TEST_CASE("ground truth serializes the world") {
  SynthSpec spec;
  spec.depth = 1;
  spec.branching = 2;
  spec.dim = 2;
  spec.instances_per_leaf = 3;
  spec.seed = 8;
  const SynthWorld world = synth_world(spec);
  const std::string json = ground_truth_json(world, spec);
  CHECK(json.find("\"concepts\"") != std::string::npos);
  CHECK(json.find("\"shared_offset\"") != std::string::npos);
  CHECK(json.find("\"individual_leaf\"") != std::string::npos);
  CHECK(json.find("\"zero_shot\"") != std::string::npos);
}

TEST_CASE("full evaluation is deterministic and well-formed") {
  SynthSpec spec;
  spec.depth = 2;
  spec.branching = 2;
  spec.dim = 3;
  spec.instances_per_leaf = 12;
  spec.translation_noise = 0.02;
  spec.seed = 11;
  const SynthWorld world = synth_world(spec);

  const KnowledgeBase kb = parse_ontology(world.ontology_text);
  const EmbeddingStore store = load_embeddings(world.embedding_text);

  EvalOptions options;
  options.sampler = desk_preset();
  options.sampler.seed = 5;
  options.sampler.burn_in_samples = 5;
  options.sampler.kept_samples = 30;
  options.sampler.thin_iterations = 2;
  options.strategy = NegativeStrategy::RandomNonMember;

  const EvalOutcome a = evaluate(kb, store, options);
  const EvalOutcome b = evaluate(kb, store, options);
  CHECK(render_report(a.report) == render_report(b.report));

  CHECK(a.report.train_individuals + a.report.test_individuals ==
        kb.individuals.size());
  CHECK(a.report.train_individuals == a.split.train.size());

  const BucketMetrics& overall = a.report.overall;
  CHECK(overall.positives > 0);
  CHECK(overall.negatives > 0);
  CHECK(overall.ap >= 0.0);
  CHECK(overall.ap <= 1.0);
  for (const BucketMetrics& bucket : a.report.buckets) {
    CHECK(bucket.ap >= 0.0);
    CHECK(bucket.ap <= 1.0);
    CHECK(bucket.prf.precision >= 0.0);
    CHECK(bucket.prf.precision <= 1.0);
    CHECK(bucket.prf.recall >= 0.0);
    CHECK(bucket.prf.recall <= 1.0);
  }

  // the report text carries the table plus key=value lines
  const std::string text = render_report(a.report);
  CHECK(text.find("bucket") != std::string::npos);
  CHECK(text.find("overall") != std::string::npos);
  CHECK(text.find("seed=") != std::string::npos);

  // a multi-threaded run must agree with the sequential one
  EvalOptions threaded = options;
  threaded.threads = 4;
  const EvalOutcome c = evaluate(kb, store, threaded);
  CHECK(render_report(c.report) == render_report(a.report));
}
