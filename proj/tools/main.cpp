#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "protogauss/errors.hpp"
#include "protogauss/eval.hpp"
#include "protogauss/inference.hpp"
#include "protogauss/model_io.hpp"
#include "protogauss/pipeline.hpp"
#include "protogauss/synth.hpp"

namespace {

using namespace protogauss;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ValidationError("cannot write '" + path + "'");
}

std::string format_score(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

struct SamplerOptions {
  std::string config_path;
  bool paper = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> burn_in;
  std::optional<int> kept;
  std::optional<int> thin;
  std::optional<std::string> mode;
  std::optional<int> kappa;
  std::optional<double> eta;
  std::optional<double> floor;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "key = value file with sampler settings");
    cmd->add_flag("--paper-preset", paper,
                  "burn 200 / keep 1000 / thin 25 instead of the fast preset");
    cmd->add_option("--seed", seed, "root RNG seed");
    cmd->add_option("--burn-in", burn_in, "burn-in records to discard");
    cmd->add_option("--kept", kept, "posterior records to keep");
    cmd->add_option("--thin", thin, "Gibbs sweeps between records");
    cmd->add_option("--mode", mode, "prior mode: full|flat|emb|dl");
    cmd->add_option("--kappa", kappa, "nearest siblings for the variance prior");
    cmd->add_option("--eta", eta, "variance prior degrees of freedom");
    cmd->add_option("--variance-floor", floor, "lower bound on variances");
  }

  SamplerConfig resolve() const {
    SamplerConfig config = desk_preset();
    if (!config_path.empty())
      config = parse_config_text(read_file(config_path), config);
    if (paper) {
      const SamplerConfig reference = paper_preset();
      config.burn_in_samples = reference.burn_in_samples;
      config.kept_samples = reference.kept_samples;
      config.thin_iterations = reference.thin_iterations;
    }
    if (seed) config.seed = *seed;
    if (burn_in) config.burn_in_samples = *burn_in;
    if (kept) config.kept_samples = *kept;
    if (thin) config.thin_iterations = *thin;
    if (mode) {
      const auto parsed = prior_mode_from_string(*mode);
      if (!parsed) throw ValidationError("unknown mode '" + *mode + "'");
      config.mode = *parsed;
    }
    if (kappa) config.kappa = *kappa;
    if (eta) config.eta = *eta;
    if (floor) config.variance_floor = *floor;
    validate_config(config);
    return config;
  }
};

int cmd_fit(const std::string& ontology_path, const std::string& embeddings_path,
            const SamplerOptions& options, const std::string& out_model,
            int threads) {
  const KnowledgeBase kb = parse_ontology(read_file(ontology_path));
  const EmbeddingStore store = load_embeddings(read_file(embeddings_path));
  const SamplerConfig config = options.resolve();

  FitSummary summary;
  const FittedModel model =
      fit_model(kb, store, config,
                {kb.individuals.begin(), kb.individuals.end()}, threads,
                &summary);
  write_file(out_model, save_model(model));

  std::printf("sampling %.3f s, calibration %.3f s, %zu concepts, %ld sweeps\n",
              summary.sampling_seconds, summary.calibration_seconds,
              model.size(), total_iterations(config));
  for (const auto& [rendering, count] : summary.concept_counts)
    std::printf("%s\t%zu training instances\t%d samples\n", rendering.c_str(),
                count, config.kept_samples);
  return 0;
}

int cmd_score(const std::string& model_path, const std::string& embeddings_path,
              const std::string& candidates_path, const std::string& out_path,
              double threshold) {
  const FittedModel model = load_model(read_file(model_path));
  const EmbeddingStore store = load_embeddings(read_file(embeddings_path));
  const std::string buffer = read_file(candidates_path);
  const std::string_view text(buffer);

  std::ostringstream out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);

    std::string rendering;
    std::string individual;
    try {
      detail::TokenStream ts(line);
      if (ts.at_end()) continue;
      rendering = canonical(detail::parse_expr(ts));
      individual = ts.expect_name("an individual name");
      if (!ts.at_end()) throw ParseError("trailing input after candidate");
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }

    const ConceptId c = model.id_of(rendering);
    if (c == kNoConcept) {
      out << rendering << '\t' << individual << "\t-\tskip:unknown-concept\n";
      continue;
    }
    const std::vector<double>* v = store.individual(individual);
    if (!v) {
      out << rendering << '\t' << individual << "\t-\tskip:unknown-individual\n";
      continue;
    }
    const Decision d = classify(model, c, *v, threshold);
    if (d.unscorable) {
      out << rendering << '\t' << individual << "\t-\treject:unscorable\n";
      continue;
    }
    out << rendering << '\t' << individual << '\t' << format_score(d.score)
        << '\t' << (d.accept ? "accept" : "reject") << '\n';
  }

  if (out_path.empty())
    std::cout << out.str();
  else
    write_file(out_path, out.str());
  return 0;
}

int cmd_evaluate(const std::string& ontology_path,
                 const std::string& embeddings_path,
                 const SamplerOptions& options, double ratio, double threshold,
                 const std::string& strategy, const std::string& out_report,
                 const std::string& out_model, int threads) {
  const KnowledgeBase kb = parse_ontology(read_file(ontology_path));
  const EmbeddingStore store = load_embeddings(read_file(embeddings_path));

  EvalOptions eval_options;
  eval_options.sampler = options.resolve();
  eval_options.train_ratio = ratio;
  eval_options.threshold = threshold;
  eval_options.threads = threads;
  if (strategy == "swap")
    eval_options.strategy = NegativeStrategy::SuperconceptSwap;
  else if (strategy == "random")
    eval_options.strategy = NegativeStrategy::RandomNonMember;
  else if (strategy == "both")
    eval_options.strategy = NegativeStrategy::Both;
  else
    throw ValidationError("unknown strategy '" + strategy + "'");

  const EvalOutcome outcome = evaluate(kb, store, eval_options);
  const std::string rendered = render_report(outcome.report);
  std::cout << rendered;
  if (!out_report.empty()) write_file(out_report, rendered);
  if (!out_model.empty()) write_file(out_model, save_model(outcome.model));
  return 0;
}

int cmd_synth(const SynthSpec& spec, const std::string& out_ontology,
              const std::string& out_embeddings,
              const std::string& out_ground_truth) {
  const SynthWorld world = synth_world(spec);
  write_file(out_ontology, world.ontology_text);
  write_file(out_embeddings, world.embedding_text);
  if (!out_ground_truth.empty())
    write_file(out_ground_truth, ground_truth_json(world, spec));
  std::printf("%zu concepts, %zu individuals, %zu zero-shot leaves\n",
              world.concepts.size(), world.individual_leaf.size(),
              world.zero_shot.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian concept models over entity embeddings"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit concept Gaussians to a knowledge base");
  std::string fit_ontology;
  std::string fit_embeddings;
  std::string fit_out_model = "model.json";
  int fit_threads = 1;
  SamplerOptions fit_options;
  fit->add_option("--ontology", fit_ontology, "ontology file")->required();
  fit->add_option("--embeddings", fit_embeddings, "embedding file")->required();
  fit->add_option("--out-model", fit_out_model, "fitted model output path");
  fit->add_option("--threads", fit_threads, "calibration threads");
  fit_options.attach(fit);

  // score
  auto* score_cmd = app.add_subcommand("score", "score candidate assertions");
  std::string score_model;
  std::string score_embeddings;
  std::string score_candidates;
  std::string score_out;
  double score_threshold = 0.5;
  score_cmd->add_option("--model", score_model, "fitted model file")->required();
  score_cmd->add_option("--embeddings", score_embeddings, "embedding file")
      ->required();
  score_cmd
      ->add_option("--candidates", score_candidates,
                   "file with one '<concept-expr> <individual>' per line")
      ->required();
  score_cmd->add_option("--out", score_out, "output TSV (stdout when absent)");
  score_cmd->add_option("--threshold", score_threshold, "accept threshold");

  // evaluate
  auto* eval_cmd =
      app.add_subcommand("evaluate", "held-out completion experiment");
  std::string eval_ontology;
  std::string eval_embeddings;
  std::string eval_out_report;
  std::string eval_out_model;
  std::string eval_strategy = "both";
  double eval_ratio = 2.0 / 3.0;
  double eval_threshold = 0.5;
  int eval_threads = 1;
  SamplerOptions eval_options;
  eval_cmd->add_option("--ontology", eval_ontology, "ontology file")->required();
  eval_cmd->add_option("--embeddings", eval_embeddings, "embedding file")
      ->required();
  eval_cmd->add_option("--ratio", eval_ratio, "training fraction");
  eval_cmd->add_option("--threshold", eval_threshold, "accept threshold");
  eval_cmd->add_option("--strategy", eval_strategy,
                       "negatives: swap|random|both");
  eval_cmd->add_option("--out-report", eval_out_report, "report output path");
  eval_cmd->add_option("--out-model", eval_out_model, "model output path");
  eval_cmd->add_option("--threads", eval_threads, "calibration threads");
  eval_options.attach(eval_cmd);

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic taxonomy world");
  SynthSpec spec;
  std::string synth_ontology = "ontology.txt";
  std::string synth_embeddings = "embeddings.txt";
  std::string synth_truth;
  synth_cmd->add_option("--depth", spec.depth, "tree depth");
  synth_cmd->add_option("--branching", spec.branching, "children per node");
  synth_cmd->add_option("--dim", spec.dim, "embedding dimension");
  synth_cmd->add_option("--instances-per-leaf", spec.instances_per_leaf,
                        "individuals per leaf concept");
  synth_cmd->add_option("--translation-noise", spec.translation_noise,
                        "concept vector noise, relative to the level scale");
  synth_cmd->add_option("--seed", spec.seed, "generator seed");
  synth_cmd->add_option("--zero-shot-leaves", spec.zero_shot_leaves,
                        "trailing leaves kept out of the ABox");
  synth_cmd->add_option("--gap", spec.gap, "sibling separation");
  synth_cmd->add_option("--shrink", spec.shrink, "per-level scale decay");
  synth_cmd->add_option("--out-ontology", synth_ontology, "ontology output");
  synth_cmd->add_option("--out-embeddings", synth_embeddings,
                        "embedding output");
  synth_cmd->add_option("--out-ground-truth", synth_truth,
                        "ground truth JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(fit))
      return cmd_fit(fit_ontology, fit_embeddings, fit_options, fit_out_model,
                     fit_threads);
    if (app.got_subcommand(score_cmd))
      return cmd_score(score_model, score_embeddings, score_candidates,
                       score_out, score_threshold);
    if (app.got_subcommand(eval_cmd))
      return cmd_evaluate(eval_ontology, eval_embeddings, eval_options,
                          eval_ratio, eval_threshold, eval_strategy,
                          eval_out_report, eval_out_model, eval_threads);
    if (app.got_subcommand(synth_cmd))
      return cmd_synth(spec, synth_ontology, synth_embeddings, synth_truth);
  } catch (const protogauss::ParseError& e) {
    if (e.line())
      std::cerr << "error: line " << e.line() << ": " << e.what() << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const protogauss::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const protogauss::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
