// Batch driver: featurize, average, evaluate, profile, synth.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "absement/dtw.hpp"
#include "absement/error.hpp"
#include "absement/feature_io.hpp"
#include "absement/manifest.hpp"
#include "absement/pipeline.hpp"
#include "absement/synth.hpp"

namespace fs = std::filesystem;
using namespace absement;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitProcessing = 2;

struct Options {
  fs::path manifest;
  fs::path out;
  std::optional<fs::path> features;
  fs::path templates;
  std::string speakers;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  std::size_t n_coeffs = 13;
  std::size_t max_iterations = 10;
  std::size_t threads = 0;
  // profile
  fs::path query;
  fs::path templ;
  std::string reference = "query";
  std::optional<fs::path> path_out;
  // synth
  std::size_t n_words = 20;
  std::size_t n_speakers = 3;
  double noise = SynthConfig{}.noise_level;
};

std::set<std::string> parse_speakers(const std::string& list) {
  std::set<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

RunConfig run_config(const Options& o) {
  RunConfig cfg;
  cfg.frontend.window_ms = o.window_ms;
  cfg.frontend.hop_ms = o.hop_ms;
  cfg.frontend.n_coeffs = o.n_coeffs;
  cfg.dba.max_iterations = o.max_iterations;
  cfg.k = o.k;
  cfg.seed = o.seed;
  cfg.output_dir = o.out;
  cfg.threads = o.threads;
  return cfg;
}

Manifest load_selected(const Options& o) {
  Manifest m = select_speakers(read_manifest(o.manifest), parse_speakers(o.speakers));
  if (m.rows.empty()) throw InvalidArgumentError("no manifest rows match the selected speakers");
  return m;
}

int report_failures(const BatchSummary& s, const char* what) {
  for (const auto& f : s.failures) std::cerr << "error: " << f.message << "\n";
  std::cout << what << " " << s.written.size() << " file(s)";
  if (!s.failures.empty()) std::cout << ", " << s.failures.size() << " failure(s)";
  std::cout << "\n";
  if (s.failures.empty()) return kExitOk;
  for (const auto& f : s.failures) {
    if (!f.input_error) return kExitProcessing;
  }
  return kExitInput;
}

int cmd_featurize(const Options& o) {
  return report_failures(featurize_manifest(load_selected(o), run_config(o)), "wrote");
}

int cmd_average(const Options& o) {
  const RunConfig cfg = run_config(o);
  std::cout << "seed: " << cfg.seed << "\n";
  return report_failures(average_manifest(load_selected(o), cfg, o.features), "wrote");
}

int cmd_evaluate(const Options& o, bool k_given) {
  RunConfig cfg = run_config(o);
  const Lexicon lex = build_lexicon(load_templates(o.templates));
  if (!k_given) cfg.k = std::min(cfg.k, lex.size());
  const EvalReport rep = evaluate_manifest(load_selected(o), lex, cfg, o.features);
  std::cout << "queries: " << rep.n_queries << "\n"
            << "lexicon: " << lex.size() << "\n"
            << "top1: " << format_double(rep.top1_accuracy) << "\n"
            << "top" << rep.k << ": " << format_double(rep.topk_accuracy) << "\n";
  return kExitOk;
}

int cmd_profile(const Options& o) {
  const FeatureMatrix q = read_features(o.query);
  const FeatureMatrix t = read_features(o.templ);
  const Reference ref = o.reference == "template" ? Reference::kTemplate : Reference::kQuery;
  const AbsementResult r = dtw_absement(q, t);
  write_file_atomic(o.out, format_profile_csv(distance_profile(q, t, r, ref)));
  if (o.path_out) {
    write_file_atomic(*o.path_out, format_path_csv(r.path, path_step_distances(q, t, r.path)));
  }
  std::cout << "cost: " << format_double(r.cost) << "\n"
            << "scaled_cost: " << format_double(r.scaled_cost) << "\n";
  return kExitOk;
}

int cmd_synth(const Options& o) {
  SynthConfig cfg;
  cfg.n_words = o.n_words;
  cfg.n_speakers = o.n_speakers;
  cfg.seed = o.seed;
  cfg.noise_level = o.noise;
  const Manifest m = synth_corpus(cfg, o.out);
  std::cout << "wrote " << m.rows.size() << " recordings and "
            << (o.out / "manifest.tsv").string() << " (seed " << o.seed << ")\n";
  return kExitOk;
}

void add_frontend_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--window-ms", o.window_ms, "Analysis window length (ms)")->capture_default_str();
  cmd->add_option("--hop-ms", o.hop_ms, "Frame advance (ms)")->capture_default_str();
  cmd->add_option("--n-coeffs", o.n_coeffs, "Cepstral coefficients per frame")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic absement: DTW-based word template matching"};
  app.require_subcommand(1);
  Options o;

  auto* featurize = app.add_subcommand("featurize", "Convert manifest recordings to FEATv1 files");
  featurize->add_option("--manifest", o.manifest, "TSV manifest (word, speaker, path)")->required();
  featurize->add_option("--out", o.out, "Output directory")->required();
  featurize->add_option("--speakers", o.speakers, "Comma-separated speakers to include");
  add_frontend_flags(featurize, o);
  featurize->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* average = app.add_subcommand("average", "Average each word's recordings into a template");
  average->add_option("--manifest", o.manifest, "TSV manifest")->required();
  average->add_option("--out", o.out, "Output directory for <word>__avg.feat")->required();
  average->add_option("--speakers", o.speakers, "Comma-separated template speakers");
  average->add_option("--features", o.features, "Directory of featurized rows");
  average->add_option("--seed", o.seed, "Seed for the initial-sequence picks")->capture_default_str();
  average->add_option("--max-iterations", o.max_iterations, "Averaging iterations")->capture_default_str();
  add_frontend_flags(average, o);
  average->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* evaluate = app.add_subcommand("evaluate", "Recognize queries against averaged templates");
  evaluate->add_option("--manifest", o.manifest, "Query manifest")->required();
  evaluate->add_option("--templates", o.templates, "Directory of template .feat files")->required();
  evaluate->add_option("--out", o.out, "Output directory for evaluation.csv and summary.csv")->required();
  evaluate->add_option("--speakers", o.speakers, "Comma-separated query speakers");
  evaluate->add_option("--features", o.features, "Directory of featurized rows");
  auto* k_opt = evaluate->add_option("--k", o.k, "Top-k cutoff (default 10, capped at lexicon size)");
  add_frontend_flags(evaluate, o);
  evaluate->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* profile = app.add_subcommand("profile", "Per-frame distance profile of one alignment");
  profile->add_option("--query", o.query, "Query FEATv1 file")->required();
  profile->add_option("--template", o.templ, "Template FEATv1 file")->required();
  profile->add_option("--reference", o.reference, "Sequence indexing the profile")
      ->check(CLI::IsMember({"query", "template"}))
      ->capture_default_str();
  profile->add_option("--out", o.out, "Profile CSV path")->required();
  profile->add_option("--path-out", o.path_out, "Optional warping path CSV path");

  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic word corpus");
  synth->add_option("--n-words", o.n_words, "Number of words")->capture_default_str();
  synth->add_option("--n-speakers", o.n_speakers, "Number of speakers (>= 3)")->capture_default_str();
  synth->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  synth->add_option("--noise", o.noise, "White noise std (full scale = 1)")->capture_default_str();
  synth->add_option("--out", o.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*featurize) return cmd_featurize(o);
    if (*average) return cmd_average(o);
    if (*evaluate) return cmd_evaluate(o, k_opt->count() > 0);
    if (*profile) return cmd_profile(o);
    if (*synth) return cmd_synth(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitInput;
}
