#include "absement/pipeline.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "absement/error.hpp"
#include "absement/feature_io.hpp"
#include "parallel.hpp"

namespace absement {
namespace {

std::string row_context(std::size_t index, const ManifestRow& row) {
  return "manifest row " + std::to_string(index + 1) + " (" + row.word + ", " + row.speaker +
         ", " + row.path.string() + ")";
}

struct WordGroup {
  std::string word;
  std::vector<std::size_t> rows;  // sorted by speaker
};

std::vector<WordGroup> group_by_word(const Manifest& m) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < m.rows.size(); ++r) groups[m.rows[r].word].push_back(r);
  std::vector<WordGroup> out;
  for (auto& [word, rows] : groups) {
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return m.rows[a].speaker < m.rows[b].speaker;
    });
    out.push_back({word, std::move(rows)});
  }
  return out;
}

}  // namespace

std::string feature_file_name(const ManifestRow& row) {
  return row.word + "__" + row.speaker + ".feat";
}

FeatureMatrix row_features(const ManifestRow& row, const FrontendConfig& cfg,
                           const std::optional<std::filesystem::path>& features_dir) {
  FeatureMatrix m;
  if (features_dir) {
    m = read_features(*features_dir / feature_file_name(row));
  } else if (row.path.extension() == ".feat") {
    m = read_features(row.path);
  } else {
    m = mfcc(load_wav(row.path), cfg);
  }
  m.set_provenance(row.word + "__" + row.speaker);
  return m;
}

BatchSummary featurize_manifest(const Manifest& manifest, const RunConfig& cfg) {
  manifest.validate();
  const std::size_t n = manifest.rows.size();
  std::vector<std::filesystem::path> written(n);
  std::vector<std::optional<RowFailure>> failed(n);
  detail::parallel_for(n, cfg.threads, [&](std::size_t r) {
    const auto& row = manifest.rows[r];
    try {
      const FeatureMatrix m = row_features(row, cfg.frontend);
      const auto out = cfg.output_dir / feature_file_name(row);
      const std::vector<std::string> comments{"provenance: " + m.provenance()};
      write_features(out, m, comments);
      written[r] = out;
    } catch (const InputError& e) {
      failed[r] = RowFailure{r + 1, row_context(r, row) + ": " + e.what(), true};
    } catch (const std::exception& e) {
      failed[r] = RowFailure{r + 1, row_context(r, row) + ": " + e.what(), false};
    }
  });
  BatchSummary s;
  for (std::size_t r = 0; r < n; ++r) {
    if (failed[r]) {
      s.failures.push_back(*failed[r]);
    } else {
      s.written.push_back(written[r]);
    }
  }
  return s;
}

BatchSummary average_manifest(const Manifest& manifest, const RunConfig& cfg,
                              const std::optional<std::filesystem::path>& features_dir) {
  manifest.validate();
  const auto groups = group_by_word(manifest);
  for (const auto& g : groups) {
    if (g.rows.size() < 2) {
      throw InvalidArgumentError("word '" + g.word + "' has " + std::to_string(g.rows.size()) +
                                 " recording(s); averaging needs at least 2");
    }
  }

  // One generator for the whole run; draws happen in sorted word order so the
  // picks do not depend on scheduling.
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> init(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) init[g] = rng() % groups[g].rows.size();

  std::vector<std::filesystem::path> written(groups.size());
  std::vector<std::optional<RowFailure>> failed(groups.size());
  detail::parallel_for(groups.size(), cfg.threads, [&](std::size_t g) {
    const auto& group = groups[g];
    std::size_t current_row = group.rows.front();
    try {
      std::vector<FeatureMatrix> inputs;
      for (std::size_t r : group.rows) {
        current_row = r;
        inputs.push_back(row_features(manifest.rows[r], cfg.frontend, features_dir));
      }
      current_row = group.rows[init[g]];
      DbaConfig dba = cfg.dba;
      dba.init_choice = init[g];
      dba.threads = 1;
      const DbaOutcome outcome = dba_average(inputs, dba);

      std::string sources;
      for (std::size_t r : group.rows) {
        if (!sources.empty()) sources += ' ';
        sources += manifest.rows[r].path.filename().string();
      }
      const std::vector<std::string> comments{
          "provenance: average",
          "word: " + group.word,
          "sources: " + sources,
          "init: " + manifest.rows[group.rows[init[g]]].path.filename().string(),
          "seed: " + std::to_string(cfg.seed),
          "iterations: " + std::to_string(outcome.iterations_run),
          "objective: " + format_double(outcome.objective_trace.back()),
      };
      const auto out = cfg.output_dir / (group.word + "__avg.feat");
      write_features(out, outcome.average, comments);
      written[g] = out;
    } catch (const InputError& e) {
      failed[g] = RowFailure{current_row + 1,
                             row_context(current_row, manifest.rows[current_row]) + ": " + e.what(),
                             true};
    } catch (const std::exception& e) {
      failed[g] = RowFailure{current_row + 1,
                             row_context(current_row, manifest.rows[current_row]) + ": " + e.what(),
                             false};
    }
  });
  BatchSummary s;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (failed[g]) {
      s.failures.push_back(*failed[g]);
    } else {
      s.written.push_back(written[g]);
    }
  }
  return s;
}

std::vector<LabeledFeatures> load_templates(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FileNotFoundError("template directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".feat") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LabeledFeatures> out;
  for (const auto& f : files) {
    const std::string stem = f.stem().string();
    const auto cut = stem.find("__");
    out.push_back({stem.substr(0, cut), read_features(f)});
  }
  if (out.empty()) throw InvalidArgumentError("no .feat templates in " + dir.string());
  return out;
}

EvalReport evaluate_manifest(const Manifest& queries, const Lexicon& lex, const RunConfig& cfg,
                             const std::optional<std::filesystem::path>& features_dir) {
  queries.validate();
  for (std::size_t r = 0; r < queries.rows.size(); ++r) {
    if (!lex.contains(queries.rows[r].word)) {
      throw InvalidArgumentError(row_context(r, queries.rows[r]) + ": missing template for word '" +
                                 queries.rows[r].word + "'");
    }
  }
  std::vector<LabeledFeatures> labeled(queries.rows.size());
  detail::parallel_for(labeled.size(), cfg.threads, [&](std::size_t r) {
    const auto& row = queries.rows[r];
    try {
      labeled[r] = {row.word, row_features(row, cfg.frontend, features_dir)};
    } catch (const InputError& e) {
      throw InputError(row_context(r, row) + ": " + e.what());
    }
  });
  EvalReport report = evaluate(labeled, lex, cfg.k, cfg.threads);
  write_file_atomic(cfg.output_dir / "evaluation.csv", format_eval_csv(report));
  write_file_atomic(cfg.output_dir / "summary.csv", format_summary_csv(report));
  return report;
}

}  // namespace absement
