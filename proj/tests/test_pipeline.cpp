#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "absement/dba.hpp"
#include "absement/error.hpp"
#include "absement/feature_io.hpp"
#include "absement/pipeline.hpp"
#include "absement/synth.hpp"
#include "test_support.hpp"

using namespace absement;
using absement::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(ABSEMENT_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

double printed(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + ": ");
  if (pos == std::string::npos) return std::nan("");
  return std::stod(out.substr(pos + key.size() + 2));
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    rows.push_back(f);
  }
  return rows;
}

Manifest small_corpus(const fs::path& dir, std::size_t words, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_words = words;
  cfg.n_speakers = 3;
  cfg.seed = seed;
  return synth_corpus(cfg, dir);
}

}  // namespace

TEST(Featurize, WritesOneFilePerRowAndIsRepeatable) {
  TempDir dir("pipe");
  auto m = small_corpus(dir.path() / "wav", 2, 3);
  m.rows.resize(2);
  RunConfig cfg;
  cfg.output_dir = dir.path() / "feat";
  const auto s = featurize_manifest(m, cfg);
  EXPECT_TRUE(s.failures.empty());
  ASSERT_EQ(s.written.size(), 2u);
  EXPECT_EQ(s.written[0].filename(), "word001__spk1.feat");
  const auto first = read_text_file(s.written[0]);
  featurize_manifest(m, cfg);
  EXPECT_EQ(read_text_file(s.written[0]), first);
  EXPECT_EQ(read_features(s.written[0]), mfcc(load_wav(m.rows[0].path)));
}

TEST(Featurize, UnreadableRowReportedWithContext) {
  TempDir dir("pipe");
  auto m = small_corpus(dir.path() / "wav", 1, 3);
  m.rows[1].path = dir.path() / "missing.wav";
  RunConfig cfg;
  cfg.output_dir = dir.path() / "feat";
  const auto s = featurize_manifest(m, cfg);
  ASSERT_EQ(s.failures.size(), 1u);
  EXPECT_EQ(s.failures[0].row, 2u);
  EXPECT_NE(s.failures[0].message.find("manifest row 2"), std::string::npos);
  EXPECT_NE(s.failures[0].message.find("missing.wav"), std::string::npos);
  EXPECT_EQ(s.written.size(), 2u);
}

TEST(Average, TwoSpeakersGiveOneTemplateAndSeedIsStable) {
  TempDir dir("pipe");
  const auto m = small_corpus(dir.path() / "wav", 3, 4);
  const auto templ_rows = select_speakers(m, {"spk2", "spk3"});
  RunConfig cfg;
  cfg.seed = 11;
  cfg.output_dir = dir.path() / "a";
  const auto s = average_manifest(templ_rows, cfg);
  EXPECT_TRUE(s.failures.empty());
  ASSERT_EQ(s.written.size(), 3u);
  EXPECT_EQ(s.written[0].filename(), "word001__avg.feat");
  cfg.output_dir = dir.path() / "b";
  average_manifest(templ_rows, cfg);
  for (const auto& p : s.written) {
    EXPECT_EQ(read_text_file(p), read_text_file(dir.path() / "b" / p.filename()));
  }
  const auto file = read_feature_file(s.written[0]);
  EXPECT_EQ(file.features.provenance(), "average");
  EXPECT_NE(std::find(file.comments.begin(), file.comments.end(), "seed: 11"), file.comments.end());
}

TEST(Average, SingleRecordingWordRejected) {
  TempDir dir("pipe");
  const auto m = small_corpus(dir.path() / "wav", 2, 4);
  RunConfig cfg;
  cfg.output_dir = dir.path() / "a";
  EXPECT_THROW(average_manifest(select_speakers(m, {"spk1"}), cfg), InvalidArgumentError);
}

TEST(Evaluate, TemplatesAsQueriesAndFullK) {
  TempDir dir("pipe");
  const auto m = small_corpus(dir.path() / "wav", 6, 5);
  RunConfig cfg;
  cfg.output_dir = dir.path() / "templates";
  average_manifest(select_speakers(m, {"spk2", "spk3"}), cfg);
  const auto lex = build_lexicon(load_templates(dir.path() / "templates"));
  ASSERT_EQ(lex.size(), 6u);

  Manifest self;
  for (const auto& e : lex.entries()) {
    self.rows.push_back({e.label, "avg", dir.path() / "templates" / (e.label + "__avg.feat")});
  }
  cfg.output_dir = dir.path() / "eval_self";
  cfg.k = 6;
  const auto rep = evaluate_manifest(self, lex, cfg);
  EXPECT_EQ(rep.top1_accuracy, 1.0);
  EXPECT_EQ(rep.topk_accuracy, 1.0);

  cfg.output_dir = dir.path() / "eval_q";
  const auto rep2 = evaluate_manifest(select_speakers(m, {"spk1"}), lex, cfg);
  EXPECT_EQ(rep2.topk_accuracy, 1.0);

  Manifest unknown;
  unknown.rows.push_back({"nosuchword", "spk1", m.rows[0].path});
  EXPECT_THROW(evaluate_manifest(unknown, lex, cfg), InvalidArgumentError);
}

TEST(Cli, EndToEndWithRecountAndLibraryParity) {
  TempDir dir("cli");
  const auto d = dir.path();
  auto r = run_cli("synth --n-words 8 --n-speakers 3 --seed 21 --out " + q(d / "corpus"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  r = run_cli("featurize --manifest " + q(d / "corpus/manifest.tsv") + " --out " + q(d / "feat"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  r = run_cli("average --manifest " + q(d / "corpus/manifest.tsv") + " --speakers spk2,spk3 --features " +
              q(d / "feat") + " --seed 21 --out " + q(d / "templates"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("seed: 21"), std::string::npos);
  r = run_cli("evaluate --manifest " + q(d / "corpus/manifest.tsv") + " --speakers spk1 --features " +
              q(d / "feat") + " --templates " + q(d / "templates") + " --k 3 --out " + q(d / "eval"));
  ASSERT_EQ(r.exit_code, 0) << r.out;

  // Recount accuracies from the per-query CSV.
  const auto rows = csv_rows(read_text_file(d / "eval/evaluation.csv"));
  ASSERT_EQ(rows.size(), 8u * 8u);
  std::size_t hit1 = 0, hit3 = 0;
  for (const auto& row : rows) {
    const int rank = std::stoi(row[1]);
    if (row[0] == row[2]) {
      hit1 += rank == 1;
      hit3 += rank <= 3;
    }
  }
  EXPECT_DOUBLE_EQ(printed(r.out, "top1"), hit1 / 8.0);
  EXPECT_DOUBLE_EQ(printed(r.out, "top3"), hit3 / 8.0);

  // Same pipeline through the library only.
  const auto m = read_manifest(d / "corpus/manifest.tsv");
  std::map<std::string, std::vector<FeatureMatrix>> per_word;
  std::vector<LabeledFeatures> queries;
  for (const auto& row : m.rows) {
    auto f = mfcc(load_wav(row.path));
    if (row.speaker == "spk1") {
      queries.push_back({row.word, f});
    } else {
      per_word[row.word].push_back(f);  // rows are already in speaker order
    }
  }
  std::mt19937_64 rng(21);
  std::vector<LabeledFeatures> templates;
  for (auto& [word, inputs] : per_word) {
    DbaConfig dc;
    dc.init_choice = static_cast<std::size_t>(rng() % inputs.size());
    templates.push_back({word, dba_average(inputs, dc).average});
  }
  const auto direct = evaluate(queries, build_lexicon(templates), 3);
  EXPECT_EQ(format_summary_csv(direct), read_text_file(d / "eval/summary.csv"));
  EXPECT_EQ(format_eval_csv(direct), read_text_file(d / "eval/evaluation.csv"));
}

TEST(Cli, ProfileConsistency) {
  TempDir dir("cli");
  std::mt19937_64 rng(2);
  const auto a = absement::testing::random_matrix(rng, 12, 13);
  const auto b = absement::testing::random_matrix(rng, 17, 13);
  write_features(dir.path() / "a.feat", a);
  write_features(dir.path() / "b.feat", b);

  auto r = run_cli("profile --query " + q(dir.path() / "a.feat") + " --template " +
                   q(dir.path() / "a.feat") + " --out " + q(dir.path() / "same.csv"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  for (const auto& row : csv_rows(read_text_file(dir.path() / "same.csv"))) EXPECT_EQ(row[1], "0");

  for (const char* ref : {"query", "template"}) {
    r = run_cli("profile --query " + q(dir.path() / "a.feat") + " --template " +
                q(dir.path() / "b.feat") + " --reference " + ref + " --out " +
                q(dir.path() / "p.csv") + " --path-out " + q(dir.path() / "path.csv"));
    ASSERT_EQ(r.exit_code, 0) << r.out;
    const auto rows = csv_rows(read_text_file(dir.path() / "p.csv"));
    EXPECT_EQ(rows.size(), std::string(ref) == "query" ? 12u : 17u);
    double sum = 0.0;
    for (const auto& row : rows) sum += std::stod(row[1]);
    EXPECT_NEAR(sum, printed(r.out, "cost"), 1e-6);
    const auto path_rows = csv_rows(read_text_file(dir.path() / "path.csv"));
    EXPECT_EQ(path_rows.front()[0], "1");
    EXPECT_EQ(path_rows.back()[1], "17");
  }
}

TEST(Cli, ExitCodes) {
  TempDir dir("cli");
  EXPECT_EQ(run_cli("").exit_code, 1);
  EXPECT_EQ(run_cli("--help").exit_code, 0);
  EXPECT_EQ(run_cli("featurize --manifest " + q(dir.path() / "none.tsv") + " --out " + q(dir.path()))
                .exit_code,
            1);
  EXPECT_EQ(run_cli("synth --n-words 2 --n-speakers 2 --out " + q(dir.path() / "s")).exit_code, 1);
  EXPECT_EQ(run_cli("profile --query " + q(dir.path() / "x.feat") + " --template " +
                    q(dir.path() / "y.feat") + " --out " + q(dir.path() / "p.csv"))
                .exit_code,
            1);

  // A featurize run with one bad row writes the rest and exits 1.
  ASSERT_EQ(run_cli("synth --n-words 1 --n-speakers 3 --out " + q(dir.path() / "c")).exit_code, 0);
  {
    std::string manifest = read_text_file(dir.path() / "c/manifest.tsv");
    manifest += "ghost\tspk1\tghost.wav\n";
    write_file_atomic(dir.path() / "c/manifest.tsv", manifest);
  }
  const auto r = run_cli("featurize --manifest " + q(dir.path() / "c/manifest.tsv") + " --out " +
                         q(dir.path() / "f"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("manifest row 4"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir.path() / "f/word001__spk3.feat"));

  // Write failure is a processing error.
  ASSERT_EQ(run_cli("synth --n-words 1 --n-speakers 3 --out " + q(dir.path() / "d")).exit_code, 0);
  write_file_atomic(dir.path() / "blocker", "file, not a directory");
  EXPECT_EQ(run_cli("featurize --manifest " + q(dir.path() / "d/manifest.tsv") + " --out " +
                    q(dir.path() / "blocker"))
                .exit_code,
            2);
}
