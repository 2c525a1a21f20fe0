// Copyright 2026 The wfner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "test_util.hpp"
#include "wfner/corpus_io.hpp"
#include "wfner/experiment.hpp"

namespace wfner {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(WFNER_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string snapshot(const fs::path& dir) {
  std::string s;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) s += f.filename().string() + "\n" + read_file(f) + "\n";
  return s;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(61);
    Corpus gold;
    gold.name = "gold";
    for (int i = 0; i < 12; ++i) {
      gold.documents.push_back(testing::random_document(rng, "doc" + std::to_string(i)));
    }
    gold.documents.push_back(testing::make_doc(
        "tools", "We aligned with BWA 0.7.17 and sorted with SAMtools.",
        {{"Tool", {{16, 19}}}, {"Version", {{20, 26}}}, {"Tool", {{43, 51}}}}));
    std::sort(gold.documents.begin(), gold.documents.end(),
              [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
    write_corpus(gold, dir_ / "gold");

    Corpus pred = gold;
    for (auto& d : pred.documents) {
      if (!d.entities.empty()) d.entities.pop_back();
    }
    write_corpus(pred, dir_ / "pred");
    write_file_atomic(dir_ / "names.txt", "BWA\nSAMtools\nthe\n");
  }

  testing::TempDir dir_;
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("stats").code, 2);
  EXPECT_EQ(run("eval --gold " + q(dir_ / "gold") + " --pred " + q(dir_ / "pred") + " --mode loose").code, 2);
  EXPECT_EQ(run("report " + q(dir_ / "missing.json")).code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ValidateExitCodes) {
  EXPECT_EQ(run("validate --corpus " + q(dir_ / "gold")).code, 0);
  fs::create_directories(dir_ / "bad");
  write_file_atomic(dir_ / "bad/a.txt", "hello world");
  write_file_atomic(dir_ / "bad/a.ann", "T1\tsoftware 0 5\thello\n");
  EXPECT_EQ(run("validate --corpus " + q(dir_ / "bad")).code, 0);
  const auto r = run("validate --schema --corpus " + q(dir_ / "bad"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("UnknownLabel"), std::string::npos);
  write_file_atomic(dir_ / "bad/a.ann", "T1\tTool 0 5\tworld\n");
  EXPECT_EQ(run("validate --corpus " + q(dir_ / "bad")).code, 1);
}

TEST_F(Cli, Stats) {
  const auto r = run("stats --corpus " + q(dir_ / "gold"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("labels"));
  EXPECT_TRUE(j.contains("tokens"));
  EXPECT_TRUE(j.contains("annotated_tokens"));
  EXPECT_TRUE(j.contains("nesting_fraction"));
}

TEST_F(Cli, EvalFocusedAndDeterministic) {
  const std::string base = "eval --gold " + q(dir_ / "gold") + " --pred " + q(dir_ / "pred");
  const auto text = run(base + " --mode relaxed --format text --focus "
                               "Tool,Biblio,Version,LibraryPackage,ProgrammingLanguage,Environment");
  ASSERT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("Overall-focused"), std::string::npos);

  const auto both = run(base);
  ASSERT_EQ(both.code, 0);
  const auto j = nlohmann::json::parse(both.out);
  EXPECT_TRUE(j.contains("strict"));
  EXPECT_TRUE(j.contains("relaxed"));
  EXPECT_EQ(run(base + " --jobs 4").out, both.out);
  EXPECT_EQ(run(base).out, both.out);
}

TEST_F(Cli, ConfigMergesFlagsWin) {
  write_file_atomic(dir_ / "cfg.json", R"({"mode": "strict", "format": "text", "qualifiers": true})");
  const std::string base = "eval --gold " + q(dir_ / "gold") + " --pred " + q(dir_ / "pred");
  const auto r = run("--config " + q(dir_ / "cfg.json") + " " + base + " --mode relaxed");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("mode: relaxed"), std::string::npos);
  EXPECT_EQ(r.out.find("mode: strict"), std::string::npos);
  const auto s = run("--config " + q(dir_ / "cfg.json") + " " + base);
  EXPECT_NE(s.out.find("mode: strict"), std::string::npos);
}

TEST_F(Cli, SplitEvalReportPipeline) {
  ASSERT_EQ(run("split --n 5 --seed 17 --corpus " + q(dir_ / "gold") + " --out " + q(dir_ / "splits")).code, 0);
  std::vector<std::string> runs;
  for (int s = 0; s < 5; ++s) {
    const auto manifest = dir_ / ("splits/split_" + std::to_string(s) + ".json");
    ASSERT_TRUE(fs::exists(manifest));
    const auto m = SplitManifest::from_json(nlohmann::json::parse(read_file(manifest)));
    EXPECT_EQ(m.test_ids.size(), 3u);
    const auto out = dir_ / ("run_" + std::to_string(s) + ".json");
    ASSERT_EQ(run("eval --gold " + q(dir_ / "gold") + " --pred " + q(dir_ / "pred") +
                  " --mode relaxed --manifest " + q(manifest) + " --run-out " + q(out) +
                  " --split-id " + std::to_string(s) + " --seed-model 42")
                  .code,
              0);
    runs.push_back(q(out));
  }
  std::string files;
  for (const auto& r : runs) files += " " + r;
  const auto table = run("report --focus Tool,Version" + files);
  ASSERT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("Overall-focused"), std::string::npos);
  EXPECT_NE(table.out.find(" ±"), std::string::npos);
  const auto csv = run("report --layout csv" + files);
  EXPECT_EQ(csv.out.rfind("entity,p_mean,p_std,r_mean,r_std,f1_mean,f1_std\n", 0), 0u);
  // the both-modes eval cannot be turned into a single RunResult
  EXPECT_EQ(run("eval --gold " + q(dir_ / "gold") + " --pred " + q(dir_ / "pred") + " --run-out " +
                q(dir_ / "x.json"))
                .code,
            2);
}

TEST_F(Cli, ConvertFuse) {
  fs::create_directories(dir_ / "soft");
  write_file_atomic(dir_ / "soft/s1.txt", "BWA 0.7 Fig. 2");
  write_file_atomic(dir_ / "soft/s1.ann",
                    "T1\tsoftware 0 3\tBWA\nT2\tversion 4 7\t0.7\nT3\tfigure 8 14\tFig. 2\n");
  const auto before = snapshot(dir_ / "soft");
  const auto r = run("convert --corpus " + q(dir_ / "soft") + " --out " + q(dir_ / "conv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["dropped"]["figure"], 1);
  EXPECT_EQ(read_file(dir_ / "conv/s1.ann"), "T1\tTool 0 3\tBWA\nT2\tVersion 4 7\t0.7\n");
  EXPECT_EQ(snapshot(dir_ / "soft"), before);
  EXPECT_EQ(run("convert --strict --corpus " + q(dir_ / "gold") + " --out " + q(dir_ / "c2")).code, 0);

  const auto f = run("fuse --gold " + q(dir_ / "gold") + " --converted " + q(dir_ / "conv") +
                     " --out " + q(dir_ / "fused"));
  ASSERT_EQ(f.code, 0);
  const auto j = nlohmann::json::parse(f.out);
  EXPECT_EQ(j["documents"], 14);
  EXPECT_EQ(j["provenance"]["converted"], 1);
  EXPECT_EQ(read_corpus(dir_ / "fused").documents.size(), 14u);
  EXPECT_EQ(run("fuse --gold " + q(dir_ / "gold") + " --gold " + q(dir_ / "gold") +
                " --no-prefix --out " + q(dir_ / "f2"))
                .code,
            1);
}

TEST_F(Cli, GazetteerTagSilver) {
  const auto gaz = dir_ / "gaz.json";
  ASSERT_EQ(run("gazetteer build --source custom=" + q(dir_ / "names.txt") + " --out " + q(gaz)).code, 0);
  const auto vocab = run("gazetteer export --gazetteer " + q(gaz));
  EXPECT_EQ(vocab.out, "BWA\nSAMtools\n");
  EXPECT_EQ(run("gazetteer build --source nope=" + q(dir_ / "names.txt")).code, 2);

  const auto tagged = run("tag --gazetteer " + q(gaz) + " --text " + q(dir_ / "gold/tools.txt"));
  ASSERT_EQ(tagged.code, 0);
  EXPECT_EQ(tagged.out, "T1\tTool 16 19\tBWA\nT2\tVersion 20 26\t0.7.17\nT3\tTool 43 51\tSAMtools\n");

  ASSERT_EQ(run("silver --corpus " + q(dir_ / "gold") + " --gazetteer " + q(gaz) + " --out " +
                q(dir_ / "silver"))
                .code,
            0);
  const auto silver = read_corpus(dir_ / "silver");
  EXPECT_EQ(silver.documents.size(), 13u);
  for (const auto& d : silver.documents) EXPECT_EQ(d.provenance, Provenance::silver);

  ASSERT_EQ(run("tag --gazetteer " + q(gaz) + " --corpus " + q(dir_ / "gold") + " --jsonl " +
                q(dir_ / "pred.jsonl"))
                .code,
            0);
  ASSERT_EQ(run("silver --corpus " + q(dir_ / "gold") + " --predictions-jsonl " +
                q(dir_ / "pred.jsonl") + " --out " + q(dir_ / "silver2"))
                .code,
            0);
  EXPECT_EQ(snapshot(dir_ / "silver2"), snapshot(dir_ / "silver"));
  EXPECT_EQ(run("silver --corpus " + q(dir_ / "gold") + " --out " + q(dir_ / "s3")).code, 2);
}

}  // namespace
}  // namespace wfner
