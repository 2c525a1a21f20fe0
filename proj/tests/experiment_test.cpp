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

#include <cmath>
#include <cstdlib>
#include <random>

#include "test_util.hpp"
#include "wfner/experiment.hpp"
#include "wfner/io.hpp"

namespace wfner {
namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  char buf[16];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "d%02zu", i);
    out.push_back(buf);
  }
  return out;
}

TEST(Prng, ReferenceStream) {
  // Reference values from an independent big-integer implementation.
  Xorshift64Star a(0), b(17);
  EXPECT_EQ(a.next(), 0x7bbcb40d550682d0ull);
  EXPECT_EQ(a.next(), 0xde7fe413d00cc9fdull);
  EXPECT_EQ(a.next(), 0xb3c638353c668c91ull);
  EXPECT_EQ(b.next(), 0x3e86b22ebcc50a13ull);
  EXPECT_EQ(b.next(), 0xc30f882470eba5feull);
  EXPECT_EQ(b.next(), 0x3919def27b135f83ull);
}

TEST(Splits, PinnedManifest) {
  const auto m = make_splits(ids(10), 1, 17).at(0);
  EXPECT_EQ(m.test_ids, (std::vector<std::string>{"d00", "d01", "d05"}));
  EXPECT_EQ(m.dev_ids, (std::vector<std::string>{"d02", "d06"}));
  EXPECT_EQ(m.train_ids, (std::vector<std::string>{"d03", "d04", "d07", "d08", "d09"}));
}

TEST(Splits, FiftyTwoDocuments) {
  EXPECT_EQ(split_sizes(52, {}), (SplitSizes{26, 13, 13}));
  for (const auto& m : make_splits(ids(52), 5, 1)) {
    EXPECT_EQ(m.train_ids.size(), 26u);
    EXPECT_EQ(m.dev_ids.size(), 13u);
    EXPECT_EQ(m.test_ids.size(), 13u);
  }
}

TEST(Splits, SoftCiteCardinalities) {
  // 927 train+dev / 232 test, then 649 / 278
  EXPECT_EQ(split_sizes(1159, {0.80, 0.30}), (SplitSizes{649, 278, 232}));
  EXPECT_EQ(split_sizes(1159, {}), (SplitSizes{580, 289, 290}));
}

TEST(Splits, PartitionAndDeterminism) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {4u, 5u, 13u, 52u, 300u}) {
    auto corpus_ids = ids(n);
    const auto a = make_splits(corpus_ids, 5, 42);
    std::shuffle(corpus_ids.begin(), corpus_ids.end(), rng);
    const auto b = make_splits(corpus_ids, 5, 42);
    EXPECT_EQ(a, b);
    std::set<std::vector<std::string>> distinct;
    for (const auto& m : a) {
      std::vector<std::string> all = m.train_ids;
      all.insert(all.end(), m.dev_ids.begin(), m.dev_ids.end());
      all.insert(all.end(), m.test_ids.begin(), m.test_ids.end());
      std::sort(all.begin(), all.end());
      auto expected = ids(n);
      std::sort(expected.begin(), expected.end());
      EXPECT_EQ(all, expected);
      EXPECT_FALSE(m.train_ids.empty());
      EXPECT_FALSE(m.test_ids.empty());
      distinct.insert(m.test_ids);
    }
    if (n >= 52) {
      EXPECT_EQ(distinct.size(), 5u);
    }
  }
  EXPECT_NE(make_splits(ids(52), 1, 1)[0].test_ids, make_splits(ids(52), 1, 2)[0].test_ids);
}

TEST(Splits, Errors) {
  EXPECT_THROW(make_splits(ids(3), 5, 0), ExperimentError);
  EXPECT_THROW(make_splits(ids(10), 5, 0, {1.0, 0.3}), ExperimentError);
  EXPECT_THROW(make_splits({"a", "a", "b", "c"}, 1, 0), ExperimentError);
}

TEST(Splits, ManifestJson) {
  const auto m = make_splits(ids(20), 2, 9)[1];
  const auto j = m.to_json();
  EXPECT_EQ(j["split_id"], 1);
  EXPECT_EQ(j["seed"], 10);
  EXPECT_EQ(SplitManifest::from_json(nlohmann::json::parse(j.dump())), m);
}

// -- aggregation

RunResult run(int split, std::map<std::string, std::array<std::size_t, 3>> counts,
              MatchMode mode = MatchMode::relaxed) {
  RunResult r;
  r.split_id = split;
  r.report.mode = mode;
  for (const auto& [l, c] : counts) r.report.per_label[l] = LabelScore::from_counts(c[0], c[1], c[2]);
  r.report.finalize();
  return r;
}

TEST(Aggregate, ThreeValues) {
  const std::vector<RunResult> runs = {run(0, {{"Tool", {6, 4, 4}}}), run(1, {{"Tool", {7, 3, 3}}}),
                                       run(2, {{"Tool", {8, 2, 2}}})};
  const auto t = aggregate(runs);
  EXPECT_NEAR(t.per_label.at("Tool").f1.mean, 70.0, 1e-9);
  EXPECT_NEAR(t.per_label.at("Tool").f1.std, 10.0, 1e-9);
  EXPECT_EQ(t.n_runs, 3u);
  EXPECT_FALSE(t.overall_focused.has_value());
}

TEST(Aggregate, SingleRun) {
  const auto t = aggregate({run(0, {{"Tool", {3, 1, 0}}})});
  EXPECT_NEAR(t.per_label.at("Tool").p.mean, 75.0, 1e-12);
  EXPECT_EQ(t.per_label.at("Tool").p.std, 0.0);
}

TEST(Aggregate, Errors) {
  EXPECT_THROW(aggregate({}), ExperimentError);
  EXPECT_THROW(aggregate({run(0, {{"Tool", {1, 0, 0}}}), run(0, {{"Tool", {1, 0, 0}}}, MatchMode::strict)}),
               ExperimentError);
}

TEST(Aggregate, EmptyFilterHasNoFocusedRow) {
  AggregateOptions o;
  o.label_filter = std::set<std::string>{};
  const auto t = aggregate({run(0, {{"Tool", {1, 0, 0}}})}, o);
  EXPECT_FALSE(t.overall_focused.has_value());
  EXPECT_EQ(render_table(t, TableLayout::text).find("Overall-focused"), std::string::npos);
}

TEST(Aggregate, MissingLabelCountsAsZero) {
  const auto t = aggregate({run(0, {{"Tool", {1, 0, 0}}, {"Data", {1, 0, 0}}}),
                            run(1, {{"Tool", {1, 0, 0}}})});
  EXPECT_NEAR(t.per_label.at("Data").f1.mean, 50.0, 1e-12);
}

TEST(Aggregate, PerSplitStd) {
  const std::vector<RunResult> runs = {run(0, {{"Tool", {6, 4, 4}}}), run(0, {{"Tool", {8, 2, 2}}}),
                                       run(1, {{"Tool", {7, 3, 3}}}), run(1, {{"Tool", {9, 1, 1}}})};
  AggregateOptions o;
  o.per_split = true;
  const auto t = aggregate(runs, o);
  // split means 70 and 80
  EXPECT_NEAR(t.per_label.at("Tool").f1.mean, 75.0, 1e-9);
  EXPECT_NEAR(t.per_label.at("Tool").f1.std, std::sqrt(50.0), 1e-9);
}

TEST(Format, Cell) {
  EXPECT_EQ(format_cell({70.39, 0.84}), "70.4 ±0.8");
  EXPECT_EQ(format_cell({0.0, 0.0}), "0.0 ±0.0");
  EXPECT_EQ(format_cell({100.0, 0.0}), "100.0 ±0.0");
}

std::vector<RunResult> synthetic_runs(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> labels = {"Tool", "Data", "Version", "Biblio", "Environment"};
  std::vector<RunResult> runs;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<std::string, std::array<std::size_t, 3>> counts;
    for (const auto& l : labels) {
      if (l == "Environment" && rng() % 3 == 0) continue;
      counts[l] = {rng() % 60, rng() % 20, rng() % 20};
    }
    auto r = run(int(i / 5), counts);
    r.seed_model = std::int64_t(i % 5);
    runs.push_back(r);
  }
  return runs;
}

// Independent spreadsheet-style computation straight from the counts.
struct OracleRow {
  double p_mean, p_std, r_mean, r_std, f_mean, f_std;
};

OracleRow oracle_row(const std::vector<std::array<double, 3>>& xs) {
  const double n = double(xs.size());
  double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
  for (const auto& x : xs) {
    for (int k = 0; k < 3; ++k) {
      sum[k] += x[k];
      sq[k] += x[k] * x[k];
    }
  }
  double mean[3], sd[3];
  for (int k = 0; k < 3; ++k) {
    mean[k] = sum[k] / n;
    sd[k] = n > 1 ? std::sqrt(std::max(0.0, (sq[k] - n * mean[k] * mean[k]) / (n - 1))) : 0.0;
  }
  return {mean[0], sd[0], mean[1], sd[1], mean[2], sd[2]};
}

std::array<double, 3> prf(double tp, double fp, double fn) {
  const double p = tp + fp > 0 ? 100.0 * tp / (tp + fp) : 0.0;
  const double r = tp + fn > 0 ? 100.0 * tp / (tp + fn) : 0.0;
  return {p, r, p + r > 0 ? 2 * p * r / (p + r) : 0.0};
}

TEST(Aggregate, MatchesOracle) {
  const auto runs = synthetic_runs(77, 25);
  const std::set<std::string> focus = {"Tool", "Version", "Environment"};
  AggregateOptions o;
  o.label_filter = focus;
  const auto t = aggregate(runs, o);

  auto expect = [](const MetricStats& m, const OracleRow& row) {
    EXPECT_NEAR(m.p.mean, row.p_mean, 1e-9);
    EXPECT_NEAR(m.p.std, row.p_std, 1e-9);
    EXPECT_NEAR(m.r.mean, row.r_mean, 1e-9);
    EXPECT_NEAR(m.r.std, row.r_std, 1e-9);
    EXPECT_NEAR(m.f1.mean, row.f_mean, 1e-9);
    EXPECT_NEAR(m.f1.std, row.f_std, 1e-9);
  };
  for (const std::string l : {"Tool", "Data", "Version", "Biblio", "Environment"}) {
    std::vector<std::array<double, 3>> xs;
    for (const auto& r : runs) {
      auto it = r.report.per_label.find(l);
      xs.push_back(it == r.report.per_label.end() ? std::array<double, 3>{0, 0, 0}
                                                   : prf(it->second.tp, it->second.fp, it->second.fn));
    }
    expect(t.per_label.at(l), oracle_row(xs));
  }
  std::vector<std::array<double, 3>> all, focused;
  for (const auto& r : runs) {
    double a[3] = {0, 0, 0}, f[3] = {0, 0, 0};
    for (const auto& [l, s] : r.report.per_label) {
      const double c[3] = {double(s.tp), double(s.fp), double(s.fn)};
      for (int k = 0; k < 3; ++k) {
        a[k] += c[k];
        if (focus.count(l)) f[k] += c[k];
      }
    }
    all.push_back(prf(a[0], a[1], a[2]));
    focused.push_back(prf(f[0], f[1], f[2]));
  }
  expect(t.overall, oracle_row(all));
  ASSERT_TRUE(t.overall_focused.has_value());
  expect(*t.overall_focused, oracle_row(focused));
}

TEST(Aggregate, PermutationInvariant) {
  auto runs = synthetic_runs(78, 25);
  const auto a = aggregate(runs);
  std::mt19937_64 rng(5);
  std::shuffle(runs.begin(), runs.end(), rng);
  const auto b = aggregate(runs);
  for (const auto& [l, m] : a.per_label) {
    EXPECT_NEAR(m.f1.mean, b.per_label.at(l).f1.mean, 1e-9);
    EXPECT_NEAR(m.f1.std, b.per_label.at(l).f1.std, 1e-9);
  }
  EXPECT_EQ(render_table(a, TableLayout::text), render_table(b, TableLayout::text));
}

TEST(Aggregate, RunResultJsonRoundTrip) {
  auto r = synthetic_runs(79, 1)[0];
  r.manifest = "split_0.json";
  r.meta = {{"lr", 5e-5}};
  const auto back = RunResult::from_json(nlohmann::json::parse(r.to_json().dump()));
  EXPECT_EQ(back.report.per_label, r.report.per_label);
  EXPECT_EQ(back.manifest, r.manifest);
  EXPECT_EQ(back.meta, r.meta);
}

TEST(Render, GoldenFiles) {
  const auto runs = synthetic_runs(80, 25);
  AggregateOptions o;
  o.label_filter = std::set<std::string>{"Tool", "Version", "Biblio"};
  const auto t = aggregate(runs, o);
  const std::string dir = WFNER_FIXTURES;
  for (auto [layout, name] : {std::pair{TableLayout::text, "golden_table.txt"},
                              std::pair{TableLayout::markdown, "golden_table.md"},
                              std::pair{TableLayout::csv, "golden_table.csv"}}) {
    const auto path = dir + "/" + name;
    const auto got = render_table(t, layout);
    if (std::getenv("WFNER_UPDATE_GOLDEN")) write_file_atomic(path, got);
    EXPECT_EQ(got, read_file(path)) << name;
  }
}

}  // namespace
}  // namespace wfner
