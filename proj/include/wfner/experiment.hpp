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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wfner/evaluation.hpp"
#include "wfner/standoff.hpp"
#include "wfner/unicode.hpp"

namespace wfner {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// xorshift64* generator; the state is initialised from the seed with one
// splitmix64 step so that small and zero seeds give well-mixed streams.
// Specified by algorithm so manifests are reproducible across platforms.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  // Unbiased integer in [0, bound) by rejection sampling.
  std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const auto r = next();
      if (r >= threshold) return r % bound;
    }
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t state_;
};

struct SplitRatios {
  double train_frac = 0.75;          // train+dev share of the corpus
  double dev_frac = 1.0 / 3.0;       // dev share of the train+dev portion

  friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

struct SplitSizes {
  std::size_t train = 0, dev = 0, test = 0;
  friend bool operator==(const SplitSizes&, const SplitSizes&) = default;
};

// test = floor((1 - train_frac) * N + 0.5); dev = floor(dev_frac * rest).
inline SplitSizes split_sizes(std::size_t n, SplitRatios ratios) {
  constexpr double kEps = 1e-9;
  const auto test = static_cast<std::size_t>(std::floor((1.0 - ratios.train_frac) * double(n) + 0.5));
  const auto rest = n - std::min(test, n);
  const auto dev = static_cast<std::size_t>(std::floor(ratios.dev_frac * double(rest) + kEps));
  return {rest - dev, dev, test};
}

struct SplitManifest {
  int split_id = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids, dev_ids, test_ids;
  SplitRatios ratios;

  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["split_id"] = split_id;
    j["seed"] = seed;
    j["train"] = train_ids;
    j["dev"] = dev_ids;
    j["test"] = test_ids;
    j["ratios"] = {ratios.train_frac, ratios.dev_frac};
    return j;
  }

  static SplitManifest from_json(const nlohmann::json& j) {
    SplitManifest m;
    m.split_id = j.at("split_id").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.train_ids = j.at("train").get<std::vector<std::string>>();
    m.dev_ids = j.at("dev").get<std::vector<std::string>>();
    m.test_ids = j.at("test").get<std::vector<std::string>>();
    const auto& r = j.at("ratios");
    m.ratios = {r.at(0).get<double>(), r.at(1).get<double>()};
    return m;
  }
};

// Shuffles the sorted doc ids with Xorshift64Star(base_seed + split_id)
// (Fisher-Yates, last index first) and cuts test, dev, train in that order.
inline std::vector<SplitManifest> make_splits(std::vector<std::string> doc_ids, int n_splits,
                                              std::uint64_t base_seed, SplitRatios ratios = {}) {
  if (doc_ids.size() < 4) {
    throw ExperimentError("CorpusTooSmall: " + std::to_string(doc_ids.size()) +
                          " documents, need at least 4");
  }
  if (!(ratios.train_frac > 0.0 && ratios.train_frac < 1.0) ||
      !(ratios.dev_frac >= 0.0 && ratios.dev_frac < 1.0)) {
    throw ExperimentError("split ratios out of range");
  }
  if (n_splits < 1) throw ExperimentError("need at least one split");
  std::sort(doc_ids.begin(), doc_ids.end());
  if (std::adjacent_find(doc_ids.begin(), doc_ids.end()) != doc_ids.end()) {
    throw ExperimentError("duplicate document ids");
  }
  const auto sizes = split_sizes(doc_ids.size(), ratios);

  std::vector<SplitManifest> out;
  for (int s = 0; s < n_splits; ++s) {
    SplitManifest m;
    m.split_id = s;
    m.seed = base_seed + static_cast<std::uint64_t>(s);
    m.ratios = ratios;
    auto ids = doc_ids;
    Xorshift64Star rng(m.seed);
    for (std::size_t i = ids.size() - 1; i > 0; --i) {
      std::swap(ids[i], ids[rng.uniform(i + 1)]);
    }
    auto cut = ids.begin();
    m.test_ids.assign(cut, cut + sizes.test);
    cut += sizes.test;
    m.dev_ids.assign(cut, cut + sizes.dev);
    cut += sizes.dev;
    m.train_ids.assign(cut, ids.end());
    std::sort(m.test_ids.begin(), m.test_ids.end());
    std::sort(m.dev_ids.begin(), m.dev_ids.end());
    std::sort(m.train_ids.begin(), m.train_ids.end());
    out.push_back(std::move(m));
  }
  return out;
}

inline std::vector<SplitManifest> make_splits(const Corpus& corpus, int n_splits,
                                              std::uint64_t base_seed, SplitRatios ratios = {}) {
  std::vector<std::string> ids;
  for (const auto& d : corpus.documents) ids.push_back(d.doc_id);
  return make_splits(std::move(ids), n_splits, base_seed, ratios);
}

// One trained-and-evaluated model: split, model seed, its test report and
// free-form metadata (hyperparameters etc.).
struct RunResult {
  int split_id = 0;
  std::int64_t seed_model = 0;
  std::string manifest;  // path or name of the split manifest
  MatchReport report;
  nlohmann::json meta = nlohmann::json::object();

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["split_id"] = split_id;
    j["seed_model"] = seed_model;
    j["manifest"] = manifest;
    j["report"] = report.to_json();
    j["meta"] = nlohmann::ordered_json::parse(meta.dump());
    return j;
  }

  static RunResult from_json(const nlohmann::json& j) {
    RunResult r;
    r.split_id = j.value("split_id", 0);
    r.seed_model = j.value("seed_model", std::int64_t{0});
    r.manifest = j.value("manifest", std::string());
    r.report = MatchReport::from_json(j.at("report"));
    if (j.contains("meta")) r.meta = j["meta"];
    return r;
  }
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;
};

struct MetricStats {
  Stat p, r, f1;
};

struct AggregateTable {
  MatchMode mode = MatchMode::relaxed;
  std::map<std::string, MetricStats> per_label;  // percentages
  MetricStats overall;
  std::optional<MetricStats> overall_focused;
  std::size_t n_runs = 0;

  nlohmann::ordered_json to_json() const {
    auto ms = [](const MetricStats& m) {
      nlohmann::ordered_json o;
      o["p"] = {{"mean", m.p.mean}, {"std", m.p.std}};
      o["r"] = {{"mean", m.r.mean}, {"std", m.r.std}};
      o["f1"] = {{"mean", m.f1.mean}, {"std", m.f1.std}};
      return o;
    };
    nlohmann::ordered_json j;
    j["mode"] = std::string(to_string(mode));
    j["n_runs"] = n_runs;
    j["per_label"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : per_label) j["per_label"][k] = ms(v);
    j["overall"] = ms(overall);
    j["overall_focused"] = overall_focused ? ms(*overall_focused) : nullptr;
    return j;
  }
};

struct AggregateOptions {
  std::optional<std::set<std::string>> label_filter;  // adds an Overall-focused row
  bool per_split = false;  // std over per-split means instead of pooled runs
  Averaging averaging = Averaging::micro;
};

namespace detail {

inline Stat mean_std(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / double(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / double(xs.size() - 1));
  }
  return s;
}

struct Triple {
  double p = 0, r = 0, f1 = 0;
};

inline Triple percent_of(const LabelScore& s) { return {100.0 * s.p, 100.0 * s.r, 100.0 * s.f1}; }

inline Triple overall_of(const std::map<std::string, LabelScore>& per_label,
                         const std::set<std::string>* filter, Averaging averaging) {
  MatchReport tmp;
  tmp.averaging = averaging;
  for (const auto& [label, s] : per_label) {
    if (!filter || filter->count(label)) tmp.per_label[label] = s;
  }
  if (filter) {
    for (const auto& l : *filter) tmp.per_label.try_emplace(l);
  }
  tmp.finalize();
  return percent_of(tmp.overall);
}

}  // namespace detail

// Mean and sample standard deviation (n - 1) of every percentage metric over
// the runs. Label rows cover every label seen in any run; a run without a
// label contributes zeros for it.
inline AggregateTable aggregate(const std::vector<RunResult>& results,
                                const AggregateOptions& opts = {}) {
  if (results.empty()) throw ExperimentError("EmptyResults: nothing to aggregate");
  const auto mode = results.front().report.mode;
  for (const auto& r : results) {
    if (r.report.mode != mode) throw ExperimentError("MixedModes: reports use different modes");
  }

  std::set<std::string> labels;
  for (const auto& r : results) {
    for (const auto& [l, s] : r.report.per_label) labels.insert(l);
  }
  if (opts.label_filter) labels.insert(opts.label_filter->begin(), opts.label_filter->end());

  // Row name -> one Triple per run.
  std::map<std::string, std::vector<detail::Triple>> rows;
  std::vector<detail::Triple> overall, focused;
  std::vector<int> split_of;
  for (const auto& r : results) {
    // Counts are re-derived so that every run is scored the same way.
    std::map<std::string, LabelScore> per_label;
    for (const auto& [l, s] : r.report.per_label) {
      per_label[l] = LabelScore::from_counts(s.tp, s.fp, s.fn);
    }
    for (const auto& l : labels) {
      auto it = per_label.find(l);
      rows[l].push_back(it == per_label.end() ? detail::Triple{} : detail::percent_of(it->second));
    }
    overall.push_back(detail::overall_of(per_label, nullptr, opts.averaging));
    if (opts.label_filter) {
      focused.push_back(detail::overall_of(per_label, &*opts.label_filter, opts.averaging));
    }
    split_of.push_back(r.split_id);
  }

  auto summarize = [&](const std::vector<detail::Triple>& runs) {
    std::vector<detail::Triple> points = runs;
    if (opts.per_split) {
      std::map<int, std::vector<detail::Triple>> groups;
      for (std::size_t i = 0; i < runs.size(); ++i) groups[split_of[i]].push_back(runs[i]);
      points.clear();
      for (const auto& [split, g] : groups) {
        detail::Triple m;
        for (const auto& t : g) {
          m.p += t.p;
          m.r += t.r;
          m.f1 += t.f1;
        }
        m.p /= double(g.size());
        m.r /= double(g.size());
        m.f1 /= double(g.size());
        points.push_back(m);
      }
    }
    std::vector<double> p, r, f;
    for (const auto& t : points) {
      p.push_back(t.p);
      r.push_back(t.r);
      f.push_back(t.f1);
    }
    return MetricStats{detail::mean_std(p), detail::mean_std(r), detail::mean_std(f)};
  };

  AggregateTable table;
  table.mode = mode;
  table.n_runs = results.size();
  for (const auto& [l, runs] : rows) table.per_label[l] = summarize(runs);
  table.overall = summarize(overall);
  if (opts.label_filter && !opts.label_filter->empty()) table.overall_focused = summarize(focused);
  return table;
}

enum class TableLayout { text, markdown, csv };

inline std::optional<TableLayout> parse_layout(std::string_view s) {
  if (s == "text") return TableLayout::text;
  if (s == "markdown" || s == "md") return TableLayout::markdown;
  if (s == "csv") return TableLayout::csv;
  return std::nullopt;
}

// "70.4 ±0.8"
inline std::string format_cell(const Stat& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f ±%.1f", s.mean, s.std);
  return buf;
}

inline std::string render_table(const AggregateTable& table, TableLayout layout) {
  std::vector<std::pair<std::string, const MetricStats*>> rows;
  for (const auto& [l, m] : table.per_label) rows.emplace_back(l, &m);
  rows.emplace_back("Overall", &table.overall);
  if (table.overall_focused) rows.emplace_back("Overall-focused", &*table.overall_focused);

  std::string out;
  if (layout == TableLayout::csv) {
    out = "entity,p_mean,p_std,r_mean,r_std,f1_mean,f1_std\n";
    for (const auto& [name, m] : rows) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f\n", name.c_str(),
                    m->p.mean, m->p.std, m->r.mean, m->r.std, m->f1.mean, m->f1.std);
      out += buf;
    }
    return out;
  }

  std::vector<std::array<std::string, 4>> cells;
  cells.push_back({"Entity", "P", "R", "F1"});
  for (const auto& [name, m] : rows) {
    cells.push_back({name, format_cell(m->p), format_cell(m->r), format_cell(m->f1)});
  }
  std::array<std::size_t, 4> width{};
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], utf8::length(row[c]));
  }
  auto pad = [](const std::string& s, std::size_t w, bool right) {
    const auto fill = std::string(w - utf8::length(s), ' ');
    return right ? fill + s : s + fill;
  };

  if (layout == TableLayout::markdown) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out += "|";
      for (std::size_t c = 0; c < 4; ++c) out += " " + pad(cells[i][c], width[c], c > 0) + " |";
      out += "\n";
      if (i == 0) {
        out += "|";
        for (std::size_t c = 0; c < 4; ++c) {
          out += c == 0 ? " " + std::string(width[c], '-') + " |"
                        : " " + std::string(width[c] - 1, '-') + ": |";
        }
        out += "\n";
      }
    }
    return out;
  }

  // Rules under the header and above the Overall rows.
  const std::size_t first_overall = cells.size() - (table.overall_focused ? 2 : 1);
  const std::string rule(width[0] + width[1] + width[2] + width[3] + 6, '-');
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i == first_overall) out += rule + "\n";
    std::string line;
    for (std::size_t c = 0; c < 4; ++c) {
      if (c) line += "  ";
      line += pad(cells[i][c], width[c], c > 0);
    }
    out += line + "\n";
    if (i == 0) out += rule + "\n";
  }
  return out;
}

}  // namespace wfner
