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
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wfner/matching.hpp"
#include "wfner/parallel.hpp"
#include "wfner/standoff.hpp"

namespace wfner {

enum class Averaging { micro, macro };

struct LabelScore {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double p = 0.0;
  double r = 0.0;
  double f1 = 0.0;

  // Precision, recall and F1 are 0 whenever their denominator is 0.
  static LabelScore from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    LabelScore s{tp, fp, fn};
    s.p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.r = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.f1 = s.p + s.r > 0.0 ? 2.0 * s.p * s.r / (s.p + s.r) : 0.0;
    return s;
  }

  friend bool operator==(const LabelScore&, const LabelScore&) = default;
};

struct EntityRef {
  std::string doc_id;
  std::string entity_id;
  std::string label;
  std::vector<Span> fragments;
  std::string surface;

  friend bool operator==(const EntityRef&, const EntityRef&) = default;
};

struct MatchedPair {
  std::string doc_id;
  std::string gold_id;
  std::string pred_id;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoreOptions {
  MatchMode mode = MatchMode::relaxed;
  std::optional<std::set<std::string>> label_filter;  // restricts `overall`
  bool qualifier_sensitive = false;
  Averaging averaging = Averaging::micro;
  unsigned jobs = 1;
};

struct MatchReport {
  MatchMode mode = MatchMode::relaxed;
  Averaging averaging = Averaging::micro;
  bool qualifier_sensitive = false;
  std::optional<std::set<std::string>> label_filter;
  std::map<std::string, LabelScore> per_label;
  LabelScore overall;
  std::vector<MatchedPair> pairs;
  std::vector<EntityRef> missed;    // unmatched gold
  std::vector<EntityRef> spurious;  // unmatched predictions

  friend bool operator==(const MatchReport&, const MatchReport&) = default;

  // Recomputes `overall` from the per-label counts.
  void finalize() {
    std::size_t tp = 0, fp = 0, fn = 0, n = 0;
    double p = 0, r = 0, f1 = 0;
    for (const auto& [label, s] : per_label) {
      if (label_filter && !label_filter->count(label)) continue;
      tp += s.tp;
      fp += s.fp;
      fn += s.fn;
      p += s.p;
      r += s.r;
      f1 += s.f1;
      ++n;
    }
    overall = LabelScore::from_counts(tp, fp, fn);
    if (averaging == Averaging::macro) {
      overall.p = n ? p / double(n) : 0.0;
      overall.r = n ? r / double(n) : 0.0;
      overall.f1 = n ? f1 / double(n) : 0.0;
    }
  }

  nlohmann::ordered_json to_json(bool with_diff = false) const {
    nlohmann::ordered_json j;
    auto score = [](const LabelScore& s) {
      nlohmann::ordered_json o;
      o["tp"] = s.tp;
      o["fp"] = s.fp;
      o["fn"] = s.fn;
      o["p"] = s.p;
      o["r"] = s.r;
      o["f1"] = s.f1;
      return o;
    };
    j["mode"] = std::string(to_string(mode));
    j["averaging"] = averaging == Averaging::micro ? "micro" : "macro";
    j["qualifier_sensitive"] = qualifier_sensitive;
    j["per_label"] = nlohmann::ordered_json::object();
    for (const auto& [label, s] : per_label) j["per_label"][label] = score(s);
    j["overall"] = score(overall);
    if (label_filter) {
      j["label_filter"] = nlohmann::ordered_json(std::vector<std::string>(label_filter->begin(),
                                                                         label_filter->end()));
    } else {
      j["label_filter"] = nullptr;
    }
    if (with_diff) {
      auto refs = [](const std::vector<EntityRef>& v) {
        auto a = nlohmann::ordered_json::array();
        for (const auto& e : v) {
          nlohmann::ordered_json o;
          o["doc_id"] = e.doc_id;
          o["id"] = e.entity_id;
          o["label"] = e.label;
          auto frags = nlohmann::ordered_json::array();
          for (const auto& f : e.fragments) frags.push_back({f.start, f.end});
          o["fragments"] = std::move(frags);
          o["surface"] = e.surface;
          a.push_back(std::move(o));
        }
        return a;
      };
      j["missed"] = refs(missed);
      j["spurious"] = refs(spurious);
    }
    return j;
  }

  // Reads the counts back; rates are recomputed from them.
  static MatchReport from_json(const nlohmann::json& j) {
    MatchReport r;
    auto mode = parse_match_mode(j.at("mode").get<std::string>());
    if (!mode) throw EvaluationError("bad mode in report");
    r.mode = *mode;
    if (j.contains("averaging") && j["averaging"] == "macro") r.averaging = Averaging::macro;
    r.qualifier_sensitive = j.value("qualifier_sensitive", false);
    for (const auto& [label, s] : j.at("per_label").items()) {
      r.per_label[label] = LabelScore::from_counts(s.at("tp").get<std::size_t>(),
                                                   s.at("fp").get<std::size_t>(),
                                                   s.at("fn").get<std::size_t>());
    }
    if (j.contains("label_filter") && !j["label_filter"].is_null()) {
      r.label_filter = j["label_filter"].get<std::set<std::string>>();
    }
    r.finalize();
    return r;
  }
};

namespace detail {

inline EntityRef make_ref(const std::string& doc_id, const Entity& e) {
  return {doc_id, e.id, e.label.str(), e.fragments, e.surface};
}

}  // namespace detail

// Scores predictions against gold, pooling per-document matchings. Documents
// are paired by id; both corpora must contain the same ids.
inline MatchReport score(const Corpus& gold, const Corpus& pred, const ScoreOptions& opts = {}) {
  std::map<std::string, const Document*> pred_by_id;
  for (const auto& d : pred.documents) {
    if (!pred_by_id.emplace(d.doc_id, &d).second) {
      throw EvaluationError("DocSetMismatch: duplicate prediction document " + d.doc_id);
    }
  }
  std::set<std::string> gold_ids;
  for (const auto& d : gold.documents) {
    if (!gold_ids.insert(d.doc_id).second) {
      throw EvaluationError("DocSetMismatch: duplicate gold document " + d.doc_id);
    }
    if (!pred_by_id.count(d.doc_id)) {
      throw EvaluationError("DocSetMismatch: no predictions for " + d.doc_id);
    }
  }
  for (const auto& [id, d] : pred_by_id) {
    if (!gold_ids.count(id)) throw EvaluationError("DocSetMismatch: no gold document " + id);
  }

  // Documents are processed in doc_id order so pooled lists are stable.
  std::vector<const Document*> docs;
  for (const auto& d : gold.documents) docs.push_back(&d);
  std::sort(docs.begin(), docs.end(),
            [](const Document* a, const Document* b) { return a->doc_id < b->doc_id; });

  struct DocResult {
    std::map<std::string, std::array<std::size_t, 3>> counts;
    std::vector<MatchedPair> pairs;
    std::vector<EntityRef> missed, spurious;
  };
  std::vector<DocResult> results(docs.size());
  const MatchOptions mopts{opts.mode, opts.qualifier_sensitive};
  parallel_for(docs.size(), opts.jobs, [&](std::size_t i) {
    const auto& g = *docs[i];
    const auto& p = *pred_by_id.at(g.doc_id);
    auto& out = results[i];
    const auto pairs = match_document(g.entities, p.entities, mopts);
    std::vector<char> g_hit(g.entities.size(), 0), p_hit(p.entities.size(), 0);
    for (auto [gi, pi] : pairs) {
      g_hit[gi] = p_hit[pi] = 1;
      ++out.counts[g.entities[gi].label.base][0];
      out.pairs.push_back({g.doc_id, g.entities[gi].id, p.entities[pi].id});
    }
    for (std::size_t k = 0; k < p.entities.size(); ++k) {
      if (p_hit[k]) continue;
      ++out.counts[p.entities[k].label.base][1];
      out.spurious.push_back(detail::make_ref(g.doc_id, p.entities[k]));
    }
    for (std::size_t k = 0; k < g.entities.size(); ++k) {
      if (g_hit[k]) continue;
      ++out.counts[g.entities[k].label.base][2];
      out.missed.push_back(detail::make_ref(g.doc_id, g.entities[k]));
    }
  });

  MatchReport report;
  report.mode = opts.mode;
  report.averaging = opts.averaging;
  report.qualifier_sensitive = opts.qualifier_sensitive;
  report.label_filter = opts.label_filter;
  std::map<std::string, std::array<std::size_t, 3>> totals;
  if (opts.label_filter) {
    for (const auto& l : *opts.label_filter) totals[l];
  }
  for (auto& r : results) {
    for (const auto& [label, c] : r.counts) {
      auto& t = totals[label];
      for (int k = 0; k < 3; ++k) t[k] += c[k];
    }
    report.pairs.insert(report.pairs.end(), r.pairs.begin(), r.pairs.end());
    report.missed.insert(report.missed.end(), r.missed.begin(), r.missed.end());
    report.spurious.insert(report.spurious.end(), r.spurious.begin(), r.spurious.end());
  }
  for (const auto& [label, t] : totals) {
    report.per_label[label] = LabelScore::from_counts(t[0], t[1], t[2]);
  }
  report.finalize();
  return report;
}

inline MatchReport score(const Corpus& gold, const Corpus& pred, MatchMode mode,
                         std::optional<std::set<std::string>> label_filter = std::nullopt) {
  ScoreOptions opts;
  opts.mode = mode;
  opts.label_filter = std::move(label_filter);
  return score(gold, pred, opts);
}

// Agreement between two annotation sets: annotator B plays the prediction
// role. F1 and tp are symmetric in the arguments; P and R swap.
inline MatchReport iaa(const Corpus& a, const Corpus& b, const ScoreOptions& opts = {}) {
  return score(a, b, opts);
}

inline MatchReport iaa(const Corpus& a, const Corpus& b, MatchMode mode) {
  return score(a, b, mode);
}

inline std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", fraction * 100.0);
  return buf;
}

// Plain-text summary: one row per label plus the overall row, percentages
// with one decimal place.
inline std::string render_report(const MatchReport& r) {
  std::size_t width = 7;
  for (const auto& [label, s] : r.per_label) width = std::max(width, label.size());
  const std::string overall_name = r.label_filter ? "Overall-focused" : "Overall";
  width = std::max(width, overall_name.size());
  std::string out;
  auto row = [&](const std::string& name, const LabelScore& s) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s %6zu %6zu %6zu %6s %6s %6s\n", int(width), name.c_str(),
                  s.tp, s.fp, s.fn, percent(s.p).c_str(), percent(s.r).c_str(),
                  percent(s.f1).c_str());
    out += buf;
  };
  char head[256];
  std::snprintf(head, sizeof head, "%-*s %6s %6s %6s %6s %6s %6s\n", int(width), "Label", "TP",
                "FP", "FN", "P", "R", "F1");
  out += "mode: " + std::string(to_string(r.mode)) + "\n";
  out += head;
  for (const auto& [label, s] : r.per_label) row(label, s);
  row(overall_name, r.overall);
  return out;
}

// Unmatched gold (missed) and unmatched predictions (spurious), one per line.
inline std::string render_diff(const MatchReport& r) {
  std::string out;
  auto line = [&](const char* kind, const EntityRef& e) {
    out += e.doc_id + "\t" + kind + "\t" + e.label + "\t";
    for (std::size_t i = 0; i < e.fragments.size(); ++i) {
      if (i) out += ';';
      out += std::to_string(e.fragments[i].start) + " " + std::to_string(e.fragments[i].end);
    }
    out += "\t" + detail::sanitize_surface(e.surface) + "\n";
  };
  for (const auto& e : r.missed) line("missed", e);
  for (const auto& e : r.spurious) line("spurious", e);
  return out;
}

}  // namespace wfner
