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
#include <cstddef>
#include <numeric>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "wfner/standoff.hpp"

namespace wfner {

enum class MatchMode { strict, relaxed };

inline std::string_view to_string(MatchMode m) {
  return m == MatchMode::strict ? "strict" : "relaxed";
}

inline std::optional<MatchMode> parse_match_mode(std::string_view s) {
  if (s == "strict") return MatchMode::strict;
  if (s == "relaxed") return MatchMode::relaxed;
  return std::nullopt;
}

struct MatchOptions {
  MatchMode mode = MatchMode::relaxed;
  bool qualifier_sensitive = false;
};

// strict: same base label and identical fragment lists.
// relaxed: same base label and at least one shared character position.
inline bool entities_compatible(const Entity& gold, const Entity& pred, MatchOptions opts) {
  if (gold.label.base != pred.label.base) return false;
  if (opts.qualifier_sensitive && gold.label.qualifier != pred.label.qualifier) return false;
  if (opts.mode == MatchMode::strict) return gold.fragments == pred.fragments;
  return overlap_length(gold, pred) > 0;
}

inline bool entities_compatible(const Entity& gold, const Entity& pred, MatchMode mode) {
  return entities_compatible(gold, pred, MatchOptions{mode, false});
}

namespace detail {

// Kuhn's augmenting-path bipartite matching restricted to the vertices that
// are still free. Returns the size of a maximum matching.
class BipartiteMatcher {
 public:
  BipartiteMatcher(std::size_t left, std::size_t right,
                   const std::vector<std::vector<std::size_t>>& adj)
      : adj_(adj), left_(left), right_(right) {}

  std::size_t max_matching(const std::vector<char>& left_blocked,
                           const std::vector<char>& right_blocked) {
    match_right_.assign(right_, kNone);
    std::size_t size = 0;
    for (std::size_t u = 0; u < left_; ++u) {
      if (left_blocked[u]) continue;
      seen_.assign(right_, 0);
      if (augment(u, right_blocked)) ++size;
    }
    return size;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool augment(std::size_t u, const std::vector<char>& right_blocked) {
    for (auto v : adj_[u]) {
      if (right_blocked[v] || seen_[v]) continue;
      seen_[v] = 1;
      if (match_right_[v] == kNone || augment(match_right_[v], right_blocked)) {
        match_right_[v] = u;
        return true;
      }
    }
    return false;
  }

  const std::vector<std::vector<std::size_t>>& adj_;
  std::size_t left_, right_;
  std::vector<std::size_t> match_right_;
  std::vector<char> seen_;
};

}  // namespace detail

// Maximum-cardinality one-to-one matching between gold and predicted entities
// of one document, as (gold index, pred index) pairs sorted by gold index.
//
// Among all maximum matchings the one chosen is the first in the order of
// candidate pairs ranked by larger character overlap, then smaller gold start,
// then smaller pred start (remaining ties: canonical entity order). Each pair
// is taken greedily in that order whenever a maximum matching containing it
// and the pairs already taken still exists.
inline std::vector<std::pair<std::size_t, std::size_t>> match_document(
    const std::vector<Entity>& gold, const std::vector<Entity>& pred, MatchOptions opts) {
  // Work on canonical orders so the result does not depend on input order.
  std::vector<std::size_t> gi(gold.size()), pi(pred.size());
  std::iota(gi.begin(), gi.end(), 0);
  std::iota(pi.begin(), pi.end(), 0);
  std::stable_sort(gi.begin(), gi.end(),
                   [&](auto a, auto b) { return entity_order(gold[a], gold[b]); });
  std::stable_sort(pi.begin(), pi.end(),
                   [&](auto a, auto b) { return entity_order(pred[a], pred[b]); });
  std::vector<std::size_t> gold_rank(gold.size()), pred_rank(pred.size());
  for (std::size_t r = 0; r < gi.size(); ++r) gold_rank[gi[r]] = r;
  for (std::size_t r = 0; r < pi.size(); ++r) pred_rank[pi[r]] = r;

  struct Edge {
    std::size_t g, p, overlap;
  };
  std::vector<Edge> edges;
  for (std::size_t g = 0; g < gold.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (entities_compatible(gold[g], pred[p], opts)) {
        edges.push_back({g, p, overlap_length(gold[g], pred[p])});
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (gold[a.g].start() != gold[b.g].start()) return gold[a.g].start() < gold[b.g].start();
    if (pred[a.p].start() != pred[b.p].start()) return pred[a.p].start() < pred[b.p].start();
    if (gold_rank[a.g] != gold_rank[b.g]) return gold_rank[a.g] < gold_rank[b.g];
    return pred_rank[a.p] < pred_rank[b.p];
  });

  // Connected components of the compatibility graph are solved separately.
  std::vector<std::size_t> parent(gold.size() + pred.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) parent[root(e.g)] = root(gold.size() + e.p);

  std::vector<std::vector<Edge>> by_component(parent.size());
  for (const auto& e : edges) by_component[root(e.g)].push_back(e);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> local_g(gold.size()), local_p(pred.size());
  for (const auto& comp : by_component) {
    if (comp.empty()) continue;
    std::vector<std::size_t> gs, ps;
    for (const auto& e : comp) {
      gs.push_back(e.g);
      ps.push_back(e.p);
    }
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (std::size_t i = 0; i < gs.size(); ++i) local_g[gs[i]] = i;
    for (std::size_t i = 0; i < ps.size(); ++i) local_p[ps[i]] = i;
    std::vector<std::vector<std::size_t>> local_adj(gs.size());
    for (const auto& e : comp) local_adj[local_g[e.g]].push_back(local_p[e.p]);

    detail::BipartiteMatcher matcher(gs.size(), ps.size(), local_adj);
    std::vector<char> g_used(gs.size(), 0), p_used(ps.size(), 0);
    std::size_t remaining = matcher.max_matching(g_used, p_used);
    for (const auto& e : comp) {
      if (remaining == 0) break;
      const auto lg = local_g[e.g], lp = local_p[e.p];
      if (g_used[lg] || p_used[lp]) continue;
      g_used[lg] = p_used[lp] = 1;
      if (matcher.max_matching(g_used, p_used) + 1 == remaining) {
        pairs.emplace_back(e.g, e.p);
        --remaining;
      } else {
        g_used[lg] = p_used[lp] = 0;
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

inline std::vector<std::pair<std::size_t, std::size_t>> match_document(
    const std::vector<Entity>& gold, const std::vector<Entity>& pred, MatchMode mode) {
  return match_document(gold, pred, MatchOptions{mode, false});
}

}  // namespace wfner
