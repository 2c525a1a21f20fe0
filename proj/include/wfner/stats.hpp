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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "wfner/standoff.hpp"
#include "wfner/unicode.hpp"

namespace wfner {

// Toolkit tokenizer: maximal alphanumeric runs, and every punctuation
// character as a token of its own. Whitespace separates and is dropped.
// Offsets are in scalar values.
inline std::vector<Span> tokenize(std::u32string_view text) {
  std::vector<Span> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = text[i];
    if (is_alnum(c)) {
      const auto b = i;
      while (i < text.size() && is_alnum(text[i])) ++i;
      tokens.push_back({b, i});
    } else if (is_space(c) || is_control(c)) {
      ++i;
    } else {
      tokens.push_back({i, i + 1});
      ++i;
    }
  }
  return tokens;
}

inline std::vector<Span> tokenize(std::string_view utf8_text) {
  return tokenize(utf8::to_u32(utf8_text));
}

struct StatsReport {
  std::map<std::string, std::size_t> labels;  // per-base occurrence counts
  std::size_t documents = 0;
  std::size_t entities = 0;
  std::size_t tokens = 0;
  std::size_t annotated_tokens = 0;
  std::size_t nested_entities = 0;
  double nesting_fraction = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["labels"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : labels) j["labels"][k] = v;
    j["tokens"] = tokens;
    j["annotated_tokens"] = annotated_tokens;
    j["nesting_fraction"] = nesting_fraction;
    j["documents"] = documents;
    j["entities"] = entities;
    j["nested_entities"] = nested_entities;
    return j;
  }
};

// An entity is nested when another entity's extent strictly contains its own
// (contains it and differs from it).
inline std::size_t count_nested(const std::vector<Entity>& entities) {
  std::vector<Span> ext;
  ext.reserve(entities.size());
  for (const auto& e : entities) ext.push_back(e.extent());
  std::size_t nested = 0;
  for (std::size_t i = 0; i < ext.size(); ++i) {
    for (std::size_t j = 0; j < ext.size(); ++j) {
      if (i == j) continue;
      if (ext[j].start <= ext[i].start && ext[i].end <= ext[j].end && ext[j] != ext[i]) {
        ++nested;
        break;
      }
    }
  }
  return nested;
}

// Tokens that share at least one character with some entity fragment.
inline std::size_t count_annotated_tokens(const std::vector<Span>& tokens,
                                          const std::vector<Entity>& entities) {
  std::vector<Span> frags;
  for (const auto& e : entities) frags.insert(frags.end(), e.fragments.begin(), e.fragments.end());
  std::sort(frags.begin(), frags.end());
  // Merge into disjoint covered intervals, then sweep.
  std::vector<Span> covered;
  for (const auto& f : frags) {
    if (!covered.empty() && f.start <= covered.back().end) {
      covered.back().end = std::max(covered.back().end, f.end);
    } else {
      covered.push_back(f);
    }
  }
  std::size_t n = 0, k = 0;
  for (const auto& t : tokens) {
    while (k < covered.size() && covered[k].end <= t.start) ++k;
    if (k < covered.size() && covered[k].start < t.end) ++n;
  }
  return n;
}

inline StatsReport corpus_stats(const Corpus& corpus) {
  StatsReport r;
  r.documents = corpus.documents.size();
  for (const auto& doc : corpus.documents) {
    for (const auto& e : doc.entities) ++r.labels[e.label.base];
    r.entities += doc.entities.size();
    const auto tokens = tokenize(doc.text);
    r.tokens += tokens.size();
    r.annotated_tokens += count_annotated_tokens(tokens, doc.entities);
    r.nested_entities += count_nested(doc.entities);
  }
  r.nesting_fraction =
      r.entities ? static_cast<double>(r.nested_entities) / static_cast<double>(r.entities) : 0.0;
  return r;
}

}  // namespace wfner
