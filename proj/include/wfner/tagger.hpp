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
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "wfner/gazetteer.hpp"
#include "wfner/parallel.hpp"
#include "wfner/schema.hpp"
#include "wfner/standoff.hpp"
#include "wfner/unicode.hpp"

namespace wfner {

class TaggerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Patterns (ECMAScript regular expressions over the UTF-8 text) and fixed
// surface lists for the rule pass. The shipped defaults live in
// data/ruleset.json and are mirrored by RuleSet::defaults().
struct RuleSet {
  std::vector<std::string> version_patterns;
  std::vector<std::string> biblio_patterns;
  std::map<std::string, std::vector<std::string>> fixed_lists;  // base -> surfaces

  friend bool operator==(const RuleSet&, const RuleSet&) = default;

  static RuleSet defaults() {
    RuleSet r;
    // Optional "v"/"version" keyword, dotted digits, optional suffix:
    // 1.2.3, v0.7.17, 2.1b, version 4.2, 1.0-rc1
    r.version_patterns = {
        R"(\b(?:[Vv]ersion\s|[Vv])?\d+(?:\.\d+)+(?:[a-z]+\d*|-[A-Za-z0-9]+)?\b)",
    };
    r.biblio_patterns = {
        R"(\[\d+(?:\s*(?:,|-|–)\s*\d+)*\])",
        R"(\([A-Z][A-Za-z'\-]+(?: et al\.| and [A-Z][A-Za-z'\-]+)?,? (?:19|20)\d{2}[a-z]?\))",
        R"(\b10\.\d{4,9}/[^\s]*[^\s.,;:)\]])",
        R"(https?://[^\s<>\])]*[^\s<>\]).,;:])",
    };
    r.fixed_lists = {
        {"ManagementSystem", {"Nextflow", "Snakemake", "Galaxy", "Cromwell", "Toil", "Airflow"}},
        {"ProgrammingLanguage",
         {"Python", "R", "Bash", "Perl", "Java", "C++", "Julia", "Groovy", "JavaScript", "Ruby",
          "MATLAB", "Scala"}},
        {"Container", {"Docker", "Singularity", "Apptainer", "Podman"}},
        {"Environment", {"Conda", "Mamba", "Kubernetes"}},
    };
    return r;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["version_patterns"] = version_patterns;
    j["biblio_patterns"] = biblio_patterns;
    j["fixed_lists"] = nlohmann::ordered_json::object();
    for (const auto& [base, list] : fixed_lists) j["fixed_lists"][base] = list;
    return j;
  }

  static RuleSet from_json(const nlohmann::json& j) {
    RuleSet r;
    r.version_patterns = j.value("version_patterns", std::vector<std::string>{});
    r.biblio_patterns = j.value("biblio_patterns", std::vector<std::string>{});
    if (j.contains("fixed_lists")) {
      for (const auto& [base, list] : j["fixed_lists"].items()) {
        r.fixed_lists[base] = list.get<std::vector<std::string>>();
      }
    }
    r.check();
    return r;
  }

  // Every pattern compiles and every fixed-list surface is non-empty.
  void check(const SchemaDef& schema = SchemaDef::biotoflow()) const {
    for (const auto* list : {&version_patterns, &biblio_patterns}) {
      for (const auto& p : *list) {
        try {
          std::regex re(p, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
          throw TaggerError("pattern does not compile: " + p + ": " + e.what());
        }
      }
    }
    for (const auto& [base, list] : fixed_lists) {
      if (!schema.has_base(base)) throw TaggerError("fixed list for unknown label " + base);
      for (const auto& s : list) {
        if (detail::trim(s).empty()) throw TaggerError("empty surface in fixed list " + base);
      }
    }
  }
};

// Dictionary + rule tagger producing a flat (non-overlapping) entity layer.
//
// Dictionary pass: scanning left to right, at each word start the longest
// gazetteer or fixed-list surface ending on a word boundary is taken, exact
// casing first and case-insensitive as fallback (only a strictly longer
// case-insensitive match beats an exact one); scanning resumes after it.
// Rule pass: version patterns give Version, bibliographic patterns Biblio.
// Overlaps are resolved by longer span, then earlier start, then dictionary
// before version before biblio.
class Tagger {
 public:
  Tagger(const Gazetteer& gaz, const RuleSet& rules) {
    rules.check();
    for (const auto& [key, e] : gaz.entries) {
      for (const auto& v : e.variants) add(v, EntityLabel("Tool"), 0);
      add(e.canonical, EntityLabel("Tool"), 0);
    }
    for (const auto& [base, list] : rules.fixed_lists) {
      for (const auto& s : list) add(std::string(detail::trim(s)), EntityLabel(base), 1);
    }
    for (const auto& p : rules.version_patterns) versions_.emplace_back(p, std::regex::ECMAScript);
    for (const auto& p : rules.biblio_patterns) biblio_.emplace_back(p, std::regex::ECMAScript);
  }

  std::vector<Entity> tag(std::string_view text) const;

 private:
  struct Terminal {
    EntityLabel label;
    int priority = -1;  // fixed lists (1) override the gazetteer (0)
  };

  class Trie {
   public:
    Trie() : terminals_(1) {}

    void insert(std::u32string_view s, const EntityLabel& label, int priority) {
      std::uint32_t node = 0;
      for (char32_t c : s) {
        auto [it, fresh] = edges_.try_emplace(key(node, c), 0);
        if (fresh) {
          it->second = static_cast<std::uint32_t>(terminals_.size());
          terminals_.emplace_back();
        }
        node = it->second;
      }
      auto& t = terminals_[node];
      if (priority > t.priority) t = {label, priority};
    }

    std::optional<std::uint32_t> child(std::uint32_t node, char32_t c) const {
      auto it = edges_.find(key(node, c));
      if (it == edges_.end()) return std::nullopt;
      return it->second;
    }

    const Terminal& at(std::uint32_t node) const { return terminals_[node]; }

   private:
    static std::uint64_t key(std::uint32_t node, char32_t c) {
      return (std::uint64_t{node} << 21) | std::uint64_t{c};
    }

    std::unordered_map<std::uint64_t, std::uint32_t> edges_;
    std::vector<Terminal> terminals_;
  };

  struct Candidate {
    std::size_t start, end;
    int source;  // 0 dictionary, 1 version, 2 biblio
    EntityLabel label;
  };

  void add(const std::string& surface, const EntityLabel& label, int priority) {
    if (surface.empty()) return;
    const auto s = utf8::to_u32(surface);
    exact_.insert(s, label, priority);
    // One-character surfaces ("R") are matched with exact casing only.
    if (s.size() > 1) folded_.insert(fold_case(s), label, priority);
  }

  static bool is_word(char32_t c) { return c == '_' || is_alnum(c); }

  // Longest match starting at `i`: (end, terminal) or nothing.
  std::optional<std::pair<std::size_t, const Terminal*>> longest(const Trie& trie,
                                                                 std::u32string_view text,
                                                                 std::size_t i,
                                                                 bool fold) const {
    std::optional<std::pair<std::size_t, const Terminal*>> best;
    std::uint32_t node = 0;
    for (std::size_t j = i; j < text.size(); ++j) {
      auto next = trie.child(node, fold ? fold_case(text[j]) : text[j]);
      if (!next) break;
      node = *next;
      const auto& t = trie.at(node);
      const bool boundary = j + 1 == text.size() || !(is_word(text[j]) && is_word(text[j + 1]));
      if (t.priority >= 0 && boundary) best = {j + 1, &t};
    }
    return best;
  }

  Trie exact_, folded_;
  std::vector<std::regex> versions_, biblio_;
};

inline std::vector<Entity> Tagger::tag(std::string_view text) const {
  const auto chars = utf8::to_u32(text);
  const TextIndex index(text);
  std::vector<Candidate> candidates;

  for (std::size_t i = 0; i < chars.size();) {
    const bool word_start = i == 0 || !(is_word(chars[i - 1]) && is_word(chars[i]));
    if (word_start) {
      auto cs = longest(exact_, chars, i, false);
      auto ci = longest(folded_, chars, i, true);
      auto best = cs;
      if (ci && (!cs || ci->first > cs->first)) best = ci;
      if (best) {
        candidates.push_back({i, best->first, 0, best->second->label});
        i = best->first;
        continue;
      }
    }
    ++i;
  }

  auto run = [&](const std::vector<std::regex>& patterns, int source, const char* base) {
    for (const auto& re : patterns) {
      for (auto it = std::cregex_iterator(text.data(), text.data() + text.size(), re);
           it != std::cregex_iterator(); ++it) {
        if (it->length(0) == 0) continue;
        const auto b = static_cast<std::size_t>(it->position(0));
        const auto e = b + static_cast<std::size_t>(it->length(0));
        candidates.push_back({index.cp_offset(b), index.cp_offset(e), source, EntityLabel(base)});
      }
    }
  };
  run(versions_, 1, "Version");
  run(biblio_, 2, "Biblio");

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    const auto la = a.end - a.start, lb = b.end - b.start;
    if (la != lb) return la > lb;
    if (a.start != b.start) return a.start < b.start;
    return a.source < b.source;
  });
  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      return c.start < k.end && k.start < c.end;
    });
    if (!clash) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) { return a.start < b.start; });

  std::vector<Entity> out;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.push_back(make_entity(index, text, "T" + std::to_string(k + 1), kept[k].label,
                              {{kept[k].start, kept[k].end}}));
  }
  return out;
}

inline std::vector<Entity> tag(std::string_view doc_text, const Gazetteer& gaz,
                               const RuleSet& rules) {
  return Tagger(gaz, rules).tag(doc_text);
}

// ---------------------------------------------------------------------------
// Silver annotation

// Produces the predicted entities for one document.
using Predictor = std::function<std::vector<Entity>(const Document&)>;

class MissingPrediction : public std::runtime_error {
 public:
  explicit MissingPrediction(const std::string& doc_id)
      : std::runtime_error("MissingPrediction: no predictions for " + doc_id), doc_id_(doc_id) {}
  const std::string& doc_id() const noexcept { return doc_id_; }

 private:
  std::string doc_id_;
};

// Predictions produced outside the toolkit, keyed by doc_id.
class ExternalPredictions {
 public:
  ExternalPredictions() = default;
  explicit ExternalPredictions(std::map<std::string, std::vector<Entity>> by_doc)
      : by_doc_(std::move(by_doc)) {}

  std::vector<Entity> operator()(const Document& doc) const {
    auto it = by_doc_.find(doc.doc_id);
    if (it == by_doc_.end()) throw MissingPrediction(doc.doc_id);
    return it->second;
  }

  const std::map<std::string, std::vector<Entity>>& documents() const { return by_doc_; }

  // Standoff predictions: a corpus read from `<doc_id>.ann` files.
  static ExternalPredictions from_corpus(const Corpus& predicted) {
    std::map<std::string, std::vector<Entity>> m;
    for (const auto& d : predicted.documents) m[d.doc_id] = d.entities;
    return ExternalPredictions(std::move(m));
  }

  // JSONL records {"doc_id", "label", "start", "end", "surface"}; a
  // discontinuous entity gives "fragments": [[s, e], ...] instead of
  // start/end. Offsets refer to the texts in `texts`. A record holding only
  // "doc_id" marks a document as predicted with no entities.
  static ExternalPredictions from_jsonl(std::string_view payload, const Corpus& texts,
                                        const SchemaDef& schema = SchemaDef::biotoflow());

 private:
  std::map<std::string, std::vector<Entity>> by_doc_;
};

inline ExternalPredictions ExternalPredictions::from_jsonl(std::string_view payload,
                                                           const Corpus& texts,
                                                           const SchemaDef& schema) {
  std::map<std::string, std::vector<Entity>> by_doc;
  std::map<std::string, TextIndex> indexes;
  const auto lines = detail::dump_lines(payload);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = detail::trim(lines[n]);
    if (line.empty()) continue;
    const auto where = "predictions line " + std::to_string(n + 1) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      const auto doc_id = j.at("doc_id").get<std::string>();
      const auto* doc = texts.find(doc_id);
      if (!doc) throw TaggerError(where + "unknown doc_id " + doc_id);
      auto& list = by_doc[doc_id];
      if (j.size() == 1) continue;
      auto [idx, fresh] = indexes.try_emplace(doc_id);
      if (fresh) idx->second = TextIndex(doc->text);

      std::vector<Span> fragments;
      if (j.contains("fragments")) {
        for (const auto& f : j["fragments"]) {
          fragments.push_back({f.at(0).get<std::size_t>(), f.at(1).get<std::size_t>()});
        }
      } else {
        fragments.push_back({j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()});
      }
      const auto label_text = j.at("label").get<std::string>();
      auto label = schema.parse_label(label_text).value_or(EntityLabel(label_text));
      if (j.contains("qualifier") && !j["qualifier"].is_null()) {
        label.qualifier = j["qualifier"].get<std::string>();
      }
      auto e = make_entity(idx->second, doc->text, "T" + std::to_string(list.size() + 1),
                           std::move(label), std::move(fragments));
      if (j.contains("surface") &&
          normalize_space(j["surface"].get<std::string>()) != normalize_space(e.surface)) {
        throw TaggerError(where + "surface mismatch for " + doc_id + ": '" +
                          j["surface"].get<std::string>() + "' vs '" + e.surface + "'");
      }
      list.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw TaggerError(where + e.what());
    } catch (const std::logic_error& e) {
      throw TaggerError(where + e.what());
    }
  }
  for (auto& [id, list] : by_doc) sort_entities(list);
  return ExternalPredictions(std::move(by_doc));
}

// Replaces every document's annotations with the predictor's output and
// marks it silver.
inline Corpus silver_annotate(const Corpus& corpus, const Predictor& predictor,
                              unsigned jobs = 1) {
  Corpus out;
  out.name = corpus.name;
  out.documents.resize(corpus.documents.size());
  parallel_for(corpus.documents.size(), jobs, [&](std::size_t i) {
    const auto& src = corpus.documents[i];
    auto& doc = out.documents[i];
    doc.doc_id = src.doc_id;
    doc.text = src.text;
    doc.provenance = Provenance::silver;
    doc.entities = predictor(src);
    sort_entities(doc.entities);
  });
  return out;
}

inline Predictor tagger_predictor(const Tagger& tagger) {
  return [&tagger](const Document& d) { return tagger.tag(d.text); };
}

// ---------------------------------------------------------------------------
// Fusion

enum class FusionMode { converted_only, silver };

struct FusionSource {
  Corpus corpus;
  Provenance role = Provenance::gold;
};

struct FusionConfig {
  FusionMode mode = FusionMode::converted_only;
  std::vector<FusionSource> sources;
  // Ids present in more than one source become "<corpus name>__<id>".
  bool prefix_collisions = true;
};

struct FusionResult {
  Corpus corpus;
  std::map<std::string, std::size_t> provenance_counts;
};

class FusionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Concatenates the sources, tagging each document with its source's role.
// Output documents are ordered by doc_id, so source order does not matter.
inline FusionResult fuse(const FusionConfig& config) {
  if (std::none_of(config.sources.begin(), config.sources.end(),
                   [](const FusionSource& s) { return s.role == Provenance::gold; })) {
    throw FusionError("fusion needs at least one gold source");
  }
  const auto allowed = config.mode == FusionMode::silver ? Provenance::silver : Provenance::converted;
  for (const auto& s : config.sources) {
    if (s.role != Provenance::gold && s.role != allowed) {
      throw FusionError("source " + s.corpus.name + " has role " + std::string(to_string(s.role)) +
                        ", not allowed in this fusion mode");
    }
  }

  std::map<std::string, std::size_t> owners;  // doc_id -> number of sources containing it
  for (const auto& s : config.sources) {
    std::set<std::string> local;
    for (const auto& d : s.corpus.documents) {
      if (!local.insert(d.doc_id).second) {
        throw FusionError("DuplicateDocId: " + d.doc_id + " twice in " + s.corpus.name);
      }
      ++owners[d.doc_id];
    }
  }

  FusionResult result;
  std::vector<std::string> names;
  std::set<std::string> taken;
  for (const auto& s : config.sources) {
    names.push_back(s.corpus.name);
    for (const auto& d : s.corpus.documents) {
      Document doc = d;
      doc.provenance = s.role;
      if (owners[d.doc_id] > 1) {
        if (!config.prefix_collisions) throw FusionError("DuplicateDocId: " + d.doc_id);
        doc.doc_id = s.corpus.name + "__" + d.doc_id;
      }
      if (!taken.insert(doc.doc_id).second) throw FusionError("DuplicateDocId: " + doc.doc_id);
      ++result.provenance_counts[std::string(to_string(doc.provenance))];
      result.corpus.documents.push_back(std::move(doc));
    }
  }
  std::sort(result.corpus.documents.begin(), result.corpus.documents.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  std::sort(names.begin(), names.end());
  for (std::size_t i = 0; i < names.size(); ++i) {
    result.corpus.name += (i ? "+" : "") + names[i];
  }
  return result;
}

}  // namespace wfner
