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
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wfner/schema.hpp"
#include "wfner/standoff.hpp"

namespace wfner {

// One row of a label correspondence table. An absent target is an explicit
// drop: the source label has no counterpart in the target schema.
struct MappingRule {
  std::string source;
  std::optional<std::string> attribute;
  std::optional<EntityLabel> target;

  friend bool operator==(const MappingRule&, const MappingRule&) = default;
};

class MappingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MappingTable {
 public:
  MappingTable() = default;

  explicit MappingTable(std::vector<MappingRule> rules) : rules_(std::move(rules)) {
    std::set<std::pair<std::string, std::optional<std::string>>> keys;
    for (const auto& r : rules_) {
      if (!keys.emplace(r.source, r.attribute).second) {
        throw MappingError("duplicate mapping rule for " + r.source +
                           (r.attribute ? "+" + *r.attribute : std::string()));
      }
    }
  }

  const std::vector<MappingRule>& rules() const noexcept { return rules_; }

  // The rule for (source, attribute) if one exists, otherwise the
  // attribute-free rule for source, otherwise null.
  const MappingRule* find(std::string_view source,
                          const std::optional<std::string>& attribute) const {
    if (attribute) {
      for (const auto& r : rules_) {
        if (r.source == source && r.attribute == attribute) return &r;
      }
    }
    for (const auto& r : rules_) {
      if (r.source == source && !r.attribute) return &r;
    }
    return nullptr;
  }

  // Attributes that have a rule of their own for `source`, in rule order.
  std::vector<std::string> attributes_for(std::string_view source) const {
    std::vector<std::string> out;
    for (const auto& r : rules_) {
      if (r.source == source && r.attribute) out.push_back(*r.attribute);
    }
    return out;
  }

  nlohmann::ordered_json to_json() const {
    auto j = nlohmann::ordered_json::array();
    for (const auto& r : rules_) {
      nlohmann::ordered_json o;
      o["source"] = r.source;
      o["attribute"] = r.attribute ? nlohmann::ordered_json(*r.attribute) : nullptr;
      o["target"] = r.target ? nlohmann::ordered_json(r.target->base) : nullptr;
      o["qualifier"] = r.target && r.target->qualifier
                           ? nlohmann::ordered_json(*r.target->qualifier)
                           : nullptr;
      j.push_back(std::move(o));
    }
    return j;
  }

  static MappingTable from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw MappingError("mapping table must be a JSON array");
    auto opt = [](const nlohmann::json& o, const char* key) -> std::optional<std::string> {
      auto it = o.find(key);
      if (it == o.end() || it->is_null()) return std::nullopt;
      if (!it->is_string()) throw MappingError(std::string("field '") + key + "' must be a string");
      return it->get<std::string>();
    };
    std::vector<MappingRule> rules;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& o = j[i];
      if (!o.is_object() || !o.contains("source") || !o["source"].is_string()) {
        throw MappingError("mapping rule " + std::to_string(i) + " lacks a string 'source'");
      }
      MappingRule r{o["source"].get<std::string>(), opt(o, "attribute"), std::nullopt};
      if (auto t = opt(o, "target")) r.target = EntityLabel(*t, opt(o, "qualifier"));
      rules.push_back(std::move(r));
    }
    return MappingTable(std::move(rules));
  }

  friend bool operator==(const MappingTable&, const MappingTable&) = default;

 private:
  std::vector<MappingRule> rules_;
};

inline std::optional<EntityLabel> map_label(std::string_view source_base,
                                            const std::optional<std::string>& source_attribute,
                                            const MappingTable& table) {
  const auto* rule = table.find(source_base, source_attribute);
  return rule ? rule->target : std::nullopt;
}

// SoftCite -> workflow schema correspondence, including the four SoftCite
// labels that have no counterpart.
inline MappingTable default_softcite_table() {
  using L = EntityLabel;
  return MappingTable({
      {"software", std::nullopt, L("Tool")},
      {"software", "environment", L("Tool")},
      {"software", "url", L("Biblio")},
      {"software", "component", L("LibraryPackage")},
      {"software", "implicit", L("Tool", "General")},
      {"publisher", std::nullopt, L("Biblio")},
      {"publisher", "environment", L("Environment")},
      {"bibr", std::nullopt, L("Biblio")},
      {"version", std::nullopt, L("Version")},
      {"url", std::nullopt, L("Biblio")},
      {"language", std::nullopt, L("ProgrammingLanguage")},
      {"publisher_person", std::nullopt, std::nullopt},
      {"figure", std::nullopt, std::nullopt},
      {"table", std::nullopt, std::nullopt},
      {"formula", std::nullopt, std::nullopt},
  });
}

inline MappingTable identity_table(const SchemaDef& schema = SchemaDef::biotoflow()) {
  std::vector<MappingRule> rules;
  for (const auto& d : schema.labels()) rules.push_back({d.base, std::nullopt, EntityLabel(d.base)});
  return MappingTable(std::move(rules));
}

struct ConversionReport {
  std::map<std::string, std::size_t> mapped;       // per source label
  std::map<std::string, std::size_t> dropped;      // per source label, includes unknown
  std::map<std::string, std::size_t> unknown;      // no rule at all
  std::map<std::string, std::size_t> passthrough;  // already in the target schema
  std::size_t attribute_conflicts = 0;             // entities with >1 known attribute

  std::size_t total(const std::map<std::string, std::size_t>& m) const {
    std::size_t n = 0;
    for (const auto& [k, v] : m) n += v;
    return n;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    auto obj = [](const std::map<std::string, std::size_t>& m) {
      auto o = nlohmann::ordered_json::object();
      for (const auto& [k, v] : m) o[k] = v;
      return o;
    };
    j["mapped"] = obj(mapped);
    j["dropped"] = obj(dropped);
    j["unknown"] = obj(unknown);
    j["passthrough"] = obj(passthrough);
    j["attribute_conflicts"] = attribute_conflicts;
    return j;
  }
};

struct ConvertOptions {
  bool strict = false;  // unknown source labels raise MappingError
  // Labels registered here and without a rule pass through unchanged, which
  // makes the conversion idempotent on its own output.
  const SchemaDef* target_schema = &SchemaDef::biotoflow();
};

struct ConversionResult {
  Corpus corpus;
  ConversionReport report;
};

inline ConversionResult convert_corpus(const Corpus& corpus, const MappingTable& table,
                                       ConvertOptions opts = {}) {
  ConversionResult result;
  auto& report = result.report;
  result.corpus.name = corpus.name;

  for (const auto& src : corpus.documents) {
    Document doc;
    doc.doc_id = src.doc_id;
    doc.text = src.text;
    doc.provenance = Provenance::converted;

    std::set<std::string, std::less<>> dropped_ids;
    for (const auto& e : src.entities) {
      const auto& base = e.label.base;

      std::vector<std::string> present = attribute_values(src, e.id);
      if (e.label.qualifier) present.push_back(*e.label.qualifier);
      std::optional<std::string> attribute;
      std::size_t known = 0;
      for (const auto& a : table.attributes_for(base)) {
        if (std::find(present.begin(), present.end(), a) != present.end()) {
          if (!attribute) attribute = a;
          ++known;
        }
      }
      if (known > 1) ++report.attribute_conflicts;

      const auto* rule = table.find(base, attribute);
      if (!rule) {
        if (opts.target_schema && opts.target_schema->is_valid(e.label)) {
          ++report.passthrough[base];
          doc.entities.push_back(e);
          continue;
        }
        if (opts.strict) {
          throw MappingError(src.doc_id + ": " + e.id + ": UnknownSourceLabel '" + base + "'");
        }
        ++report.unknown[base];
        ++report.dropped[base];
        dropped_ids.insert(e.id);
        continue;
      }
      if (!rule->target) {
        ++report.dropped[base];
        dropped_ids.insert(e.id);
        continue;
      }
      Entity out = e;
      out.label = *rule->target;
      if (!out.label.qualifier && e.label.qualifier && opts.target_schema &&
          opts.target_schema->has_qualifier(out.label.base, *e.label.qualifier)) {
        out.label.qualifier = e.label.qualifier;
      }
      if (out.label != e.label) {
        out.type_text.clear();
        out.qualifier_line.clear();
      }
      ++report.mapped[base];
      doc.entities.push_back(std::move(out));
    }

    // Records that reference a dropped entity go with it.
    for (const auto& line : src.sidecar) {
      bool refers = false;
      const auto tokens = detail::split_ws(line);
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        auto colon = tokens[t].rfind(':');
        auto ref = colon == std::string_view::npos ? tokens[t] : tokens[t].substr(colon + 1);
        if (dropped_ids.count(ref)) refers = true;
      }
      if (!refers) doc.sidecar.push_back(line);
    }
    sort_entities(doc.entities);
    result.corpus.documents.push_back(std::move(doc));
  }
  return result;
}

}  // namespace wfner
