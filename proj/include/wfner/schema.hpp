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
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wfner {

// An entity type: a base label plus an optional qualifier (e.g. Tool/BioInfo).
// The base is kept as free text so that corpora in other schemas (SoftCite)
// share the same data model; registration is checked against a SchemaDef.
struct EntityLabel {
  std::string base;
  std::optional<std::string> qualifier;

  EntityLabel() = default;
  EntityLabel(std::string b) : base(std::move(b)) {}  // NOLINT: implicit by intent
  EntityLabel(const char* b) : base(b) {}              // NOLINT
  EntityLabel(std::string b, std::optional<std::string> q)
      : base(std::move(b)), qualifier(std::move(q)) {}

  std::string str() const { return qualifier ? base + "_" + *qualifier : base; }

  friend bool operator==(const EntityLabel&, const EntityLabel&) = default;
  friend auto operator<=>(const EntityLabel&, const EntityLabel&) = default;
};

enum class Category { core, environment, specifics };

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::core: return "core";
    case Category::environment: return "environment";
    case Category::specifics: return "specifics";
  }
  return "?";
}

class SchemaDef {
 public:
  struct LabelDef {
    std::string base;
    Category category;
    std::vector<std::string> qualifiers;
  };

  explicit SchemaDef(std::vector<LabelDef> defs) : defs_(std::move(defs)) {}

  // The 16-label workflow schema: core / environment / specifics.
  static const SchemaDef& biotoflow() {
    static const SchemaDef schema({
        {"Data", Category::core, {}},
        {"Tool", Category::core, {"BioInfo", "Lab", "Context", "General"}},
        {"Method", Category::core, {}},
        {"WorkflowName", Category::core, {}},
        {"File", Category::core, {}},
        {"Database", Category::core, {}},
        {"ManagementSystem", Category::environment, {}},
        {"Hardware", Category::environment, {}},
        {"Container", Category::environment, {}},
        {"ProgrammingLanguage", Category::environment, {}},
        {"Environment", Category::environment, {}},
        {"LibraryPackage", Category::environment, {}},
        {"Version", Category::specifics, {}},
        {"Biblio", Category::specifics, {}},
        {"Description", Category::specifics, {}},
        {"Parameter", Category::specifics, {}},
    });
    return schema;
  }

  const std::vector<LabelDef>& labels() const noexcept { return defs_; }

  bool has_base(std::string_view base) const { return find(base) != nullptr; }

  std::optional<Category> category(std::string_view base) const {
    const auto* d = find(base);
    return d ? std::optional<Category>(d->category) : std::nullopt;
  }

  bool has_qualifier(std::string_view base, std::string_view qualifier) const {
    return canonical_qualifier(base, qualifier).has_value();
  }

  // Registered spelling of a qualifier, matched case-insensitively
  // ("general" -> "General").
  std::optional<std::string> canonical_qualifier(std::string_view base,
                                                 std::string_view qualifier) const {
    const auto* d = find(base);
    if (!d) return std::nullopt;
    for (const auto& q : d->qualifiers) {
      if (iequals(q, qualifier)) return q;
    }
    return std::nullopt;
  }

  bool is_valid(const EntityLabel& label) const {
    if (!has_base(label.base)) return false;
    return !label.qualifier || has_qualifier(label.base, *label.qualifier);
  }

  // Interprets a type string such as "Tool" or "Tool_BioInfo".
  std::optional<EntityLabel> parse_label(std::string_view text) const {
    if (has_base(text)) return EntityLabel(std::string(text));
    const auto us = text.find('_');
    if (us == std::string_view::npos) return std::nullopt;
    const auto base = text.substr(0, us);
    if (auto q = canonical_qualifier(base, text.substr(us + 1))) {
      return EntityLabel(std::string(base), std::move(q));
    }
    return std::nullopt;
  }

  std::vector<std::string> bases_in(Category c) const {
    std::vector<std::string> out;
    for (const auto& d : defs_) {
      if (d.category == c) out.push_back(d.base);
    }
    return out;
  }

 private:
  static bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
             auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? char(c + 32) : c; };
             return lower(x) == lower(y);
           });
  }

  const LabelDef* find(std::string_view base) const {
    for (const auto& d : defs_) {
      if (d.base == base) return &d;
    }
    return nullptr;
  }

  std::vector<LabelDef> defs_;
};

}  // namespace wfner
