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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wfner/io.hpp"
#include "wfner/unicode.hpp"

namespace wfner {

enum class VocabKind { tool_name, binary_name };
enum class SourceKind { biotools, bioconda, biocontainers, bioweb, custom };

inline std::string_view to_string(VocabKind k) {
  return k == VocabKind::tool_name ? "tool_name" : "binary_name";
}

inline std::string_view to_string(SourceKind k) {
  switch (k) {
    case SourceKind::biotools: return "biotools";
    case SourceKind::bioconda: return "bioconda";
    case SourceKind::biocontainers: return "biocontainers";
    case SourceKind::bioweb: return "bioweb";
    case SourceKind::custom: return "custom";
  }
  return "?";
}

inline std::optional<SourceKind> parse_source_kind(std::string_view s) {
  for (auto k : {SourceKind::biotools, SourceKind::bioconda, SourceKind::biocontainers,
                 SourceKind::bioweb, SourceKind::custom}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

struct VocabEntry {
  std::string surface;
  std::string canonical;
  VocabKind kind = VocabKind::tool_name;
  std::set<SourceKind> sources;

  friend bool operator==(const VocabEntry&, const VocabEntry&) = default;
};

class GazetteerError : public std::runtime_error {
 public:
  GazetteerError(SourceKind source, std::size_t record, const std::string& what)
      : std::runtime_error("MalformedDump: " + std::string(to_string(source)) + " record " +
                           std::to_string(record) + ": " + what),
        record_(record) {}
  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> dump_lines(std::string_view payload) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= payload.size(); ++i) {
    if (i == payload.size() || payload[i] == '\n') {
      out.push_back(payload.substr(b, i - b));
      b = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline void check_utf8(SourceKind source, std::size_t record, std::string_view s) {
  try {
    utf8::length(s);
  } catch (const Utf8Error& e) {
    throw GazetteerError(source, record, e.what());
  }
}

}  // namespace detail

// Extracts names from one knowledge-base dump.
//   biotools       JSON array of objects with a string "name" (tool name) and
//                  an optional "binaries" string array (binary names)
//   bioconda       one package spec per line, "name[=version...]" (binary names)
//   biocontainers  one image reference per line, "[registry/ns/]name[:tag][@digest]"
//                  (binary names)
//   bioweb, custom one tool name per line (tool names)
// Blank lines and lines starting with '#' are skipped. Record indices in
// errors are 0-based array positions or 1-based line numbers.
inline std::vector<VocabEntry> ingest(SourceKind source, std::string_view payload) {
  std::vector<VocabEntry> out;
  auto add = [&](std::string_view name, VocabKind kind, std::size_t record) {
    detail::check_utf8(source, record, name);
    std::string s(detail::trim(name));
    out.push_back({s, s, kind, {source}});
  };

  if (source == SourceKind::biotools) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(payload);
    } catch (const nlohmann::json::exception& e) {
      throw GazetteerError(source, 0, e.what());
    }
    if (!j.is_array()) throw GazetteerError(source, 0, "expected a JSON array");
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& rec = j[i];
      if (!rec.is_object() || !rec.contains("name") || !rec["name"].is_string()) {
        throw GazetteerError(source, i, "record lacks a string 'name'");
      }
      const auto name = rec["name"].get<std::string>();
      if (detail::trim(name).empty()) throw GazetteerError(source, i, "empty name");
      add(name, VocabKind::tool_name, i);
      if (rec.contains("binaries")) {
        if (!rec["binaries"].is_array()) throw GazetteerError(source, i, "'binaries' must be an array");
        for (const auto& b : rec["binaries"]) {
          if (!b.is_string() || detail::trim(b.get<std::string>()).empty()) {
            throw GazetteerError(source, i, "bad binary name");
          }
          add(b.get<std::string>(), VocabKind::binary_name, i);
        }
      }
    }
    return out;
  }

  const auto lines = detail::dump_lines(payload);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto record = n + 1;
    auto line = detail::trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    switch (source) {
      case SourceKind::bioconda: {
        auto name = line.substr(0, line.find_first_of(" \t"));
        name = name.substr(0, name.find_first_of("=<>!"));
        if (name.empty()) throw GazetteerError(source, record, "empty package name");
        add(name, VocabKind::binary_name, record);
        break;
      }
      case SourceKind::biocontainers: {
        auto name = line.substr(0, line.find_first_of(" \t"));
        if (auto at = name.find('@'); at != std::string_view::npos) name = name.substr(0, at);
        if (auto slash = name.rfind('/'); slash != std::string_view::npos) {
          name = name.substr(slash + 1);
        }
        if (auto colon = name.find(':'); colon != std::string_view::npos) {
          name = name.substr(0, colon);
        }
        if (name.empty()) throw GazetteerError(source, record, "empty image name");
        add(name, VocabKind::binary_name, record);
        break;
      }
      default:
        add(line, VocabKind::tool_name, record);
        break;
    }
  }
  return out;
}

// English function words and generic terms that would make dictionary
// tagging fire on ordinary prose. Names colliding with these are dropped.
inline const std::vector<std::string>& builtin_common_words() {
  static const std::vector<std::string> words = {
#include "wfner/common_words.inc"
  };
  return words;
}

struct GazetteerOptions {
  std::size_t min_length = 2;  // in scalar values
  bool drop_numeric = true;
  bool drop_common_words = true;
  std::set<std::string> common_words;  // case-folded; empty = built-in list

  const std::set<std::string>& effective_common_words() const {
    static const std::set<std::string> builtin = [] {
      std::set<std::string> s;
      for (const auto& w : builtin_common_words()) s.insert(fold_case(w));
      return s;
    }();
    return common_words.empty() ? builtin : common_words;
  }
};

struct NormalizationRecord {
  std::size_t min_length = 2;
  bool drop_numeric = true;
  bool drop_common_words = true;
  std::size_t input_entries = 0;
  // Filter reason -> distinct case-folded keys removed for it.
  std::map<std::string, std::set<std::string>> filtered;

  std::size_t filtered_keys() const {
    std::set<std::string> all;
    for (const auto& [reason, keys] : filtered) all.insert(keys.begin(), keys.end());
    return all.size();
  }

  friend bool operator==(const NormalizationRecord&, const NormalizationRecord&) = default;
};

struct GazetteerEntry {
  std::string key;        // case-folded surface
  std::string canonical;  // first-seen casing
  VocabKind kind = VocabKind::tool_name;
  std::set<SourceKind> sources;
  std::set<std::string> variants;  // every casing seen

  friend bool operator==(const GazetteerEntry&, const GazetteerEntry&) = default;
};

struct Gazetteer {
  std::map<std::string, GazetteerEntry> entries;  // keyed by case-folded surface
  NormalizationRecord normalization;

  bool contains(std::string_view surface) const { return entries.count(fold_case(surface)) > 0; }

  nlohmann::ordered_json to_json() const;
  static Gazetteer from_json(const nlohmann::json& j);
};

inline bool is_numeric_name(std::string_view s) {
  bool digit = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c != '.' && c != ',' && c != '-' && c != '_' && c != ' ') {
      return false;
    }
  }
  return digit;
}

// Case-folded deduplication with source merging and the length, numeric and
// common-word filters. Output order is by key.
inline Gazetteer build_gazetteer(const std::vector<VocabEntry>& entries,
                                 const GazetteerOptions& options = {}) {
  Gazetteer gaz;
  auto& norm = gaz.normalization;
  norm.min_length = options.min_length;
  norm.drop_numeric = options.drop_numeric;
  norm.drop_common_words = options.drop_common_words;
  norm.input_entries = entries.size();
  const auto& common = options.effective_common_words();

  for (const auto& e : entries) {
    const std::string surface(detail::trim(e.surface));
    if (surface.empty()) {
      norm.filtered["empty"].insert("");
      continue;
    }
    const auto key = fold_case(surface);
    if (utf8::length(surface) < options.min_length) {
      norm.filtered["too_short"].insert(key);
      continue;
    }
    if (options.drop_numeric && is_numeric_name(surface)) {
      norm.filtered["numeric"].insert(key);
      continue;
    }
    if (options.drop_common_words && common.count(key)) {
      norm.filtered["common_word"].insert(key);
      continue;
    }
    auto [it, fresh] = gaz.entries.try_emplace(key);
    auto& g = it->second;
    if (fresh) {
      g.key = key;
      g.canonical = e.canonical.empty() ? surface : std::string(detail::trim(e.canonical));
      g.kind = e.kind;
    } else if (e.kind == VocabKind::tool_name) {
      g.kind = VocabKind::tool_name;
    }
    g.sources.insert(e.sources.begin(), e.sources.end());
    g.variants.insert(surface);
  }
  return gaz;
}

// Vocabulary text: one canonical surface per line, sorted case-insensitively,
// LF-terminated. With `subwords`, multi-word names contribute their words.
inline std::string render_vocab(const Gazetteer& gaz, bool subwords = false) {
  std::vector<std::pair<std::string, std::string>> lines;  // (key, surface)
  if (!subwords) {
    for (const auto& [key, e] : gaz.entries) lines.emplace_back(key, e.canonical);
  } else {
    std::map<std::string, std::string> seen;
    for (const auto& [key, e] : gaz.entries) {
      for (auto w : detail::split_words(e.canonical)) {
        seen.try_emplace(fold_case(w), std::string(w));
      }
    }
    for (auto& [k, v] : seen) lines.emplace_back(k, v);
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& [k, s] : lines) out += s + "\n";
  return out;
}

inline void export_vocab(const Gazetteer& gaz, const std::filesystem::path& path,
                         bool subwords = false) {
  write_file_atomic(path, render_vocab(gaz, subwords));
}

inline nlohmann::ordered_json Gazetteer::to_json() const {
  nlohmann::ordered_json j;
  auto& n = j["normalization"];
  n["min_length"] = normalization.min_length;
  n["drop_numeric"] = normalization.drop_numeric;
  n["drop_common_words"] = normalization.drop_common_words;
  n["input_entries"] = normalization.input_entries;
  n["filtered"] = nlohmann::ordered_json::object();
  for (const auto& [reason, keys] : normalization.filtered) {
    n["filtered"][reason] = std::vector<std::string>(keys.begin(), keys.end());
  }
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& [key, e] : entries) {
    nlohmann::ordered_json o;
    o["key"] = key;
    o["canonical"] = e.canonical;
    o["kind"] = std::string(to_string(e.kind));
    auto src = nlohmann::ordered_json::array();
    for (auto s : e.sources) src.push_back(std::string(to_string(s)));
    o["sources"] = std::move(src);
    o["variants"] = std::vector<std::string>(e.variants.begin(), e.variants.end());
    j["entries"].push_back(std::move(o));
  }
  return j;
}

inline Gazetteer Gazetteer::from_json(const nlohmann::json& j) {
  Gazetteer g;
  if (j.contains("normalization")) {
    const auto& n = j["normalization"];
    g.normalization.min_length = n.value("min_length", std::size_t{2});
    g.normalization.drop_numeric = n.value("drop_numeric", true);
    g.normalization.drop_common_words = n.value("drop_common_words", true);
    g.normalization.input_entries = n.value("input_entries", std::size_t{0});
    if (n.contains("filtered")) {
      for (const auto& [reason, keys] : n["filtered"].items()) {
        g.normalization.filtered[reason] = keys.get<std::set<std::string>>();
      }
    }
  }
  for (const auto& o : j.at("entries")) {
    GazetteerEntry e;
    e.canonical = o.at("canonical").get<std::string>();
    e.key = o.value("key", fold_case(e.canonical));
    e.kind = o.value("kind", std::string("tool_name")) == "binary_name" ? VocabKind::binary_name
                                                                        : VocabKind::tool_name;
    for (const auto& s : o.value("sources", std::vector<std::string>{})) {
      if (auto k = parse_source_kind(s)) e.sources.insert(*k);
    }
    auto variants = o.value("variants", std::vector<std::string>{});
    e.variants.insert(variants.begin(), variants.end());
    if (e.variants.empty()) e.variants.insert(e.canonical);
    g.entries[e.key] = std::move(e);
  }
  return g;
}

}  // namespace wfner
