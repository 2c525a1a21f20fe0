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
#include <charconv>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wfner/schema.hpp"
#include "wfner/unicode.hpp"

namespace wfner {

// Character extent [start, end) counted in Unicode scalar values.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end > start ? end - start : 0; }

  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Entity {
  std::string id;
  EntityLabel label;
  std::vector<Span> fragments;  // sorted, pairwise disjoint
  std::string surface;          // fragment slices joined by a single space

  // Formatting hints kept for byte-faithful re-serialization of files read
  // from disk. They carry no meaning and are excluded from equality.
  std::string type_text;       // type column as read, e.g. "Tool_BioInfo"
  std::string qualifier_line;  // attribute line that supplied the qualifier

  std::size_t start() const { return fragments.empty() ? 0 : fragments.front().start; }
  std::size_t end() const { return fragments.empty() ? 0 : fragments.back().end; }
  Span extent() const { return {start(), end()}; }

  friend bool operator==(const Entity& a, const Entity& b) {
    return a.id == b.id && a.label == b.label && a.fragments == b.fragments &&
           a.surface == b.surface;
  }
};

enum class Provenance { gold, silver, converted };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::gold: return "gold";
    case Provenance::silver: return "silver";
    case Provenance::converted: return "converted";
  }
  return "?";
}

inline std::optional<Provenance> parse_provenance(std::string_view s) {
  if (s == "gold") return Provenance::gold;
  if (s == "silver") return Provenance::silver;
  if (s == "converted") return Provenance::converted;
  return std::nullopt;
}

struct Document {
  std::string doc_id;
  std::string text;
  std::vector<Entity> entities;  // canonical order, see sort_entities()
  Provenance provenance = Provenance::gold;
  std::vector<std::string> sidecar;  // non-entity .ann lines, verbatim

  friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
  std::string name;
  std::vector<Document> documents;

  const Document* find(std::string_view doc_id) const {
    for (const auto& d : documents) {
      if (d.doc_id == doc_id) return &d;
    }
    return nullptr;
  }

  std::size_t entity_count() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.entities.size();
    return n;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Compares annotation ids so that "T2" sorts before "T10".
inline bool natural_id_less(std::string_view a, std::string_view b) {
  auto split = [](std::string_view s) {
    std::size_t i = s.size();
    while (i > 0 && s[i - 1] >= '0' && s[i - 1] <= '9') --i;
    return std::pair{s.substr(0, i), s.substr(i)};
  };
  auto [pa, na] = split(a);
  auto [pb, nb] = split(b);
  if (pa != pb) return pa < pb;
  auto strip = [](std::string_view n) {
    while (n.size() > 1 && n.front() == '0') n.remove_prefix(1);
    return n;
  };
  na = strip(na);
  nb = strip(nb);
  if (na.size() != nb.size()) return na.size() < nb.size();
  if (na != nb) return na < nb;
  return a < b;
}

// Canonical entity order: start of first fragment, end of extent, then id.
inline bool entity_order(const Entity& a, const Entity& b) {
  if (a.start() != b.start()) return a.start() < b.start();
  if (a.end() != b.end()) return a.end() < b.end();
  if (a.id != b.id) return natural_id_less(a.id, b.id);
  if (a.fragments != b.fragments) return a.fragments < b.fragments;
  return a.label < b.label;
}

inline void sort_entities(std::vector<Entity>& entities) {
  std::sort(entities.begin(), entities.end(), entity_order);
}

// Number of character positions covered by both entities' fragments.
inline std::size_t overlap_length(const Entity& a, const Entity& b) {
  std::size_t total = 0;
  std::size_t i = 0, j = 0;
  while (i < a.fragments.size() && j < b.fragments.size()) {
    const auto& x = a.fragments[i];
    const auto& y = b.fragments[j];
    const auto lo = std::max(x.start, y.start);
    const auto hi = std::min(x.end, y.end);
    if (lo < hi) total += hi - lo;
    if (x.end < y.end) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

inline std::string join_slices(const TextIndex& index, std::string_view text,
                               const std::vector<Span>& fragments) {
  std::string out;
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    if (i) out.push_back(' ');
    out.append(index.slice(text, fragments[i].start, fragments[i].end));
  }
  return out;
}

// Collapses whitespace runs to one space and trims both ends.
inline std::string normalize_space(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

// Builds a well-formed entity over `text`; surface is derived from the slices.
inline Entity make_entity(const TextIndex& index, std::string_view text, std::string id,
                          EntityLabel label, std::vector<Span> fragments) {
  std::sort(fragments.begin(), fragments.end());
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    const auto& f = fragments[i];
    if (f.start >= f.end || f.end > index.size()) {
      throw std::out_of_range("fragment [" + std::to_string(f.start) + "," +
                              std::to_string(f.end) + ") outside text of length " +
                              std::to_string(index.size()));
    }
    if (i > 0 && fragments[i - 1].end > f.start) {
      throw std::invalid_argument("overlapping fragments in entity " + id);
    }
  }
  if (fragments.empty()) throw std::invalid_argument("entity " + id + " has no fragments");
  Entity e;
  e.id = std::move(id);
  e.label = std::move(label);
  e.surface = join_slices(index, text, fragments);
  e.fragments = std::move(fragments);
  return e;
}

inline Entity make_entity(std::string_view text, std::string id, EntityLabel label,
                          std::vector<Span> fragments) {
  return make_entity(TextIndex(text), text, std::move(id), std::move(label),
                     std::move(fragments));
}

// ---------------------------------------------------------------------------
// Parsing

class StandoffError : public std::runtime_error {
 public:
  enum class Kind { OffsetOutOfRange, SurfaceMismatch, DuplicateId, MalformedLine, InvalidText };

  StandoffError(Kind kind, std::string doc_id, std::size_t line, const std::string& detail)
      : std::runtime_error(doc_id + ".ann:" + std::to_string(line) + ": " +
                           std::string(kind_name(kind)) + ": " + detail),
        kind_(kind),
        doc_id_(std::move(doc_id)),
        line_(line) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& doc_id() const noexcept { return doc_id_; }
  std::size_t line() const noexcept { return line_; }

  static std::string_view kind_name(Kind k) {
    switch (k) {
      case Kind::OffsetOutOfRange: return "OffsetOutOfRange";
      case Kind::SurfaceMismatch: return "SurfaceMismatch";
      case Kind::DuplicateId: return "DuplicateId";
      case Kind::MalformedLine: return "MalformedLine";
      case Kind::InvalidText: return "InvalidText";
    }
    return "?";
  }

 private:
  Kind kind_;
  std::string doc_id_;
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(b, i - b));
      b = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
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

inline std::optional<std::size_t> to_size(std::string_view s) {
  std::size_t v = 0;
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Attribute record: `A1<TAB>Name T3 [Value]`.
struct AttributeLine {
  std::string_view id, name, target;
  std::optional<std::string_view> value;
};

inline std::optional<AttributeLine> parse_attribute(std::string_view line) {
  if (line.empty() || (line[0] != 'A' && line[0] != 'M')) return std::nullopt;
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) return std::nullopt;
  auto args = split_ws(line.substr(tab + 1));
  if (args.size() < 2 || args.size() > 3) return std::nullopt;
  AttributeLine a{line.substr(0, tab), args[0], args[1], std::nullopt};
  if (args.size() == 3) a.value = args[2];
  return a;
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace detail

// Values carried by attribute records that target `entity_id`, in file order.
// Binary attributes contribute their name, valued attributes their value.
inline std::vector<std::string> attribute_values(const Document& doc, std::string_view entity_id) {
  std::vector<std::string> out;
  for (const auto& line : doc.sidecar) {
    if (auto a = detail::parse_attribute(line); a && a->target == entity_id) {
      out.emplace_back(a->value ? *a->value : a->name);
    }
  }
  return out;
}

// Reads BRAT-style standoff annotations for one document. Entity ("T") lines
// become entities; all other records are kept verbatim in `sidecar`, except
// attribute lines that give a registered qualifier to their target entity.
inline Document parse_standoff(std::string_view ann_content, std::string_view doc_text,
                               std::string doc_id,
                               const SchemaDef& schema = SchemaDef::biotoflow()) {
  using Kind = StandoffError::Kind;
  TextIndex index;
  try {
    index = TextIndex(doc_text);
  } catch (const Utf8Error& e) {
    throw StandoffError(Kind::InvalidText, doc_id, 0, e.what());
  }

  Document doc;
  doc.doc_id = doc_id;
  doc.text = std::string(doc_text);

  std::map<std::string, std::size_t, std::less<>> by_id;
  std::vector<std::pair<std::size_t, std::string_view>> others;

  const auto lines = detail::split(ann_content, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line_no = n + 1;
    const auto line = detail::strip_cr(lines[n]);
    if (detail::split_ws(line).empty()) continue;
    auto fail = [&](Kind k, const std::string& what) {
      throw StandoffError(k, doc_id, line_no, what);
    };

    if (line[0] != 'T') {
      static constexpr std::string_view kRecordTypes = "RENAM#*";
      if (kRecordTypes.find(line[0]) == std::string_view::npos) {
        fail(Kind::MalformedLine, "unknown record type '" + std::string(1, line[0]) + "'");
      }
      others.emplace_back(line_no, line);
      continue;
    }

    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) fail(Kind::MalformedLine, "expected three tab-separated fields");
    const auto id = line.substr(0, t1);
    const auto middle = line.substr(t1 + 1, t2 - t1 - 1);
    const auto recorded = line.substr(t2 + 1);
    if (id.size() < 2 || id.find(' ') != std::string_view::npos) {
      fail(Kind::MalformedLine, "bad annotation id '" + std::string(id) + "'");
    }

    const auto sp = middle.find(' ');
    if (sp == std::string_view::npos || sp == 0) fail(Kind::MalformedLine, "missing offsets");
    const auto type = middle.substr(0, sp);

    std::vector<Span> fragments;
    for (auto frag : detail::split(middle.substr(sp + 1), ';')) {
      auto nums = detail::split_ws(frag);
      std::optional<std::size_t> s, e;
      if (nums.size() == 2) {
        s = detail::to_size(nums[0]);
        e = detail::to_size(nums[1]);
      }
      if (!s || !e) fail(Kind::MalformedLine, "bad fragment '" + std::string(frag) + "'");
      if (*s >= *e) fail(Kind::MalformedLine, "empty or reversed fragment '" + std::string(frag) + "'");
      fragments.push_back({*s, *e});
    }
    std::sort(fragments.begin(), fragments.end());
    for (std::size_t i = 1; i < fragments.size(); ++i) {
      if (fragments[i - 1].end > fragments[i].start) fail(Kind::MalformedLine, "overlapping fragments");
    }
    if (fragments.back().end > index.size()) {
      fail(Kind::OffsetOutOfRange, "fragment end " + std::to_string(fragments.back().end) +
                                       " exceeds text length " + std::to_string(index.size()));
    }
    if (by_id.count(id)) fail(Kind::DuplicateId, "duplicate id " + std::string(id));

    Entity e;
    e.id = std::string(id);
    e.type_text = std::string(type);
    if (auto parsed = schema.parse_label(type)) {
      e.label = std::move(*parsed);
    } else {
      e.label = EntityLabel(std::string(type));
    }
    e.surface = join_slices(index, doc_text, fragments);
    e.fragments = std::move(fragments);
    if (normalize_space(e.surface) != normalize_space(recorded)) {
      fail(Kind::SurfaceMismatch, "recorded '" + std::string(recorded) + "' but text has '" +
                                      e.surface + "'");
    }
    by_id.emplace(e.id, doc.entities.size());
    doc.entities.push_back(std::move(e));
  }

  for (const auto& [line_no, line] : others) {
    if (auto a = detail::parse_attribute(line)) {
      auto it = by_id.find(a->target);
      if (it != by_id.end()) {
        auto& e = doc.entities[it->second];
        if (!e.label.qualifier) {
          if (auto q = schema.canonical_qualifier(e.label.base, a->value ? *a->value : a->name)) {
            e.label.qualifier = std::move(q);
            e.qualifier_line = std::string(line);
            continue;
          }
        }
      }
    }
    doc.sidecar.emplace_back(line);
  }

  sort_entities(doc.entities);
  return doc;
}

// ---------------------------------------------------------------------------
// Serialization

struct SerializeOptions {
  bool renumber_ids = false;  // rewrite entity ids as T1..Tn in output order
};

struct StandoffFiles {
  std::string ann;
  std::string text;
};

namespace detail {

inline std::string replace_tokens(std::string_view line,
                                  const std::map<std::string, std::string, std::less<>>& ids) {
  std::string out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ':'; };
  while (i < line.size()) {
    if (is_sep(line[i])) {
      out.push_back(line[i++]);
      continue;
    }
    const auto b = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    const auto tok = line.substr(b, i - b);
    // The record's own id (first token) is never an entity reference.
    auto it = b == 0 ? ids.end() : ids.find(tok);
    out.append(it == ids.end() ? tok : std::string_view(it->second));
  }
  return out;
}

inline std::string sanitize_surface(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace detail

inline StandoffFiles serialize_standoff(const Document& doc, SerializeOptions opts = {},
                                        const SchemaDef& schema = SchemaDef::biotoflow()) {
  std::vector<const Entity*> order;
  order.reserve(doc.entities.size());
  for (const auto& e : doc.entities) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(),
                   [](const Entity* a, const Entity* b) { return entity_order(*a, *b); });

  std::map<std::string, std::string, std::less<>> renamed;
  if (opts.renumber_ids) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      renamed[order[i]->id] = "T" + std::to_string(i + 1);
    }
  }
  auto out_id = [&](const std::string& id) -> const std::string& {
    auto it = renamed.find(id);
    return it == renamed.end() ? id : it->second;
  };

  std::string ann;
  std::vector<std::string> qualifier_lines;
  std::vector<const Entity*> needs_synthetic;
  std::size_t max_attr = 0;
  auto note_attr_id = [&](std::string_view line) {
    if (auto a = detail::parse_attribute(line)) {
      if (auto n = detail::to_size(a->id.substr(1))) max_attr = std::max(max_attr, *n);
    }
  };
  for (const auto& line : doc.sidecar) note_attr_id(line);

  for (const Entity* e : order) {
    const auto& label = e->label;
    bool inline_qualifier = false;
    std::string type = label.base;
    if (label.qualifier && !e->type_text.empty()) {
      if (auto parsed = schema.parse_label(e->type_text); parsed && *parsed == label) {
        type = e->type_text;
        inline_qualifier = true;
      }
    }
    ann += out_id(e->id);
    ann += '\t';
    ann += type;
    for (std::size_t i = 0; i < e->fragments.size(); ++i) {
      ann += i ? ';' : ' ';
      ann += std::to_string(e->fragments[i].start);
      ann += ' ';
      ann += std::to_string(e->fragments[i].end);
    }
    ann += '\t';
    ann += detail::sanitize_surface(e->surface);
    ann += '\n';

    if (!label.qualifier || inline_qualifier) continue;
    bool reuse = false;
    if (!opts.renumber_ids && !e->qualifier_line.empty()) {
      if (auto a = detail::parse_attribute(e->qualifier_line); a && a->target == e->id) {
        auto q = schema.canonical_qualifier(label.base, a->value ? *a->value : a->name);
        reuse = q && *q == *label.qualifier;
      }
    }
    if (reuse) {
      note_attr_id(e->qualifier_line);
      qualifier_lines.push_back(e->qualifier_line);
    } else {
      needs_synthetic.push_back(e);
    }
  }
  for (const auto& line : qualifier_lines) ann += line + '\n';
  for (const Entity* e : needs_synthetic) {
    ann += "A" + std::to_string(++max_attr) + "\tQualifier " + out_id(e->id) + " " +
           *e->label.qualifier + "\n";
  }
  for (const auto& line : doc.sidecar) {
    ann += opts.renumber_ids ? detail::replace_tokens(line, renamed) : line;
    ann += '\n';
  }
  return {std::move(ann), doc.text};
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  enum class Kind {
    OffsetOutOfRange,
    EmptySpan,
    NoFragments,
    FragmentOrder,
    SurfaceMismatch,
    DuplicateId,
    DuplicateDocId,
    InvalidText,
    UnknownLabel,
    UnknownQualifier,
  };

  std::string doc_id;
  std::string entity_id;  // empty for document-level violations
  Kind kind;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string_view to_string(Violation::Kind k) {
  using K = Violation::Kind;
  switch (k) {
    case K::OffsetOutOfRange: return "OffsetOutOfRange";
    case K::EmptySpan: return "EmptySpan";
    case K::NoFragments: return "NoFragments";
    case K::FragmentOrder: return "FragmentOrder";
    case K::SurfaceMismatch: return "SurfaceMismatch";
    case K::DuplicateId: return "DuplicateId";
    case K::DuplicateDocId: return "DuplicateDocId";
    case K::InvalidText: return "InvalidText";
    case K::UnknownLabel: return "UnknownLabel";
    case K::UnknownQualifier: return "UnknownQualifier";
  }
  return "?";
}

inline std::string to_string(const Violation& v) {
  std::string s = v.doc_id;
  if (!v.entity_id.empty()) s += "\t" + v.entity_id;
  s += "\t";
  s += to_string(v.kind);
  if (!v.detail.empty()) s += "\t" + v.detail;
  return s;
}

inline std::vector<Violation> validate_document(const Document& doc,
                                                const SchemaDef* schema = nullptr) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  TextIndex index;
  try {
    index = TextIndex(doc.text);
  } catch (const Utf8Error& e) {
    out.push_back({doc.doc_id, "", K::InvalidText, e.what()});
    return out;
  }
  std::set<std::string, std::less<>> seen;
  for (const auto& e : doc.entities) {
    auto add = [&](K k, std::string detail = {}) {
      out.push_back({doc.doc_id, e.id, k, std::move(detail)});
    };
    if (!seen.insert(e.id).second) add(K::DuplicateId);
    if (schema) {
      if (!schema->has_base(e.label.base)) {
        add(K::UnknownLabel, e.label.base);
      } else if (e.label.qualifier && !schema->has_qualifier(e.label.base, *e.label.qualifier)) {
        add(K::UnknownQualifier, *e.label.qualifier);
      }
    }
    if (e.fragments.empty()) {
      add(K::NoFragments);
      continue;
    }
    bool spans_ok = true;
    for (std::size_t i = 0; i < e.fragments.size(); ++i) {
      const auto& f = e.fragments[i];
      if (f.start >= f.end) {
        add(K::EmptySpan, "[" + std::to_string(f.start) + "," + std::to_string(f.end) + ")");
        spans_ok = false;
      }
      if (f.end > index.size() || f.start > index.size()) {
        add(K::OffsetOutOfRange, "end " + std::to_string(f.end) + " > length " +
                                     std::to_string(index.size()));
        spans_ok = false;
      }
      if (i > 0 && e.fragments[i - 1].end > f.start) {
        add(K::FragmentOrder);
        spans_ok = false;
      }
    }
    if (spans_ok && join_slices(index, doc.text, e.fragments) != e.surface) {
      add(K::SurfaceMismatch, "'" + e.surface + "'");
    }
  }
  return out;
}

// Lists every broken Document/Entity invariant; empty iff the corpus is valid.
// With a schema, labels and qualifiers must also be registered.
inline std::vector<Violation> validate_corpus(const Corpus& corpus,
                                              const SchemaDef* schema = nullptr) {
  std::vector<Violation> out;
  std::set<std::string, std::less<>> ids;
  for (const auto& doc : corpus.documents) {
    if (!ids.insert(doc.doc_id).second) {
      out.push_back({doc.doc_id, "", Violation::Kind::DuplicateDocId, {}});
    }
    auto v = validate_document(doc, schema);
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return out;
}

}  // namespace wfner
