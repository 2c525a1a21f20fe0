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
#include <string>
#include <vector>

#include "json.hpp"
#include "wfner/io.hpp"
#include "wfner/parallel.hpp"
#include "wfner/standoff.hpp"

namespace wfner {

// A corpus directory holds `<id>.txt` / `<id>.ann` pairs plus an optional
// `corpus.json` ({"name": ..., "provenance": {"<id>": "gold|silver|converted"}}).
// A missing .ann file means the document has no annotations.
inline constexpr const char* kCorpusMetaFile = "corpus.json";

inline Corpus read_corpus(const std::filesystem::path& dir, unsigned jobs = 1,
                          const SchemaDef& schema = SchemaDef::biotoflow()) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a corpus directory: " + dir.string());

  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());

  Corpus corpus;
  corpus.name = fs::weakly_canonical(dir).filename().string();
  nlohmann::json meta;
  if (fs::exists(dir / kCorpusMetaFile)) {
    try {
      meta = nlohmann::json::parse(read_file(dir / kCorpusMetaFile));
    } catch (const nlohmann::json::exception& e) {
      throw IoError((dir / kCorpusMetaFile).string() + ": " + e.what());
    }
    if (meta.contains("name")) corpus.name = meta["name"].get<std::string>();
  }

  corpus.documents.resize(ids.size());
  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    const auto ann_path = dir / (ids[i] + ".ann");
    const auto text = read_file(dir / (ids[i] + ".txt"));
    const auto ann = fs::exists(ann_path) ? read_file(ann_path) : std::string();
    corpus.documents[i] = parse_standoff(ann, text, ids[i], schema);
  });

  if (meta.contains("provenance")) {
    for (auto& doc : corpus.documents) {
      if (auto it = meta["provenance"].find(doc.doc_id); it != meta["provenance"].end()) {
        auto p = parse_provenance(it->get<std::string>());
        if (!p) throw IoError("bad provenance for " + doc.doc_id + " in " + kCorpusMetaFile);
        doc.provenance = *p;
      }
    }
  }
  return corpus;
}

inline void write_corpus(const Corpus& corpus, const std::filesystem::path& dir,
                         SerializeOptions opts = {}) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json meta;
  meta["name"] = corpus.name;
  meta["provenance"] = nlohmann::ordered_json::object();
  for (const auto& doc : corpus.documents) {
    auto files = serialize_standoff(doc, opts);
    write_file_atomic(dir / (doc.doc_id + ".txt"), files.text);
    write_file_atomic(dir / (doc.doc_id + ".ann"), files.ann);
    meta["provenance"][doc.doc_id] = std::string(to_string(doc.provenance));
  }
  write_file_atomic(dir / kCorpusMetaFile, meta.dump(2) + "\n");
}

}  // namespace wfner
