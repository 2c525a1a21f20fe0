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

#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "test_util.hpp"
#include "wfner/corpus_io.hpp"
#include "wfner/stats.hpp"
#include "wfner/standoff.hpp"

namespace wfner {
namespace {

using testing::Ann;
using testing::make_doc;

const std::string kText = "Reads of BWA were aligned.";  // [9,12) = "BWA"

TEST(Unicode, OffsetsCountScalarValues) {
  const std::string s = "αβ BWA 🧬x";
  const TextIndex idx(s);
  EXPECT_EQ(idx.size(), 9u);
  EXPECT_EQ(idx.slice(s, 3, 6), "BWA");
  EXPECT_EQ(idx.slice(s, 7, 8), "🧬");
  EXPECT_EQ(idx.slice(s, 8, 9), "x");
  EXPECT_EQ(idx.slice(s, 6, 7), " ");
  EXPECT_EQ(idx.cp_offset(idx.byte_offset(8)), 8u);
}

TEST(Unicode, RejectsInvalidUtf8) {
  EXPECT_THROW(TextIndex(std::string("ab\xff")), Utf8Error);
  EXPECT_THROW(TextIndex(std::string("\xe2\x82")), Utf8Error);
}

TEST(Unicode, FoldCase) {
  EXPECT_EQ(fold_case(std::string("SAMtools")), "samtools");
  EXPECT_EQ(fold_case(std::string("ÉCOLE Ω")), "école ω");
}

TEST(Parse, SingleEntity) {
  const std::string text = "We used BWA here";
  const auto d = parse_standoff("T1\tTool 8 11\tBWA", text, "d1");
  ASSERT_EQ(d.entities.size(), 1u);
  EXPECT_EQ(d.entities[0].label.base, "Tool");
  EXPECT_EQ(d.entities[0].fragments, (std::vector<Span>{{8, 11}}));
  EXPECT_EQ(d.entities[0].surface, "BWA");
}

TEST(Parse, EmptyAnnotation) {
  const auto d = parse_standoff("", kText, "d1");
  EXPECT_TRUE(d.entities.empty());
  EXPECT_TRUE(d.sidecar.empty());
}

TEST(Parse, DiscontinuousEntity) {
  const std::string text = "RNA paired reads";
  const auto d = parse_standoff("T2\tData 0 3;11 16\tRNA reads\n", text, "d1");
  ASSERT_EQ(d.entities.size(), 1u);
  EXPECT_EQ(d.entities[0].fragments, (std::vector<Span>{{0, 3}, {11, 16}}));
  EXPECT_EQ(d.entities[0].surface, "RNA reads");
}

TEST(Parse, SurfaceMismatch) {
  const std::string text = "We used BWA here";
  try {
    parse_standoff("#1\tAnnotatorNotes T1\tx\nT1\tTool 8 11\tfoo\n", text, "d7");
    FAIL() << "expected StandoffError";
  } catch (const StandoffError& e) {
    EXPECT_EQ(e.kind(), StandoffError::Kind::SurfaceMismatch);
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.doc_id(), "d7");
  }
}

TEST(Parse, TypedErrors) {
  const std::string text = "We used BWA here";
  auto kind_of = [&](const std::string& ann) {
    try {
      parse_standoff(ann, text, "d");
    } catch (const StandoffError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error for: " << ann;
    return StandoffError::Kind::InvalidText;
  };
  using K = StandoffError::Kind;
  EXPECT_EQ(kind_of("T1\tTool 8 40\tBWA"), K::OffsetOutOfRange);
  EXPECT_EQ(kind_of("T1\tTool 8 11\tBWA\nT1\tTool 8 11\tBWA"), K::DuplicateId);
  EXPECT_EQ(kind_of("T1\tTool 8 11"), K::MalformedLine);
  EXPECT_EQ(kind_of("T1\tTool x 11\tBWA"), K::MalformedLine);
  EXPECT_EQ(kind_of("T1\tTool 11 8\tBWA"), K::MalformedLine);
  EXPECT_EQ(kind_of("Q1\tfoo"), K::MalformedLine);
  EXPECT_THROW(parse_standoff("", std::string("\xc3"), "d"), StandoffError);
}

TEST(Parse, NonAsciiOffsets) {
  const std::string text = "Die Gène-Analyse mit SAMtools";
  const auto d = parse_standoff("T1\tTool 21 29\tSAMtools\n", text, "d");
  EXPECT_EQ(d.entities[0].surface, "SAMtools");
}

TEST(Parse, QualifierForms) {
  const std::string text = "We used BWA and GATK and Picard";
  const auto d = parse_standoff(
      "T1\tTool_BioInfo 8 11\tBWA\n"
      "T2\tTool 16 20\tGATK\n"
      "T3\tTool 25 31\tPicard\n"
      "A1\tQualifier T2 Lab\n"
      "A2\tGeneral T3\n"
      "A3\tNegated T1\n",
      text, "d");
  ASSERT_EQ(d.entities.size(), 3u);
  EXPECT_EQ(d.entities[0].label, EntityLabel("Tool", "BioInfo"));
  EXPECT_EQ(d.entities[1].label, EntityLabel("Tool", "Lab"));
  EXPECT_EQ(d.entities[2].label, EntityLabel("Tool", "General"));
  EXPECT_EQ(d.sidecar, (std::vector<std::string>{"A3\tNegated T1"}));
}

TEST(Parse, SidecarKeptVerbatimAndCrlfAccepted) {
  const std::string text = "We used BWA here";
  const auto d = parse_standoff("T1\tTool 8 11\tBWA\r\nR1\tUses Arg1:T1 Arg2:T1\r\n", text, "d");
  EXPECT_EQ(d.sidecar, (std::vector<std::string>{"R1\tUses Arg1:T1 Arg2:T1"}));
}

TEST(Serialize, SingleEntity) {
  const auto d = make_doc("d", "We used BWA here", {{"Tool", {{8, 11}}}});
  EXPECT_EQ(serialize_standoff(d).ann, "T1\tTool 8 11\tBWA\n");
}

TEST(Serialize, EmptyDocument) {
  const auto d = make_doc("d", "text", {});
  EXPECT_EQ(serialize_standoff(d).ann, "");
  EXPECT_EQ(serialize_standoff(d).text, "text");
}

TEST(Serialize, ReadFilesAreReproducedByteForByte) {
  const std::string text = "We used BWA and GATK and Picard";
  const std::string ann =
      "T1\tTool_BioInfo 8 11\tBWA\n"
      "T2\tTool 16 20\tGATK\n"
      "T10\tTool 25 31\tPicard\n"
      "A1\tQualifier T2 Lab\n"
      "#1\tAnnotatorNotes T10\tcheck\n";
  EXPECT_EQ(serialize_standoff(parse_standoff(ann, text, "d")).ann, ann);
}

TEST(Serialize, SyntheticQualifierLine) {
  auto d = make_doc("d", "We used BWA here", {{EntityLabel("Tool", "Context"), {{8, 11}}}});
  d.sidecar.push_back("A4\tNegated T1");
  const auto ann = serialize_standoff(d).ann;
  EXPECT_EQ(ann, "T1\tTool 8 11\tBWA\nA5\tQualifier T1 Context\nA4\tNegated T1\n");
  EXPECT_EQ(parse_standoff(ann, d.text, "d"), d);
}

TEST(Serialize, RenumberIds) {
  const std::string text = "We used BWA and GATK";
  auto d = parse_standoff("T7\tTool 16 20\tGATK\nT3\tTool 8 11\tBWA\nR1\tNext Arg1:T3 Arg2:T7\n",
                          text, "d");
  const auto ann = serialize_standoff(d, {.renumber_ids = true}).ann;
  EXPECT_EQ(ann, "T1\tTool 8 11\tBWA\nT2\tTool 16 20\tGATK\nR1\tNext Arg1:T1 Arg2:T2\n");
}

TEST(Serialize, NewlinesInsideSurfaceStayOnOneLine) {
  const auto d = make_doc("d", "a\nb c", {{"Data", {{0, 3}}}});
  const auto ann = serialize_standoff(d).ann;
  EXPECT_EQ(ann, "T1\tData 0 3\ta b\n");
  EXPECT_EQ(parse_standoff(ann, d.text, "d"), d);
}

TEST(RoundTrip, RandomDocuments) {
  std::mt19937_64 rng(20240501);
  for (int i = 0; i < 1000; ++i) {
    const auto d = testing::random_document(rng, "doc" + std::to_string(i));
    ASSERT_TRUE(validate_document(d, &SchemaDef::biotoflow()).empty());
    const auto files = serialize_standoff(d);
    const auto back = parse_standoff(files.ann, files.text, d.doc_id);
    ASSERT_EQ(back, d) << files.ann;
    // and the output of a parsed document is a fixed point
    ASSERT_EQ(serialize_standoff(back).ann, files.ann);
  }
}

TEST(Validate, ValidCorpus) {
  const auto c = testing::make_corpus("c", {make_doc("d", "We used BWA", {{"Tool", {{8, 11}}}})});
  EXPECT_TRUE(validate_corpus(c).empty());
}

TEST(Validate, OffsetOutOfRange) {
  auto d = make_doc("d", "We used BWA", {{"Tool", {{8, 11}}}});
  d.entities[0].fragments[0].end = 30;
  const auto v = validate_corpus(testing::make_corpus("c", {d}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::OffsetOutOfRange);
  EXPECT_EQ(v[0].doc_id, "d");
  EXPECT_EQ(v[0].entity_id, "T1");
}

TEST(Validate, DuplicateIdsAndDocIds) {
  auto d = make_doc("d", "We used BWA", {{"Tool", {{8, 11}}}, {"Data", {{0, 2}}}});
  d.entities[1].id = d.entities[0].id;
  auto v = validate_corpus(testing::make_corpus("c", {d}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::DuplicateId);

  const auto ok = make_doc("d", "x", {});
  v = validate_corpus(testing::make_corpus("c", {ok, ok}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::DuplicateDocId);
}

TEST(Validate, SchemaAndSurfaceChecks) {
  auto d = make_doc("d", "We used BWA", {{"Tool", {{8, 11}}}, {"software", {{0, 2}}}});
  d.entities[0].surface = "BWX";
  EXPECT_EQ(validate_document(d).size(), 1u);
  const auto v = validate_document(d, &SchemaDef::biotoflow());
  ASSERT_EQ(v.size(), 2u);
  std::set<Violation::Kind> kinds{v[0].kind, v[1].kind};
  EXPECT_TRUE(kinds.count(Violation::Kind::UnknownLabel));
  EXPECT_TRUE(kinds.count(Violation::Kind::SurfaceMismatch));
}

TEST(Stats, SingleEntityHasNoNesting) {
  const auto c = testing::make_corpus("c", {make_doc("d", "We used BWA", {{"Tool", {{8, 11}}}})});
  const auto s = corpus_stats(c);
  EXPECT_EQ(s.entities, 1u);
  EXPECT_EQ(s.nesting_fraction, 0.0);
  EXPECT_EQ(s.labels.at("Tool"), 1u);
  EXPECT_EQ(s.tokens, 3u);
  EXPECT_EQ(s.annotated_tokens, 1u);
}

TEST(Stats, NestedEntitiesAndTokens) {
  // "GATK HaplotypeCaller (v4.1)"
  const std::string text = "GATK HaplotypeCaller (v4.1)";
  const auto c = testing::make_corpus(
      "c", {make_doc("d", text,
                     {{"Tool", {{0, 20}}}, {"Tool", {{5, 20}}}, {"Version", {{22, 26}}}})});
  const auto s = corpus_stats(c);
  EXPECT_EQ(s.nested_entities, 1u);
  EXPECT_DOUBLE_EQ(s.nesting_fraction, 1.0 / 3.0);
  // GATK HaplotypeCaller ( v4 . 1 )
  EXPECT_EQ(s.tokens, 7u);
  EXPECT_EQ(s.annotated_tokens, 5u);
  const auto j = s.to_json();
  EXPECT_EQ(j["labels"]["Tool"], 2);
  EXPECT_TRUE(j.contains("nesting_fraction"));
}

TEST(Stats, LabelCountsSumToEntities) {
  std::mt19937_64 rng(7);
  Corpus c;
  for (int i = 0; i < 50; ++i) c.documents.push_back(testing::random_document(rng, std::to_string(i)));
  const auto s = corpus_stats(c);
  std::size_t sum = 0;
  for (const auto& [l, n] : s.labels) sum += n;
  EXPECT_EQ(sum, s.entities);
  EXPECT_EQ(s.entities, c.entity_count());
  EXPECT_GE(s.nesting_fraction, 0.0);
  EXPECT_LE(s.nesting_fraction, 1.0);
}

TEST(CorpusIo, WriteReadRoundTrip) {
  testing::TempDir dir;
  std::mt19937_64 rng(99);
  Corpus c;
  c.name = "rt";
  for (int i = 0; i < 30; ++i) {
    c.documents.push_back(testing::random_document(rng, "doc" + std::to_string(i)));
  }
  c.documents[3].provenance = Provenance::silver;
  std::sort(c.documents.begin(), c.documents.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  write_corpus(c, dir.path());
  const auto back = read_corpus(dir.path(), 4);
  EXPECT_EQ(back, c);
  EXPECT_EQ(read_corpus(dir.path(), 1), back);
}

TEST(CorpusIo, MissingAnnMeansNoEntities) {
  testing::TempDir dir;
  write_file_atomic(dir / "a.txt", "plain text");
  const auto c = read_corpus(dir.path());
  ASSERT_EQ(c.documents.size(), 1u);
  EXPECT_EQ(c.documents[0].doc_id, "a");
  EXPECT_TRUE(c.documents[0].entities.empty());
}

TEST(CorpusIo, ErrorsCarryDocContext) {
  testing::TempDir dir;
  write_file_atomic(dir / "a.txt", "plain text");
  write_file_atomic(dir / "b.txt", "plain text");
  write_file_atomic(dir / "b.ann", "T1\tTool 0 5\tplaix\n");
  try {
    read_corpus(dir.path(), 2);
    FAIL();
  } catch (const StandoffError& e) {
    EXPECT_EQ(e.doc_id(), "b");
    EXPECT_NE(std::string(e.what()).find("b.ann:1"), std::string::npos);
  }
}

TEST(Parallel, ResultsIndependentOfJobs) {
  std::vector<int> a(1000), b(1000);
  parallel_for(a.size(), 1, [&](std::size_t i) { a[i] = int(i * i % 97); });
  parallel_for(b.size(), 8, [&](std::size_t i) { b[i] = int(i * i % 97); });
  EXPECT_EQ(a, b);
  EXPECT_THROW(parallel_for(10, 4, [](std::size_t i) {
                 if (i == 3) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

}  // namespace
}  // namespace wfner
