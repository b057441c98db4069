// Copyright 2026 The FormGraph Authors.
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

#include <filesystem>
#include <set>

#include "formgraph/document.hpp"
#include "formgraph/error.hpp"

using namespace formgraph;

namespace {

const char* kFunsd = R"({"form": [
  {"id": 0, "label": "question", "box": [10, 10, 90, 20], "linking": [[0, 1]],
   "words": [{"text": "Name:", "box": [10, 10, 50, 20]}, {"text": "first", "box": [55, 11, 90, 20]}]},
  {"id": 1, "label": "answer", "box": [100, 10, 200, 45], "linking": [[0, 1]],
   "words": [{"text": "Jane", "box": [100, 10, 140, 20]}, {"text": "Doe", "box": [100, 30, 140, 45]}]},
  {"id": 2, "label": "header", "box": [10, 60, 80, 70], "linking": [], "words": []}
]})";

const char* kNaf = R"({
  "textBBs": [{"id": "t0", "type": "text", "poly_points": [[0, 0], [100, 0], [100, 20], [0, 20]]},
              {"id": "t1", "type": "textTable", "poly_points": [[0, 50], [100, 50], [100, 70], [0, 70]]}],
  "fieldBBs": [{"id": "f0", "type": "field", "poly_points": [[200, 0], [300, 0], [300, 20], [200, 20]]}],
  "pairs": [["t0", "f0"], ["t1", "f0"]],
  "samePairs": []
})";

}  // namespace

TEST(ClassSet, Orders) {
  EXPECT_EQ(ClassSet::funsd().labels(), (std::vector<std::string>{"header", "question", "answer", "other"}));
  EXPECT_EQ(ClassSet::naf().labels(), (std::vector<std::string>{"preprinted", "input"}));
  EXPECT_THROW(ClassSet::funsd().index_of("table"), DataError);
}

TEST(Words, StackedWordsBecomeTwoLines) {
  const std::vector<Word> words = {{"b", {0, 20, 10, 30}}, {"a", {0, 0, 10, 10}}};
  const auto lines = group_words_into_lines(words, 0, ClassSet::funsd());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(*lines[0].text, "a");
  EXPECT_EQ(*lines[1].text, "b");
}

TEST(Words, OverlappingWordsJoinLeftToRight) {
  const std::vector<Word> words = {{"world", {60, 1, 100, 11}}, {"hello", {0, 0, 50, 10}}};
  const auto lines = group_words_into_lines(words, 1, ClassSet::funsd());
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(*lines[0].text, "hello world");
  EXPECT_EQ(lines[0].bbox, (BBox{0, 0, 100, 11}));
}

TEST(Funsd, ParsesEntitiesLinesAndLinks) {
  const Document d = parse_funsd(kFunsd, "f");
  ASSERT_EQ(d.gt_entities.size(), 3u);
  EXPECT_EQ(d.gt_entities[0].line_ids.size(), 1u);
  EXPECT_EQ(d.gt_entities[1].line_ids.size(), 2u);  // two stacked words
  EXPECT_EQ(d.gt_entities[2].line_ids.size(), 1u);  // box stands in for missing words
  EXPECT_EQ(d.gt_relationships, (std::vector<EntityPair>{{0, 1}}));
  EXPECT_EQ(d.gt_links, (std::vector<EntityPair>{{0, 1}}));
  EXPECT_EQ(d.lines, d.gt_lines);
  EXPECT_GE(d.image_width, 200);
}

TEST(Funsd, Errors) {
  EXPECT_THROW(parse_funsd("{", "x"), DataError);
  EXPECT_THROW(parse_funsd(R"({"form": [{"id": 0, "label": "bogus", "box": [0,0,1,1]}]})"), DataError);
  EXPECT_THROW(parse_funsd(R"({"form": [{"id": 0, "label": "other", "box": [0,0,1,1], "linking": [[0, 9]]}]})"),
               DataError);
}

TEST(Naf, ScalesAndDropsTables) {
  const Document d = parse_naf(kNaf, "n");
  ASSERT_EQ(d.gt_entities.size(), 2u);
  EXPECT_EQ(d.gt_entities[0].label, 0);
  EXPECT_EQ(d.gt_entities[1].label, 1);
  EXPECT_DOUBLE_EQ(d.gt_lines[0].bbox.x2, 100 * 0.52);
  EXPECT_EQ(d.gt_relationships, (std::vector<EntityPair>{{0, 1}}));
}

TEST(Naf, UnknownPairIdIsDataError) {
  EXPECT_THROW(parse_naf(R"({"textBBs": [], "fieldBBs": [], "pairs": [["a", "b"]]})"), DataError);
}

TEST(Synth, Deterministic) {
  SynthParams p;
  p.rows = 3;
  p.cols = 2;
  p.multiline_prob = 0.5;
  p.overseg_prob = 0.5;
  p.jitter = 0.2;
  EXPECT_EQ(synth_form(9, p), synth_form(9, p));
  EXPECT_NE(synth_form(9, p), synth_form(10, p));
}

TEST(Synth, OversegmentationDoublesLines) {
  SynthParams p;
  p.rows = 4;
  p.overseg_prob = 1.0;
  const Document d = synth_form(1, p);
  EXPECT_EQ(d.lines.size(), 2 * d.gt_lines.size());
}

TEST(Synth, StructureIsQuestionAnswerPairs) {
  SynthParams p;
  p.rows = 5;
  p.cols = 2;
  const Document d = synth_form(2, p);
  EXPECT_EQ(d.gt_entities.size(), 20u);
  EXPECT_EQ(d.gt_relationships.size(), 10u);
  for (const auto& [parent, child] : d.gt_links) {
    EXPECT_EQ(d.class_set.label(d.gt_entities[parent].label), "question");
    EXPECT_EQ(d.class_set.label(d.gt_entities[child].label), "answer");
  }
  EXPECT_NO_THROW(validate_document(d));
}

TEST(Synth, BadParams) {
  SynthParams p;
  p.rows = 0;
  EXPECT_THROW(synth_form(1, p), UsageError);
}

TEST(DocumentJson, RoundTrip) {
  SynthParams p;
  p.rows = 3;
  p.multiline_prob = 1;
  p.jitter = 0.3;
  const Document d = synth_form(4, p);
  EXPECT_EQ(document_from_json(document_to_json(d)), d);
}

TEST(DocumentJson, LoadDispatchesOnContent) {
  const auto dir = std::filesystem::temp_directory_path() / "formgraph_doc_test";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "f.json", kFunsd);
  write_text_file(dir / "n.json", kNaf);
  EXPECT_EQ(load_any_document(dir / "f.json").class_set, ClassSet::funsd());
  EXPECT_EQ(load_any_document(dir / "n.json").class_set, ClassSet::naf());
  EXPECT_THROW(load_any_document(dir / "missing.json"), DataError);
  std::filesystem::remove_all(dir);
}

TEST(ConfidentLines, FiltersAtHalf) {
  std::vector<TextLine> lines = {{0, {0, 0, 1, 1}, 0.5, {}, {}}, {1, {0, 0, 1, 1}, 0.49, {}, {}}};
  const auto kept = confident_lines(lines);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].id, 0);
}
