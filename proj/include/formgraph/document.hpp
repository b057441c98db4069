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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "formgraph/geometry.hpp"

namespace formgraph {

// Ordered label set of a dataset. Class scores are indexed in this order.
class ClassSet {
 public:
  ClassSet() = default;
  explicit ClassSet(std::vector<std::string> labels);

  static ClassSet funsd();  // header, question, answer, other
  static ClassSet naf();    // preprinted, input

  const std::vector<std::string>& labels() const { return labels_; }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int index) const { return labels_.at(index); }
  std::optional<int> find(std::string_view label) const;
  // Throws DataError for labels outside the set.
  int index_of(std::string_view label) const;

  std::vector<double> one_hot(int index) const;

  friend bool operator==(const ClassSet&, const ClassSet&) = default;

 private:
  std::vector<std::string> labels_;
};

struct TextLine {
  int id = 0;
  BBox bbox;
  double confidence = 1.0;
  std::vector<double> class_scores;
  std::optional<std::string> text;

  friend bool operator==(const TextLine&, const TextLine&) = default;
};

// One or more lines forming a semantic unit; line_ids index Document::gt_lines
// and are kept in reading order.
struct Entity {
  std::vector<int> line_ids;
  int label = 0;

  friend bool operator==(const Entity&, const Entity&) = default;
};

using EntityPair = std::pair<int, int>;

struct Document {
  std::string name;
  double image_width = 0;
  double image_height = 0;
  ClassSet class_set;
  std::vector<TextLine> lines;     // detector output (or GT lines)
  std::vector<TextLine> gt_lines;  // gt_lines[i].id == i
  std::vector<Entity> gt_entities;
  std::vector<EntityPair> gt_relationships;  // unordered, stored (min, max), sorted, unique
  std::vector<EntityPair> gt_links;          // directed (parent, child)

  friend bool operator==(const Document&, const Document&) = default;
};

// Throws DataError when a Document invariant is violated.
void validate_document(const Document& doc);

// Sorts and deduplicates pairs into (min, max) form. Self pairs are dropped.
std::vector<EntityPair> normalize_pairs(std::vector<EntityPair> pairs);

// Lines of `doc.lines` whose confidence passes the detection threshold.
std::vector<TextLine> confident_lines(const std::vector<TextLine>& lines);

// Per-entity index of each gt line; -1 for lines that belong to no entity.
std::vector<int> entity_of_gt_line(const Document& doc);

struct Word {
  std::string text;
  BBox bbox;
};

// Clusters one entity's words into rows (vertical overlap of at least half
// the smaller height, closed under connectivity). Rows come out top to bottom,
// words within a row left to right. Line ids are assigned from first_id.
std::vector<TextLine> group_words_into_lines(const std::vector<Word>& words, int label,
                                             const ClassSet& classes, int first_id = 0);

Document load_funsd(const std::filesystem::path& path);
Document parse_funsd(const std::string& json_text, std::string name = {});

Document load_naf(const std::filesystem::path& path);
Document parse_naf(const std::string& json_text, std::string name = {});

struct SynthParams {
  int rows = 4;
  int cols = 1;
  double multiline_prob = 0.0;
  double overseg_prob = 0.0;
  double jitter = 0.0;
};

// Deterministic grid of question/answer pairs. Throws UsageError on bad params.
Document synth_form(std::uint64_t seed, const SynthParams& params);

// Corpus with per-document rows/cols drawn from the seed; used for the
// desk-scale trainer and tests.
struct SynthCorpusParams {
  int min_rows = 3, max_rows = 8;
  int min_cols = 1, max_cols = 2;
  double multiline_prob = 0.3;
  double overseg_prob = 0.2;
  double jitter = 0.1;
};
std::vector<Document> synth_corpus(std::uint64_t seed, int count, const SynthCorpusParams& params = {});

// Self-describing JSON form of a Document.
std::string document_to_json(const Document& doc);
Document document_from_json(const std::string& text);
void save_document(const Document& doc, const std::filesystem::path& path);
// Dispatches on content: FUNSD ("form" key), NAF ("textBBs"), or native.
Document load_any_document(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace formgraph
