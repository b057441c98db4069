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

#include "formgraph/document.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "formgraph/constants.hpp"
#include "formgraph/error.hpp"

namespace formgraph {

ClassSet::ClassSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw UsageError("class set must not be empty");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw UsageError("class set labels must be unique");
}

ClassSet ClassSet::funsd() { return ClassSet({"header", "question", "answer", "other"}); }
ClassSet ClassSet::naf() { return ClassSet({"preprinted", "input"}); }

std::optional<int> ClassSet::find(std::string_view label) const {
  for (int i = 0; i < size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

int ClassSet::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw DataError("unknown label '" + std::string(label) + "'");
}

std::vector<double> ClassSet::one_hot(int index) const {
  std::vector<double> v(labels_.size(), 0.0);
  v.at(index) = 1.0;
  return v;
}

namespace {

void validate_line(const TextLine& line, const ClassSet& classes, const char* what) {
  const std::string where = std::string(what) + " line " + std::to_string(line.id);
  if (!line.bbox.valid()) throw DataError(where + ": invalid box");
  if (!(line.confidence >= 0.0 && line.confidence <= 1.0)) {
    throw DataError(where + ": confidence outside [0,1]");
  }
  if (static_cast<int>(line.class_scores.size()) != classes.size()) {
    throw DataError(where + ": class score count does not match class set");
  }
  const double sum = std::accumulate(line.class_scores.begin(), line.class_scores.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-6) throw DataError(where + ": class scores do not sum to 1");
}

}  // namespace

void validate_document(const Document& doc) {
  if (!(doc.image_width > 0 && doc.image_height > 0)) {
    throw DataError("document '" + doc.name + "': image dimensions must be positive");
  }
  for (const TextLine& l : doc.lines) validate_line(l, doc.class_set, "input");
  for (std::size_t i = 0; i < doc.gt_lines.size(); ++i) {
    validate_line(doc.gt_lines[i], doc.class_set, "gt");
    if (doc.gt_lines[i].id != static_cast<int>(i)) throw DataError("gt line ids must be 0..n-1");
  }
  const int n_lines = static_cast<int>(doc.gt_lines.size());
  const int n_entities = static_cast<int>(doc.gt_entities.size());
  for (const Entity& e : doc.gt_entities) {
    if (e.line_ids.empty()) throw DataError("entity without lines");
    std::set<int> seen;
    for (int id : e.line_ids) {
      if (id < 0 || id >= n_lines) throw DataError("entity line id out of range");
      if (!seen.insert(id).second) throw DataError("duplicate line id in entity");
    }
    if (e.label < 0 || e.label >= doc.class_set.size()) throw DataError("entity label out of range");
  }
  for (const auto& [a, b] : doc.gt_relationships) {
    if (a < 0 || b < 0 || a >= n_entities || b >= n_entities) {
      throw DataError("relationship endpoint out of range");
    }
    if (a == b) throw DataError("self relationship");
  }
  for (const auto& [p, c] : doc.gt_links) {
    if (p < 0 || c < 0 || p >= n_entities || c >= n_entities || p == c) {
      throw DataError("invalid directed link");
    }
  }
}

std::vector<EntityPair> normalize_pairs(std::vector<EntityPair> pairs) {
  std::vector<EntityPair> out;
  out.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    if (a == b) continue;
    out.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<TextLine> confident_lines(const std::vector<TextLine>& lines) {
  std::vector<TextLine> out;
  std::copy_if(lines.begin(), lines.end(), std::back_inserter(out),
               [](const TextLine& l) { return l.confidence >= kDetectionThreshold; });
  return out;
}

std::vector<int> entity_of_gt_line(const Document& doc) {
  std::vector<int> owner(doc.gt_lines.size(), -1);
  for (std::size_t e = 0; e < doc.gt_entities.size(); ++e) {
    for (int id : doc.gt_entities[e].line_ids) owner.at(id) = static_cast<int>(e);
  }
  return owner;
}

namespace {

bool same_row(const BBox& a, const BBox& b) {
  const double overlap = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double min_h = std::min(a.height(), b.height());
  if (min_h <= 0) return overlap >= 0;
  return overlap >= 0.5 * min_h;
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

std::vector<TextLine> group_words_into_lines(const std::vector<Word>& words, int label,
                                             const ClassSet& classes, int first_id) {
  const int n = static_cast<int>(words.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (same_row(words[i].bbox, words[j].bbox)) {
        parent[find_root(parent, i)] = find_root(parent, j);
      }
    }
  }

  std::vector<std::vector<int>> rows;
  std::vector<int> row_of_root(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find_root(parent, i);
    if (row_of_root[r] < 0) {
      row_of_root[r] = static_cast<int>(rows.size());
      rows.emplace_back();
    }
    rows[row_of_root[r]].push_back(i);
  }

  struct Row {
    BBox box;
    std::vector<int> members;
  };
  std::vector<Row> ordered;
  for (auto& members : rows) {
    std::stable_sort(members.begin(), members.end(),
                     [&](int a, int b) { return words[a].bbox.x1 < words[b].bbox.x1; });
    BBox box = words[members.front()].bbox;
    for (int m : members) box = union_bbox(box, words[m].bbox);
    ordered.push_back({box, members});
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const Row& a, const Row& b) {
    if (a.box.y1 != b.box.y1) return a.box.y1 < b.box.y1;
    return a.box.x1 < b.box.x1;
  });

  std::vector<TextLine> lines;
  for (const Row& row : ordered) {
    TextLine line;
    line.id = first_id + static_cast<int>(lines.size());
    line.bbox = row.box;
    line.confidence = 1.0;
    line.class_scores = classes.one_hot(label);
    std::string text;
    for (int m : row.members) {
      if (!text.empty()) text += ' ';
      text += words[m].text;
    }
    line.text = std::move(text);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw UsageError("write failed for '" + path.string() + "'");
}

}  // namespace formgraph
