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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "formgraph/document.hpp"
#include "formgraph/graph.hpp"

namespace formgraph {

// Predicted line id -> GT line id, for predictions that aligned.
struct LineAssignment {
  std::map<int, int> pred_to_gt;

  std::optional<int> gt_of(int pred_id) const;
  std::map<int, std::vector<int>> preds_by_gt() const;
};

// Each prediction goes to the GT line with the highest clipped IOU (lowest
// id on ties) when that IOU is at least 0.4.
LineAssignment assign_lines(const std::vector<TextLine>& predicted, const std::vector<TextLine>& gt);

enum class EdgeLabel { kPrune = 0, kMerge = 1, kGroup = 2, kRelationship = 3 };

const char* edge_label_name(EdgeLabel label);

struct EdgeLabels {
  std::vector<EdgeLabel> edges;              // parallel to graph.edges
  std::vector<std::optional<int>> node_class;  // parallel to graph.nodes; nullopt = ignored
};

// Label for two sets of predicted line ids: merge if they share a GT line,
// else group if they share a GT entity, else relationship if their GT
// entities are linked, else prune.
EdgeLabel pair_label(const std::vector<int>& lines_a, const std::vector<int>& lines_b,
                     const LineAssignment& assignment, const Document& doc);

EdgeLabels derive_labels(const FormGraph& graph, const LineAssignment& assignment, const Document& doc);

struct PairLabel {
  int a = 0;
  int b = 0;
  bool positive = false;
  EdgeLabel label = EdgeLabel::kPrune;
};

// Every unordered pair of `lines` (sorted by id); positive unless the pair
// would be pruned.
std::vector<PairLabel> proposal_labels(const std::vector<TextLine>& lines, const LineAssignment& assignment,
                                       const Document& doc);

// Binary target of each of the four edge heads for a label.
std::array<double, kEdgeScoreCount> edge_targets(EdgeLabel label);

struct BceResult {
  double mean = 0;
  std::vector<double> terms;  // one per non-ignored entry
  int clamped = 0;
};

// Mean of -[y ln s + (1 - y) ln(1 - s)] over entries whose ignore flag is
// false. Scores are clamped to [1e-7, 1 - 1e-7] with a warning.
BceResult bce_loss(const std::vector<double>& scores, const std::vector<double>& labels,
                   const std::vector<bool>& ignore = {});

// Per-class (multi-label) BCE over node class scores; ignored nodes skipped.
BceResult class_bce_loss(const std::vector<std::vector<double>>& class_scores,
                         const std::vector<std::optional<int>>& labels);

// Edge-head BCE over the four outputs of every edge.
BceResult edge_bce_loss(const FormGraph& graph, const EdgeLabels& labels);

// JSON dump of assignment, proposal labels and (optionally) graph labels.
std::string labels_to_json(const Document& doc, const std::vector<TextLine>& lines,
                           const LineAssignment& assignment, const std::vector<PairLabel>& pairs,
                           const FormGraph* graph, const EdgeLabels* graph_labels);

}  // namespace formgraph
