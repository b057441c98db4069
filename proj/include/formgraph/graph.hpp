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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "formgraph/constants.hpp"
#include "formgraph/document.hpp"
#include "formgraph/proposal.hpp"

namespace formgraph {

// A text line inside a graph node. Merged lines keep every input line id
// they absorbed.
struct GraphLine {
  std::vector<int> source_ids;  // sorted input line ids
  BBox bbox;
  double confidence = 1.0;
  std::vector<double> class_scores;

  friend bool operator==(const GraphLine&, const GraphLine&) = default;
};

struct GraphNode {
  int id = 0;
  std::vector<GraphLine> lines;  // ordered by first source id
  std::vector<double> class_scores;
  std::vector<float> feat;
  std::vector<float> initial;  // cached pre-transition features
  bool modified = true;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  int a = 0;  // node ids, a < b
  int b = 0;
  std::vector<float> feat;
  std::vector<float> initial;
  std::array<double, kEdgeScoreCount> scores{};  // [prune, merge, group, relationship]
  bool modified = true;

  double score(EdgeScore which) const { return scores[static_cast<int>(which)]; }

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct EditRecord {
  int iteration = 0;
  std::string kind;        // "merge", "group" or "prune"
  std::vector<int> nodes;  // contracted node ids, or the pruned edge's endpoints
  int result = -1;         // id of the contracted node; -1 for prunes

  friend bool operator==(const EditRecord&, const EditRecord&) = default;
};

struct FormGraph {
  double image_width = 0;
  double image_height = 0;
  int num_classes = 0;
  std::vector<BBox> detected_boxes;  // every input line box; the "all text" mask
  std::vector<GraphNode> nodes;      // sorted by id
  std::vector<GraphEdge> edges;      // sorted by (a, b)
  std::vector<EditRecord> edit_log;

  const GraphNode* find_node(int id) const;
  const GraphEdge* find_edge(int a, int b) const;
  // All input line ids held by nodes, sorted.
  std::vector<int> line_ids() const;

  friend bool operator==(const FormGraph&, const FormGraph&) = default;
};

// One node per line, one edge per selected candidate. Throws UsageError when
// an edge names a line that is not present.
FormGraph init_graph(const Document& doc, const std::vector<TextLine>& lines,
                     const std::vector<EdgeCandidate>& selected);

// Sorts nodes and edges into canonical order.
void canonicalize(FormGraph& graph);

// Contracts each group of node ids into one node (id = smallest member).
// Lines are unioned into a single box when `fuse_lines` is set (merge) and
// kept distinct otherwise (group). Features and class scores are averaged,
// edges retargeted, duplicates averaged, self edges dropped.
void contract_nodes(FormGraph& graph, const std::vector<std::vector<int>>& groups, bool fuse_lines,
                    int iteration);

// Components of the edges whose `which` score is at least threshold.
std::vector<std::vector<int>> flagged_components(const FormGraph& graph, EdgeScore which, double threshold);

// Merge, then group, then prune, using the scores stored on the graph.
void apply_edit_step(FormGraph& graph, const EditThresholds& thresholds, int iteration);

// Drops edges whose relationship score is below threshold.
void finalize(FormGraph& graph, double relationship_threshold = kRelationshipThreshold);

// Throws std::logic_error when a structural invariant does not hold: sorted
// unique ids, no self or duplicate edges, edges between existing nodes,
// no input line held twice.
void check_graph(const FormGraph& graph);

struct PredictedEntity {
  int id = 0;
  int label = 0;
  std::vector<BBox> lines;
  std::vector<std::vector<int>> line_sources;
  double confidence = 0;
};

struct GraphResult {
  std::vector<PredictedEntity> entities;
  std::vector<EntityPair> relationships;  // entity ids
  std::vector<double> relationship_scores;
  // Relationship scores between GT entities (by GT index) under forced GT
  // grouping; present only when the pipeline ran in that mode.
  std::optional<std::map<EntityPair, double>> hit_scores;
};

// Entities are nodes (class = argmax of class scores); relationships are edges.
GraphResult extract_result(const FormGraph& graph);

// JSON with entities, relationships and the edit log.
std::string result_to_json(const FormGraph& graph, const ClassSet& classes,
                           const std::map<EntityPair, double>* hit_scores = nullptr);
GraphResult result_from_json(const std::string& text, const ClassSet& classes);

// Overlay drawing: entity boxes colored by class, relationship lines colored
// by verdict when ground truth is given.
std::string render_svg(const FormGraph& graph, const ClassSet& classes, const Document* ground_truth = nullptr);

}  // namespace formgraph
