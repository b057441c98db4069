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
#include <vector>

#include "formgraph/features.hpp"
#include "formgraph/gnn.hpp"
#include "formgraph/graph.hpp"

namespace formgraph {

struct PipelineOptions {
  std::vector<EditThresholds> thresholds = {kEditSchedule.begin(), kEditSchedule.end()};
  double relationship_threshold = kRelationshipThreshold;
  // Hit@1 protocol: the first edit step merges and groups exactly as the
  // ground truth says; later steps only prune.
  bool force_gt_grouping = false;
};

struct PipelineOutput {
  std::vector<EdgeCandidate> proposals;  // selected edges
  FormGraph graph;                       // after finalize
  GraphResult result;
};

// Filters lines by confidence, proposes edges, then for every stage runs the
// GCN, applies its edit step and (between stages) reintroduces features;
// finally drops edges below the relationship threshold.
PipelineOutput run_pipeline(const Document& doc, const gnn::Model<float>& model, VisualFeatureProvider& provider,
                            const PipelineOptions& options = {});

// Writes one stage's predictions onto the graph: node features and class
// scores, edge features and the four edge scores.
void run_stage(FormGraph& graph, const gnn::Stage<float>& stage);

}  // namespace formgraph
