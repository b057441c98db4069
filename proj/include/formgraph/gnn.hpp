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
#include <optional>
#include <utility>
#include <vector>

#include "formgraph/nn.hpp"
#include "formgraph/weights.hpp"

namespace formgraph::gnn {

using nn::Linear;
using nn::Mat;
using nn::Mlp2;
using nn::Vec;

// Multi-head attention with the node as query and its incoming edges as
// keys and values. Projections carry no bias.
template <typename T>
struct Attention {
  int heads = kAttentionHeads;
  Mat<T> query, key, value, output;
};

// Softmax weights of one aggregation, indexed [head][item].
using AttentionWeights = std::vector<std::vector<double>>;

// Empty item sets aggregate to the zero vector.
template <typename T>
Vec<T> attention_aggregate(const Attention<T>& attn, const Vec<T>& query,
                           const std::vector<const Vec<T>*>& items, AttentionWeights* trace = nullptr);

template <typename T>
struct GnBlock {
  Mlp2<T> edge_mlp;  // [edge; source; destination] -> feature
  Mlp2<T> node_mlp;  // [aggregate; node] -> feature
  Attention<T> attention;
};

template <typename T>
struct Stage {
  std::vector<GnBlock<T>> blocks;
  Linear<T> node_head;
  Linear<T> edge_head;  // [prune, merge, group, relationship]
  // Absent on the first stage, which uses the model's initial transitions.
  std::optional<Linear<T>> node_transition;
  std::optional<Linear<T>> edge_transition;
};

template <typename T>
struct Model {
  ModelConfig config;
  Linear<T> proposal_fc1, proposal_fc2;
  Linear<T> init_node_transition, init_edge_transition;
  std::vector<Stage<T>> stages;

  // Checks the manifest first; throws WeightsError on any mismatch.
  static Model from_weights(const ModelWeights& weights, const ModelConfig& config);
};

// Node features plus undirected edges with one feature vector each.
template <typename T>
struct GraphTensors {
  std::vector<Vec<T>> nodes;
  std::vector<std::pair<int, int>> edges;
  std::vector<Vec<T>> edge_feats;
};

struct DirectedEdge {
  int src;
  int dst;
};

// One GN block over directed edges, updated in place: edges first from
// their endpoints, then nodes from attention over their incoming edges.
template <typename T>
void gn_block_forward(const GnBlock<T>& block, std::vector<Vec<T>>& nodes,
                      const std::vector<DirectedEdge>& edges, std::vector<Vec<T>>& edge_feats);

template <typename T>
struct StageOutput {
  std::vector<Vec<T>> node_feats;
  std::vector<Vec<T>> edge_feats;  // per undirected edge, both directions averaged
  std::vector<std::vector<T>> class_scores;
  std::vector<std::array<T, kEdgeScoreCount>> edge_scores;
};

// Duplicates each undirected edge (a, b) as a->b and b->a, runs the blocks,
// then averages features and sigmoid head outputs of the two directions.
template <typename T>
StageOutput<T> stage_forward(const Stage<T>& stage, const GraphTensors<T>& graph);

extern template Vec<float> attention_aggregate(const Attention<float>&, const Vec<float>&,
                                               const std::vector<const Vec<float>*>&, AttentionWeights*);
extern template Vec<double> attention_aggregate(const Attention<double>&, const Vec<double>&,
                                                const std::vector<const Vec<double>*>&, AttentionWeights*);
extern template void gn_block_forward(const GnBlock<float>&, std::vector<Vec<float>>&,
                                      const std::vector<DirectedEdge>&, std::vector<Vec<float>>&);
extern template void gn_block_forward(const GnBlock<double>&, std::vector<Vec<double>>&,
                                      const std::vector<DirectedEdge>&, std::vector<Vec<double>>&);
extern template StageOutput<float> stage_forward(const Stage<float>&, const GraphTensors<float>&);
extern template StageOutput<double> stage_forward(const Stage<double>&, const GraphTensors<double>&);
extern template struct Model<float>;
extern template struct Model<double>;

}  // namespace formgraph::gnn
