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

#include "formgraph/gnn.hpp"

#include <cmath>
#include <string>

namespace formgraph::gnn {

template <typename T>
Vec<T> attention_aggregate(const Attention<T>& attn, const Vec<T>& query,
                           const std::vector<const Vec<T>*>& items, AttentionWeights* trace) {
  const Eigen::Index width = attn.output.rows();
  if (query.size() != attn.query.cols()) throw ShapeError("attention: query width mismatch");
  if (attn.heads < 1 || attn.query.rows() % attn.heads != 0) {
    throw ShapeError("attention: heads must divide the projection width");
  }
  if (trace) trace->assign(attn.heads, {});
  if (items.empty()) return Vec<T>::Zero(width);

  const Eigen::Index inner = attn.query.rows();
  const Eigen::Index head_dim = inner / attn.heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(head_dim));
  const Vec<T> q = attn.query * query;

  std::vector<Vec<T>> keys, values;
  keys.reserve(items.size());
  values.reserve(items.size());
  for (const Vec<T>* e : items) {
    if (e->size() != attn.key.cols()) throw ShapeError("attention: item width mismatch");
    keys.push_back(attn.key * *e);
    values.push_back(attn.value * *e);
  }

  Vec<T> mixed = Vec<T>::Zero(inner);
  Vec<T> logits(static_cast<Eigen::Index>(items.size()));
  for (int h = 0; h < attn.heads; ++h) {
    const auto qh = q.segment(h * head_dim, head_dim);
    for (std::size_t i = 0; i < items.size(); ++i) {
      logits[static_cast<Eigen::Index>(i)] = qh.dot(keys[i].segment(h * head_dim, head_dim)) * scale;
    }
    const Vec<T> weights = nn::softmax<T>(logits);
    auto out = mixed.segment(h * head_dim, head_dim);
    for (std::size_t i = 0; i < items.size(); ++i) {
      out += weights[static_cast<Eigen::Index>(i)] * values[i].segment(h * head_dim, head_dim);
    }
    if (trace) {
      auto& row = (*trace)[h];
      for (Eigen::Index i = 0; i < weights.size(); ++i) row.push_back(static_cast<double>(weights[i]));
    }
  }
  return attn.output * mixed;
}

template <typename T>
void gn_block_forward(const GnBlock<T>& block, std::vector<Vec<T>>& nodes,
                      const std::vector<DirectedEdge>& edges, std::vector<Vec<T>>& edge_feats) {
  const int n = static_cast<int>(nodes.size());
  if (edge_feats.size() != edges.size()) throw ShapeError("gn block: one feature per directed edge required");
  for (const auto& e : edges) {
    if (e.src < 0 || e.dst < 0 || e.src >= n || e.dst >= n) {
      throw UsageError("gn block: edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                       ") references a missing node");
    }
  }

  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Vec<T>& e = edge_feats[k];
    const Vec<T>& hs = nodes[edges[k].src];
    const Vec<T>& hd = nodes[edges[k].dst];
    Vec<T> input(e.size() + hs.size() + hd.size());
    input << e, hs, hd;
    edge_feats[k] = e + block.edge_mlp(input);
  }

  std::vector<std::vector<const Vec<T>*>> incoming(n);
  for (std::size_t k = 0; k < edges.size(); ++k) incoming[edges[k].dst].push_back(&edge_feats[k]);

  std::vector<Vec<T>> updated(n);
  for (int v = 0; v < n; ++v) {
    const Vec<T> agg = attention_aggregate(block.attention, nodes[v], incoming[v]);
    Vec<T> input(agg.size() + nodes[v].size());
    input << agg, nodes[v];
    updated[v] = nodes[v] + block.node_mlp(input);
  }
  nodes = std::move(updated);
}

template <typename T>
StageOutput<T> stage_forward(const Stage<T>& stage, const GraphTensors<T>& graph) {
  if (graph.edge_feats.size() != graph.edges.size()) throw ShapeError("stage: one feature per edge required");
  StageOutput<T> out;
  out.node_feats = graph.nodes;

  std::vector<DirectedEdge> directed;
  std::vector<Vec<T>> feats;
  directed.reserve(2 * graph.edges.size());
  feats.reserve(2 * graph.edges.size());
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const auto [a, b] = graph.edges[k];
    directed.push_back({a, b});
    directed.push_back({b, a});
    feats.push_back(graph.edge_feats[k]);
    feats.push_back(graph.edge_feats[k]);
  }

  for (const auto& block : stage.blocks) gn_block_forward(block, out.node_feats, directed, feats);

  for (const auto& h : out.node_feats) {
    const Vec<T> p = nn::softmax<T>(stage.node_head(h));
    out.class_scores.emplace_back(p.data(), p.data() + p.size());
  }
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const Vec<T>& forward = feats[2 * k];
    const Vec<T>& backward = feats[2 * k + 1];
    out.edge_feats.push_back((forward + backward) / T(2));
    const Vec<T> lf = stage.edge_head(forward);
    const Vec<T> lb = stage.edge_head(backward);
    if (lf.size() != kEdgeScoreCount) throw ShapeError("edge head must produce 4 outputs");
    std::array<T, kEdgeScoreCount> scores{};
    for (int i = 0; i < kEdgeScoreCount; ++i) {
      scores[i] = (nn::sigmoid(lf[i]) + nn::sigmoid(lb[i])) / T(2);
    }
    out.edge_scores.push_back(scores);
  }
  return out;
}

namespace {

template <typename T>
Mlp2<T> load_mlp(const ModelWeights& w, const std::string& prefix, int groups) {
  return Mlp2<T>::load(w, prefix, groups);
}

}  // namespace

template <typename T>
Model<T> Model<T>::from_weights(const ModelWeights& w, const ModelConfig& config) {
  w.check_manifest(config);
  Model m;
  m.config = config;
  m.proposal_fc1 = Linear<T>::load(w, "proposal.fc1");
  m.proposal_fc2 = Linear<T>::load(w, "proposal.fc2");
  m.init_node_transition = Linear<T>::load(w, "init.node_transition");
  m.init_edge_transition = Linear<T>::load(w, "init.edge_transition");
  for (std::size_t s = 0; s < config.stage_depths.size(); ++s) {
    const std::string stage = "stage" + std::to_string(s);
    Stage<T> st;
    if (s > 0) {
      st.node_transition = Linear<T>::load(w, stage + ".node_transition");
      st.edge_transition = Linear<T>::load(w, stage + ".edge_transition");
    }
    for (int b = 0; b < config.stage_depths[s]; ++b) {
      const std::string block = stage + ".block" + std::to_string(b);
      GnBlock<T> gb;
      gb.edge_mlp = load_mlp<T>(w, block + ".edge_mlp", config.norm_groups);
      gb.node_mlp = load_mlp<T>(w, block + ".node_mlp", config.norm_groups);
      gb.attention.heads = config.heads;
      gb.attention.query = nn::matrix_from<T>(w.at(block + ".attn.query.weight"));
      gb.attention.key = nn::matrix_from<T>(w.at(block + ".attn.key.weight"));
      gb.attention.value = nn::matrix_from<T>(w.at(block + ".attn.value.weight"));
      gb.attention.output = nn::matrix_from<T>(w.at(block + ".attn.output.weight"));
      st.blocks.push_back(std::move(gb));
    }
    st.node_head = Linear<T>::load(w, stage + ".node_head");
    st.edge_head = Linear<T>::load(w, stage + ".edge_head");
    m.stages.push_back(std::move(st));
  }
  return m;
}

template Vec<float> attention_aggregate(const Attention<float>&, const Vec<float>&,
                                        const std::vector<const Vec<float>*>&, AttentionWeights*);
template Vec<double> attention_aggregate(const Attention<double>&, const Vec<double>&,
                                         const std::vector<const Vec<double>*>&, AttentionWeights*);
template void gn_block_forward(const GnBlock<float>&, std::vector<Vec<float>>&, const std::vector<DirectedEdge>&,
                               std::vector<Vec<float>>&);
template void gn_block_forward(const GnBlock<double>&, std::vector<Vec<double>>&,
                               const std::vector<DirectedEdge>&, std::vector<Vec<double>>&);
template StageOutput<float> stage_forward(const Stage<float>&, const GraphTensors<float>&);
template StageOutput<double> stage_forward(const Stage<double>&, const GraphTensors<double>&);
template struct Model<float>;
template struct Model<double>;

}  // namespace formgraph::gnn
