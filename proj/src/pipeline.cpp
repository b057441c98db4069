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

#include "formgraph/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "formgraph/error.hpp"
#include "formgraph/log.hpp"
#include "formgraph/supervision.hpp"

namespace formgraph {
namespace {

nn::Vec<float> to_vec(const std::vector<float>& v) {
  return Eigen::Map<const nn::Vec<float>>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<float> to_std(const nn::Vec<float>& v) { return {v.data(), v.data() + v.size()}; }

// Node ids grouped by the GT key `key(line id)` of their lines; nodes whose
// lines disagree or have no key stay alone.
template <typename Key>
std::vector<std::vector<int>> groups_by(const FormGraph& graph, Key key) {
  std::map<int, std::vector<int>> buckets;
  for (const auto& n : graph.nodes) {
    std::set<int> keys;
    bool unknown = false;
    for (const auto& l : n.lines) {
      for (int id : l.source_ids) {
        const int k = key(id);
        if (k < 0) unknown = true;
        keys.insert(k);
      }
    }
    if (!unknown && keys.size() == 1) buckets[*keys.begin()].push_back(n.id);
  }
  std::vector<std::vector<int>> out;
  for (auto& [k, ids] : buckets) {
    if (ids.size() > 1) out.push_back(std::move(ids));
  }
  return out;
}

std::map<EntityPair, double> entity_scores(const FormGraph& graph, const LineAssignment& assignment,
                                           const std::vector<int>& owner) {
  std::map<int, int> entity_of_node;
  for (const auto& n : graph.nodes) {
    std::set<int> ents;
    bool unknown = false;
    for (const auto& l : n.lines) {
      for (int id : l.source_ids) {
        const auto g = assignment.gt_of(id);
        if (!g || owner.at(*g) < 0) {
          unknown = true;
        } else {
          ents.insert(owner.at(*g));
        }
      }
    }
    if (!unknown && ents.size() == 1) entity_of_node[n.id] = *ents.begin();
  }
  std::map<EntityPair, double> out;
  for (const auto& e : graph.edges) {
    const auto a = entity_of_node.find(e.a), b = entity_of_node.find(e.b);
    if (a == entity_of_node.end() || b == entity_of_node.end() || a->second == b->second) continue;
    const EntityPair key{std::min(a->second, b->second), std::max(a->second, b->second)};
    const double s = e.score(EdgeScore::kRelationship);
    auto [it, inserted] = out.emplace(key, s);
    if (!inserted) it->second = std::max(it->second, s);
  }
  return out;
}

}  // namespace

void run_stage(FormGraph& graph, const gnn::Stage<float>& stage) {
  canonicalize(graph);
  gnn::GraphTensors<float> t;
  std::map<int, int> index;
  for (const auto& n : graph.nodes) {
    index[n.id] = static_cast<int>(t.nodes.size());
    t.nodes.push_back(to_vec(n.feat));
  }
  for (const auto& e : graph.edges) {
    t.edges.emplace_back(index.at(e.a), index.at(e.b));
    t.edge_feats.push_back(to_vec(e.feat));
  }
  const auto out = gnn::stage_forward(stage, t);
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    auto& n = graph.nodes[i];
    n.feat = to_std(out.node_feats[i]);
    n.class_scores.assign(out.class_scores[i].begin(), out.class_scores[i].end());
  }
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    auto& e = graph.edges[k];
    e.feat = to_std(out.edge_feats[k]);
    for (int h = 0; h < kEdgeScoreCount; ++h) e.scores[h] = out.edge_scores[k][h];
  }
}

PipelineOutput run_pipeline(const Document& doc, const gnn::Model<float>& model, VisualFeatureProvider& provider,
                            const PipelineOptions& options) {
  if (model.config.num_classes != doc.class_set.size()) {
    throw UsageError("model predicts " + std::to_string(model.config.num_classes) + " classes but the document has " +
                     std::to_string(doc.class_set.size()));
  }
  if (provider.output_size() != model.config.visual_size) {
    throw UsageError("provider yields " + std::to_string(provider.output_size()) +
                     " features but the model expects " + std::to_string(model.config.visual_size));
  }
  if (options.thresholds.size() < model.stages.size()) {
    throw UsageError("need one set of edit thresholds per stage");
  }
  for (const auto& t : options.thresholds) {
    for (double v : {t.merge, t.group, t.prune}) {
      if (!(v > 0 && v < 1)) throw UsageError("edit thresholds must lie in (0, 1)");
    }
  }

  PipelineOutput out;
  const auto lines = confident_lines(doc.lines);
  const ProposalMlp<float> mlp{model.proposal_fc1, model.proposal_fc2};
  out.proposals = select_edges(score_pairs(doc, lines, mlp));
  FormGraph graph = init_graph(doc, lines, out.proposals);
  log::debug(doc.name + ": " + std::to_string(graph.nodes.size()) + " nodes, " +
             std::to_string(graph.edges.size()) + " proposed edges");

  std::optional<LineAssignment> assignment;
  std::vector<int> owner;
  if (options.force_gt_grouping) {
    assignment = assign_lines(lines, doc.gt_lines);
    owner = entity_of_gt_line(doc);
  }

  init_graph_features(graph, provider, model);
  constexpr double kNever = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < model.stages.size(); ++s) {
    const int iteration = static_cast<int>(s);
    if (s > 0) reintroduce_features(graph, provider, model.stages[s]);
    run_stage(graph, model.stages[s]);
    EditThresholds t = options.thresholds[s];
    if (options.force_gt_grouping) {
      if (s == 0) {
        const auto gt_line = [&](int id) { return assignment->gt_of(id).value_or(-1); };
        const auto gt_entity = [&](int id) {
          const auto g = assignment->gt_of(id);
          return g ? owner.at(*g) : -1;
        };
        contract_nodes(graph, groups_by(graph, gt_line), true, iteration);
        contract_nodes(graph, groups_by(graph, gt_entity), false, iteration);
      }
      t.merge = t.group = kNever;
    }
    apply_edit_step(graph, t, iteration);
    log::debug(doc.name + ": stage " + std::to_string(s) + " leaves " + std::to_string(graph.nodes.size()) +
               " nodes, " + std::to_string(graph.edges.size()) + " edges");
  }

  if (options.force_gt_grouping) {
    out.result.hit_scores = entity_scores(graph, *assignment, owner);
  }
  finalize(graph, options.relationship_threshold);
  check_graph(graph);
  auto hit = std::move(out.result.hit_scores);
  out.result = extract_result(graph);
  out.result.hit_scores = std::move(hit);
  out.graph = std::move(graph);
  return out;
}

}  // namespace formgraph
