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

#include "formgraph/supervision.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "formgraph/constants.hpp"
#include "formgraph/error.hpp"
#include "formgraph/log.hpp"

namespace formgraph {

std::optional<int> LineAssignment::gt_of(int pred_id) const {
  auto it = pred_to_gt.find(pred_id);
  if (it == pred_to_gt.end()) return std::nullopt;
  return it->second;
}

std::map<int, std::vector<int>> LineAssignment::preds_by_gt() const {
  std::map<int, std::vector<int>> out;
  for (const auto& [p, g] : pred_to_gt) out[g].push_back(p);
  return out;
}

LineAssignment assign_lines(const std::vector<TextLine>& predicted, const std::vector<TextLine>& gt) {
  LineAssignment a;
  for (const TextLine& p : predicted) {
    int best = -1;
    double best_iou = 0;
    for (const TextLine& g : gt) {
      const double v = clipped_iou(g.bbox, p.bbox);
      if (best < 0 || v > best_iou || (v == best_iou && g.id < best)) {
        best = g.id;
        best_iou = v;
      }
    }
    if (best >= 0 && best_iou >= kAlignmentThreshold) a.pred_to_gt[p.id] = best;
  }
  return a;
}

const char* edge_label_name(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::kPrune: return "prune";
    case EdgeLabel::kMerge: return "merge";
    case EdgeLabel::kGroup: return "group";
    case EdgeLabel::kRelationship: return "relationship";
  }
  return "?";
}

namespace {

struct Mapped {
  std::set<int> gt_lines;
  std::set<int> entities;
  bool complete = true;  // every line aligned to a GT line inside some entity
};

Mapped map_lines(const std::vector<int>& ids, const LineAssignment& assignment, const std::vector<int>& owner) {
  Mapped m;
  for (int id : ids) {
    const auto g = assignment.gt_of(id);
    if (!g) {
      m.complete = false;
      continue;
    }
    m.gt_lines.insert(*g);
    const int e = owner.at(*g);
    if (e < 0) {
      m.complete = false;
    } else {
      m.entities.insert(e);
    }
  }
  return m;
}

bool intersects(const std::set<int>& a, const std::set<int>& b) {
  return std::any_of(a.begin(), a.end(), [&](int v) { return b.count(v) != 0; });
}

EdgeLabel label_of(const Mapped& a, const Mapped& b, const Document& doc) {
  if (intersects(a.gt_lines, b.gt_lines)) return EdgeLabel::kMerge;
  if (intersects(a.entities, b.entities)) return EdgeLabel::kGroup;
  for (int ea : a.entities) {
    for (int eb : b.entities) {
      if (std::binary_search(doc.gt_relationships.begin(), doc.gt_relationships.end(),
                             EntityPair{std::min(ea, eb), std::max(ea, eb)})) {
        return EdgeLabel::kRelationship;
      }
    }
  }
  return EdgeLabel::kPrune;
}

std::vector<int> node_line_ids(const GraphNode& n) {
  std::vector<int> ids;
  for (const auto& l : n.lines) ids.insert(ids.end(), l.source_ids.begin(), l.source_ids.end());
  return ids;
}

}  // namespace

EdgeLabel pair_label(const std::vector<int>& lines_a, const std::vector<int>& lines_b,
                     const LineAssignment& assignment, const Document& doc) {
  const auto owner = entity_of_gt_line(doc);
  return label_of(map_lines(lines_a, assignment, owner), map_lines(lines_b, assignment, owner), doc);
}

EdgeLabels derive_labels(const FormGraph& graph, const LineAssignment& assignment, const Document& doc) {
  const auto owner = entity_of_gt_line(doc);
  std::map<int, Mapped> mapped;
  EdgeLabels out;
  for (const auto& n : graph.nodes) {
    const Mapped m = map_lines(node_line_ids(n), assignment, owner);
    if (m.complete && m.entities.size() == 1) {
      out.node_class.push_back(doc.gt_entities[*m.entities.begin()].label);
    } else {
      out.node_class.push_back(std::nullopt);
    }
    mapped[n.id] = m;
  }
  for (const auto& e : graph.edges) out.edges.push_back(label_of(mapped.at(e.a), mapped.at(e.b), doc));
  return out;
}

std::vector<PairLabel> proposal_labels(const std::vector<TextLine>& lines, const LineAssignment& assignment,
                                       const Document& doc) {
  const auto owner = entity_of_gt_line(doc);
  std::vector<int> ids;
  for (const auto& l : lines) ids.push_back(l.id);
  std::sort(ids.begin(), ids.end());
  std::vector<Mapped> mapped;
  for (int id : ids) mapped.push_back(map_lines({id}, assignment, owner));

  std::vector<PairLabel> out;
  out.reserve(ids.size() * (ids.size() - (ids.empty() ? 0 : 1)) / 2);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const EdgeLabel l = label_of(mapped[i], mapped[j], doc);
      out.push_back({ids[i], ids[j], l != EdgeLabel::kPrune, l});
    }
  }
  return out;
}

std::array<double, kEdgeScoreCount> edge_targets(EdgeLabel label) {
  std::array<double, kEdgeScoreCount> t{};
  t[static_cast<int>(label)] = 1.0;
  return t;
}

BceResult bce_loss(const std::vector<double>& scores, const std::vector<double>& labels,
                   const std::vector<bool>& ignore) {
  if (scores.size() != labels.size() || (!ignore.empty() && ignore.size() != scores.size())) {
    throw ShapeError("bce_loss: scores, labels and ignore mask must have equal length");
  }
  BceResult r;
  double sum = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!ignore.empty() && ignore[i]) continue;
    double s = scores[i];
    if (!std::isfinite(s)) throw UsageError("bce_loss: non-finite score");
    if (s < kBceClamp || s > 1.0 - kBceClamp) {
      s = std::clamp(s, kBceClamp, 1.0 - kBceClamp);
      ++r.clamped;
    }
    const double y = labels[i];
    const double term = -(y * std::log(s) + (1.0 - y) * std::log(1.0 - s));
    r.terms.push_back(term);
    sum += term;
  }
  if (r.clamped > 0) log::warn("bce_loss: clamped " + std::to_string(r.clamped) + " saturated score(s)");
  r.mean = r.terms.empty() ? 0.0 : sum / static_cast<double>(r.terms.size());
  return r;
}

BceResult class_bce_loss(const std::vector<std::vector<double>>& class_scores,
                         const std::vector<std::optional<int>>& labels) {
  if (class_scores.size() != labels.size()) throw ShapeError("class_bce_loss: one label per node required");
  std::vector<double> s, y;
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (!labels[n]) continue;
    for (std::size_t c = 0; c < class_scores[n].size(); ++c) {
      s.push_back(class_scores[n][c]);
      y.push_back(static_cast<int>(c) == *labels[n] ? 1.0 : 0.0);
    }
  }
  return bce_loss(s, y);
}

BceResult edge_bce_loss(const FormGraph& graph, const EdgeLabels& labels) {
  if (labels.edges.size() != graph.edges.size()) throw ShapeError("edge_bce_loss: one label per edge required");
  std::vector<double> s, y;
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const auto t = edge_targets(labels.edges[k]);
    for (int h = 0; h < kEdgeScoreCount; ++h) {
      s.push_back(graph.edges[k].scores[h]);
      y.push_back(t[h]);
    }
  }
  return bce_loss(s, y);
}

std::string labels_to_json(const Document& doc, const std::vector<TextLine>& lines,
                           const LineAssignment& assignment, const std::vector<PairLabel>& pairs,
                           const FormGraph* graph, const EdgeLabels* graph_labels) {
  nlohmann::ordered_json j;
  j["document"] = doc.name;
  j["assignment"] = nlohmann::ordered_json::array();
  for (const auto& l : lines) {
    const auto g = assignment.gt_of(l.id);
    j["assignment"].push_back({{"line", l.id}, {"gt_line", g ? nlohmann::ordered_json(*g) : nullptr}});
  }
  j["proposal_labels"] = nlohmann::ordered_json::array();
  for (const auto& p : pairs) {
    j["proposal_labels"].push_back({{"a", p.a}, {"b", p.b}, {"positive", p.positive},
                                    {"label", edge_label_name(p.label)}});
  }
  if (graph && graph_labels) {
    j["edge_labels"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < graph->edges.size(); ++k) {
      j["edge_labels"].push_back({{"a", graph->edges[k].a},
                                  {"b", graph->edges[k].b},
                                  {"label", edge_label_name(graph_labels->edges[k])}});
    }
    j["node_labels"] = nlohmann::ordered_json::array();
    for (std::size_t n = 0; n < graph->nodes.size(); ++n) {
      const auto& c = graph_labels->node_class[n];
      j["node_labels"].push_back(
          {{"node", graph->nodes[n].id}, {"class", c ? nlohmann::ordered_json(doc.class_set.label(*c)) : nullptr}});
    }
  }
  return j.dump(1) + "\n";
}

}  // namespace formgraph
