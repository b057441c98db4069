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

#include "formgraph/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "formgraph/error.hpp"

namespace formgraph {

const GraphNode* FormGraph::find_node(int id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const GraphNode& n, int v) { return n.id < v; });
  return it != nodes.end() && it->id == id ? &*it : nullptr;
}

const GraphEdge* FormGraph::find_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::pair(a, b),
                             [](const GraphEdge& e, std::pair<int, int> v) { return std::pair(e.a, e.b) < v; });
  return it != edges.end() && it->a == a && it->b == b ? &*it : nullptr;
}

std::vector<int> FormGraph::line_ids() const {
  std::vector<int> ids;
  for (const auto& n : nodes) {
    for (const auto& l : n.lines) ids.insert(ids.end(), l.source_ids.begin(), l.source_ids.end());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

FormGraph init_graph(const Document& doc, const std::vector<TextLine>& lines,
                     const std::vector<EdgeCandidate>& selected) {
  FormGraph g;
  g.image_width = doc.image_width;
  g.image_height = doc.image_height;
  g.num_classes = doc.class_set.size();
  for (const TextLine& l : lines) {
    g.detected_boxes.push_back(l.bbox);
    GraphNode n;
    n.id = l.id;
    n.lines.push_back({{l.id}, l.bbox, l.confidence, l.class_scores});
    n.class_scores = l.class_scores;
    g.nodes.push_back(std::move(n));
  }
  std::sort(g.nodes.begin(), g.nodes.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  for (std::size_t i = 1; i < g.nodes.size(); ++i) {
    if (g.nodes[i].id == g.nodes[i - 1].id) throw UsageError("init_graph: duplicate line id");
  }
  std::set<std::pair<int, int>> seen;
  for (const EdgeCandidate& c : selected) {
    const int a = std::min(c.a, c.b), b = std::max(c.a, c.b);
    if (!g.find_node(a) || !g.find_node(b)) {
      throw UsageError("init_graph: edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") references a missing line");
    }
    if (a == b || !seen.insert({a, b}).second) continue;
    GraphEdge e;
    e.a = a;
    e.b = b;
    g.edges.push_back(std::move(e));
  }
  canonicalize(g);
  return g;
}

void canonicalize(FormGraph& graph) {
  std::sort(graph.nodes.begin(), graph.nodes.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  for (auto& e : graph.edges) {
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(graph.edges.begin(), graph.edges.end(),
            [](const auto& x, const auto& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
}

namespace {

template <typename V>
std::vector<V> mean_of(const std::vector<const std::vector<V>*>& parts) {
  if (parts.empty() || parts.front()->empty()) return {};
  const std::size_t n = parts.front()->size();
  std::vector<double> acc(n, 0.0);
  for (const auto* p : parts) {
    if (p->size() != n) return {};
    for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>((*p)[i]);
  }
  std::vector<V> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<V>(acc[i] / static_cast<double>(parts.size()));
  return out;
}

int find_root(std::map<int, int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

GraphLine fuse(const std::vector<const GraphLine*>& lines) {
  GraphLine out;
  std::vector<const std::vector<double>*> scores;
  double conf = 0;
  out.bbox = lines.front()->bbox;
  for (const GraphLine* l : lines) {
    out.source_ids.insert(out.source_ids.end(), l->source_ids.begin(), l->source_ids.end());
    out.bbox = union_bbox(out.bbox, l->bbox);
    conf += l->confidence;
    scores.push_back(&l->class_scores);
  }
  std::sort(out.source_ids.begin(), out.source_ids.end());
  out.confidence = conf / static_cast<double>(lines.size());
  out.class_scores = mean_of(scores);
  return out;
}

}  // namespace

void contract_nodes(FormGraph& graph, const std::vector<std::vector<int>>& groups, bool fuse_lines,
                    int iteration) {
  canonicalize(graph);
  std::map<int, int> rep;
  for (const auto& n : graph.nodes) rep[n.id] = n.id;

  std::vector<std::vector<int>> active;
  std::set<int> claimed;
  for (auto group : groups) {
    std::sort(group.begin(), group.end());
    group.erase(std::unique(group.begin(), group.end()), group.end());
    for (int id : group) {
      if (!graph.find_node(id)) throw UsageError("contract: unknown node " + std::to_string(id));
      if (!claimed.insert(id).second) throw UsageError("contract: node in two groups");
    }
    if (group.size() < 2) continue;
    for (int id : group) rep[id] = group.front();
    active.push_back(std::move(group));
  }
  if (active.empty()) return;
  std::sort(active.begin(), active.end());

  std::set<int> contracted;
  for (const auto& group : active) contracted.insert(group.begin(), group.end());
  std::vector<GraphNode> nodes;
  std::set<int> changed;
  for (const auto& n : graph.nodes) {
    if (!contracted.count(n.id)) nodes.push_back(n);
  }
  for (const auto& group : active) {
    GraphNode merged;
    merged.id = group.front();
    std::vector<const GraphLine*> lines;
    std::vector<const std::vector<double>*> class_scores;
    std::vector<const std::vector<float>*> feats;
    for (int id : group) {
      const GraphNode* n = graph.find_node(id);
      for (const auto& l : n->lines) lines.push_back(&l);
      class_scores.push_back(&n->class_scores);
      feats.push_back(&n->feat);
    }
    if (fuse_lines) {
      merged.lines.push_back(fuse(lines));
    } else {
      for (const GraphLine* l : lines) merged.lines.push_back(*l);
      std::sort(merged.lines.begin(), merged.lines.end(),
                [](const GraphLine& x, const GraphLine& y) { return x.source_ids.front() < y.source_ids.front(); });
    }
    merged.class_scores = mean_of(class_scores);
    merged.feat = mean_of(feats);
    merged.modified = true;
    changed.insert(merged.id);
    graph.edit_log.push_back({iteration, fuse_lines ? "merge" : "group", group, merged.id});
    nodes.push_back(std::move(merged));
  }

  std::map<std::pair<int, int>, std::vector<const GraphEdge*>> buckets;
  for (const auto& e : graph.edges) {
    int a = rep[e.a], b = rep[e.b];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    buckets[{a, b}].push_back(&e);
  }
  std::vector<GraphEdge> edges;
  for (const auto& [key, parts] : buckets) {
    const bool touched = changed.count(key.first) || changed.count(key.second);
    if (!touched) {
      edges.push_back(*parts.front());
      continue;
    }
    GraphEdge e;
    e.a = key.first;
    e.b = key.second;
    std::vector<const std::vector<float>*> feats;
    for (const GraphEdge* p : parts) feats.push_back(&p->feat);
    e.feat = mean_of(feats);
    for (int k = 0; k < kEdgeScoreCount; ++k) {
      double s = 0;
      for (const GraphEdge* p : parts) s += p->scores[k];
      e.scores[k] = s / static_cast<double>(parts.size());
    }
    e.modified = true;
    edges.push_back(std::move(e));
  }

  graph.nodes = std::move(nodes);
  graph.edges = std::move(edges);
  canonicalize(graph);
}

std::vector<std::vector<int>> flagged_components(const FormGraph& graph, EdgeScore which, double threshold) {
  std::map<int, int> parent;
  for (const auto& n : graph.nodes) parent[n.id] = n.id;
  for (const auto& e : graph.edges) {
    if (e.score(which) >= threshold) {
      const int ra = find_root(parent, e.a), rb = find_root(parent, e.b);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  std::map<int, std::vector<int>> comps;
  for (const auto& n : graph.nodes) comps[find_root(parent, n.id)].push_back(n.id);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : comps) {
    if (members.size() >= 2) out.push_back(std::move(members));
  }
  return out;
}

void apply_edit_step(FormGraph& graph, const EditThresholds& thresholds, int iteration) {
  canonicalize(graph);
  contract_nodes(graph, flagged_components(graph, EdgeScore::kMerge, thresholds.merge), true, iteration);
  contract_nodes(graph, flagged_components(graph, EdgeScore::kGroup, thresholds.group), false, iteration);
  std::vector<GraphEdge> kept;
  for (auto& e : graph.edges) {
    if (e.score(EdgeScore::kPrune) >= thresholds.prune) {
      graph.edit_log.push_back({iteration, "prune", {e.a, e.b}, -1});
    } else {
      kept.push_back(std::move(e));
    }
  }
  graph.edges = std::move(kept);
}

void finalize(FormGraph& graph, double relationship_threshold) {
  std::erase_if(graph.edges, [&](const GraphEdge& e) {
    return e.score(EdgeScore::kRelationship) < relationship_threshold;
  });
}

void check_graph(const FormGraph& graph) {
  for (std::size_t i = 1; i < graph.nodes.size(); ++i) {
    if (graph.nodes[i - 1].id >= graph.nodes[i].id) throw std::logic_error("node ids not sorted/unique");
  }
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const auto& e = graph.edges[i];
    if (e.a >= e.b) throw std::logic_error("self edge or unordered edge");
    if (!graph.find_node(e.a) || !graph.find_node(e.b)) throw std::logic_error("dangling edge");
    if (i > 0 && std::pair(graph.edges[i - 1].a, graph.edges[i - 1].b) >= std::pair(e.a, e.b)) {
      throw std::logic_error("duplicate or unsorted edge");
    }
  }
  const auto ids = graph.line_ids();
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw std::logic_error("line held twice");
  for (const auto& n : graph.nodes) {
    if (n.lines.empty()) throw std::logic_error("node without lines");
  }
}

GraphResult extract_result(const FormGraph& graph) {
  GraphResult r;
  for (const auto& n : graph.nodes) {
    PredictedEntity e;
    e.id = n.id;
    if (!n.class_scores.empty()) {
      e.label = static_cast<int>(std::max_element(n.class_scores.begin(), n.class_scores.end()) -
                                 n.class_scores.begin());
      e.confidence = n.class_scores[e.label];
    }
    for (const auto& l : n.lines) {
      e.lines.push_back(l.bbox);
      e.line_sources.push_back(l.source_ids);
    }
    r.entities.push_back(std::move(e));
  }
  for (const auto& e : graph.edges) {
    r.relationships.emplace_back(e.a, e.b);
    r.relationship_scores.push_back(e.score(EdgeScore::kRelationship));
  }
  return r;
}

}  // namespace formgraph
