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

// Random inputs shared by unit tests and the acceptance runner.

#include <algorithm>
#include <set>
#include <vector>

#include "formgraph/gnn.hpp"
#include "formgraph/graph.hpp"
#include "formgraph/rng.hpp"

namespace scenario {

using formgraph::Rng;

// Graph of 2..max_nodes single-line nodes with random boxes, features,
// edges and edge scores. Node ids are sparse to exercise id handling.
inline formgraph::FormGraph random_graph(Rng& rng, int max_nodes = 12, int feat = 4) {
  formgraph::FormGraph g;
  g.image_width = 1000;
  g.image_height = 1000;
  g.num_classes = 3;
  const int n = rng.uniform_int(2, max_nodes);
  std::vector<int> ids;
  int id = rng.uniform_int(0, 3);
  for (int i = 0; i < n; ++i, id += rng.uniform_int(1, 3)) ids.push_back(id);
  for (int v : ids) {
    formgraph::GraphNode node;
    node.id = v;
    const double x = rng.uniform(0, 900), y = rng.uniform(0, 950);
    node.lines.push_back({{v}, {x, y, x + rng.uniform(10, 100), y + rng.uniform(5, 40)}, rng.uniform(0.5, 1), {}});
    for (int c = 0; c < g.num_classes; ++c) node.class_scores.push_back(rng.uniform());
    node.lines.front().class_scores = node.class_scores;
    for (int f = 0; f < feat; ++f) node.feat.push_back(static_cast<float>(rng.normal()));
    g.detected_boxes.push_back(node.lines.front().bbox);
    g.nodes.push_back(std::move(node));
  }
  const double density = rng.uniform(0.1, 0.7);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (!rng.bernoulli(density)) continue;
      formgraph::GraphEdge e;
      e.a = ids[i];
      e.b = ids[j];
      for (int f = 0; f < feat; ++f) e.feat.push_back(static_cast<float>(rng.normal()));
      for (double& s : e.scores) s = rng.uniform();
      g.edges.push_back(std::move(e));
    }
  }
  return g;
}

inline formgraph::EditThresholds random_thresholds(Rng& rng) {
  return {rng.uniform(0.3, 0.99), rng.uniform(0.3, 0.99), rng.uniform(0.3, 0.99)};
}

// Sorted list of every input line id held by the graph's nodes.
inline std::vector<int> held_lines(const formgraph::FormGraph& g) {
  std::vector<int> out;
  for (const auto& n : g.nodes) {
    for (const auto& l : n.lines) out.insert(out.end(), l.source_ids.begin(), l.source_ids.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Random undirected simple graph over n nodes with feature width f.
inline formgraph::gnn::GraphTensors<double> random_tensors(Rng& rng, int n, int f, double density = 0.5) {
  formgraph::gnn::GraphTensors<double> t;
  for (int v = 0; v < n; ++v) {
    formgraph::nn::Vec<double> x(f);
    for (int i = 0; i < f; ++i) x[i] = rng.normal();
    t.nodes.push_back(x);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (!rng.bernoulli(density)) continue;
      if (rng.bernoulli(0.5)) {
        t.edges.emplace_back(a, b);
      } else {
        t.edges.emplace_back(b, a);
      }
      formgraph::nn::Vec<double> x(f);
      for (int i = 0; i < f; ++i) x[i] = rng.normal();
      t.edge_feats.push_back(x);
    }
  }
  return t;
}

}  // namespace scenario
