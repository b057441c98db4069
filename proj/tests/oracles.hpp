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

// Reference implementations written directly from the definitions with
// plain loops over std::vector<double>. They share no code with the library
// beyond the weight container, so agreement is evidence of correctness.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "formgraph/document.hpp"
#include "formgraph/graph.hpp"
#include "formgraph/weights.hpp"

namespace oracle {

using V = std::vector<double>;
using formgraph::BBox;
using formgraph::ModelWeights;

struct Dense {
  int rows = 0, cols = 0;
  V w;  // row-major
  V b;  // empty = no bias

  V apply(const V& x) const {
    V y(static_cast<std::size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r) {
      double s = b.empty() ? 0.0 : b[r];
      for (int c = 0; c < cols; ++c) s += w[static_cast<std::size_t>(r * cols + c)] * x[c];
      y[r] = s;
    }
    return y;
  }
};

inline Dense dense(const ModelWeights& w, const std::string& name, bool bias = true) {
  const auto& t = w.at(name + ".weight");
  Dense d;
  d.rows = static_cast<int>(t.shape[0]);
  d.cols = static_cast<int>(t.shape[1]);
  d.w.assign(t.data.begin(), t.data.end());
  if (bias) d.b.assign(w.at(name + ".bias").data.begin(), w.at(name + ".bias").data.end());
  return d;
}

inline V cat(const V& a, const V& b) {
  V out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline V add(const V& a, const V& b) {
  V out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

struct Mlp {
  Dense fc1, fc2;
  V gamma, beta;
  int groups = 8;

  V apply(const V& x) const {
    V h = fc1.apply(x);
    const std::size_t size = h.size() / static_cast<std::size_t>(groups);
    for (int g = 0; g < groups; ++g) {
      double mean = 0, var = 0;
      for (std::size_t i = 0; i < size; ++i) mean += h[g * size + i];
      mean /= static_cast<double>(size);
      for (std::size_t i = 0; i < size; ++i) var += (h[g * size + i] - mean) * (h[g * size + i] - mean);
      var /= static_cast<double>(size);
      for (std::size_t i = 0; i < size; ++i) {
        const std::size_t k = g * size + i;
        h[k] = gamma[k] * (h[k] - mean) / std::sqrt(var + 1e-5) + beta[k];
      }
    }
    for (double& v : h) v = std::max(v, 0.0);
    return fc2.apply(h);
  }
};

inline Mlp mlp(const ModelWeights& w, const std::string& name, int groups) {
  Mlp m{dense(w, name + ".fc1"), dense(w, name + ".fc2"), {}, {}, groups};
  m.gamma.assign(w.at(name + ".norm.gamma").data.begin(), w.at(name + ".norm.gamma").data.end());
  m.beta.assign(w.at(name + ".norm.beta").data.begin(), w.at(name + ".norm.beta").data.end());
  return m;
}

struct Block {
  Mlp edge, node;
  Dense q, k, v, o;
  int heads = 4;
};

struct StageResult {
  std::vector<V> nodes;
  std::vector<V> edges;  // per undirected edge
  std::vector<V> classes;
  std::vector<std::array<double, 4>> scores;
  std::vector<std::vector<std::vector<double>>> attention;  // last block: [node][head][item]
};

// One stage over undirected edges (a, b), each duplicated as a->b, b->a.
inline StageResult stage(const ModelWeights& w, int stage_index, int depth, int heads, int groups,
                         std::vector<V> nodes, const std::vector<std::pair<int, int>>& edges,
                         const std::vector<V>& edge_feats) {
  const std::string p = "stage" + std::to_string(stage_index);
  std::vector<std::pair<int, int>> dir;
  std::vector<V> e;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    dir.push_back(edges[i]);
    dir.push_back({edges[i].second, edges[i].first});
    e.push_back(edge_feats[i]);
    e.push_back(edge_feats[i]);
  }
  StageResult out;
  for (int bi = 0; bi < depth; ++bi) {
    const std::string bn = p + ".block" + std::to_string(bi);
    Block b{mlp(w, bn + ".edge_mlp", groups), mlp(w, bn + ".node_mlp", groups),
            dense(w, bn + ".attn.query", false), dense(w, bn + ".attn.key", false),
            dense(w, bn + ".attn.value", false), dense(w, bn + ".attn.output", false), heads};
    for (std::size_t k = 0; k < dir.size(); ++k) {
      e[k] = add(e[k], b.edge.apply(cat(cat(e[k], nodes[dir[k].first]), nodes[dir[k].second])));
    }
    std::vector<V> next(nodes.size());
    out.attention.assign(nodes.size(), {});
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      std::vector<std::size_t> in;
      for (std::size_t k = 0; k < dir.size(); ++k) {
        if (dir[k].second == static_cast<int>(v)) in.push_back(k);
      }
      V agg(static_cast<std::size_t>(b.o.rows), 0.0);
      if (!in.empty()) {
        const V q = b.q.apply(nodes[v]);
        const int hd = b.q.rows / heads;
        V mixed(static_cast<std::size_t>(b.q.rows), 0.0);
        out.attention[v].assign(heads, {});
        for (int h = 0; h < heads; ++h) {
          V logit;
          for (std::size_t k : in) {
            const V key = b.k.apply(e[k]);
            double s = 0;
            for (int i = 0; i < hd; ++i) s += q[h * hd + i] * key[h * hd + i];
            logit.push_back(s / std::sqrt(static_cast<double>(hd)));
          }
          const double m = *std::max_element(logit.begin(), logit.end());
          double z = 0;
          for (double& l : logit) z += (l = std::exp(l - m));
          for (std::size_t j = 0; j < in.size(); ++j) {
            const double a = logit[j] / z;
            out.attention[v][h].push_back(a);
            const V val = b.v.apply(e[in[j]]);
            for (int i = 0; i < hd; ++i) mixed[h * hd + i] += a * val[h * hd + i];
          }
        }
        agg = b.o.apply(mixed);
      }
      next[v] = add(nodes[v], b.node.apply(cat(agg, nodes[v])));
    }
    nodes = std::move(next);
  }
  const Dense nh = dense(w, p + ".node_head"), eh = dense(w, p + ".edge_head");
  for (const V& h : nodes) {
    V l = nh.apply(h);
    const double m = *std::max_element(l.begin(), l.end());
    double z = 0;
    for (double& x : l) z += (x = std::exp(x - m));
    for (double& x : l) x /= z;
    out.classes.push_back(l);
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const V& f = e[2 * i];
    const V& r = e[2 * i + 1];
    V avg(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) avg[j] = (f[j] + r[j]) / 2;
    out.edges.push_back(avg);
    const V lf = eh.apply(f), lr = eh.apply(r);
    std::array<double, 4> s{};
    for (int j = 0; j < 4; ++j) s[j] = (1 / (1 + std::exp(-lf[j])) + 1 / (1 + std::exp(-lr[j]))) / 2;
    out.scores.push_back(s);
  }
  out.nodes = std::move(nodes);
  return out;
}

// ---- metrics ---------------------------------------------------------------

inline double box_iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0;
  const double inter = iw * ih;
  return inter / ((a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter);
}

// Every permutation of pred lines tried against gt lines.
inline bool same_lines(std::vector<BBox> pred, const std::vector<BBox>& gt) {
  if (pred.size() != gt.size()) return false;
  std::vector<int> idx(pred.size());
  std::iota(idx.begin(), idx.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < gt.size() && ok; ++i) ok = box_iou(pred[idx[i]], gt[i]) >= 0.5;
    if (ok) return true;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return false;
}

struct Counts {
  int tp = 0, fp = 0, fn = 0;
};

// Maximum one-to-one matching by exhaustive search over GT choices per
// prediction (small inputs only).
inline Counts max_matching(int preds, int gts, const std::vector<std::vector<bool>>& ok) {
  int best = 0;
  std::vector<bool> used(static_cast<std::size_t>(gts), false);
  std::function<void(int, int)> go = [&](int p, int matched) {
    if (matched + (preds - p) <= best) return;  // cannot improve
    if (p == preds) {
      best = std::max(best, matched);
      return;
    }
    for (int g = 0; g < gts; ++g) {
      if (!used[g] && ok[p][g]) {
        used[g] = true;
        go(p + 1, matched + 1);
        used[g] = false;
      }
    }
    go(p + 1, matched);
  };
  go(0, 0);
  return {best, preds - best, gts - best};
}

inline std::vector<BBox> gt_entity_lines(const formgraph::Document& d, int e) {
  std::vector<BBox> out;
  for (int id : d.gt_entities[e].line_ids) out.push_back(d.gt_lines[id].bbox);
  return out;
}

inline Counts entity_counts(const formgraph::GraphResult& r, const formgraph::Document& d) {
  const int np = static_cast<int>(r.entities.size()), ng = static_cast<int>(d.gt_entities.size());
  std::vector<std::vector<bool>> ok(np, std::vector<bool>(ng));
  for (int p = 0; p < np; ++p) {
    for (int g = 0; g < ng; ++g) {
      ok[p][g] = r.entities[p].label == d.gt_entities[g].label && same_lines(r.entities[p].lines, gt_entity_lines(d, g));
    }
  }
  return max_matching(np, ng, ok);
}

inline Counts relationship_counts(const formgraph::GraphResult& r, const formgraph::Document& d) {
  std::map<int, const formgraph::PredictedEntity*> by_id;
  for (const auto& e : r.entities) by_id[e.id] = &e;
  const auto holds_first = [&](const formgraph::PredictedEntity& p, int g) {
    if (p.label != d.gt_entities[g].label) return false;
    const BBox& first = d.gt_lines[d.gt_entities[g].line_ids.front()].bbox;
    return std::any_of(p.lines.begin(), p.lines.end(), [&](const BBox& b) { return box_iou(b, first) >= 0.5; });
  };
  const int np = static_cast<int>(r.relationships.size()), ng = static_cast<int>(d.gt_relationships.size());
  std::vector<std::vector<bool>> ok(np, std::vector<bool>(ng));
  for (int p = 0; p < np; ++p) {
    const auto& a = *by_id.at(r.relationships[p].first);
    const auto& b = *by_id.at(r.relationships[p].second);
    for (int g = 0; g < ng; ++g) {
      const auto [x, y] = d.gt_relationships[g];
      ok[p][g] = (holds_first(a, x) && holds_first(b, y)) || (holds_first(a, y) && holds_first(b, x));
    }
  }
  return max_matching(np, ng, ok);
}

// GT structure rendered as a prediction: one entity per GT entity (id =
// index), GT relationships as edges, and Hit@1 scores of 1 on GT pairs.
inline formgraph::GraphResult gt_as_prediction(const formgraph::Document& d) {
  formgraph::GraphResult r;
  for (std::size_t e = 0; e < d.gt_entities.size(); ++e) {
    formgraph::PredictedEntity p;
    p.id = static_cast<int>(e);
    p.label = d.gt_entities[e].label;
    p.lines = gt_entity_lines(d, static_cast<int>(e));
    r.entities.push_back(p);
  }
  r.hit_scores.emplace();
  for (const auto& rel : d.gt_relationships) {
    r.relationships.push_back(rel);
    r.relationship_scores.push_back(1.0);
    (*r.hit_scores)[rel] = 1.0;
  }
  return r;
}

}  // namespace oracle
