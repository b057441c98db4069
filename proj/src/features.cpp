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

#include "formgraph/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>

#include "formgraph/constants.hpp"
#include "formgraph/error.hpp"
#include "formgraph/rng.hpp"

namespace formgraph {
namespace {

std::int64_t tenth(double v) { return std::llround(v * 10.0); }

struct Fnv {
  std::uint64_t h = 1469598103934665603ull;
  void add(std::int64_t v) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xFF;
      h *= 1099511628211ull;
    }
  }
};

BBox padded_window(const BBox& box, double iw, double ih) {
  return {std::max(0.0, box.x1 - kContextPadding), std::max(0.0, box.y1 - kContextPadding),
          std::min(iw, box.x2 + kContextPadding), std::min(ih, box.y2 + kContextPadding)};
}

std::vector<BBox> boxes_of(std::span<const GraphLine> lines) {
  std::vector<BBox> out;
  for (const auto& l : lines) out.push_back(l.bbox);
  return out;
}

std::vector<double> mean_scores(std::span<const GraphLine> lines) {
  std::vector<double> out(lines.front().class_scores.size(), 0.0);
  for (const auto& l : lines) {
    if (l.class_scores.size() != out.size()) throw ShapeError("lines disagree on class count");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += l.class_scores[i];
  }
  for (double& v : out) v /= static_cast<double>(lines.size());
  return out;
}

nn::Vec<float> to_vec(const std::vector<float>& v) {
  return Eigen::Map<const nn::Vec<float>>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<float> to_std(const nn::Vec<float>& v) { return {v.data(), v.data() + v.size()}; }

std::vector<float> concat(const std::vector<float>& visual, const std::vector<double>& spatial) {
  std::vector<float> out(visual);
  for (double s : spatial) out.push_back(static_cast<float>(s));
  return out;
}

std::vector<float> checked_extract(VisualFeatureProvider& provider, const ProviderRequest& request) {
  std::vector<float> v = provider.extract(request);
  if (static_cast<int>(v.size()) != provider.output_size()) {
    throw ShapeError("provider returned " + std::to_string(v.size()) + " features, expected " +
                     std::to_string(provider.output_size()));
  }
  if (!std::all_of(v.begin(), v.end(), [](float f) { return std::isfinite(f); })) {
    throw DataError("provider returned non-finite features");
  }
  return v;
}

}  // namespace

std::uint64_t request_hash(const ProviderRequest& r) {
  Fnv h;
  for (double c : {r.window.x1, r.window.y1, r.window.x2, r.window.y2}) h.add(tenth(c));
  h.add(r.grid_w);
  h.add(r.grid_h);
  h.add(static_cast<std::int64_t>(r.masks.size()));
  for (const auto& channel : r.masks) {
    std::vector<std::array<std::int64_t, 4>> boxes;
    for (const auto& b : channel) boxes.push_back({tenth(b.x1), tenth(b.y1), tenth(b.x2), tenth(b.y2)});
    std::sort(boxes.begin(), boxes.end());
    h.add(static_cast<std::int64_t>(boxes.size()));
    for (const auto& b : boxes) {
      for (auto v : b) h.add(v);
    }
  }
  return h.h;
}

std::vector<float> StubProvider::extract(const ProviderRequest& request) {
  Rng rng(request_hash(request));
  std::vector<float> out(static_cast<std::size_t>(size_));
  for (float& v : out) v = static_cast<float>(rng.normal());
  return out;
}

std::string request_to_json(const ProviderRequest& r) {
  nlohmann::ordered_json j;
  const auto box = [](const BBox& b) { return nlohmann::ordered_json::array({b.x1, b.y1, b.x2, b.y2}); };
  j["window"] = box(r.window);
  j["grid"] = {r.grid_w, r.grid_h};
  j["masks"] = nlohmann::ordered_json::array();
  for (const auto& channel : r.masks) {
    auto c = nlohmann::ordered_json::array();
    for (const auto& b : channel) c.push_back(box(b));
    j["masks"].push_back(c);
  }
  return j.dump();
}

ProviderRequest request_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto box = [](const nlohmann::json& b) {
      return BBox{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
    };
    ProviderRequest r;
    r.window = box(j.at("window"));
    r.grid_w = j.at("grid").at(0).get<int>();
    r.grid_h = j.at("grid").at(1).get<int>();
    for (const auto& channel : j.at("masks")) {
      std::vector<BBox> boxes;
      for (const auto& b : channel) boxes.push_back(box(b));
      r.masks.push_back(std::move(boxes));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed provider request: ") + e.what());
  }
}

ProviderRequest node_context(std::span<const BBox> entity_boxes, std::span<const BBox> all_boxes,
                             double image_width, double image_height) {
  if (entity_boxes.empty()) throw UsageError("node_context: entity has no lines");
  ProviderRequest r;
  r.window = padded_window(union_bbox(entity_boxes), image_width, image_height);
  r.grid_w = r.grid_h = kNodeGrid;
  r.masks = {{all_boxes.begin(), all_boxes.end()}, {entity_boxes.begin(), entity_boxes.end()}};
  return r;
}

ProviderRequest edge_context(std::span<const BBox> boxes_a, std::span<const BBox> boxes_b,
                             std::span<const BBox> all_boxes, double image_width, double image_height) {
  if (boxes_a.empty() || boxes_b.empty()) throw UsageError("edge_context: entity has no lines");
  ProviderRequest r;
  r.window = padded_window(union_bbox(union_bbox(boxes_a), union_bbox(boxes_b)), image_width, image_height);
  r.grid_w = r.grid_h = kEdgeGrid;
  r.masks = {{all_boxes.begin(), all_boxes.end()},
             {boxes_a.begin(), boxes_a.end()},
             {boxes_b.begin(), boxes_b.end()}};
  return r;
}

std::vector<double> node_spatial(std::span<const GraphLine> lines, double iw, double ih) {
  if (lines.empty()) throw UsageError("node_spatial: entity has no lines");
  const BBox box = union_bbox(boxes_of(lines));
  double conf = 0;
  for (const auto& l : lines) conf += l.confidence;
  std::vector<double> out{conf / static_cast<double>(lines.size()), box.height() / ih, box.width() / iw};
  const auto scores = mean_scores(lines);
  out.insert(out.end(), scores.begin(), scores.end());
  return out;
}

std::vector<double> edge_spatial(std::span<const GraphLine> a, std::span<const GraphLine> b, double iw, double ih) {
  if (a.empty() || b.empty()) throw UsageError("edge_spatial: entity has no lines");
  const BBox ba = union_bbox(boxes_of(a));
  const BBox bb = union_bbox(boxes_of(b));
  std::vector<double> out{ba.height() / ih, bb.height() / ih, ba.width() / iw, bb.width() / iw};
  const auto sa = mean_scores(a), sb = mean_scores(b);
  out.insert(out.end(), sa.begin(), sa.end());
  out.insert(out.end(), sb.begin(), sb.end());
  const std::array<std::array<double, 4>, 4> corners = {{
      {ba.x1, ba.y1, bb.x1, bb.y1},
      {ba.x2, ba.y1, bb.x2, bb.y1},
      {ba.x1, ba.y2, bb.x1, bb.y2},
      {ba.x2, ba.y2, bb.x2, bb.y2},
  }};
  for (const auto& c : corners) out.push_back(std::hypot((c[2] - c[0]) / iw, (c[3] - c[1]) / ih));
  return out;
}

std::vector<float> node_initial_features(const FormGraph& graph, const GraphNode& node,
                                         VisualFeatureProvider& provider) {
  const auto boxes = boxes_of(node.lines);
  const auto request = node_context(boxes, graph.detected_boxes, graph.image_width, graph.image_height);
  return concat(checked_extract(provider, request), node_spatial(node.lines, graph.image_width, graph.image_height));
}

std::vector<float> edge_initial_features(const FormGraph& graph, const GraphEdge& edge,
                                         VisualFeatureProvider& provider) {
  const GraphNode* a = graph.find_node(edge.a);
  const GraphNode* b = graph.find_node(edge.b);
  if (!a || !b) throw UsageError("edge references a missing node");
  const auto request = edge_context(boxes_of(a->lines), boxes_of(b->lines), graph.detected_boxes,
                                    graph.image_width, graph.image_height);
  return concat(checked_extract(provider, request),
                edge_spatial(a->lines, b->lines, graph.image_width, graph.image_height));
}

void init_graph_features(FormGraph& graph, VisualFeatureProvider& provider, const gnn::Model<float>& model) {
  canonicalize(graph);
  for (auto& n : graph.nodes) {
    n.initial = node_initial_features(graph, n, provider);
    n.feat = to_std(model.init_node_transition(to_vec(n.initial)));
    n.modified = false;
  }
  for (auto& e : graph.edges) {
    e.initial = edge_initial_features(graph, e, provider);
    e.feat = to_std(model.init_edge_transition(to_vec(e.initial)));
    e.modified = false;
  }
}

void reintroduce_features(FormGraph& graph, VisualFeatureProvider& provider, const gnn::Stage<float>& stage) {
  if (!stage.node_transition || !stage.edge_transition) {
    throw UsageError("reintroduce_features: stage has no transition layers");
  }
  canonicalize(graph);
  const auto join = [](const std::vector<float>& feat, const std::vector<float>& initial) {
    std::vector<float> v(feat);
    v.insert(v.end(), initial.begin(), initial.end());
    return to_vec(v);
  };
  for (auto& n : graph.nodes) {
    if (n.modified || n.initial.empty()) n.initial = node_initial_features(graph, n, provider);
  }
  for (auto& e : graph.edges) {
    if (e.modified || e.initial.empty()) e.initial = edge_initial_features(graph, e, provider);
  }
  for (auto& n : graph.nodes) {
    n.feat = to_std((*stage.node_transition)(join(n.feat, n.initial)));
    n.modified = false;
  }
  for (auto& e : graph.edges) {
    e.feat = to_std((*stage.edge_transition)(join(e.feat, e.initial)));
    e.modified = false;
  }
}

}  // namespace formgraph
