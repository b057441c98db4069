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

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "formgraph/gnn.hpp"
#include "formgraph/graph.hpp"

namespace formgraph {

// What a visual feature provider is asked to pool: a context window, the
// pooling grid, and box-set mask channels ([all, entity] for nodes,
// [all, entity A, entity B] for edges).
struct ProviderRequest {
  BBox window;
  int grid_w = 0;
  int grid_h = 0;
  std::vector<std::vector<BBox>> masks;

  friend bool operator==(const ProviderRequest&, const ProviderRequest&) = default;
};

// Extension point standing in for the ROI pooling + CNN feature extractor.
// Implementations must be deterministic and return finite vectors of
// output_size() entries; extract() may be called from several threads.
class VisualFeatureProvider {
 public:
  virtual ~VisualFeatureProvider() = default;
  virtual std::vector<float> extract(const ProviderRequest& request) = 0;
  virtual int output_size() const = 0;
};

// Seeded by a hash of the request (coordinates rounded to 0.1 px); returns
// standard-normal entries.
class StubProvider : public VisualFeatureProvider {
 public:
  explicit StubProvider(int size = kFeatureSize) : size_(size) {}
  std::vector<float> extract(const ProviderRequest& request) override;
  int output_size() const override { return size_; }

 private:
  int size_;
};

// POSTs the request as JSON to an HTTP endpoint and expects
// {"features": [...]} back.
class HttpProvider : public VisualFeatureProvider {
 public:
  HttpProvider(const std::string& url, int size = kFeatureSize);
  ~HttpProvider() override;
  std::vector<float> extract(const ProviderRequest& request) override;
  int output_size() const override { return size_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int size_;
};

// Counts calls and forwards to another provider.
class CountingProvider : public VisualFeatureProvider {
 public:
  explicit CountingProvider(VisualFeatureProvider& inner) : inner_(inner) {}
  std::vector<float> extract(const ProviderRequest& request) override {
    ++calls_;
    return inner_.extract(request);
  }
  int output_size() const override { return inner_.output_size(); }
  std::size_t calls() const { return calls_; }

 private:
  VisualFeatureProvider& inner_;
  std::atomic<std::size_t> calls_{0};
};

std::string request_to_json(const ProviderRequest& request);
ProviderRequest request_from_json(const std::string& text);
std::uint64_t request_hash(const ProviderRequest& request);

// Union of the entity boxes padded by 20 px and clamped to the image.
ProviderRequest node_context(std::span<const BBox> entity_boxes, std::span<const BBox> all_boxes,
                             double image_width, double image_height);
ProviderRequest edge_context(std::span<const BBox> boxes_a, std::span<const BBox> boxes_b,
                             std::span<const BBox> all_boxes, double image_width, double image_height);

// [confidence, height, width, class scores...] of the box around the lines.
std::vector<double> node_spatial(std::span<const GraphLine> lines, double image_width, double image_height);
// [height a, height b, width a, width b, class a..., class b..., corner
// distances tl, tr, bl, br].
std::vector<double> edge_spatial(std::span<const GraphLine> a, std::span<const GraphLine> b,
                                 double image_width, double image_height);

// Pre-transition features: provider output followed by the spatial vector.
std::vector<float> node_initial_features(const FormGraph& graph, const GraphNode& node,
                                         VisualFeatureProvider& provider);
std::vector<float> edge_initial_features(const FormGraph& graph, const GraphEdge& edge,
                                         VisualFeatureProvider& provider);

// Computes and caches initial features for every node and edge, then sets
// feat = initial transition(initial). Clears the modified flags.
void init_graph_features(FormGraph& graph, VisualFeatureProvider& provider, const gnn::Model<float>& model);

// Refreshes cached initial features for modified nodes/edges only, then
// feat = stage transition([feat; initial]). Clears the modified flags.
void reintroduce_features(FormGraph& graph, VisualFeatureProvider& provider, const gnn::Stage<float>& stage);

}  // namespace formgraph
