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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "formgraph/constants.hpp"

namespace formgraph {

// Dimensions of every learned component. The defaults are the published
// architecture; tests shrink feature_size to keep oracles fast.
struct ModelConfig {
  int num_classes = 4;
  int feature_size = kFeatureSize;
  int visual_size = kFeatureSize;       // provider output width
  int proposal_hidden = kFeatureSize;
  int heads = kAttentionHeads;
  int norm_groups = kGroupNormGroups;
  std::vector<int> stage_depths = {kStageDepths.begin(), kStageDepths.end()};

  int proposal_input_size() const { return 25 + 2 * num_classes; }
  int node_spatial_size() const { return 3 + num_classes; }
  int edge_spatial_size() const { return 8 + 2 * num_classes; }
  int node_initial_size() const { return visual_size + node_spatial_size(); }
  int edge_initial_size() const { return visual_size + edge_spatial_size(); }

  // Throws UsageError when dimensions are inconsistent.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;

  std::int64_t numel() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

struct TensorSpec {
  std::string name;
  std::vector<std::int64_t> shape;
};

// Complete, ordered list of tensors a model with this config must carry.
std::vector<TensorSpec> model_manifest(const ModelConfig& config);

// Named tensors in container order.
class ModelWeights {
 public:
  // Every tensor of the manifest, zero filled.
  static ModelWeights zeros(const ModelConfig& config);
  // He-normal matrices, zero biases, unit GroupNorm scales; fixed per seed.
  static ModelWeights random(const ModelConfig& config, std::uint64_t seed);

  void add(const std::string& name, Tensor tensor);
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  const std::vector<std::string>& names() const { return order_; }
  std::size_t size() const { return order_.size(); }

  // Throws WeightsError naming the first missing, extra, reordered or
  // mis-shaped tensor.
  void check_manifest(const ModelConfig& config) const;

  friend bool operator==(const ModelWeights& a, const ModelWeights& b) {
    return a.order_ == b.order_ && a.tensors_ == b.tensors_;
  }

 private:
  std::vector<std::string> order_;
  std::vector<Tensor> tensors_;
  std::map<std::string, std::size_t> index_;
};

// Recovers class count, widths and stage depths from tensor shapes.
ModelConfig infer_config(const ModelWeights& weights);

// FGW1 container: "FGW1", u32 LE header length, JSON manifest, raw LE f32.
std::string serialize_weights(const ModelWeights& weights);
ModelWeights deserialize_weights(const std::string& bytes);

void save_weights(const ModelWeights& weights, const std::filesystem::path& path);
ModelWeights read_weights(const std::filesystem::path& path);
// read_weights plus manifest validation against config.
ModelWeights load_weights(const std::filesystem::path& path, const ModelConfig& config);

}  // namespace formgraph
