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

#include "formgraph/features.hpp"
#include "formgraph/weights.hpp"

namespace formgraph {

// Test fixture: a provider that reads the ground truth instead of pixels.
// Each mask box is matched to the GT line with the best clipped IOU
// (>= 0.4). Edge requests return the one-hot edge label in dims [0, 4)
// ([prune, merge, group, relationship]); node requests return the one-hot
// entity class in dims [4, 4 + C). Everything else is zero.
class OracleProvider : public VisualFeatureProvider {
 public:
  OracleProvider(Document doc, int size);
  std::vector<float> extract(const ProviderRequest& request) override;
  int output_size() const override { return size_; }

 private:
  std::vector<int> lines_of(const std::vector<BBox>& boxes) const;

  Document doc_;
  std::vector<int> owner_;
  int size_;
};

// Weights that turn the oracle features into predictions: every GN block is
// the identity, transitions copy the oracle dims and the heads read them out.
// The proposal scorer ranks pairs by how close their centers are vertically.
// Requires visual_size >= 4 + num_classes and feature_size >= 4 + num_classes.
ModelWeights make_oracle_weights(const ModelConfig& config);

}  // namespace formgraph
