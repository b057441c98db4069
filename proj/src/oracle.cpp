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

#include "formgraph/oracle.hpp"

#include <set>

#include "formgraph/error.hpp"
#include "formgraph/supervision.hpp"

namespace formgraph {
namespace {

constexpr int kLabelDims = kEdgeScoreCount;

void set2(Tensor& t, std::int64_t r, std::int64_t c, float v) {
  t.data[static_cast<std::size_t>(r * t.shape[1] + c)] = v;
}

// Copies input columns [from, from + n) to output rows [0, n).
void copy_block(Tensor& t, std::int64_t from, std::int64_t n) {
  for (std::int64_t i = 0; i < n; ++i) set2(t, i, from + i, 1.0f);
}

}  // namespace

OracleProvider::OracleProvider(Document doc, int size)
    : doc_(std::move(doc)), owner_(entity_of_gt_line(doc_)), size_(size) {
  if (size_ < kLabelDims + doc_.class_set.size()) throw UsageError("oracle provider output is too narrow");
}

std::vector<int> OracleProvider::lines_of(const std::vector<BBox>& boxes) const {
  std::vector<TextLine> probes;
  for (std::size_t i = 0; i < boxes.size(); ++i) probes.push_back({static_cast<int>(i), boxes[i], 1.0, {}, {}});
  const auto a = assign_lines(probes, doc_.gt_lines);
  std::vector<int> out;
  for (const auto& [probe, gt] : a.pred_to_gt) out.push_back(gt);
  if (out.size() != boxes.size()) out.push_back(-1);  // marks an unaligned box
  return out;
}

std::vector<float> OracleProvider::extract(const ProviderRequest& request) {
  std::vector<float> out(static_cast<std::size_t>(size_), 0.0f);
  // A line id that is its own GT line makes pair_label work on GT ids.
  LineAssignment identity;
  for (const auto& l : doc_.gt_lines) identity.pred_to_gt[l.id] = l.id;
  const auto known = [](const std::vector<int>& ids) {
    std::vector<int> v;
    for (int id : ids) {
      if (id >= 0) v.push_back(id);
    }
    return v;
  };

  if (request.masks.size() == 3) {
    const auto a = lines_of(request.masks[1]), b = lines_of(request.masks[2]);
    const EdgeLabel label = pair_label(known(a), known(b), identity, doc_);
    out[static_cast<std::size_t>(label)] = 1.0f;
  } else if (request.masks.size() == 2) {
    std::set<int> ents;
    bool unknown = false;
    for (int g : lines_of(request.masks[1])) {
      if (g < 0 || owner_.at(g) < 0) {
        unknown = true;
      } else {
        ents.insert(owner_.at(g));
      }
    }
    if (!unknown && ents.size() == 1) out[kLabelDims + doc_.gt_entities[*ents.begin()].label] = 1.0f;
  } else {
    throw UsageError("oracle provider: unexpected mask channel count");
  }
  return out;
}

ModelWeights make_oracle_weights(const ModelConfig& config) {
  config.validate();
  const int c = config.num_classes, f = config.feature_size;
  const int used = kLabelDims + c;
  if (config.visual_size < used || f < used) throw UsageError("oracle weights need wider features");
  if (config.proposal_hidden < 2) throw UsageError("oracle weights need two proposal hidden units");

  ModelWeights w = ModelWeights::zeros(config);
  // hidden = relu(+dy), relu(-dy) of the centers; logit = -10 (|dy|).
  constexpr int kCenterDy = 9;
  Tensor& fc1 = w.at("proposal.fc1.weight");
  set2(fc1, 0, kCenterDy, 1.0f);
  set2(fc1, 1, kCenterDy, -1.0f);
  Tensor& fc2 = w.at("proposal.fc2.weight");
  set2(fc2, 0, 0, -10.0f);
  set2(fc2, 0, 1, -10.0f);

  copy_block(w.at("init.node_transition.weight"), 0, used);
  copy_block(w.at("init.edge_transition.weight"), 0, used);
  for (std::size_t s = 0; s < config.stage_depths.size(); ++s) {
    const std::string p = "stage" + std::to_string(s);
    if (s > 0) {
      // Columns [f, f + initial) hold the freshly computed initial features.
      copy_block(w.at(p + ".node_transition.weight"), f, used);
      copy_block(w.at(p + ".edge_transition.weight"), f, used);
    }
    Tensor& node_head = w.at(p + ".node_head.weight");
    for (int k = 0; k < c; ++k) set2(node_head, k, kLabelDims + k, 10.0f);
    Tensor& edge_head = w.at(p + ".edge_head.weight");
    Tensor& edge_bias = w.at(p + ".edge_head.bias");
    for (int k = 0; k < kLabelDims; ++k) {
      set2(edge_head, k, k, 20.0f);
      edge_bias.data[static_cast<std::size_t>(k)] = -10.0f;
    }
  }
  return w;
}

}  // namespace formgraph
