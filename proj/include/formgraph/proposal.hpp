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

#include <vector>

#include "formgraph/document.hpp"
#include "formgraph/nn.hpp"

namespace formgraph {

// Pairwise feature vector, 25 + 2C entries in this order, coordinates
// normalized by image width/height and deltas taken as b - a:
//   [0, 10)   dx, dy of top-left, top-right, bottom-left, bottom-right, center
//   [10, 14)  height a, height b, width a, width b
//   [14, 18)  L2 distance of the four corresponding corners
//   [18, 22)  center x a, center y a, center x b, center y b
//   22        line of sight between a and b (1 or 0)
//   [23, 25)  confidence a, confidence b
//   [25, 25 + 2C)  class scores of a, then of b
std::vector<double> build_proposal_features(const TextLine& a, const TextLine& b, const Document& doc,
                                            std::span<const BBox> obstacles);
// Obstacles are every other line of doc.lines.
std::vector<double> build_proposal_features(const TextLine& a, const TextLine& b, const Document& doc);

inline int proposal_feature_size(int num_classes) { return 25 + 2 * num_classes; }

// linear -> ReLU -> linear producing a single logit.
template <typename T>
struct ProposalMlp {
  nn::Linear<T> fc1;
  nn::Linear<T> fc2;

  T logit(const nn::Vec<T>& x) const {
    const nn::Vec<T> h = fc1(x).cwiseMax(T(0));
    return fc2(h)[0];
  }

  void check_shapes(int input_size) const {
    if (fc1.in_dim() != input_size) throw ShapeError("proposal: fc1 expects a different feature size");
    if (fc2.in_dim() != fc1.out_dim() || fc2.out_dim() != 1 || fc1.bias.size() != fc1.out_dim() ||
        fc2.bias.size() != 1) {
      throw ShapeError("proposal: layer shapes do not chain to a single output");
    }
  }

  static ProposalMlp load(const ModelWeights& w) {
    return {nn::Linear<T>::load(w, "proposal.fc1"), nn::Linear<T>::load(w, "proposal.fc2")};
  }
};

struct EdgeCandidate {
  int a = 0;  // line ids, a < b
  int b = 0;
  double score = 0;

  friend bool operator==(const EdgeCandidate&, const EdgeCandidate&) = default;
};

// Scores every unordered pair of `lines`: sigmoid of the mean logit of the
// (a, b) and (b, a) feature orders. Output is sorted by (a, b).
template <typename T>
std::vector<EdgeCandidate> score_pairs(const Document& doc, const std::vector<TextLine>& lines,
                                       const ProposalMlp<T>& mlp);

// Best ceil(P/2) candidates, at most 900, ties broken by ascending (a, b).
// Output is sorted by (a, b).
std::vector<EdgeCandidate> select_edges(std::vector<EdgeCandidate> candidates);

std::size_t selected_edge_count(std::size_t candidates);

extern template std::vector<EdgeCandidate> score_pairs(const Document&, const std::vector<TextLine>&,
                                                       const ProposalMlp<float>&);
extern template std::vector<EdgeCandidate> score_pairs(const Document&, const std::vector<TextLine>&,
                                                       const ProposalMlp<double>&);

}  // namespace formgraph
