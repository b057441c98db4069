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

#include "formgraph/proposal.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "formgraph/constants.hpp"
#include "formgraph/error.hpp"

namespace formgraph {
namespace {

struct NormBox {
  std::array<std::array<double, 2>, 5> points;  // tl, tr, bl, br, center
  double w, h, cx, cy;
};

NormBox normalize(const BBox& b, double iw, double ih) {
  const double x1 = b.x1 / iw, x2 = b.x2 / iw, y1 = b.y1 / ih, y2 = b.y2 / ih;
  const double cx = 0.5 * (x1 + x2), cy = 0.5 * (y1 + y2);
  return {{{{x1, y1}, {x2, y1}, {x1, y2}, {x2, y2}, {cx, cy}}}, x2 - x1, y2 - y1, cx, cy};
}

}  // namespace

std::vector<double> build_proposal_features(const TextLine& a, const TextLine& b, const Document& doc,
                                            std::span<const BBox> obstacles) {
  if (!(doc.image_width > 0 && doc.image_height > 0)) {
    throw UsageError("proposal features: image dimensions must be positive");
  }
  const NormBox na = normalize(a.bbox, doc.image_width, doc.image_height);
  const NormBox nb = normalize(b.bbox, doc.image_width, doc.image_height);

  std::vector<double> f;
  f.reserve(25 + a.class_scores.size() + b.class_scores.size());
  for (int p = 0; p < 5; ++p) {
    f.push_back(nb.points[p][0] - na.points[p][0]);
    f.push_back(nb.points[p][1] - na.points[p][1]);
  }
  f.insert(f.end(), {na.h, nb.h, na.w, nb.w});
  for (int p = 0; p < 4; ++p) {
    f.push_back(std::hypot(nb.points[p][0] - na.points[p][0], nb.points[p][1] - na.points[p][1]));
  }
  f.insert(f.end(), {na.cx, na.cy, nb.cx, nb.cy});
  f.push_back(line_of_sight(a.bbox, b.bbox, obstacles) ? 1.0 : 0.0);
  f.insert(f.end(), {a.confidence, b.confidence});
  f.insert(f.end(), a.class_scores.begin(), a.class_scores.end());
  f.insert(f.end(), b.class_scores.begin(), b.class_scores.end());
  return f;
}

std::vector<double> build_proposal_features(const TextLine& a, const TextLine& b, const Document& doc) {
  std::vector<BBox> obstacles;
  for (const TextLine& l : doc.lines) {
    if (l.id != a.id && l.id != b.id) obstacles.push_back(l.bbox);
  }
  return build_proposal_features(a, b, doc, obstacles);
}

template <typename T>
std::vector<EdgeCandidate> score_pairs(const Document& doc, const std::vector<TextLine>& lines,
                                       const ProposalMlp<T>& mlp) {
  mlp.check_shapes(proposal_feature_size(doc.class_set.size()));
  const auto to_vec = [](const std::vector<double>& f) {
    nn::Vec<T> v(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) v[static_cast<Eigen::Index>(i)] = static_cast<T>(f[i]);
    return v;
  };

  std::vector<std::size_t> order(lines.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return lines[x].id < lines[y].id; });

  std::vector<EdgeCandidate> out;
  std::vector<BBox> obstacles;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const TextLine& a = lines[order[oi]];
      const TextLine& b = lines[order[oj]];
      if (a.id == b.id) throw UsageError("proposal: duplicate line id " + std::to_string(a.id));
      obstacles.clear();
      for (std::size_t k = 0; k < lines.size(); ++k) {
        if (k != order[oi] && k != order[oj]) obstacles.push_back(lines[k].bbox);
      }
      const T ab = mlp.logit(to_vec(build_proposal_features(a, b, doc, obstacles)));
      const T ba = mlp.logit(to_vec(build_proposal_features(b, a, doc, obstacles)));
      out.push_back({a.id, b.id, static_cast<double>(nn::sigmoid<T>((ab + ba) / T(2)))});
    }
  }
  return out;
}

template std::vector<EdgeCandidate> score_pairs(const Document&, const std::vector<TextLine>&,
                                                const ProposalMlp<float>&);
template std::vector<EdgeCandidate> score_pairs(const Document&, const std::vector<TextLine>&,
                                                const ProposalMlp<double>&);

std::size_t selected_edge_count(std::size_t candidates) {
  return std::min<std::size_t>((candidates + 1) / 2, kMaxProposedEdges);
}

std::vector<EdgeCandidate> select_edges(std::vector<EdgeCandidate> candidates) {
  for (auto& c : candidates) {
    if (c.a > c.b) std::swap(c.a, c.b);
  }
  const std::size_t keep = selected_edge_count(candidates.size());
  std::sort(candidates.begin(), candidates.end(), [](const EdgeCandidate& x, const EdgeCandidate& y) {
    if (x.score != y.score) return x.score > y.score;
    return std::pair(x.a, x.b) < std::pair(y.a, y.b);
  });
  candidates.resize(keep);
  std::sort(candidates.begin(), candidates.end(),
            [](const EdgeCandidate& x, const EdgeCandidate& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  return candidates;
}

}  // namespace formgraph
