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

#include <gtest/gtest.h>

#include <algorithm>

#include "formgraph/oracle.hpp"
#include "formgraph/proposal.hpp"
#include "formgraph/rng.hpp"

using namespace formgraph;

namespace {

Document sample_doc() {
  SynthParams p;
  p.rows = 4;
  p.cols = 2;
  p.jitter = 0.3;
  return synth_form(17, p);
}

}  // namespace

TEST(ProposalFeatures, SizeMatchesClassCount) {
  const Document d = sample_doc();
  const auto f = build_proposal_features(d.lines[0], d.lines[1], d);
  EXPECT_EQ(static_cast<int>(f.size()), proposal_feature_size(4));
  EXPECT_EQ(proposal_feature_size(2), 29);
}

// Swapping the pair negates deltas and swaps every per-line slot.
TEST(ProposalFeatures, SwapProperty) {
  const Document d = sample_doc();
  for (std::size_t i = 0; i < d.lines.size(); ++i) {
    for (std::size_t j = i + 1; j < d.lines.size(); ++j) {
      const auto ab = build_proposal_features(d.lines[i], d.lines[j], d);
      const auto ba = build_proposal_features(d.lines[j], d.lines[i], d);
      for (int k = 0; k < 10; ++k) EXPECT_DOUBLE_EQ(ab[k], -ba[k]);
      EXPECT_DOUBLE_EQ(ab[10], ba[11]);
      EXPECT_DOUBLE_EQ(ab[12], ba[13]);
      for (int k = 14; k < 18; ++k) EXPECT_DOUBLE_EQ(ab[k], ba[k]);
      EXPECT_DOUBLE_EQ(ab[18], ba[20]);
      EXPECT_DOUBLE_EQ(ab[19], ba[21]);
      EXPECT_DOUBLE_EQ(ab[22], ba[22]);
      EXPECT_DOUBLE_EQ(ab[23], ba[24]);
      for (int c = 0; c < 4; ++c) EXPECT_DOUBLE_EQ(ab[25 + c], ba[29 + c]);
    }
  }
}

TEST(ProposalFeatures, NormalizedByImageSize) {
  Document d;
  d.image_width = 200;
  d.image_height = 100;
  d.class_set = ClassSet::naf();
  const TextLine a{0, {0, 0, 20, 10}, 0.9, {1, 0}, {}};
  const TextLine b{1, {100, 50, 120, 60}, 0.7, {0, 1}, {}};
  const auto f = build_proposal_features(a, b, d, {});
  EXPECT_DOUBLE_EQ(f[0], 0.5);   // top-left dx
  EXPECT_DOUBLE_EQ(f[1], 0.5);   // top-left dy
  EXPECT_DOUBLE_EQ(f[10], 0.1);  // height a
  EXPECT_DOUBLE_EQ(f[12], 0.1);  // width a
  EXPECT_DOUBLE_EQ(f[22], 1.0);
  EXPECT_DOUBLE_EQ(f[23], 0.9);
  EXPECT_DOUBLE_EQ(f[24], 0.7);
  EXPECT_EQ(std::vector<double>(f.begin() + 25, f.end()), (std::vector<double>{1, 0, 0, 1}));
  const std::vector<BBox> wall = {{50, -10, 60, 200}};
  EXPECT_DOUBLE_EQ(build_proposal_features(a, b, d, wall)[22], 0.0);
}

TEST(SelectEdges, CountIsHalfRoundedUpCappedAt900) {
  EXPECT_EQ(selected_edge_count(0), 0u);
  EXPECT_EQ(selected_edge_count(1), 1u);
  EXPECT_EQ(selected_edge_count(7), 4u);
  EXPECT_EQ(selected_edge_count(1800), 900u);
  EXPECT_EQ(selected_edge_count(1801), 900u);
  EXPECT_EQ(selected_edge_count(100000), 900u);
}

TEST(SelectEdges, KeepsBestAndBreaksTiesByIds) {
  std::vector<EdgeCandidate> c = {{2, 3, 0.5}, {0, 1, 0.5}, {1, 2, 0.9}, {0, 3, 0.1}, {0, 2, 0.5}};
  const auto kept = select_edges(c);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[0], (EdgeCandidate{0, 1, 0.5}));
  EXPECT_EQ(kept[1], (EdgeCandidate{0, 2, 0.5}));
  EXPECT_EQ(kept[2], (EdgeCandidate{1, 2, 0.9}));
}

TEST(SelectEdges, RandomInputsKeepTopScores) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EdgeCandidate> c;
    const int n = rng.uniform_int(2, 70);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) c.push_back({a, b, std::round(rng.uniform() * 20) / 20});
    }
    const auto kept = select_edges(c);
    ASSERT_EQ(kept.size(), selected_edge_count(c.size()));
    EXPECT_TRUE(std::is_sorted(kept.begin(), kept.end(),
                               [](const auto& x, const auto& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); }));
    double lowest_kept = 1;
    for (const auto& k : kept) lowest_kept = std::min(lowest_kept, k.score);
    for (const auto& x : c) {
      if (std::find(kept.begin(), kept.end(), x) == kept.end()) {
        EXPECT_LE(x.score, lowest_kept);
      }
    }
  }
}

TEST(ScorePairs, FloatAndDoubleAgreeAndAreSymmetric) {
  const Document d = sample_doc();
  ModelConfig c;
  c.feature_size = c.visual_size = 16;
  c.proposal_hidden = 32;
  c.stage_depths = {1, 1, 1};
  const ModelWeights w = ModelWeights::random(c, 4);
  const auto fs = score_pairs(d, d.lines, ProposalMlp<float>::load(w));
  const auto ds = score_pairs(d, d.lines, ProposalMlp<double>::load(w));
  ASSERT_EQ(fs.size(), d.lines.size() * (d.lines.size() - 1) / 2);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    EXPECT_EQ(fs[i].a, ds[i].a);
    EXPECT_LT(fs[i].a, fs[i].b);
    EXPECT_NEAR(fs[i].score, ds[i].score, 1e-4);
  }
  // The mean of both orders makes the score independent of argument order.
  const auto mlp = ProposalMlp<double>::load(w);
  const auto fa = build_proposal_features(d.lines[0], d.lines[3], d);
  const auto fb = build_proposal_features(d.lines[3], d.lines[0], d);
  const double manual = nn::sigmoid((mlp.logit(nn::Vec<double>::Map(fa.data(), fa.size())) +
                                     mlp.logit(nn::Vec<double>::Map(fb.data(), fb.size()))) / 2);
  const auto it = std::find_if(ds.begin(), ds.end(), [](const auto& e) { return e.a == 0 && e.b == 3; });
  ASSERT_NE(it, ds.end());
  EXPECT_NEAR(it->score, manual, 1e-12);
}

TEST(ProposalMlp, ShapeCheck) {
  ModelConfig c;
  c.feature_size = c.visual_size = 16;
  c.stage_depths = {1, 1, 1};
  const auto mlp = ProposalMlp<double>::load(ModelWeights::zeros(c));
  EXPECT_NO_THROW(mlp.check_shapes(33));
  EXPECT_THROW(mlp.check_shapes(29), ShapeError);
}
