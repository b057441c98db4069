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

#include <cmath>

#include "formgraph/features.hpp"
#include "formgraph/oracle.hpp"
#include "formgraph/proposal.hpp"

using namespace formgraph;

namespace {

ModelConfig small() {
  ModelConfig c;
  c.feature_size = c.visual_size = 16;
  c.proposal_hidden = 8;
  c.stage_depths = {1, 1, 1};
  return c;
}

FormGraph sample_graph(const Document& d) {
  std::vector<EdgeCandidate> all;
  for (std::size_t i = 0; i < d.lines.size(); ++i) {
    for (std::size_t j = i + 1; j < d.lines.size(); ++j) all.push_back({d.lines[i].id, d.lines[j].id, 0.5});
  }
  return init_graph(d, d.lines, all);
}

}  // namespace

TEST(StubProvider, DeterministicPerRequest) {
  StubProvider p(16);
  ProviderRequest r{{0, 0, 50, 20}, 10, 10, {{{0, 0, 50, 20}}, {{0, 0, 50, 20}}}};
  const auto a = p.extract(r);
  ASSERT_EQ(a.size(), 16u);
  EXPECT_EQ(p.extract(r), a);
  EXPECT_EQ(StubProvider(16).extract(r), a);
  ProviderRequest moved = r;
  moved.window.x1 += 1;
  EXPECT_NE(p.extract(moved), a);
  // Sub-0.1 px differences round away.
  ProviderRequest nudged = r;
  nudged.window.x2 += 0.01;
  EXPECT_EQ(p.extract(nudged), a);
}

TEST(ProviderRequest, JsonRoundTrip) {
  const ProviderRequest r{{1.5, 2, 30, 40}, 16, 16, {{{0, 0, 1, 1}}, {{2, 2, 3, 3}, {4, 4, 5, 5}}, {}}};
  EXPECT_EQ(request_from_json(request_to_json(r)), r);
  EXPECT_EQ(request_hash(request_from_json(request_to_json(r))), request_hash(r));
  EXPECT_THROW(request_from_json("[1]"), DataError);
}

TEST(Context, PaddedAndClamped) {
  const std::vector<BBox> entity = {{10, 30, 50, 40}};
  const auto r = node_context(entity, entity, 200, 100);
  EXPECT_EQ(r.window, (BBox{0, 10, 70, 60}));
  EXPECT_EQ(r.grid_w, kNodeGrid);
  EXPECT_EQ(r.masks.size(), 2u);
  const std::vector<BBox> other = {{150, 80, 190, 95}};
  const auto e = edge_context(entity, other, entity, 200, 100);
  EXPECT_EQ(e.window, (BBox{0, 10, 200, 100}));
  EXPECT_EQ(e.grid_w, kEdgeGrid);
  EXPECT_EQ(e.masks.size(), 3u);
}

TEST(Spatial, NodeAndEdgeLayout) {
  const std::vector<GraphLine> a = {{{0}, {0, 0, 20, 10}, 0.8, {1, 0}}, {{1}, {0, 10, 40, 20}, 0.6, {0, 1}}};
  const std::vector<GraphLine> b = {{{2}, {100, 50, 120, 60}, 1.0, {0, 1}}};
  const auto n = node_spatial(a, 200, 100);
  ASSERT_EQ(n.size(), 5u);
  EXPECT_DOUBLE_EQ(n[0], 0.7);
  EXPECT_DOUBLE_EQ(n[1], 0.2);
  EXPECT_DOUBLE_EQ(n[2], 0.2);
  EXPECT_DOUBLE_EQ(n[3], 0.5);
  EXPECT_DOUBLE_EQ(n[4], 0.5);
  const auto e = edge_spatial(a, b, 200, 100);
  ASSERT_EQ(e.size(), 12u);
  EXPECT_DOUBLE_EQ(e[0], 0.2);
  EXPECT_DOUBLE_EQ(e[1], 0.1);
  EXPECT_DOUBLE_EQ(e[2], 0.2);
  EXPECT_DOUBLE_EQ(e[3], 0.1);
  EXPECT_DOUBLE_EQ(e[8], std::hypot(0.5, 0.5));  // top-left corners
}

TEST(InitFeatures, WidthsAndFlags) {
  const ModelConfig c = small();
  const auto model = gnn::Model<float>::from_weights(ModelWeights::random(c, 2), c);
  SynthParams sp;
  sp.rows = 3;
  const Document d = synth_form(3, sp);
  FormGraph g = sample_graph(d);
  StubProvider stub(c.visual_size);
  CountingProvider counter(stub);
  init_graph_features(g, counter, model);
  EXPECT_EQ(counter.calls(), g.nodes.size() + g.edges.size());
  for (const auto& n : g.nodes) {
    EXPECT_EQ(static_cast<int>(n.initial.size()), c.node_initial_size());
    EXPECT_EQ(static_cast<int>(n.feat.size()), c.feature_size);
    EXPECT_FALSE(n.modified);
  }
  for (const auto& e : g.edges) {
    EXPECT_EQ(static_cast<int>(e.initial.size()), c.edge_initial_size());
    EXPECT_FALSE(e.modified);
  }
}

// After a contraction only the new node and the edges touching it are
// sent back to the provider.
TEST(Reintroduce, RecomputesOnlyModifiedItems) {
  const ModelConfig c = small();
  const auto model = gnn::Model<float>::from_weights(ModelWeights::random(c, 2), c);
  SynthParams sp;
  sp.rows = 4;
  const Document d = synth_form(3, sp);
  FormGraph g = sample_graph(d);
  StubProvider stub(c.visual_size);
  init_graph_features(g, stub, model);

  const auto untouched = g.edges.back();  // edge between the last two nodes
  contract_nodes(g, {{g.nodes[0].id, g.nodes[1].id}}, true, 0);
  std::size_t dirty = 0;
  for (const auto& n : g.nodes) dirty += n.modified;
  for (const auto& e : g.edges) dirty += e.modified;
  EXPECT_EQ(dirty, 1 + (g.nodes.size() - 1));  // merged node, plus its edge to every other node

  CountingProvider counter(stub);
  reintroduce_features(g, counter, model.stages[1]);
  EXPECT_EQ(counter.calls(), dirty);
  const auto* kept = g.find_edge(untouched.a, untouched.b);
  ASSERT_NE(kept, nullptr);
  EXPECT_EQ(kept->initial, untouched.initial);
  EXPECT_THROW(reintroduce_features(g, counter, model.stages[0]), UsageError);
}

TEST(OracleProvider, ReadsGroundTruth) {
  SynthParams sp;
  sp.rows = 2;
  const Document d = synth_form(1, sp);
  OracleProvider p(d, 16);
  const auto& q = d.gt_lines[d.gt_entities[0].line_ids[0]];
  const auto& a = d.gt_lines[d.gt_entities[1].line_ids[0]];
  const std::vector<BBox> qb = {q.bbox}, ab = {a.bbox}, all;
  const auto node = p.extract(node_context(qb, all, d.image_width, d.image_height));
  EXPECT_EQ(node[4 + d.gt_entities[0].label], 1.0f);
  const auto edge = p.extract(edge_context(qb, ab, all, d.image_width, d.image_height));
  const bool linked = !d.gt_relationships.empty() && d.gt_relationships[0] == EntityPair{0, 1};
  EXPECT_EQ(edge[linked ? 3 : 0], 1.0f);
}
