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

#include "formgraph/graph.hpp"
#include "scenarios.hpp"

using namespace formgraph;

namespace {

GraphNode node(int id, BBox box, std::vector<double> cls, std::vector<float> feat) {
  GraphNode n;
  n.id = id;
  n.lines.push_back({{id}, box, 1.0, cls});
  n.class_scores = std::move(cls);
  n.feat = std::move(feat);
  return n;
}

GraphEdge edge(int a, int b, std::array<double, 4> scores, std::vector<float> feat = {0}) {
  GraphEdge e;
  e.a = a;
  e.b = b;
  e.scores = scores;
  e.feat = std::move(feat);
  return e;
}

// Chain 0-1-2-3.
FormGraph chain() {
  FormGraph g;
  g.image_width = g.image_height = 100;
  g.num_classes = 2;
  g.nodes = {node(0, {0, 0, 10, 10}, {1, 0}, {1}), node(1, {20, 0, 30, 10}, {0, 1}, {3}),
             node(2, {0, 20, 10, 30}, {1, 0}, {5}), node(3, {0, 40, 10, 50}, {0, 1}, {7})};
  for (const auto& n : g.nodes) g.detected_boxes.push_back(n.lines[0].bbox);
  g.edges = {edge(0, 1, {0, 0.9, 0, 0}, {2}), edge(1, 2, {0, 0, 0.97, 0}, {4}), edge(2, 3, {0.95, 0, 0, 0.7}, {6})};
  return g;
}

}  // namespace

TEST(Contract, MergeFusesLinesAndAverages) {
  FormGraph g = chain();
  contract_nodes(g, {{1, 0}}, true, 2);
  ASSERT_EQ(g.nodes.size(), 3u);
  const GraphNode& m = g.nodes[0];
  EXPECT_EQ(m.id, 0);
  ASSERT_EQ(m.lines.size(), 1u);
  EXPECT_EQ(m.lines[0].source_ids, (std::vector<int>{0, 1}));
  EXPECT_EQ(m.lines[0].bbox, (BBox{0, 0, 30, 10}));
  EXPECT_EQ(m.class_scores, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(m.feat, (std::vector<float>{2}));
  EXPECT_TRUE(m.modified);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].a, 0);
  EXPECT_EQ(g.edges[0].b, 2);
  ASSERT_EQ(g.edit_log.size(), 1u);
  EXPECT_EQ(g.edit_log[0], (EditRecord{2, "merge", {0, 1}, 0}));
  EXPECT_NO_THROW(check_graph(g));
}

TEST(Contract, GroupKeepsLinesAndAveragesParallelEdges) {
  FormGraph g = chain();
  g.edges.push_back(edge(0, 2, {0.2, 0, 0, 0.4}, {10}));
  for (auto& e : g.edges) e.modified = false;
  contract_nodes(g, {{0, 1}}, false, 0);
  EXPECT_EQ(g.nodes[0].lines.size(), 2u);
  const GraphEdge* e = g.find_edge(0, 2);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->feat, (std::vector<float>{7}));  // (4 + 10) / 2
  EXPECT_DOUBLE_EQ(e->score(EdgeScore::kGroup), 0.97 / 2);
  EXPECT_DOUBLE_EQ(e->score(EdgeScore::kRelationship), 0.2);
  EXPECT_FALSE(g.find_edge(2, 3)->modified);
}

TEST(FlaggedComponents, ThresholdIsInclusive) {
  const FormGraph g = chain();
  EXPECT_EQ(flagged_components(g, EdgeScore::kMerge, 0.9), (std::vector<std::vector<int>>{{0, 1}}));
  EXPECT_TRUE(flagged_components(g, EdgeScore::kMerge, 0.91).empty());
}

TEST(EditStep, MergeThenGroupThenPrune) {
  FormGraph g = chain();
  apply_edit_step(g, {0.8, 0.95, 0.9}, 0);
  // 0+1 merge, then {0,2} group through the retargeted edge, then 2-3 pruned.
  ASSERT_EQ(g.nodes.size(), 2u);
  EXPECT_EQ(g.nodes[0].lines.size(), 2u);
  EXPECT_TRUE(g.edges.empty());
  ASSERT_EQ(g.edit_log.size(), 3u);
  EXPECT_EQ(g.edit_log[0].kind, "merge");
  EXPECT_EQ(g.edit_log[1].kind, "group");
  EXPECT_EQ(g.edit_log[2], (EditRecord{0, "prune", {0, 3}, -1}));
  EXPECT_EQ(scenario::held_lines(g), (std::vector<int>{0, 1, 2, 3}));
}

TEST(EditStep, InvariantsOnRandomGraphs) {
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    FormGraph g = scenario::random_graph(rng);
    const auto lines = scenario::held_lines(g);
    const auto t = scenario::random_thresholds(rng);
    apply_edit_step(g, t, 1);
    EXPECT_NO_THROW(check_graph(g));
    EXPECT_EQ(scenario::held_lines(g), lines);
    for (const auto& e : g.edges) {
      EXPECT_LT(e.score(EdgeScore::kPrune), t.prune);
    }
    FormGraph again = g;
    apply_edit_step(again, t, 1);
    EXPECT_EQ(again, g);
  }
}

TEST(Finalize, DropsWeakRelationships) {
  FormGraph g = chain();
  finalize(g, 0.5);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].a, 2);
  const GraphResult r = extract_result(g);
  ASSERT_EQ(r.entities.size(), 4u);
  EXPECT_EQ(r.entities[1].label, 1);
  EXPECT_EQ(r.relationships, (std::vector<EntityPair>{{2, 3}}));
  EXPECT_DOUBLE_EQ(r.relationship_scores[0], 0.7);
}

TEST(CheckGraph, RejectsBrokenStructure) {
  FormGraph g = chain();
  g.edges.push_back(edge(1, 1, {}));
  EXPECT_THROW(check_graph(g), std::logic_error);
  g = chain();
  g.edges.push_back(edge(0, 9, {}));
  EXPECT_THROW(check_graph(g), std::logic_error);
  g = chain();
  g.nodes[1].lines[0].source_ids = {0};
  EXPECT_THROW(check_graph(g), std::logic_error);
}

TEST(InitGraph, OneNodePerLine) {
  SynthParams p;
  p.rows = 2;
  const Document d = synth_form(1, p);
  const FormGraph g = init_graph(d, d.lines, {{0, 1, 0.9}});
  EXPECT_EQ(g.nodes.size(), d.lines.size());
  EXPECT_EQ(g.edges.size(), 1u);
  EXPECT_THROW(init_graph(d, d.lines, {{0, 99, 0.9}}), UsageError);
}

TEST(ResultJson, RoundTripAndSvg) {
  FormGraph g = chain();
  finalize(g);
  const std::map<EntityPair, double> hits = {{{0, 1}, 0.25}};
  const std::string text = result_to_json(g, ClassSet::naf(), &hits);
  const GraphResult r = result_from_json(text, ClassSet::naf());
  const GraphResult want = extract_result(g);
  ASSERT_EQ(r.entities.size(), want.entities.size());
  EXPECT_EQ(r.relationships, want.relationships);
  ASSERT_TRUE(r.hit_scores.has_value());
  EXPECT_EQ(*r.hit_scores, hits);
  const std::string svg = render_svg(g, ClassSet::naf());
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}
