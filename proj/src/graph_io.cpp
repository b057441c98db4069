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

#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "formgraph/error.hpp"
#include "formgraph/graph.hpp"
#include "formgraph/metrics.hpp"

namespace formgraph {

using ojson = nlohmann::ordered_json;

std::string result_to_json(const FormGraph& graph, const ClassSet& classes,
                           const std::map<EntityPair, double>* hit_scores) {
  const GraphResult r = extract_result(graph);
  ojson j;
  j["format"] = "formgraph-result";
  j["version"] = 1;
  j["class_set"] = classes.labels();
  j["entities"] = ojson::array();
  for (std::size_t i = 0; i < r.entities.size(); ++i) {
    const auto& e = r.entities[i];
    ojson boxes = ojson::array();
    for (const auto& b : e.lines) boxes.push_back({b.x1, b.y1, b.x2, b.y2});
    j["entities"].push_back({{"id", e.id},
                             {"class", classes.label(e.label)},
                             {"class_scores", graph.nodes[i].class_scores},
                             {"lines", boxes},
                             {"line_ids", e.line_sources}});
  }
  j["relationships"] = ojson::array();
  for (std::size_t k = 0; k < r.relationships.size(); ++k) {
    j["relationships"].push_back({r.relationships[k].first, r.relationships[k].second});
  }
  j["relationship_scores"] = r.relationship_scores;
  if (hit_scores) {
    j["hit_scores"] = ojson::array();
    for (const auto& [pair, score] : *hit_scores) j["hit_scores"].push_back({pair.first, pair.second, score});
  }
  j["edit_log"] = ojson::array();
  for (const auto& rec : graph.edit_log) {
    j["edit_log"].push_back(
        {{"iteration", rec.iteration}, {"kind", rec.kind}, {"nodes", rec.nodes}, {"result", rec.result}});
  }
  return j.dump(1) + "\n";
}

GraphResult result_from_json(const std::string& text, const ClassSet& classes) {
  try {
    const ojson j = ojson::parse(text);
    if (j.value("format", "") != "formgraph-result") throw DataError("not a formgraph result file");
    GraphResult r;
    for (const auto& e : j.at("entities")) {
      PredictedEntity p;
      p.id = e.at("id").get<int>();
      p.label = classes.index_of(e.at("class").get<std::string>());
      for (const auto& b : e.at("lines")) {
        p.lines.push_back(BBox{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                               b.at(3).get<double>()});
      }
      if (e.contains("line_ids")) p.line_sources = e["line_ids"].get<std::vector<std::vector<int>>>();
      r.entities.push_back(std::move(p));
    }
    for (const auto& rel : j.at("relationships")) {
      r.relationships.emplace_back(rel.at(0).get<int>(), rel.at(1).get<int>());
    }
    r.relationship_scores = j.value("relationship_scores", std::vector<double>{});
    if (j.contains("hit_scores")) {
      r.hit_scores.emplace();
      for (const auto& h : j["hit_scores"]) {
        (*r.hit_scores)[{h.at(0).get<int>(), h.at(1).get<int>()}] = h.at(2).get<double>();
      }
    }
    return r;
  } catch (const ojson::exception& e) {
    throw DataError(std::string("malformed result JSON: ") + e.what());
  }
}

namespace {

// Entity classes: header blue, question cyan, answer yellow, other magenta.
const char* class_color(const ClassSet& classes, int label) {
  const std::string& name = classes.label(label);
  if (name == "header") return "blue";
  if (name == "question" || name == "preprinted") return "cyan";
  if (name == "answer" || name == "input") return "yellow";
  if (name == "other") return "magenta";
  return "gray";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

void rect(std::ostringstream& out, const BBox& b, const char* color, double width) {
  out << "  <rect x=\"" << fmt(b.x1) << "\" y=\"" << fmt(b.y1) << "\" width=\"" << fmt(b.width())
      << "\" height=\"" << fmt(b.height()) << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
      << fmt(width) << "\"/>\n";
}

void segment(std::ostringstream& out, const BBox& a, const BBox& b, const char* color) {
  out << "  <line x1=\"" << fmt(a.center_x()) << "\" y1=\"" << fmt(a.center_y()) << "\" x2=\""
      << fmt(b.center_x()) << "\" y2=\"" << fmt(b.center_y()) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
}

}  // namespace

std::string render_svg(const FormGraph& graph, const ClassSet& classes, const Document* gt) {
  const GraphResult r = extract_result(graph);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(graph.image_width) << "\" height=\""
      << fmt(graph.image_height) << "\" viewBox=\"0 0 " << fmt(graph.image_width) << " "
      << fmt(graph.image_height) << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  std::map<int, BBox> entity_box;
  for (const auto& e : r.entities) {
    entity_box[e.id] = union_bbox(e.lines);
    for (const auto& b : e.lines) rect(out, b, class_color(classes, e.label), 2);
  }

  std::vector<bool> correct(r.relationships.size(), true);
  if (gt != nullptr) {
    const EntityMatch em = score_entities(r.entities, *gt);
    for (std::size_t g = 0; g < gt->gt_entities.size(); ++g) {
      if (em.gt_to_pred[g] >= 0) continue;
      for (int id : gt->gt_entities[g].line_ids) rect(out, gt->gt_lines[id].bbox, "red", 1);
    }
    const RelationshipMatch rm = score_relationships(r, *gt);
    correct = rm.pred_correct;
    for (std::size_t g = 0; g < gt->gt_relationships.size(); ++g) {
      if (rm.gt_matched[g]) continue;
      const auto [e1, e2] = gt->gt_relationships[g];
      segment(out, gt->gt_lines[gt->gt_entities[e1].line_ids.front()].bbox,
              gt->gt_lines[gt->gt_entities[e2].line_ids.front()].bbox, "red");
    }
  }
  for (std::size_t k = 0; k < r.relationships.size(); ++k) {
    const auto [a, b] = r.relationships[k];
    segment(out, entity_box.at(a), entity_box.at(b), correct[k] ? "green" : "yellow");
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace formgraph
