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

#include "formgraph/metrics.hpp"

#include <cstdio>
#include <functional>
#include <json.hpp>
#include <set>

#include "formgraph/constants.hpp"
#include "formgraph/error.hpp"

namespace formgraph {

double Prf::precision() const {
  if (tp + fp == 0) return fn == 0 ? 100.0 : 0.0;
  return 100.0 * tp / (tp + fp);
}

double Prf::recall() const {
  if (tp + fn == 0) return fp == 0 ? 100.0 : 0.0;
  return 100.0 * tp / (tp + fn);
}

double Prf::f1() const {
  const double p = precision(), r = recall();
  if (p + r == 0) return 0.0;
  return 2 * p * r / (p + r);
}

bool lines_match(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  if (pred.size() != gt.size() || pred.empty()) return false;
  const std::size_t n = pred.size();
  std::vector<int> owner(n, -1);  // gt index -> pred index
  // Kuhn's augmenting paths; entities hold a handful of lines.
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t p, std::vector<bool>& seen) {
    for (std::size_t g = 0; g < n; ++g) {
      if (seen[g] || iou(pred[p], gt[g]) < kEvalLineIou) continue;
      seen[g] = true;
      if (owner[g] < 0 || augment(static_cast<std::size_t>(owner[g]), seen)) {
        owner[g] = static_cast<int>(p);
        return true;
      }
    }
    return false;
  };
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<bool> seen(n, false);
    if (!augment(p, seen)) return false;
  }
  return true;
}

namespace {

std::vector<BBox> gt_entity_boxes(const Document& gt, const Entity& e) {
  std::vector<BBox> boxes;
  for (int id : e.line_ids) boxes.push_back(gt.gt_lines.at(id).bbox);
  return boxes;
}

bool holds_line(const PredictedEntity& e, const BBox& line) {
  return std::any_of(e.lines.begin(), e.lines.end(), [&](const BBox& b) { return iou(b, line) >= kEvalLineIou; });
}

}  // namespace

EntityMatch score_entities(const std::vector<PredictedEntity>& predictions, const Document& gt) {
  EntityMatch m;
  m.pred_to_gt.assign(predictions.size(), -1);
  m.gt_to_pred.assign(gt.gt_entities.size(), -1);
  std::vector<std::vector<BBox>> gt_boxes;
  for (const auto& e : gt.gt_entities) gt_boxes.push_back(gt_entity_boxes(gt, e));

  for (std::size_t p = 0; p < predictions.size(); ++p) {
    for (std::size_t g = 0; g < gt.gt_entities.size(); ++g) {
      if (m.gt_to_pred[g] >= 0 || gt.gt_entities[g].label != predictions[p].label) continue;
      if (lines_match(predictions[p].lines, gt_boxes[g])) {
        m.pred_to_gt[p] = static_cast<int>(g);
        m.gt_to_pred[g] = static_cast<int>(p);
        break;
      }
    }
  }
  m.counts.tp = static_cast<int>(std::count_if(m.pred_to_gt.begin(), m.pred_to_gt.end(), [](int g) { return g >= 0; }));
  m.counts.fp = static_cast<int>(predictions.size()) - m.counts.tp;
  m.counts.fn = static_cast<int>(gt.gt_entities.size()) - m.counts.tp;
  return m;
}

RelationshipMatch score_relationships(const GraphResult& predicted, const Document& gt, bool key_value_only) {
  std::map<int, const PredictedEntity*> by_id;
  for (const auto& e : predicted.entities) by_id[e.id] = &e;

  std::vector<EntityPair> gt_rels;
  for (const auto& r : gt.gt_relationships) {
    if (key_value_only && gt.gt_entities[r.first].label == gt.gt_entities[r.second].label) continue;
    gt_rels.push_back(r);
  }

  RelationshipMatch m;
  m.gt_matched.assign(gt_rels.size(), false);
  const auto first_line = [&](int entity) { return gt.gt_lines.at(gt.gt_entities.at(entity).line_ids.front()).bbox; };
  const auto side_ok = [&](const PredictedEntity& p, int entity) {
    return p.label == gt.gt_entities[entity].label && holds_line(p, first_line(entity));
  };

  for (const auto& [ia, ib] : predicted.relationships) {
    const auto fa = by_id.find(ia), fb = by_id.find(ib);
    if (fa == by_id.end() || fb == by_id.end()) throw UsageError("relationship references unknown entity");
    const PredictedEntity& a = *fa->second;
    const PredictedEntity& b = *fb->second;
    if (key_value_only && a.label == b.label) continue;
    bool correct = false;
    for (std::size_t g = 0; g < gt_rels.size() && !correct; ++g) {
      if (m.gt_matched[g]) continue;
      const auto [e1, e2] = gt_rels[g];
      if ((side_ok(a, e1) && side_ok(b, e2)) || (side_ok(a, e2) && side_ok(b, e1))) {
        m.gt_matched[g] = true;
        correct = true;
      }
    }
    m.pred_correct.push_back(correct);
  }
  m.counts.tp = static_cast<int>(std::count(m.pred_correct.begin(), m.pred_correct.end(), true));
  m.counts.fp = static_cast<int>(m.pred_correct.size()) - m.counts.tp;
  m.counts.fn = static_cast<int>(gt_rels.size()) - m.counts.tp;
  return m;
}

std::optional<double> HitAt1::percent() const {
  if (queries == 0) return std::nullopt;
  return 100.0 * hits / queries;
}

HitAt1 hit_at_1(const Document& gt, const std::map<EntityPair, double>& scores) {
  std::map<int, std::set<int>> parents;
  for (const auto& [p, c] : gt.gt_links) parents[c].insert(p);
  const int n = static_cast<int>(gt.gt_entities.size());
  HitAt1 h;
  for (const auto& [child, truth] : parents) {
    int best = -1;
    double best_score = 0;
    for (int cand = 0; cand < n; ++cand) {
      if (cand == child) continue;
      const auto it = scores.find({std::min(cand, child), std::max(cand, child)});
      const double s = it == scores.end() ? 0.0 : it->second;
      if (best < 0 || s > best_score) {
        best = cand;
        best_score = s;
      }
    }
    ++h.queries;
    if (truth.count(best)) ++h.hits;
  }
  return h;
}

EvalReport evaluate_corpus(const std::vector<GraphResult>& predictions, const std::vector<Document>& gt,
                           const EvalOptions& options) {
  if (predictions.size() != gt.size()) throw UsageError("evaluate: prediction/ground-truth count mismatch");
  EvalReport r;
  r.documents = static_cast<int>(gt.size());
  std::array<double, 3> ent_sum{}, rel_sum{};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const Prf e = score_entities(predictions[i].entities, gt[i]).counts;
    const Prf rel = score_relationships(predictions[i], gt[i], options.key_value_only).counts;
    r.entity += e;
    r.relationship += rel;
    if (predictions[i].hit_scores) {
      const HitAt1 h = hit_at_1(gt[i], *predictions[i].hit_scores);
      r.hit.queries += h.queries;
      r.hit.hits += h.hits;
    }
    ent_sum[0] += e.recall();
    ent_sum[1] += e.precision();
    ent_sum[2] += e.f1();
    rel_sum[0] += rel.recall();
    rel_sum[1] += rel.precision();
    rel_sum[2] += rel.f1();
  }
  if (options.per_document && !gt.empty()) {
    for (auto& v : ent_sum) v /= static_cast<double>(gt.size());
    for (auto& v : rel_sum) v /= static_cast<double>(gt.size());
    r.entity_macro = ent_sum;
    r.relationship_macro = rel_sum;
  }
  return r;
}

namespace {

nlohmann::ordered_json prf_json(const Prf& p) {
  return {{"recall", p.recall()}, {"precision", p.precision()}, {"f1", p.f1()},
          {"tp", p.tp},           {"fp", p.fp},                 {"fn", p.fn}};
}

std::string row(const char* name, double r, double p, double f) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "| %-22s | %7.2f | %9.2f | %7.2f |\n", name, r, p, f);
  return buf;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["documents"] = report.documents;
  j["entity"] = prf_json(report.entity);
  j["relationship"] = prf_json(report.relationship);
  if (auto pct = report.hit.percent()) {
    j["hit_at_1"] = *pct;
  } else {
    j["hit_at_1"] = nullptr;
  }
  j["hit_queries"] = report.hit.queries;
  j["hit_hits"] = report.hit.hits;
  if (report.entity_macro) {
    j["per_document"] = {
        {"entity", {{"recall", (*report.entity_macro)[0]}, {"precision", (*report.entity_macro)[1]},
                    {"f1", (*report.entity_macro)[2]}}},
        {"relationship",
         {{"recall", (*report.relationship_macro)[0]}, {"precision", (*report.relationship_macro)[1]},
          {"f1", (*report.relationship_macro)[2]}}}};
  }
  return j.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  const std::string rule = "+------------------------+---------+-----------+---------+\n";
  std::string out;
  out += rule;
  out += "| Task                   |  Recall | Precision |      F1 |\n";
  out += rule;
  out += row("Entity detection", report.entity.recall(), report.entity.precision(), report.entity.f1());
  out += row("Relationship detection", report.relationship.recall(), report.relationship.precision(),
             report.relationship.f1());
  if (report.entity_macro) {
    const auto& e = *report.entity_macro;
    const auto& rel = *report.relationship_macro;
    out += row("Entity (per document)", e[0], e[1], e[2]);
    out += row("Relationship (per doc)", rel[0], rel[1], rel[2]);
  }
  out += rule;
  if (auto pct = report.hit.percent()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "Hit@1: %.2f (%d/%d queries)\n", *pct, report.hit.hits, report.hit.queries);
    out += buf;
  }
  out += "Documents: " + std::to_string(report.documents) + "\n";
  return out;
}

}  // namespace formgraph
