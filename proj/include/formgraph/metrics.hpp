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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "formgraph/document.hpp"
#include "formgraph/graph.hpp"

namespace formgraph {

// Detection counts with percentage precision/recall/F1. With nothing
// predicted and nothing to find, all three are 100.
struct Prf {
  int tp = 0;
  int fp = 0;
  int fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;

  Prf& operator+=(const Prf& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Prf&, const Prf&) = default;
};

// True iff there is a one-to-one pairing of pred and gt lines with every
// pair at IOU >= 0.5 (so no missing and no additional lines).
bool lines_match(const std::vector<BBox>& pred, const std::vector<BBox>& gt);

struct EntityMatch {
  Prf counts;
  std::vector<int> pred_to_gt;  // -1 when unmatched
  std::vector<int> gt_to_pred;
};

// Greedy one-to-one in prediction order; a match needs equal class and
// lines_match against the GT entity's lines.
EntityMatch score_entities(const std::vector<PredictedEntity>& predictions, const Document& gt);

struct RelationshipMatch {
  Prf counts;
  std::vector<bool> pred_correct;
  std::vector<bool> gt_matched;  // indexed like gt.gt_relationships
};

// A predicted relationship is correct when its two entities each hold a line
// at IOU >= 0.5 with the first line of one side of an unmatched GT
// relationship, with matching classes, in either orientation.
RelationshipMatch score_relationships(const GraphResult& predicted, const Document& gt,
                                      bool key_value_only = false);

struct HitAt1 {
  int queries = 0;
  int hits = 0;
  // Undefined without queries.
  std::optional<double> percent() const;
};

// For every GT child, the best-scoring other entity must be one of its GT
// parents. Missing pairs score 0; ties go to the lower entity id.
HitAt1 hit_at_1(const Document& gt, const std::map<EntityPair, double>& scores);

struct EvalReport {
  Prf entity;
  Prf relationship;
  HitAt1 hit;
  int documents = 0;
  // Set in per-document mode: macro averages of per-document percentages.
  std::optional<std::array<double, 3>> entity_macro;        // recall, precision, f1
  std::optional<std::array<double, 3>> relationship_macro;  // recall, precision, f1
};

struct EvalOptions {
  bool per_document = false;
  bool key_value_only = false;
};

// Corpus-level micro scoring (optionally also per-document averages).
EvalReport evaluate_corpus(const std::vector<GraphResult>& predictions, const std::vector<Document>& gt,
                           const EvalOptions& options = {});

std::string report_to_json(const EvalReport& report);
// Plain-text tables of recall, precision and F1.
std::string report_to_text(const EvalReport& report);

}  // namespace formgraph
