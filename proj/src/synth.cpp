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

#include <algorithm>
#include <cmath>

#include "formgraph/document.hpp"
#include "formgraph/error.hpp"
#include "formgraph/rng.hpp"

namespace formgraph {
namespace {

constexpr double kMargin = 40.0;
constexpr double kCellWidth = 480.0;
constexpr double kRowPitch = 72.0;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::vector<double> jittered_scores(Rng& rng, const ClassSet& classes, int label, double jitter) {
  std::vector<double> scores = classes.one_hot(label);
  if (jitter <= 0) return scores;
  double sum = 0;
  for (double& s : scores) {
    s = (1.0 - jitter) * s + jitter * rng.uniform();
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return scores;
}

}  // namespace

Document synth_form(std::uint64_t seed, const SynthParams& params) {
  if (params.rows < 1 || params.cols < 1) throw UsageError("synth_form: rows and cols must be >= 1");
  if (!is_probability(params.multiline_prob) || !is_probability(params.overseg_prob) ||
      !is_probability(params.jitter)) {
    throw UsageError("synth_form: probabilities and jitter must lie in [0, 1]");
  }

  Rng rng(seed);
  Document doc;
  doc.name = "synth-" + std::to_string(seed);
  doc.class_set = ClassSet::funsd();
  doc.image_width = 2 * kMargin + params.cols * kCellWidth;
  doc.image_height = 2 * kMargin + params.rows * kRowPitch;

  const int question = doc.class_set.index_of("question");
  const int answer = doc.class_set.index_of("answer");

  const auto add_gt_line = [&](const BBox& box, int label) {
    TextLine line;
    line.id = static_cast<int>(doc.gt_lines.size());
    line.bbox = box;
    line.confidence = 1.0;
    line.class_scores = doc.class_set.one_hot(label);
    doc.gt_lines.push_back(line);
    return line.id;
  };

  for (int r = 0; r < params.rows; ++r) {
    for (int c = 0; c < params.cols; ++c) {
      const double cell_x = kMargin + c * kCellWidth;
      const double row_y = kMargin + r * kRowPitch + rng.uniform(0.0, 8.0);
      const double height = rng.uniform(14.0, 22.0);

      const double qx = cell_x + rng.uniform(0.0, 20.0);
      const double qw = rng.uniform(70.0, 170.0);
      const BBox qbox{qx, row_y, qx + qw, row_y + height};

      const double ax = qbox.x2 + rng.uniform(10.0, 40.0);
      const double aw = rng.uniform(60.0, std::max(61.0, cell_x + kCellWidth - 10.0 - ax));
      const BBox abox{ax, row_y, ax + aw, row_y + height};

      const int q_entity = static_cast<int>(doc.gt_entities.size());
      doc.gt_entities.push_back(Entity{{add_gt_line(qbox, question)}, question});

      Entity ans{{add_gt_line(abox, answer)}, answer};
      if (rng.bernoulli(params.multiline_prob)) {
        const double y2 = abox.y2 + rng.uniform(3.0, 8.0);
        const double w2 = rng.uniform(40.0, aw);
        ans.line_ids.push_back(add_gt_line({ax, y2, ax + w2, y2 + height}, answer));
      }
      const int a_entity = static_cast<int>(doc.gt_entities.size());
      doc.gt_entities.push_back(std::move(ans));
      doc.gt_relationships.emplace_back(q_entity, a_entity);
      doc.gt_links.emplace_back(q_entity, a_entity);
    }
  }

  for (const TextLine& gt : doc.gt_lines) {
    const int label = gt.class_scores[question] > 0.5 ? question : answer;
    const auto add_input = [&](const BBox& box) {
      TextLine line = gt;
      line.id = static_cast<int>(doc.lines.size());
      line.bbox = box;
      line.class_scores = jittered_scores(rng, doc.class_set, label, params.jitter);
      doc.lines.push_back(std::move(line));
    };
    if (rng.bernoulli(params.overseg_prob)) {
      const double split = gt.bbox.x1 + gt.bbox.width() * rng.uniform(0.3, 0.7);
      const double gap = std::min(rng.uniform(2.0, 8.0), 0.2 * gt.bbox.width());
      add_input({gt.bbox.x1, gt.bbox.y1, split - 0.5 * gap, gt.bbox.y2});
      add_input({split + 0.5 * gap, gt.bbox.y1, gt.bbox.x2, gt.bbox.y2});
    } else {
      add_input(gt.bbox);
    }
  }

  doc.gt_relationships = normalize_pairs(doc.gt_relationships);
  validate_document(doc);
  return doc;
}

std::vector<Document> synth_corpus(std::uint64_t seed, int count, const SynthCorpusParams& params) {
  if (count < 0) throw UsageError("synth_corpus: negative count");
  Rng rng(seed);
  std::vector<Document> docs;
  docs.reserve(count);
  for (int i = 0; i < count; ++i) {
    SynthParams p;
    p.rows = rng.uniform_int(params.min_rows, params.max_rows);
    p.cols = rng.uniform_int(params.min_cols, params.max_cols);
    p.multiline_prob = params.multiline_prob;
    p.overseg_prob = params.overseg_prob;
    p.jitter = params.jitter;
    docs.push_back(synth_form(rng.next(), p));
  }
  return docs;
}

}  // namespace formgraph
