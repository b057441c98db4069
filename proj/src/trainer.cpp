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

#include "formgraph/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "formgraph/error.hpp"
#include "formgraph/log.hpp"
#include "formgraph/rng.hpp"
#include "formgraph/supervision.hpp"

namespace formgraph {
namespace {

using Mat = nn::Mat<double>;
using Vec = nn::Vec<double>;

// Numerically stable -[y ln s + (1 - y) ln(1 - s)] for s = sigmoid(z).
double bce_with_logit(double z, double y) { return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z))); }

Mat gather(const Mat& m, const std::vector<std::size_t>& rows) {
  Mat out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

struct Pass {
  Mat pre;  // fc1 outputs before ReLU
  Mat hidden;
  Vec logit;
};

Pass forward(const ProposalMlp<double>& mlp, const Mat& x) {
  Pass p;
  p.pre = x * mlp.fc1.weight.transpose();
  p.pre.rowwise() += mlp.fc1.bias.transpose();
  p.hidden = p.pre.cwiseMax(0.0);
  p.logit = p.hidden * mlp.fc2.weight.row(0).transpose();
  p.logit.array() += mlp.fc2.bias[0];
  return p;
}

void backward(const ProposalMlp<double>& mlp, const Mat& x, const Pass& p, const Vec& dlogit, ProposalGrad& g) {
  g.fc2_weight.row(0) += (p.hidden.transpose() * dlogit).transpose();
  g.fc2_bias[0] += dlogit.sum();
  Mat dh = dlogit * mlp.fc2.weight.row(0);
  dh.array() *= (p.pre.array() > 0.0).cast<double>();
  g.fc1_weight += dh.transpose() * x;
  g.fc1_bias += dh.colwise().sum().transpose();
}

}  // namespace

ProposalExamples build_proposal_examples(const std::vector<Document>& docs) {
  std::vector<std::vector<double>> fwd, bwd;
  std::vector<double> targets;
  for (const Document& doc : docs) {
    const auto lines = confident_lines(doc.lines);
    const auto assignment = assign_lines(lines, doc.gt_lines);
    const auto labels = proposal_labels(lines, assignment, doc);
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < lines.size(); ++i) index[lines[i].id] = i;
    std::vector<BBox> obstacles;
    for (const PairLabel& p : labels) {
      const std::size_t ia = index.at(p.a), ib = index.at(p.b);
      obstacles.clear();
      for (std::size_t k = 0; k < lines.size(); ++k) {
        if (k != ia && k != ib) obstacles.push_back(lines[k].bbox);
      }
      fwd.push_back(build_proposal_features(lines[ia], lines[ib], doc, obstacles));
      bwd.push_back(build_proposal_features(lines[ib], lines[ia], doc, obstacles));
      targets.push_back(p.positive ? 1.0 : 0.0);
    }
  }
  ProposalExamples ex;
  const auto cols = fwd.empty() ? 0 : static_cast<Eigen::Index>(fwd.front().size());
  ex.forward.resize(static_cast<Eigen::Index>(fwd.size()), cols);
  ex.backward.resize(static_cast<Eigen::Index>(fwd.size()), cols);
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    if (static_cast<Eigen::Index>(fwd[i].size()) != cols) throw ShapeError("documents disagree on class count");
    for (Eigen::Index c = 0; c < cols; ++c) {
      ex.forward(static_cast<Eigen::Index>(i), c) = fwd[i][c];
      ex.backward(static_cast<Eigen::Index>(i), c) = bwd[i][c];
    }
  }
  ex.targets = std::move(targets);
  return ex;
}

double proposal_loss(const ProposalMlp<double>& mlp, const ProposalExamples& data,
                     const std::vector<std::size_t>& rows, ProposalGrad* grad) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
  }
  const auto& use = rows.empty() ? all : rows;
  if (use.empty()) throw UsageError("proposal_loss: no examples");
  const Mat xf = gather(data.forward, use), xb = gather(data.backward, use);
  const Pass pf = forward(mlp, xf), pb = forward(mlp, xb);
  const double n = static_cast<double>(use.size());

  double loss = 0;
  Vec dlogit(static_cast<Eigen::Index>(use.size()));
  for (std::size_t i = 0; i < use.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double z = 0.5 * (pf.logit[r] + pb.logit[r]);
    const double y = data.targets[use[i]];
    loss += bce_with_logit(z, y);
    dlogit[r] = 0.5 * (nn::sigmoid(z) - y) / n;
  }
  if (grad) {
    grad->fc1_weight = Mat::Zero(mlp.fc1.weight.rows(), mlp.fc1.weight.cols());
    grad->fc1_bias = Vec::Zero(mlp.fc1.bias.size());
    grad->fc2_weight = Mat::Zero(1, mlp.fc2.weight.cols());
    grad->fc2_bias = Vec::Zero(1);
    backward(mlp, xf, pf, dlogit, *grad);
    backward(mlp, xb, pb, dlogit, *grad);
  }
  return loss / n;
}

ProposalMlp<double> init_proposal_mlp(int input_size, int hidden, std::uint64_t seed) {
  if (input_size < 1 || hidden < 1) throw UsageError("proposal MLP sizes must be positive");
  Rng rng(seed);
  ProposalMlp<double> mlp;
  mlp.fc1.weight.resize(hidden, input_size);
  mlp.fc2.weight.resize(1, hidden);
  const double s1 = std::sqrt(2.0 / input_size), s2 = std::sqrt(1.0 / hidden);
  for (Eigen::Index i = 0; i < mlp.fc1.weight.size(); ++i) mlp.fc1.weight.data()[i] = s1 * rng.normal();
  for (Eigen::Index i = 0; i < mlp.fc2.weight.size(); ++i) mlp.fc2.weight.data()[i] = s2 * rng.normal();
  mlp.fc1.bias = Vec::Zero(hidden);
  mlp.fc2.bias = Vec::Zero(1);
  return mlp;
}

TrainResult train_proposal_mlp(const std::vector<Document>& docs, const TrainOptions& options) {
  if (docs.empty()) throw UsageError("train_proposal_mlp: no documents");
  if (options.steps < 0 || options.batch_size < 1 || !(options.learning_rate > 0)) {
    throw UsageError("train_proposal_mlp: steps >= 0, batch_size >= 1 and learning_rate > 0 required");
  }
  const ProposalExamples data = build_proposal_examples(docs);
  if (data.size() == 0) throw UsageError("train_proposal_mlp: documents yield no line pairs");

  TrainResult result;
  result.mlp = init_proposal_mlp(proposal_feature_size(docs.front().class_set.size()), options.hidden, options.seed);
  result.initial_loss = proposal_loss(result.mlp, data, {}, nullptr);

  ProposalGrad velocity{Mat::Zero(result.mlp.fc1.weight.rows(), result.mlp.fc1.weight.cols()),
                        Vec::Zero(result.mlp.fc1.bias.size()), Mat::Zero(1, result.mlp.fc2.weight.cols()),
                        Vec::Zero(1)};
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed ^ 0x9E3779B97F4A7C15ull);
  std::size_t cursor = order.size();
  const auto batch = std::min<std::size_t>(static_cast<std::size_t>(options.batch_size), order.size());
  ProposalGrad g;
  std::vector<std::size_t> rows;

  for (int step = 0; step < options.steps; ++step) {
    if (cursor + batch > order.size()) {
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i)))]);
      }
      cursor = 0;
    }
    rows.assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                order.begin() + static_cast<std::ptrdiff_t>(cursor + batch));
    cursor += batch;

    const double loss = proposal_loss(result.mlp, data, rows, &g);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("train_proposal_mlp: loss diverged at step " + std::to_string(step));
    }
    result.loss_curve.push_back(loss);
    const double m = options.momentum, lr = options.learning_rate;
    velocity.fc1_weight = m * velocity.fc1_weight - lr * g.fc1_weight;
    velocity.fc1_bias = m * velocity.fc1_bias - lr * g.fc1_bias;
    velocity.fc2_weight = m * velocity.fc2_weight - lr * g.fc2_weight;
    velocity.fc2_bias = m * velocity.fc2_bias - lr * g.fc2_bias;
    result.mlp.fc1.weight += velocity.fc1_weight;
    result.mlp.fc1.bias += velocity.fc1_bias;
    result.mlp.fc2.weight += velocity.fc2_weight;
    result.mlp.fc2.bias += velocity.fc2_bias;
  }
  result.final_loss = proposal_loss(result.mlp, data, {}, nullptr);
  if (!std::isfinite(result.final_loss)) throw std::runtime_error("train_proposal_mlp: final loss is not finite");
  log::info("proposal training: loss " + std::to_string(result.initial_loss) + " -> " +
            std::to_string(result.final_loss));
  return result;
}

ProposalEvaluation evaluate_proposal(const ProposalMlp<double>& mlp, const std::vector<Document>& docs) {
  ProposalEvaluation ev;
  std::size_t correct = 0, kept = 0;
  for (const Document& doc : docs) {
    const auto lines = confident_lines(doc.lines);
    const auto labels = proposal_labels(lines, assign_lines(lines, doc.gt_lines), doc);
    const auto scored = score_pairs(doc, lines, mlp);  // same (a, b) order as labels
    std::set<std::pair<int, int>> selected;
    for (const auto& c : select_edges(scored)) selected.emplace(c.a, c.b);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      ++ev.pairs;
      if ((scored[i].score >= 0.5) == labels[i].positive) ++correct;
      if (labels[i].positive) {
        ++ev.positives;
        if (selected.count({labels[i].a, labels[i].b})) ++kept;
      }
    }
  }
  ev.accuracy = ev.pairs ? 100.0 * static_cast<double>(correct) / static_cast<double>(ev.pairs) : 100.0;
  ev.selection_recall = ev.positives ? 100.0 * static_cast<double>(kept) / static_cast<double>(ev.positives) : 100.0;
  return ev;
}

void store_proposal(ModelWeights& weights, const ProposalMlp<double>& mlp) {
  const auto put = [&](const std::string& name, const double* data, Eigen::Index n) {
    Tensor& t = weights.at(name);
    if (t.numel() != n) throw ShapeError(name + ": trained tensor does not fit the model");
    for (Eigen::Index i = 0; i < n; ++i) t.data[static_cast<std::size_t>(i)] = static_cast<float>(data[i]);
  };
  put("proposal.fc1.weight", mlp.fc1.weight.data(), mlp.fc1.weight.size());
  put("proposal.fc1.bias", mlp.fc1.bias.data(), mlp.fc1.bias.size());
  put("proposal.fc2.weight", mlp.fc2.weight.data(), mlp.fc2.weight.size());
  put("proposal.fc2.bias", mlp.fc2.bias.data(), mlp.fc2.bias.size());
}

}  // namespace formgraph
