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

#include <cstdint>
#include <vector>

#include "formgraph/document.hpp"
#include "formgraph/proposal.hpp"
#include "formgraph/weights.hpp"

namespace formgraph {

// Pair features in both orders with a binary target.
struct ProposalExamples {
  nn::Mat<double> forward;   // row i: features(a_i, b_i)
  nn::Mat<double> backward;  // row i: features(b_i, a_i)
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
};

// All unordered pairs of every document's confident lines, labeled against
// its ground truth.
ProposalExamples build_proposal_examples(const std::vector<Document>& docs);

struct ProposalGrad {
  nn::Mat<double> fc1_weight;
  nn::Vec<double> fc1_bias;
  nn::Mat<double> fc2_weight;
  nn::Vec<double> fc2_bias;
};

// Mean BCE of sigmoid((logit(fwd) + logit(bwd)) / 2) over the rows in
// `rows` (all rows when empty), with its analytic gradient when `grad` is set.
double proposal_loss(const ProposalMlp<double>& mlp, const ProposalExamples& data,
                     const std::vector<std::size_t>& rows, ProposalGrad* grad);

// He-initialized weights, deterministic per seed.
ProposalMlp<double> init_proposal_mlp(int input_size, int hidden, std::uint64_t seed);

struct TrainOptions {
  int steps = 2000;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 128;
  int hidden = kFeatureSize;
  std::uint64_t seed = 0;
};

struct TrainResult {
  ProposalMlp<double> mlp;
  std::vector<double> loss_curve;  // minibatch loss per step
  double initial_loss = 0;         // full-data loss before the first step
  double final_loss = 0;           // full-data loss after the last step
};

// Minibatch SGD with momentum. Throws std::runtime_error when the loss
// stops being finite.
TrainResult train_proposal_mlp(const std::vector<Document>& docs, const TrainOptions& options);

struct ProposalEvaluation {
  double accuracy = 0;         // percent of pairs classified right at 0.5
  double selection_recall = 0; // percent of positive pairs kept by select_edges
  std::size_t pairs = 0;
  std::size_t positives = 0;
};

ProposalEvaluation evaluate_proposal(const ProposalMlp<double>& mlp, const std::vector<Document>& docs);

// Writes the proposal tensors into `weights` (shapes must already agree).
void store_proposal(ModelWeights& weights, const ProposalMlp<double>& mlp);

}  // namespace formgraph
