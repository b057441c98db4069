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

#include "formgraph/gradcheck.hpp"
#include "formgraph/trainer.hpp"

using namespace formgraph;

TEST(Trainer, ZeroStepsReturnsInitialization) {
  const auto docs = synth_corpus(1, 5);
  TrainOptions o;
  o.steps = 0;
  o.hidden = 16;
  o.seed = 3;
  const auto r = train_proposal_mlp(docs, o);
  const auto init = init_proposal_mlp(33, 16, 3);
  EXPECT_EQ(r.mlp.fc1.weight, init.fc1.weight);
  EXPECT_EQ(r.mlp.fc2.bias, init.fc2.bias);
  EXPECT_TRUE(r.loss_curve.empty());
  EXPECT_DOUBLE_EQ(r.initial_loss, r.final_loss);
}

TEST(Trainer, LossDecreases) {
  const auto docs = synth_corpus(2, 40);
  TrainOptions o;
  o.steps = 500;
  o.hidden = 64;
  o.seed = 1;
  const auto r = train_proposal_mlp(docs, o);
  EXPECT_EQ(r.loss_curve.size(), 500u);
  EXPECT_LT(r.final_loss, 0.5 * r.initial_loss);
}

TEST(Trainer, Deterministic) {
  const auto docs = synth_corpus(4, 10);
  TrainOptions o;
  o.steps = 50;
  o.hidden = 16;
  EXPECT_EQ(train_proposal_mlp(docs, o).mlp.fc1.weight, train_proposal_mlp(docs, o).mlp.fc1.weight);
}

TEST(ProposalLoss, MatchesPlainBce) {
  const auto docs = synth_corpus(5, 3);
  const auto data = build_proposal_examples(docs);
  ASSERT_GT(data.size(), 0u);
  const auto mlp = init_proposal_mlp(33, 8, 9);
  double want = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double z = (mlp.logit(data.forward.row(i).transpose()) + mlp.logit(data.backward.row(i).transpose())) / 2;
    const double s = nn::sigmoid(z);
    want += -(data.targets[i] * std::log(s) + (1 - data.targets[i]) * std::log(1 - s));
  }
  want /= static_cast<double>(data.size());
  EXPECT_NEAR(proposal_loss(mlp, data, {}, nullptr), want, 1e-10);
}

TEST(ProposalExamples, BothOrdersPresent) {
  const auto docs = synth_corpus(6, 2);
  const auto data = build_proposal_examples(docs);
  EXPECT_EQ(data.forward.rows(), static_cast<Eigen::Index>(data.size()));
  EXPECT_EQ(data.forward.cols(), 33);
  // Deltas flip sign between orders.
  for (Eigen::Index i = 0; i < data.forward.rows(); ++i) EXPECT_DOUBLE_EQ(data.forward(i, 0), -data.backward(i, 0));
}

TEST(Gradcheck, LinearAndProposalSmall) {
  GradcheckOptions o;
  o.draws = 5;
  const auto lin = finite_diff_gradcheck(GradcheckFunction::kLinear, o);
  EXPECT_LT(lin.max_rel_error, 1e-8);
  EXPECT_EQ(lin.draws, 5);
  o.hidden = 32;
  const auto prop = finite_diff_gradcheck(GradcheckFunction::kProposalMlpBce, o);
  EXPECT_LT(prop.max_rel_error, 1e-4);
  EXPECT_GT(prop.checked, 0);
  o.eps = 0;
  EXPECT_THROW(finite_diff_gradcheck(GradcheckFunction::kLinear, o), UsageError);
  EXPECT_THROW(parse_gradcheck_function("cubic"), UsageError);
}

TEST(StoreProposal, WritesIntoWeights) {
  ModelConfig c;
  c.feature_size = c.visual_size = 16;
  c.proposal_hidden = 8;
  c.stage_depths = {1, 1, 1};
  ModelWeights w = ModelWeights::zeros(c);
  const auto mlp = init_proposal_mlp(33, 8, 2);
  store_proposal(w, mlp);
  const auto back = ProposalMlp<double>::load(w);
  EXPECT_TRUE(back.fc1.weight.isApprox(mlp.fc1.weight, 1e-6));
  EXPECT_THROW(store_proposal(w, init_proposal_mlp(33, 9, 2)), ShapeError);
}
