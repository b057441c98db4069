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

#include <cstring>
#include <filesystem>

#include "formgraph/error.hpp"
#include "formgraph/gnn.hpp"
#include "formgraph/weights.hpp"

using namespace formgraph;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.num_classes = 2;
  c.feature_size = c.visual_size = 16;
  c.proposal_hidden = 8;
  c.stage_depths = {2, 1, 1};
  return c;
}

}  // namespace

TEST(Manifest, NamesAndShapes) {
  const auto m = model_manifest(tiny());
  ASSERT_FALSE(m.empty());
  EXPECT_EQ(m.front().name, "proposal.fc1.weight");
  EXPECT_EQ(m.front().shape, (std::vector<std::int64_t>{8, 29}));
  bool found = false;
  for (const auto& s : m) {
    if (s.name == "stage0.block1.attn.query.weight") {
      found = true;
      EXPECT_EQ(s.shape, (std::vector<std::int64_t>{16, 16}));
    }
    EXPECT_EQ(s.name.find("attn.query.bias"), std::string::npos);
  }
  EXPECT_TRUE(found);
}

TEST(ModelConfig, Validate) {
  ModelConfig c = tiny();
  EXPECT_NO_THROW(c.validate());
  c.feature_size = 12;  // not divisible into 8 groups
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(Fgw1, RoundTripIsExact) {
  const ModelWeights w = ModelWeights::random(tiny(), 3);
  const std::string bytes = serialize_weights(w);
  ASSERT_GE(bytes.size(), 8u);
  EXPECT_EQ(bytes.substr(0, 4), "FGW1");
  EXPECT_EQ(deserialize_weights(bytes), w);
  EXPECT_EQ(serialize_weights(deserialize_weights(bytes)), bytes);
}

TEST(Fgw1, FileRoundTripAndConfigInference) {
  const auto path = std::filesystem::temp_directory_path() / "formgraph_weights_test.fgw";
  const ModelWeights w = ModelWeights::random(tiny(), 5);
  save_weights(w, path);
  EXPECT_EQ(load_weights(path, tiny()), w);
  EXPECT_EQ(infer_config(read_weights(path)), tiny());
  std::filesystem::remove(path);
  EXPECT_THROW(read_weights(path), WeightsError);
}

TEST(Fgw1, BadMagic) {
  std::string bytes = serialize_weights(ModelWeights::zeros(tiny()));
  bytes[3] = '2';
  EXPECT_THROW(deserialize_weights(bytes), WeightsError);
}

TEST(Fgw1, Truncated) {
  const std::string bytes = serialize_weights(ModelWeights::zeros(tiny()));
  for (std::size_t cut : {std::size_t{2}, std::size_t{7}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_THROW(deserialize_weights(bytes.substr(0, cut)), WeightsError) << cut;
  }
  EXPECT_THROW(deserialize_weights(bytes + "x"), WeightsError);
}

TEST(Fgw1, HeaderLengthIsLittleEndian) {
  const std::string bytes = serialize_weights(ModelWeights::zeros(tiny()));
  const auto b = [&](int i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])); };
  const std::uint32_t len = b(4) | b(5) << 8 | b(6) << 16 | b(7) << 24;
  ASSERT_LT(8u + len, bytes.size());
  EXPECT_EQ(bytes[8], '[');  // the manifest is a JSON array
  EXPECT_EQ(bytes[8 + len - 1], ']');
}

TEST(Manifest, MissingAndMisshapedTensors) {
  const ModelConfig c = tiny();
  ModelWeights full = ModelWeights::zeros(c);
  EXPECT_NO_THROW(full.check_manifest(c));

  ModelWeights missing;
  for (const auto& name : full.names()) {
    if (name != "stage1.edge_head.bias") missing.add(name, full.at(name));
  }
  try {
    missing.check_manifest(c);
    FAIL() << "missing tensor accepted";
  } catch (const WeightsError& e) {
    EXPECT_NE(std::string(e.what()).find("stage1.edge_head.bias"), std::string::npos);
  }

  ModelWeights bad = full;
  bad.at("stage0.node_head.weight").shape = {3, 16};
  bad.at("stage0.node_head.weight").data.resize(48);
  EXPECT_THROW(bad.check_manifest(c), WeightsError);
  EXPECT_THROW(gnn::Model<float>::from_weights(bad, c), WeightsError);

  ModelWeights extra = full;
  extra.add("stray", Tensor{{1}, {0}});
  EXPECT_THROW(extra.check_manifest(c), WeightsError);
}

TEST(ModelWeights, AddRejectsInconsistentTensors) {
  ModelWeights w;
  EXPECT_THROW(w.add("x", Tensor{{2, 2}, {1, 2, 3}}), WeightsError);
  w.add("x", Tensor{{1}, {0}});
  EXPECT_THROW(w.add("x", Tensor{{1}, {0}}), WeightsError);
  EXPECT_THROW(w.at("y"), WeightsError);
}

TEST(ModelWeights, RandomIsSeeded) {
  EXPECT_EQ(ModelWeights::random(tiny(), 1), ModelWeights::random(tiny(), 1));
  EXPECT_NE(ModelWeights::random(tiny(), 1), ModelWeights::random(tiny(), 2));
  const auto w = ModelWeights::random(tiny(), 1);
  for (float g : w.at("stage0.block0.edge_mlp.norm.gamma").data) EXPECT_EQ(g, 1.0f);
}
