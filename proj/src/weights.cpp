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

#include "formgraph/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "formgraph/document.hpp"
#include "formgraph/error.hpp"
#include "formgraph/rng.hpp"

namespace formgraph {

using json = nlohmann::json;

void ModelConfig::validate() const {
  if (num_classes < 1) throw UsageError("model config: num_classes must be >= 1");
  if (feature_size < 1 || visual_size < 1 || proposal_hidden < 1) {
    throw UsageError("model config: sizes must be positive");
  }
  if (heads < 1 || feature_size % heads != 0) {
    throw UsageError("model config: heads must divide feature_size");
  }
  if (norm_groups < 1 || feature_size % norm_groups != 0) {
    throw UsageError("model config: norm_groups must divide feature_size");
  }
  if (stage_depths.empty()) throw UsageError("model config: need at least one stage");
  for (int d : stage_depths) {
    if (d < 0) throw UsageError("model config: negative stage depth");
  }
}

std::int64_t Tensor::numel() const {
  return std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>());
}

namespace {

void add_linear(std::vector<TensorSpec>& out, const std::string& prefix, std::int64_t out_dim,
                std::int64_t in_dim, bool bias = true) {
  out.push_back({prefix + ".weight", {out_dim, in_dim}});
  if (bias) out.push_back({prefix + ".bias", {out_dim}});
}

void add_mlp(std::vector<TensorSpec>& out, const std::string& prefix, std::int64_t in_dim,
             std::int64_t width) {
  add_linear(out, prefix + ".fc1", width, in_dim);
  out.push_back({prefix + ".norm.gamma", {width}});
  out.push_back({prefix + ".norm.beta", {width}});
  add_linear(out, prefix + ".fc2", width, width);
}

}  // namespace

std::vector<TensorSpec> model_manifest(const ModelConfig& config) {
  config.validate();
  const std::int64_t f = config.feature_size;
  std::vector<TensorSpec> out;
  add_linear(out, "proposal.fc1", config.proposal_hidden, config.proposal_input_size());
  add_linear(out, "proposal.fc2", 1, config.proposal_hidden);
  add_linear(out, "init.node_transition", f, config.node_initial_size());
  add_linear(out, "init.edge_transition", f, config.edge_initial_size());
  for (std::size_t s = 0; s < config.stage_depths.size(); ++s) {
    const std::string stage = "stage" + std::to_string(s);
    if (s > 0) {
      add_linear(out, stage + ".node_transition", f, f + config.node_initial_size());
      add_linear(out, stage + ".edge_transition", f, f + config.edge_initial_size());
    }
    for (int b = 0; b < config.stage_depths[s]; ++b) {
      const std::string block = stage + ".block" + std::to_string(b);
      add_mlp(out, block + ".edge_mlp", 3 * f, f);
      add_mlp(out, block + ".node_mlp", 2 * f, f);
      for (const char* p : {"query", "key", "value", "output"}) {
        add_linear(out, block + ".attn." + p, f, f, /*bias=*/false);
      }
    }
    add_linear(out, stage + ".node_head", config.num_classes, f);
    add_linear(out, stage + ".edge_head", kEdgeScoreCount, f);
  }
  return out;
}

ModelWeights ModelWeights::zeros(const ModelConfig& config) {
  ModelWeights w;
  for (auto& spec : model_manifest(config)) {
    Tensor t;
    t.shape = spec.shape;
    t.data.assign(static_cast<std::size_t>(t.numel()), 0.0f);
    w.add(spec.name, std::move(t));
  }
  return w;
}

ModelWeights ModelWeights::random(const ModelConfig& config, std::uint64_t seed) {
  ModelWeights w = zeros(config);
  Rng rng(seed);
  for (std::size_t i = 0; i < w.order_.size(); ++i) {
    const std::string& name = w.order_[i];
    Tensor& t = w.tensors_[i];
    if (name.ends_with(".gamma")) {
      std::fill(t.data.begin(), t.data.end(), 1.0f);
    } else if (t.shape.size() == 2) {
      const double scale = std::sqrt(2.0 / static_cast<double>(t.shape[1]));
      for (float& v : t.data) v = static_cast<float>(scale * rng.normal());
    }
  }
  return w;
}

void ModelWeights::add(const std::string& name, Tensor tensor) {
  if (tensor.numel() != static_cast<std::int64_t>(tensor.data.size())) {
    throw WeightsError("tensor '" + name + "': data length does not match shape");
  }
  if (contains(name)) throw WeightsError("duplicate tensor '" + name + "'");
  index_[name] = tensors_.size();
  order_.push_back(name);
  tensors_.push_back(std::move(tensor));
}

const Tensor& ModelWeights::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw WeightsError("missing tensor '" + name + "'");
  return tensors_[it->second];
}

Tensor& ModelWeights::at(const std::string& name) {
  return const_cast<Tensor&>(static_cast<const ModelWeights&>(*this).at(name));
}

namespace {

std::string shape_str(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace

void ModelWeights::check_manifest(const ModelConfig& config) const {
  const auto manifest = model_manifest(config);
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& spec = manifest[i];
    if (!contains(spec.name)) throw WeightsError("manifest mismatch: missing tensor '" + spec.name + "'");
    const Tensor& t = at(spec.name);
    if (t.shape != spec.shape) {
      throw WeightsError("manifest mismatch: tensor '" + spec.name + "' has shape " + shape_str(t.shape) +
                         ", expected " + shape_str(spec.shape));
    }
    if (order_[i] != spec.name) {
      throw WeightsError("manifest mismatch: tensor '" + spec.name + "' out of canonical order");
    }
  }
  if (order_.size() != manifest.size()) {
    throw WeightsError("manifest mismatch: unexpected tensor '" + order_[manifest.size()] + "'");
  }
}

ModelConfig infer_config(const ModelWeights& w) {
  ModelConfig c;
  const auto dim = [&](const std::string& name, int axis) {
    return static_cast<int>(w.at(name).shape.at(axis));
  };
  c.num_classes = dim("stage0.node_head.weight", 0);
  c.feature_size = dim("init.node_transition.weight", 0);
  c.visual_size = dim("init.node_transition.weight", 1) - (3 + c.num_classes);
  c.proposal_hidden = dim("proposal.fc1.weight", 0);
  c.stage_depths.clear();
  for (int s = 0; w.contains("stage" + std::to_string(s) + ".node_head.weight"); ++s) {
    int depth = 0;
    while (w.contains("stage" + std::to_string(s) + ".block" + std::to_string(depth) +
                      ".edge_mlp.fc1.weight")) {
      ++depth;
    }
    c.stage_depths.push_back(depth);
  }
  // Heads and norm groups are not recoverable from shapes; defaults apply.
  if (c.feature_size % c.heads != 0 || c.feature_size % c.norm_groups != 0) {
    throw WeightsError("weights: feature size incompatible with default heads/groups");
  }
  return c;
}

namespace {

constexpr char kMagic[4] = {'F', 'G', 'W', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(in[at + i])} << (8 * i);
  return v;
}

}  // namespace

std::string serialize_weights(const ModelWeights& weights) {
  json manifest = json::array();
  for (const auto& name : weights.names()) {
    manifest.push_back({{"name", name}, {"shape", weights.at(name).shape}, {"dtype", "f32"}});
  }
  const std::string header = manifest.dump();
  std::string out(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  for (const auto& name : weights.names()) {
    for (float f : weights.at(name).data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

ModelWeights deserialize_weights(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw WeightsError("weights: bad magic (expected FGW1)");
  }
  const std::size_t header_len = get_u32(bytes, 4);
  if (8 + header_len > bytes.size()) throw WeightsError("weights: truncated header");
  json manifest;
  try {
    manifest = json::parse(bytes.substr(8, header_len));
  } catch (const json::exception& e) {
    throw WeightsError(std::string("weights: malformed manifest: ") + e.what());
  }
  if (!manifest.is_array()) throw WeightsError("weights: manifest must be an array");

  ModelWeights out;
  std::size_t at = 8 + header_len;
  try {
    for (const auto& entry : manifest) {
      if (entry.at("dtype").get<std::string>() != "f32") {
        throw WeightsError("weights: unsupported dtype for '" + entry.at("name").get<std::string>() + "'");
      }
      Tensor t;
      t.shape = entry.at("shape").get<std::vector<std::int64_t>>();
      for (auto d : t.shape) {
        if (d < 0) throw WeightsError("weights: negative dimension");
      }
      const auto n = static_cast<std::size_t>(t.numel());
      if (n > (bytes.size() - at) / 4) {
        throw WeightsError("weights: truncated payload for '" + entry.at("name").get<std::string>() + "'");
      }
      t.data.resize(n);
      for (std::size_t i = 0; i < n; ++i, at += 4) t.data[i] = std::bit_cast<float>(get_u32(bytes, at));
      out.add(entry.at("name").get<std::string>(), std::move(t));
    }
  } catch (const json::exception& e) {
    throw WeightsError(std::string("weights: malformed manifest entry: ") + e.what());
  }
  if (at != bytes.size()) throw WeightsError("weights: trailing bytes after payload");
  return out;
}

void save_weights(const ModelWeights& weights, const std::filesystem::path& path) {
  write_text_file(path, serialize_weights(weights));
}

ModelWeights read_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightsError("cannot open weights file '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_weights(bytes);
}

ModelWeights load_weights(const std::filesystem::path& path, const ModelConfig& config) {
  ModelWeights w = read_weights(path);
  w.check_manifest(config);
  return w;
}

}  // namespace formgraph
