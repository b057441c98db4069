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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "formgraph/constants.hpp"
#include "formgraph/error.hpp"
#include "formgraph/weights.hpp"

namespace formgraph::nn {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
Mat<T> matrix_from(const Tensor& t) {
  if (t.shape.size() != 2) throw ShapeError("expected a 2-d tensor");
  Mat<T> m(t.shape[0], t.shape[1]);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(t.data[i]);
  return m;
}

template <typename T>
Vec<T> vector_from(const Tensor& t) {
  if (t.shape.size() != 1) throw ShapeError("expected a 1-d tensor");
  Vec<T> v(t.shape[0]);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = static_cast<T>(t.data[i]);
  return v;
}

// y = W x + b. An empty bias means the layer has none.
template <typename T>
struct Linear {
  Mat<T> weight;
  Vec<T> bias;

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }

  Vec<T> operator()(const Vec<T>& x) const {
    if (x.size() != weight.cols()) {
      throw ShapeError("linear: input has " + std::to_string(x.size()) + " entries, expected " +
                       std::to_string(weight.cols()));
    }
    Vec<T> y = weight * x;
    if (bias.size() != 0) y += bias;
    return y;
  }

  static Linear load(const ModelWeights& w, const std::string& prefix, bool with_bias = true) {
    Linear l;
    l.weight = matrix_from<T>(w.at(prefix + ".weight"));
    if (with_bias) {
      l.bias = vector_from<T>(w.at(prefix + ".bias"));
      if (l.bias.size() != l.weight.rows()) throw ShapeError(prefix + ": bias/weight mismatch");
    }
    return l;
  }
};

template <typename T>
struct GroupNorm {
  int groups = kGroupNormGroups;
  Vec<T> gamma;
  Vec<T> beta;
};

// Per group: subtract the mean, divide by sqrt(var + eps); then gamma * y + beta.
template <typename T>
Vec<T> group_norm(const Vec<T>& x, int groups, const Vec<T>& gamma, const Vec<T>& beta,
                  T eps = static_cast<T>(kGroupNormEps)) {
  if (groups < 1 || x.size() % groups != 0) {
    throw ShapeError("group_norm: " + std::to_string(groups) + " groups do not divide " +
                     std::to_string(x.size()));
  }
  if (gamma.size() != x.size() || beta.size() != x.size()) throw ShapeError("group_norm: affine size");
  const Eigen::Index size = x.size() / groups;
  Vec<T> y(x.size());
  for (int g = 0; g < groups; ++g) {
    const auto seg = x.segment(g * size, size);
    const T mean = seg.mean();
    const T var = (seg.array() - mean).square().mean();
    const T inv = T(1) / std::sqrt(var + eps);
    y.segment(g * size, size) = ((seg.array() - mean) * inv).matrix();
  }
  return (gamma.array() * y.array() + beta.array()).matrix();
}

// fc2(dropout(relu(norm(fc1(x))))); dropout is the identity at inference.
template <typename T>
struct Mlp2 {
  Linear<T> fc1;
  std::optional<GroupNorm<T>> norm;
  Linear<T> fc2;

  Vec<T> operator()(const Vec<T>& x) const {
    Vec<T> h = fc1(x);
    if (norm) h = group_norm<T>(h, norm->groups, norm->gamma, norm->beta);
    h = h.cwiseMax(T(0));
    return fc2(h);
  }

  static Mlp2 load(const ModelWeights& w, const std::string& prefix, int groups) {
    Mlp2 m;
    m.fc1 = Linear<T>::load(w, prefix + ".fc1");
    m.norm = GroupNorm<T>{groups, vector_from<T>(w.at(prefix + ".norm.gamma")),
                          vector_from<T>(w.at(prefix + ".norm.beta"))};
    m.fc2 = Linear<T>::load(w, prefix + ".fc2");
    return m;
  }
};

template <typename T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
Vec<T> softmax(const Vec<T>& logits) {
  if (logits.size() == 0) return logits;
  const T m = logits.maxCoeff();
  Vec<T> e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

}  // namespace formgraph::nn
