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

#include "formgraph/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "formgraph/error.hpp"
#include "formgraph/rng.hpp"
#include "formgraph/trainer.hpp"

namespace formgraph {
namespace {

using Mat = nn::Mat<double>;
using Vec = nn::Vec<double>;

double rel_error(double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6}); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string("gradcheck: non-finite ") + what);
}

void fill_normal(double* p, Eigen::Index n, Rng& rng, double scale) {
  for (Eigen::Index i = 0; i < n; ++i) p[i] = scale * rng.normal();
}

// Coordinates to probe: all of [0, n) or a seeded sample of `k`.
std::vector<Eigen::Index> pick(Eigen::Index n, int k, Rng& rng) {
  std::vector<Eigen::Index> out;
  if (k <= 0 || k >= n) {
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  for (int i = 0; i < k; ++i) out.push_back(rng.uniform_int(0, static_cast<int>(n - 1)));
  return out;
}

// Magnitudes in [0.5, 1.5] with random signs. Keeping x and coef away from
// zero keeps every gradient entry away from zero, so the ratio measures the
// gradient rather than the rounding noise of f.
void fill_signed(double* p, Eigen::Index n, Rng& rng) {
  for (Eigen::Index i = 0; i < n; ++i) p[i] = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.5, 1.5);
}

void check_linear(const GradcheckOptions& o, Rng& rng, GradcheckReport& r) {
  constexpr int kMaxOutputs = 16;
  const int out = std::min(o.hidden, kMaxOutputs), in = o.input_size;
  Mat w(out, in);
  Vec b(out), x(in), coef(out);
  fill_signed(w.data(), w.size(), rng);
  fill_signed(b.data(), b.size(), rng);
  fill_signed(x.data(), x.size(), rng);
  fill_signed(coef.data(), coef.size(), rng);
  const auto f = [&] { return coef.dot(w * x + b); };
  // d/dW = coef x^T, d/db = coef.
  const Mat gw = coef * x.transpose();
  for (Eigen::Index i : pick(w.size(), o.coords_per_draw, rng)) {
    double& p = w.data()[i];
    const double keep = p;
    p = keep + o.eps;
    const double up = f();
    p = keep - o.eps;
    const double down = f();
    p = keep;
    const double numeric = (up - down) / (2 * o.eps);
    require_finite(numeric, "difference");
    r.max_rel_error = std::max(r.max_rel_error, rel_error(gw.data()[i], numeric));
    ++r.checked;
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double keep = b[i];
    b[i] = keep + o.eps;
    const double up = f();
    b[i] = keep - o.eps;
    const double down = f();
    b[i] = keep;
    r.max_rel_error = std::max(r.max_rel_error, rel_error(coef[i], (up - down) / (2 * o.eps)));
    ++r.checked;
  }
}

// ReLU activation pattern of fc1 on both orders of every example.
std::vector<bool> relu_pattern(const ProposalMlp<double>& mlp, const ProposalExamples& d) {
  std::vector<bool> out;
  for (const Mat* x : {&d.forward, &d.backward}) {
    Mat pre = (*x) * mlp.fc1.weight.transpose();
    pre.rowwise() += mlp.fc1.bias.transpose();
    for (Eigen::Index i = 0; i < pre.size(); ++i) out.push_back(pre.data()[i] > 0);
  }
  return out;
}

void check_proposal(const GradcheckOptions& o, Rng& rng, GradcheckReport& r) {
  ProposalExamples d;
  d.forward.resize(o.batch, o.input_size);
  d.backward.resize(o.batch, o.input_size);
  fill_normal(d.forward.data(), d.forward.size(), rng, 1.0);
  fill_normal(d.backward.data(), d.backward.size(), rng, 1.0);
  for (int i = 0; i < o.batch; ++i) d.targets.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);

  ProposalMlp<double> mlp = init_proposal_mlp(o.input_size, o.hidden, rng.next());
  fill_normal(mlp.fc1.bias.data(), mlp.fc1.bias.size(), rng, 0.1);
  mlp.fc2.bias[0] = 0.1 * rng.normal();

  ProposalGrad g;
  const double base = proposal_loss(mlp, d, {}, &g);
  require_finite(base, "loss");
  const std::vector<bool> pattern = relu_pattern(mlp, d);

  struct Param {
    double* data;
    const double* grad;
    Eigen::Index size;
  };
  const Param params[] = {
      {mlp.fc1.weight.data(), g.fc1_weight.data(), mlp.fc1.weight.size()},
      {mlp.fc1.bias.data(), g.fc1_bias.data(), mlp.fc1.bias.size()},
      {mlp.fc2.weight.data(), g.fc2_weight.data(), mlp.fc2.weight.size()},
      {mlp.fc2.bias.data(), g.fc2_bias.data(), mlp.fc2.bias.size()},
  };
  for (const Param& p : params) {
    for (Eigen::Index i : pick(p.size, o.coords_per_draw, rng)) {
      const double keep = p.data[i];
      p.data[i] = keep + o.eps;
      const double up = proposal_loss(mlp, d, {}, nullptr);
      const bool kink_up = relu_pattern(mlp, d) != pattern;
      p.data[i] = keep - o.eps;
      const double down = proposal_loss(mlp, d, {}, nullptr);
      const bool kink_down = relu_pattern(mlp, d) != pattern;
      p.data[i] = keep;
      if (kink_up || kink_down) {
        ++r.skipped_kinks;
        continue;
      }
      const double numeric = (up - down) / (2 * o.eps);
      require_finite(numeric, "difference");
      require_finite(p.grad[i], "gradient");
      r.max_rel_error = std::max(r.max_rel_error, rel_error(p.grad[i], numeric));
      ++r.checked;
    }
  }
}

}  // namespace

GradcheckFunction parse_gradcheck_function(const std::string& name) {
  if (name == "linear") return GradcheckFunction::kLinear;
  if (name == "proposal") return GradcheckFunction::kProposalMlpBce;
  throw UsageError("unknown gradcheck function '" + name + "' (expected linear or proposal)");
}

const char* gradcheck_function_name(GradcheckFunction f) {
  return f == GradcheckFunction::kLinear ? "linear" : "proposal";
}

GradcheckReport finite_diff_gradcheck(GradcheckFunction function, const GradcheckOptions& options) {
  if (!(options.eps > 0) || !std::isfinite(options.eps)) throw UsageError("gradcheck: eps must be positive");
  if (options.draws < 1 || options.input_size < 1 || options.hidden < 1 || options.batch < 1) {
    throw UsageError("gradcheck: draws, sizes and batch must be positive");
  }
  Rng rng(options.seed);
  GradcheckReport r;
  for (int draw = 0; draw < options.draws; ++draw) {
    if (function == GradcheckFunction::kLinear) {
      check_linear(options, rng, r);
    } else {
      check_proposal(options, rng, r);
    }
    ++r.draws;
  }
  return r;
}

}  // namespace formgraph
