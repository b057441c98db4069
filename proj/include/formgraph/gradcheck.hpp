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
#include <string>

namespace formgraph {

enum class GradcheckFunction {
  kLinear,          // r . (W x + b), at most 16 outputs
  kProposalMlpBce,  // proposal MLP on both pair orders + BCE
};

GradcheckFunction parse_gradcheck_function(const std::string& name);
const char* gradcheck_function_name(GradcheckFunction f);

struct GradcheckOptions {
  std::uint64_t seed = 0;
  int draws = 100;             // independent random parameter sets
  int coords_per_draw = 128;   // sampled coordinates per draw (0 = all)
  double eps = 1e-5;
  int input_size = 33;         // proposal features for 4 classes
  int hidden = 256;
  int batch = 8;
};

struct GradcheckReport {
  double max_rel_error = 0;
  int checked = 0;
  // Coordinates whose ReLU pattern flips inside the difference stencil; the
  // function is not differentiable there, so they are excluded.
  int skipped_kinks = 0;
  int draws = 0;
};

// Compares analytic gradients against central differences in double
// precision. Relative error is |a - n| / max(|a|, |n|, 1e-6). Throws
// UsageError for eps <= 0 and std::runtime_error on non-finite values.
GradcheckReport finite_diff_gradcheck(GradcheckFunction function, const GradcheckOptions& options);

}  // namespace formgraph
