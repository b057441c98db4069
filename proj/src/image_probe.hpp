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

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "formgraph/geometry.hpp"

namespace formgraph::detail {

// Width/height from a PNG header, if the file exists and is a PNG.
std::optional<std::pair<double, double>> png_size(const std::filesystem::path& path);

// Looks for <dir>/../images/<stem>.png and <dir>/<stem>.png next to an
// annotation file.
std::optional<std::pair<double, double>> sibling_image_size(const std::filesystem::path& annotation);

// Smallest integer canvas that contains every box; at least 1x1.
std::pair<double, double> extent_of(const std::vector<BBox>& boxes);

}  // namespace formgraph::detail
