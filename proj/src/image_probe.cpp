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

#include "image_probe.hpp"

#include <array>
#include <cmath>
#include <fstream>

namespace formgraph::detail {

std::optional<std::pair<double, double>> png_size(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<unsigned char, 24> head{};
  if (!in.read(reinterpret_cast<char*>(head.data()), head.size())) return std::nullopt;
  static constexpr std::array<unsigned char, 8> kSig = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (!std::equal(kSig.begin(), kSig.end(), head.begin())) return std::nullopt;
  const auto be32 = [&](int at) {
    return (std::uint32_t{head[at]} << 24) | (std::uint32_t{head[at + 1]} << 16) |
           (std::uint32_t{head[at + 2]} << 8) | std::uint32_t{head[at + 3]};
  };
  const double w = be32(16), h = be32(20);
  if (w <= 0 || h <= 0) return std::nullopt;
  return std::pair{w, h};
}

std::optional<std::pair<double, double>> sibling_image_size(const std::filesystem::path& annotation) {
  const auto stem = annotation.stem().string() + ".png";
  const auto dir = annotation.parent_path();
  for (const auto& candidate : {dir.parent_path() / "images" / stem, dir / stem}) {
    if (auto size = png_size(candidate)) return size;
  }
  return std::nullopt;
}

std::pair<double, double> extent_of(const std::vector<BBox>& boxes) {
  double w = 1, h = 1;
  for (const BBox& b : boxes) {
    w = std::max(w, std::ceil(b.x2));
    h = std::max(h, std::ceil(b.y2));
  }
  return {w, h};
}

}  // namespace formgraph::detail
