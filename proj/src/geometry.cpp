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

#include "formgraph/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "formgraph/error.hpp"

namespace formgraph {

bool BBox::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
         x1 <= x2 && y1 <= y2;
}

BBox make_bbox(double x1, double y1, double x2, double y2) {
  BBox b{x1, y1, x2, y2};
  if (!b.valid()) throw UsageError("invalid box: coordinates must be finite with x1<=x2, y1<=y2");
  return b;
}

BBox union_bbox(std::span<const BBox> boxes) {
  if (boxes.empty()) throw UsageError("union_bbox: empty box list");
  BBox out = boxes.front();
  for (const BBox& b : boxes.subspan(1)) out = union_bbox(out, b);
  return out;
}

BBox union_bbox(const BBox& a, const BBox& b) {
  return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2), std::max(a.y2, b.y2)};
}

double intersection_area(const BBox& a, const BBox& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0 || h <= 0) return 0.0;
  return w * h;
}

double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double clipped_iou(const BBox& gt, const BBox& pred) {
  const double lo = std::max(gt.x1, pred.x1);
  const double hi = std::min(gt.x2, pred.x2);
  if (lo >= hi) return 0.0;
  return iou(BBox{lo, gt.y1, hi, gt.y2}, pred);
}

bool segment_crosses_box(double px, double py, double qx, double qy, const BBox& box) {
  // Liang-Barsky against the open box; a crossing needs a parameter interval
  // of positive length inside (0, 1).
  double t0 = 0.0, t1 = 1.0;
  const auto clip = [&](double start, double delta, double lo, double hi) {
    if (delta == 0.0) return lo < start && start < hi;
    double ta = (lo - start) / delta;
    double tb = (hi - start) / delta;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    return t0 < t1;
  };
  if (!clip(px, qx - px, box.x1, box.x2)) return false;
  if (!clip(py, qy - py, box.y1, box.y2)) return false;
  return t0 < t1;
}

bool line_of_sight(const BBox& a, const BBox& b, std::span<const BBox> obstacles) {
  if (a == b) return true;
  double px = a.center_x(), py = a.center_y();
  double qx = b.center_x(), qy = b.center_y();
  if (px == qx && py == qy) return true;
  // Canonical direction keeps the predicate exactly symmetric in (a, b).
  if (std::pair(qx, qy) < std::pair(px, py)) {
    std::swap(px, qx);
    std::swap(py, qy);
  }
  return std::none_of(obstacles.begin(), obstacles.end(), [&](const BBox& o) {
    return segment_crosses_box(px, py, qx, qy, o);
  });
}

}  // namespace formgraph
