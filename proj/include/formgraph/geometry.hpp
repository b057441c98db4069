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

#include <span>

namespace formgraph {

// Axis-aligned box in image pixels, origin top-left.
struct BBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  bool valid() const;

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Throws UsageError when the box is not finite or has inverted extents.
BBox make_bbox(double x1, double y1, double x2, double y2);

// Smallest box containing every input box. Throws UsageError on empty input.
BBox union_bbox(std::span<const BBox> boxes);
BBox union_bbox(const BBox& a, const BBox& b);

double intersection_area(const BBox& a, const BBox& b);

// Intersection over union; 0 when the union has zero area.
double iou(const BBox& a, const BBox& b);

// IOU after clipping gt horizontally to pred's x-span. Used to assign
// oversegmented predictions to the ground-truth line they came from.
double clipped_iou(const BBox& gt, const BBox& pred);

// True iff the open segment joining the centers of a and b passes through
// the interior of none of the obstacles. Grazing a boundary does not block.
bool line_of_sight(const BBox& a, const BBox& b, std::span<const BBox> obstacles);

// Open segment (p, q) against the open interior of box.
bool segment_crosses_box(double px, double py, double qx, double qy, const BBox& box);

}  // namespace formgraph
