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

#include <array>

namespace formgraph {

// Detector outputs below this confidence never enter the graph.
inline constexpr double kDetectionThreshold = 0.5;

// Edge proposal keeps the best half of all candidate pairs, at most this many.
inline constexpr int kMaxProposedEdges = 900;

// Predicted lines align to a GT line at or above this clipped IOU.
inline constexpr double kAlignmentThreshold = 0.4;

// Per-line IOU needed for a predicted line to count as a GT line in evaluation.
inline constexpr double kEvalLineIou = 0.5;

// Context windows are the entity box padded by this many pixels per side.
inline constexpr double kContextPadding = 20.0;
inline constexpr int kNodeGrid = 10;
inline constexpr int kEdgeGrid = 16;

// NAF images are processed at this scale.
inline constexpr double kNafScale = 0.52;

inline constexpr int kFeatureSize = 256;
inline constexpr int kAttentionHeads = 4;
inline constexpr int kGroupNormGroups = 8;
inline constexpr double kGroupNormEps = 1e-5;
inline constexpr double kDropout = 0.1;
inline constexpr std::array<int, 3> kStageDepths = {7, 7, 4};

// Order of the four per-edge predictions.
enum class EdgeScore : int { kPrune = 0, kMerge = 1, kGroup = 2, kRelationship = 3 };
inline constexpr int kEdgeScoreCount = 4;

struct EditThresholds {
  double merge;
  double group;
  double prune;
};

// One entry per edit iteration (one per GCN stage).
inline constexpr std::array<EditThresholds, 3> kEditSchedule = {{
    {0.8, 0.95, 0.9},
    {0.9, 0.9, 0.8},
    {0.9, 0.6, 0.5},
}};

inline constexpr double kRelationshipThreshold = 0.5;

inline constexpr double kBceClamp = 1e-7;

}  // namespace formgraph
