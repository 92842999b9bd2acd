// Copyright 2026 The ORL Authors.
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

#ifndef ORL_SYNTHETIC_H_
#define ORL_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "orl/geometry.h"
#include "orl/image.h"
#include "orl/manifest.h"
#include "orl/proposals.h"

namespace orl {

// Colored rectangles and ellipses on noisy tinted backgrounds. Shapes sit in
// distinct cells of a 2x2 grid so they never overlap.
struct SyntheticParams {
  int count = 32;
  int width = 256;
  int height = 256;
  int min_shapes = 2;
  int max_shapes = 4;
  int min_side = 96;
  int max_side = 120;
  // Every image uses one color (alternating red / blue by image id) instead of
  // a random color per shape.
  bool two_color = false;
  uint64_t seed = 0;

  void validate() const;
};

struct SyntheticScene {
  ImageBuffer image;
  std::vector<BoundingBox> boxes;   // tight bounds of each shape
  std::vector<std::string> labels;  // color names
};

SyntheticScene make_scene(const SyntheticParams& p, uint64_t image_id);

struct SyntheticDataset {
  std::filesystem::path manifest_path;
  std::filesystem::path ground_truth_path;
};

// Writes images/NNNN.ppm, manifest.jsonl and gt.jsonl (proposals format with
// labels, objectness 1) under `dir`.
SyntheticDataset write_synthetic(const std::filesystem::path& dir,
                                 const SyntheticParams& p, int workers = 1);

}  // namespace orl

#endif  // ORL_SYNTHETIC_H_
