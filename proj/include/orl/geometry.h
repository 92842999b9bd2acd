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

#ifndef ORL_GEOMETRY_H_
#define ORL_GEOMETRY_H_

#include <cstddef>
#include <span>
#include <vector>

namespace orl {

class Rng;

// Axis-aligned box in pixel coordinates: top-left corner plus extent.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return x + width; }
  double bottom() const { return y + height; }
  double area() const { return width * height; }
  double center_x() const { return x + 0.5 * width; }
  double center_y() const { return y + 0.5 * height; }
  bool valid() const;

  static BoundingBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Intersection over union. Symmetric, in [0, 1], 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

// Smallest box containing both.
BoundingBox box_union(const BoundingBox& a, const BoundingBox& b);

// Intersection of the box with [0, img_w] x [0, img_h]; width or height may
// come out non-positive when the box lies outside.
BoundingBox clamp_to_image(const BoundingBox& box, double img_w, double img_h);

struct FilterParams {
  double min_scale = 96.0;
  double aspect_lo = 1.0 / 3.0;
  double aspect_hi = 3.0;
  double max_iou = 0.5;
  size_t keep_top = 100;

  void validate() const;
};

// Indices into `ranked` (objectness-descending) of the boxes that survive
// the scale and aspect thresholds and greedy pairwise-IoU suppression, in
// their original order, truncated to keep_top.
std::vector<size_t> select_proposals(std::span<const BoundingBox> ranked,
                                     const FilterParams& p);

std::vector<BoundingBox> filter_proposals(std::span<const BoundingBox> ranked,
                                          int img_w, int img_h,
                                          const FilterParams& p);

struct JitterParams {
  double center_frac = 0.5;
  double area_lo = 0.5;
  double area_hi = 2.0;
  double aspect_lo = 0.5;
  double aspect_hi = 2.0;

  void validate() const;
};

// One unclamped draw of the box jitter, with the factors that produced it.
struct JitterDraw {
  BoundingBox box;
  double shift_x = 0.0;       // cx' - cx
  double shift_y = 0.0;       // cy' - cy
  double area_scale = 1.0;    // A' / A
  double aspect_scale = 1.0;  // (w'/h') / (w/h)
};

JitterDraw sample_jitter(const BoundingBox& box, const JitterParams& p,
                         Rng& rng);

// Jittered box clamped to the image. Draws that clamp to less than one pixel
// on a side are resampled up to 16 times, after which the input is returned.
BoundingBox jitter_box(const BoundingBox& box, int img_w, int img_h,
                       const JitterParams& p, Rng& rng);

}  // namespace orl

#endif  // ORL_GEOMETRY_H_
