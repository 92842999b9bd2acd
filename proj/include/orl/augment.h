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

#ifndef ORL_AUGMENT_H_
#define ORL_AUGMENT_H_

#include <vector>

#include "orl/geometry.h"
#include "orl/image.h"

namespace orl {

class Rng;

// Photometric and geometric view augmentation. Gaussian blur and
// solarization are not applied.
struct AugmentParams {
  double crop_scale_lo = 0.08;
  double crop_scale_hi = 1.0;
  double crop_ratio_lo = 3.0 / 4.0;
  double crop_ratio_hi = 4.0 / 3.0;
  // Area range of the extra small crops in multicrop mode.
  double small_crop_scale_lo = 0.05;
  double small_crop_scale_hi = 0.14;
  double flip_prob = 0.5;
  double color_scale = 0.4;  // per-channel gain in [1 - s, 1 + s]
  double color_shift = 0.1;  // per-channel offset in [-s, s]
  double grayscale_prob = 0.2;

  void validate() const;
};

// Random area fraction in [scale_lo, scale_hi] and log-uniform aspect in
// [ratio_lo, ratio_hi]; falls back to the largest centered square-ish crop
// after 10 failed draws.
BoundingBox random_resized_crop_box(int img_w, int img_h, double scale_lo,
                                    double scale_hi, double ratio_lo,
                                    double ratio_hi, Rng& rng);

// Average-pools a square view to grid x grid, scaling intensities to [0, 1].
// Features are ordered (row, column, channel). The view side must be a
// multiple of grid.
std::vector<double> pool_to_grid(const ImageBuffer& view, int grid);

// Flip, per-channel color jitter and random grayscale on a square view,
// followed by pool_to_grid.
std::vector<double> augment_view(const ImageBuffer& view, int grid,
                                 const AugmentParams& p, Rng& rng);

}  // namespace orl

#endif  // ORL_AUGMENT_H_
