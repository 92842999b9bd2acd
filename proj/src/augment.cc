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

#include "orl/augment.h"

#include <algorithm>
#include <cmath>

#include "orl/error.h"
#include "orl/rng.h"

namespace orl {

void AugmentParams::validate() const {
  if (!(crop_scale_lo > 0.0 && crop_scale_lo <= crop_scale_hi && crop_scale_hi <= 1.0) ||
      !(small_crop_scale_lo > 0.0 && small_crop_scale_lo <= small_crop_scale_hi &&
        small_crop_scale_hi <= 1.0)) {
    throw ConfigError("augment: crop scale ranges must satisfy 0 < lo <= hi <= 1");
  }
  if (!(crop_ratio_lo > 0.0 && crop_ratio_lo <= crop_ratio_hi)) {
    throw ConfigError("augment: need 0 < crop_ratio_lo <= crop_ratio_hi");
  }
  for (double prob : {flip_prob, grayscale_prob}) {
    if (!(prob >= 0.0 && prob <= 1.0)) {
      throw ConfigError("augment: probabilities must lie in [0, 1]");
    }
  }
  if (!(color_scale >= 0.0 && color_scale < 1.0 && color_shift >= 0.0)) {
    throw ConfigError("augment: need 0 <= color_scale < 1 and color_shift >= 0");
  }
}

BoundingBox random_resized_crop_box(int img_w, int img_h, double scale_lo,
                                    double scale_hi, double ratio_lo,
                                    double ratio_hi, Rng& rng) {
  const double area = static_cast<double>(img_w) * img_h;
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double target = area * rng.uniform(scale_lo, scale_hi);
    const double ratio = rng.log_uniform(ratio_lo, ratio_hi);
    const double w = std::round(std::sqrt(target * ratio));
    const double h = std::round(std::sqrt(target / ratio));
    if (w >= 1 && h >= 1 && w <= img_w && h <= img_h) {
      const double x = std::floor(rng.uniform() * (img_w - w + 1));
      const double y = std::floor(rng.uniform() * (img_h - h + 1));
      return {x, y, w, h};
    }
  }
  const double in_ratio = static_cast<double>(img_w) / img_h;
  double w = img_w, h = img_h;
  if (in_ratio < ratio_lo) {
    h = std::round(w / ratio_lo);
  } else if (in_ratio > ratio_hi) {
    w = std::round(h * ratio_hi);
  }
  return {std::floor((img_w - w) / 2), std::floor((img_h - h) / 2), w, h};
}

std::vector<double> pool_to_grid(const ImageBuffer& view, int grid) {
  if (view.width() != view.height() || grid < 1 || view.width() % grid != 0) {
    throw DataError("view side " + std::to_string(view.width()) +
                    " is not a multiple of the backbone grid " +
                    std::to_string(grid));
  }
  const int f = view.width() / grid;
  const double norm = 1.0 / (255.0 * f * f);
  std::vector<double> out(static_cast<size_t>(grid) * grid * 3, 0.0);
  for (int y = 0; y < view.height(); ++y) {
    for (int x = 0; x < view.width(); ++x) {
      double* cell = &out[(static_cast<size_t>(y / f) * grid + x / f) * 3];
      for (int c = 0; c < 3; ++c) cell[c] += view.at(x, y, c);
    }
  }
  for (double& v : out) v *= norm;
  return out;
}

std::vector<double> augment_view(const ImageBuffer& view, int grid,
                                 const AugmentParams& p, Rng& rng) {
  const bool flip = rng.bernoulli(p.flip_prob);
  double gain[3], offset[3];
  for (int c = 0; c < 3; ++c) {
    gain[c] = 1.0 + rng.uniform(-p.color_scale, p.color_scale);
    offset[c] = rng.uniform(-p.color_shift, p.color_shift);
  }
  const bool gray = rng.bernoulli(p.grayscale_prob);

  std::vector<double> cells = pool_to_grid(view, grid);
  std::vector<double> out(cells.size());
  for (int y = 0; y < grid; ++y) {
    for (int x = 0; x < grid; ++x) {
      const int sx = flip ? grid - 1 - x : x;
      const double* src = &cells[(static_cast<size_t>(y) * grid + sx) * 3];
      double* dst = &out[(static_cast<size_t>(y) * grid + x) * 3];
      for (int c = 0; c < 3; ++c) {
        dst[c] = std::clamp(gain[c] * src[c] + offset[c], 0.0, 1.0);
      }
      if (gray) {
        const double l = 0.299 * dst[0] + 0.587 * dst[1] + 0.114 * dst[2];
        dst[0] = dst[1] = dst[2] = l;
      }
    }
  }
  return out;
}

}  // namespace orl
