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

#include "orl/geometry.h"

#include <algorithm>
#include <cmath>

#include "orl/error.h"
#include "orl/rng.h"

namespace orl {

bool BoundingBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && width > 0.0 &&
         height > 0.0 && std::isfinite(area());
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BoundingBox box_union(const BoundingBox& a, const BoundingBox& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  return {x0, y0, std::max(a.right(), b.right()) - x0,
          std::max(a.bottom(), b.bottom()) - y0};
}

BoundingBox clamp_to_image(const BoundingBox& box, double img_w,
                           double img_h) {
  const double x0 = std::clamp(box.x, 0.0, img_w);
  const double y0 = std::clamp(box.y, 0.0, img_h);
  const double x1 = std::clamp(box.right(), 0.0, img_w);
  const double y1 = std::clamp(box.bottom(), 0.0, img_h);
  return {x0, y0, x1 - x0, y1 - y0};
}

void FilterParams::validate() const {
  if (!(aspect_lo > 0.0 && aspect_lo <= aspect_hi)) {
    throw ConfigError("filter: need 0 < aspect_lo <= aspect_hi");
  }
  if (!(max_iou >= 0.0 && max_iou <= 1.0)) {
    throw ConfigError("filter: max_iou must lie in [0, 1]");
  }
  if (keep_top < 1) throw ConfigError("filter: keep_top must be >= 1");
  if (!(min_scale >= 0.0)) throw ConfigError("filter: min_scale must be >= 0");
}

std::vector<size_t> select_proposals(std::span<const BoundingBox> ranked,
                                     const FilterParams& p) {
  std::vector<size_t> kept;
  for (size_t i = 0; i < ranked.size() && kept.size() < p.keep_top; ++i) {
    const BoundingBox& b = ranked[i];
    if (!b.valid()) continue;
    if (std::min(b.width, b.height) < p.min_scale) continue;
    const double aspect = b.width / b.height;
    if (aspect < p.aspect_lo || aspect > p.aspect_hi) continue;
    const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](size_t k) {
      return iou(ranked[k], b) > p.max_iou;
    });
    if (!overlaps) kept.push_back(i);
  }
  return kept;
}

std::vector<BoundingBox> filter_proposals(std::span<const BoundingBox> ranked,
                                          int /*img_w*/, int /*img_h*/,
                                          const FilterParams& p) {
  std::vector<BoundingBox> out;
  for (size_t i : select_proposals(ranked, p)) out.push_back(ranked[i]);
  return out;
}

void JitterParams::validate() const {
  if (!(center_frac >= 0.0)) throw ConfigError("jitter: center_frac < 0");
  if (!(area_lo > 0.0 && area_lo <= area_hi)) {
    throw ConfigError("jitter: need 0 < area_lo <= area_hi");
  }
  if (!(aspect_lo > 0.0 && aspect_lo <= aspect_hi)) {
    throw ConfigError("jitter: need 0 < aspect_lo <= aspect_hi");
  }
}

JitterDraw sample_jitter(const BoundingBox& box, const JitterParams& p,
                         Rng& rng) {
  JitterDraw d;
  d.shift_x = rng.uniform(-1.0, 1.0) * p.center_frac * box.width;
  d.shift_y = rng.uniform(-1.0, 1.0) * p.center_frac * box.height;
  d.area_scale = rng.log_uniform(p.area_lo, p.area_hi);
  d.aspect_scale = rng.log_uniform(p.aspect_lo, p.aspect_hi);
  double w = box.width;
  double h = box.height;
  if (d.area_scale != 1.0 || d.aspect_scale != 1.0) {
    const double area = d.area_scale * box.area();
    const double aspect = (box.width / box.height) * d.aspect_scale;
    w = std::sqrt(area * aspect);
    h = std::sqrt(area / aspect);
  }
  // Offsets relative to the original corner keep identity draws exact.
  d.box = {box.x + d.shift_x - 0.5 * (w - box.width),
           box.y + d.shift_y - 0.5 * (h - box.height), w, h};
  return d;
}

BoundingBox jitter_box(const BoundingBox& box, int img_w, int img_h,
                       const JitterParams& p, Rng& rng) {
  constexpr int kMaxAttempts = 16;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const BoundingBox c = clamp_to_image(sample_jitter(box, p, rng).box, img_w, img_h);
    if (c.width >= 1.0 && c.height >= 1.0) return c;
  }
  return box;
}

}  // namespace orl
