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

#include "orl/montage.h"

#include <algorithm>
#include <cmath>

namespace orl {

Rgb pair_color(size_t index) {
  const double hue = std::fmod(static_cast<double>(index) * 137.50776405, 360.0) / 60.0;
  const int sector = static_cast<int>(hue) % 6;
  const double f = hue - std::floor(hue);
  const auto up = static_cast<uint8_t>(std::lround(255.0 * f));
  const auto down = static_cast<uint8_t>(255 - up);
  switch (sector) {
    case 0: return {255, up, 0};
    case 1: return {down, 255, 0};
    case 2: return {0, 255, up};
    case 3: return {0, down, 255};
    case 4: return {up, 0, 255};
    default: return {255, 0, down};
  }
}

void draw_box(ImageBuffer& canvas, const BoundingBox& box, int offset_x,
              int clip_x0, int clip_x1, int src_w, int src_h, const Rgb& color) {
  const PixelRect r = snap_to_pixels(box, src_w, src_h);
  auto on_boundary = [&](int x, int y) {
    if (x < r.x0 || x >= r.x1 || y < r.y0 || y >= r.y1) return false;
    return x == r.x0 || x == r.x1 - 1 || y == r.y0 || y == r.y1 - 1;
  };
  const int y_hi = std::min(canvas.height(), src_h);
  for (int y = std::max(0, r.y0 - 1); y <= r.y1 && y < y_hi; ++y) {
    for (int x = r.x0 - 1; x <= r.x1; ++x) {
      const int cx = x + offset_x;
      if (cx < clip_x0 || cx >= clip_x1) continue;
      bool hit = false;
      for (int dy = -1; dy <= 1 && !hit; ++dy) {
        for (int dx = -1; dx <= 1 && !hit; ++dx) hit = on_boundary(x + dx, y + dy);
      }
      if (hit) canvas.set_rgb(cx, y, color[0], color[1], color[2]);
    }
  }
}

ImageBuffer render_pair_montage(const ImageBuffer& a, const BoundingBox& box_a,
                                const ImageBuffer& b, const BoundingBox& box_b,
                                const Rgb& color) {
  const int wa = a.width();
  ImageBuffer out(wa + b.width(), std::max(a.height(), b.height()));
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < wa; ++x) {
      out.set_rgb(x, y, a.at(x, y, 0), a.at(x, y, 1), a.at(x, y, 2));
    }
  }
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) {
      out.set_rgb(wa + x, y, b.at(x, y, 0), b.at(x, y, 1), b.at(x, y, 2));
    }
  }
  draw_box(out, box_a, 0, 0, wa, a.width(), a.height(), color);
  draw_box(out, box_b, wa, wa, out.width(), b.width(), b.height(), color);
  return out;
}

}  // namespace orl
