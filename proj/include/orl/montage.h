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

#ifndef ORL_MONTAGE_H_
#define ORL_MONTAGE_H_

#include <array>
#include <cstdint>

#include "orl/geometry.h"
#include "orl/image.h"

namespace orl {

using Rgb = std::array<uint8_t, 3>;

inline constexpr int kStrokeWidth = 3;

// Fully saturated color with the hue stepped by the golden angle, so nearby
// indices differ.
Rgb pair_color(size_t index);

// Draws the box snapped to the pixel grid with a 3 px stroke: every pixel
// within Chebyshev distance 1 of the rectangle's boundary pixels, clipped to
// [clip_x0, clip_x1) x [0, height). The box is in coordinates relative to
// offset_x.
void draw_box(ImageBuffer& canvas, const BoundingBox& box, int offset_x,
              int clip_x0, int clip_x1, int src_w, int src_h, const Rgb& color);

// `a` on the left, `b` on the right, top-aligned on a black canvas of
// (wa + wb) x max(ha, hb), with each box drawn on its own half.
ImageBuffer render_pair_montage(const ImageBuffer& a, const BoundingBox& box_a,
                                const ImageBuffer& b, const BoundingBox& box_b,
                                const Rgb& color);

}  // namespace orl

#endif  // ORL_MONTAGE_H_
