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

#ifndef ORL_IMAGE_H_
#define ORL_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "orl/geometry.h"

namespace orl {

// Decoded 8-bit RGB raster, row-major, interleaved channels.
class ImageBuffer {
 public:
  static constexpr int kChannels = 3;

  ImageBuffer() = default;
  // Zero-filled (black) image. Throws DataError on non-positive or
  // overflowing dimensions.
  ImageBuffer(int width, int height);
  ImageBuffer(int width, int height, std::vector<uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::span<const uint8_t> pixels() const { return pixels_; }
  std::span<uint8_t> mutable_pixels() { return pixels_; }

  uint8_t at(int x, int y, int c) const {
    return pixels_[(static_cast<size_t>(y) * width_ + x) * kChannels + c];
  }
  void set(int x, int y, int c, uint8_t v) {
    pixels_[(static_cast<size_t>(y) * width_ + x) * kChannels + c] = v;
  }
  void set_rgb(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
    uint8_t* p = &pixels_[(static_cast<size_t>(y) * width_ + x) * kChannels];
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> pixels_;
};

// Decodes binary PPM (P6) and PGM (P5, replicated to three channels).
// Throws DataError on truncated or unsupported input.
ImageBuffer decode_pnm(std::span<const uint8_t> bytes);
std::vector<uint8_t> encode_ppm(const ImageBuffer& img);

ImageBuffer load_image(const std::filesystem::path& path);
void save_image(const ImageBuffer& img, const std::filesystem::path& path);

// Half-pixel-centered bilinear resampling with edge clamping; results are
// rounded half-up to 8 bits. Throws DataError on a zero target dimension.
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h);

// Integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

// Rounds each box edge half-up to the pixel grid and clamps to the image.
// Throws DataError if the result is empty.
PixelRect snap_to_pixels(const BoundingBox& box, int img_w, int img_h);

ImageBuffer crop_region(const ImageBuffer& img, const BoundingBox& box);

}  // namespace orl

#endif  // ORL_IMAGE_H_
