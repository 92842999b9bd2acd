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

#include "orl/image.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "orl/error.h"

namespace orl {
namespace {

constexpr int64_t kMaxPixels = int64_t{1} << 28;

void check_dims(int64_t width, int64_t height) {
  if (width < 1 || height < 1) {
    throw DataError("image dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  if (width > kMaxPixels || height > kMaxPixels ||
      width * height > kMaxPixels) {
    throw DataError("image dimension overflow: " + std::to_string(width) +
                    "x" + std::to_string(height));
  }
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  int64_t next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw DataError("unsupported format / truncated PNM header");
    }
    int64_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (int64_t{1} << 40)) throw DataError("image dimension overflow");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw DataError("unsupported format / truncated PNM header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 2;
};

}  // namespace

ImageBuffer::ImageBuffer(int width, int height) {
  check_dims(width, height);
  width_ = width;
  height_ = height;
  pixels_.assign(static_cast<size_t>(width) * height * kChannels, 0);
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<uint8_t> pixels) {
  check_dims(width, height);
  if (pixels.size() != static_cast<size_t>(width) * height * kChannels) {
    throw DataError("pixel array length does not match " +
                    std::to_string(width) + "x" + std::to_string(height) +
                    "x3");
  }
  width_ = width;
  height_ = height;
  pixels_ = std::move(pixels);
}

ImageBuffer decode_pnm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' ||
      (bytes[1] != '6' && bytes[1] != '5')) {
    throw DataError("unsupported format / truncated: not a binary PPM/PGM");
  }
  const bool gray = bytes[1] == '5';
  HeaderReader reader(bytes);
  const int64_t width = reader.next_int();
  const int64_t height = reader.next_int();
  const int64_t maxval = reader.next_int();
  check_dims(width, height);
  if (maxval < 1 || maxval > 255) {
    throw DataError("unsupported format: maxval " + std::to_string(maxval));
  }
  const size_t offset = reader.raster_offset();
  const size_t src_channels = gray ? 1 : 3;
  const size_t n = static_cast<size_t>(width) * height;
  if (bytes.size() - std::min(bytes.size(), offset) < n * src_channels) {
    throw DataError("unsupported format / truncated raster");
  }
  std::vector<uint8_t> pixels(n * 3);
  const uint8_t* src = bytes.data() + offset;
  for (size_t i = 0; i < n; ++i) {
    for (size_t c = 0; c < 3; ++c) {
      unsigned v = src[i * src_channels + (gray ? 0 : c)];
      if (v > maxval) v = static_cast<unsigned>(maxval);
      if (maxval != 255) v = (v * 255 + maxval / 2) / maxval;
      pixels[i * 3 + c] = static_cast<uint8_t>(v);
    }
  }
  return ImageBuffer(static_cast<int>(width), static_cast<int>(height),
                     std::move(pixels));
}

std::vector<uint8_t> encode_ppm(const ImageBuffer& img) {
  const std::string header = "P6\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

ImageBuffer load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read image file: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  try {
    return decode_pnm(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
  const auto bytes = encode_ppm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write image file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing image file: " + path.string());
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw DataError("resize target dimensions must be positive");
  }
  const int in_w = img.width();
  const int in_h = img.height();
  if (in_w == out_w && in_h == out_h) return img;

  struct Tap {
    int i0, i1;
    double f;
  };
  auto taps = [](int in, int out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / out;
    for (int o = 0; o < out; ++o) {
      double s = (o + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(in - 1));
      const int i0 = static_cast<int>(std::floor(s));
      const int i1 = std::min(i0 + 1, in - 1);
      t[o] = {i0, i1, s - i0};
    }
    return t;
  };
  const auto tx = taps(in_w, out_w);
  const auto ty = taps(in_h, out_h);

  ImageBuffer out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const Tap& ry = ty[y];
    for (int x = 0; x < out_w; ++x) {
      const Tap& rx = tx[x];
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - rx.f) * img.at(rx.i0, ry.i0, c) +
                           rx.f * img.at(rx.i1, ry.i0, c);
        const double bottom = (1.0 - rx.f) * img.at(rx.i0, ry.i1, c) +
                              rx.f * img.at(rx.i1, ry.i1, c);
        const double v = (1.0 - ry.f) * top + ry.f * bottom;
        out.set(x, y, c,
                static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)));
      }
    }
  }
  return out;
}

PixelRect snap_to_pixels(const BoundingBox& box, int img_w, int img_h) {
  auto round_half_up = [](double v) { return std::floor(v + 0.5); };
  const double x0 = std::clamp(round_half_up(box.x), 0.0, double(img_w));
  const double y0 = std::clamp(round_half_up(box.y), 0.0, double(img_h));
  const double x1 = std::clamp(round_half_up(box.x + box.width), 0.0, double(img_w));
  const double y1 = std::clamp(round_half_up(box.y + box.height), 0.0, double(img_h));
  if (!(x1 - x0 >= 1.0) || !(y1 - y0 >= 1.0)) {
    throw DataError("box lies outside the image after rounding and clamping");
  }
  return {static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1),
          static_cast<int>(y1)};
}

ImageBuffer crop_region(const ImageBuffer& img, const BoundingBox& box) {
  const PixelRect r = snap_to_pixels(box, img.width(), img.height());
  std::vector<uint8_t> pixels;
  pixels.reserve(static_cast<size_t>(r.width()) * r.height() * 3);
  const auto src = img.pixels();
  for (int y = r.y0; y < r.y1; ++y) {
    const size_t row = (static_cast<size_t>(y) * img.width() + r.x0) * 3;
    pixels.insert(pixels.end(), src.begin() + row,
                  src.begin() + row + static_cast<size_t>(r.width()) * 3);
  }
  return ImageBuffer(r.width(), r.height(), std::move(pixels));
}

}  // namespace orl
