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

#include "orl/embedding.h"

#include <algorithm>
#include <cmath>

#include "orl/error.h"
#include "orl/rng.h"
#include "orl/segmentation.h"

namespace orl {
namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw DataError("cosine_similarity: dimension mismatch (" +
                    std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw DataError("cosine_similarity: zero-norm vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace

EmbeddingVector embed_crop(const Encoder& encoder, const ImageBuffer& img,
                           const std::optional<BoundingBox>& box) {
  const int s = encoder.input_size();
  if (box) return encoder.forward(resize_bilinear(crop_region(img, *box), s, s));
  return encoder.forward(resize_bilinear(img, s, s));
}

std::vector<double> color_histogram(const ImageBuffer& img) {
  std::vector<double> hist(kColorHistSize, 0.0);
  const auto px = img.pixels();
  for (size_t i = 0; i < px.size(); i += 3) {
    for (int c = 0; c < 3; ++c) hist[c * kColorBins + color_bin(px[i + c])] += 1.0;
  }
  const double total = static_cast<double>(px.size());
  for (double& v : hist) v /= total;
  return hist;
}

HistogramEncoder::HistogramEncoder(uint64_t seed, int dim, int input_size)
    : dim_(dim), input_size_(input_size) {
  if (dim < 4) throw ConfigError("histogram encoder: dim must be >= 4");
  if (input_size < 8) throw ConfigError("encoder input_size must be >= 8");
  Rng rng(seed);
  projection_.resize(static_cast<size_t>(dim) * kColorHistSize);
  for (double& v : projection_) v = rng.normal();
}

EmbeddingVector HistogramEncoder::forward(const ImageBuffer& view) const {
  const std::vector<double> hist = color_histogram(view);
  EmbeddingVector out(dim_, 0.0);
  for (int r = 0; r < dim_; ++r) {
    const double* row = &projection_[static_cast<size_t>(r) * kColorHistSize];
    double acc = 0.0;
    for (int c = 0; c < kColorHistSize; ++c) acc += row[c] * hist[c];
    out[r] = acc;
  }
  return out;
}

std::unique_ptr<Encoder> reference_histogram_encoder(uint64_t seed, int dim,
                                                     int input_size) {
  return std::make_unique<HistogramEncoder>(seed, dim, input_size);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  return cosine_impl(a, b);
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  return cosine_impl(a, b);
}

}  // namespace orl
