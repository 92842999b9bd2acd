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

#ifndef ORL_EMBEDDING_H_
#define ORL_EMBEDDING_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orl/geometry.h"
#include "orl/image.h"

namespace orl {

using EmbeddingVector = std::vector<double>;

// Maps a square view to a fixed-dimension vector. Implementations are
// immutable after construction and safe to share across threads.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::string name() const = 0;
  // Side of the square view the encoder consumes (at least 8).
  virtual int input_size() const = 0;
  virtual int dim() const = 0;
  // `view` is input_size x input_size.
  virtual EmbeddingVector forward(const ImageBuffer& view) const = 0;
};

// Crop (when a box is given), resize to the encoder's input size, encode.
EmbeddingVector embed_crop(const Encoder& encoder, const ImageBuffer& img,
                           const std::optional<BoundingBox>& box);

// 25 bins per channel, normalized so all 75 bins sum to 1.
std::vector<double> color_histogram(const ImageBuffer& img);

// Color histogram followed by a fixed gaussian random projection.
class HistogramEncoder : public Encoder {
 public:
  HistogramEncoder(uint64_t seed, int dim, int input_size = 224);

  std::string name() const override { return "reference-histogram"; }
  int input_size() const override { return input_size_; }
  int dim() const override { return dim_; }
  EmbeddingVector forward(const ImageBuffer& view) const override;

  // Row-major dim x 75.
  const std::vector<double>& projection() const { return projection_; }

 private:
  int dim_;
  int input_size_;
  std::vector<double> projection_;
};

std::unique_ptr<Encoder> reference_histogram_encoder(uint64_t seed, int dim,
                                                     int input_size = 224);

// <a, b> / (|a| |b|). Throws DataError on dimension mismatch or a zero-norm
// argument.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const float> a, std::span<const float> b);

}  // namespace orl

#endif  // ORL_EMBEDDING_H_
