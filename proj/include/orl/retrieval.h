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

#ifndef ORL_RETRIEVAL_H_
#define ORL_RETRIEVAL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orl/embedding.h"
#include "orl/embedding_store.h"
#include "orl/geometry.h"
#include "orl/proposals.h"
#include "orl/stage_header.h"

namespace orl {

struct Neighbor {
  uint64_t image_id = 0;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Neighbors of one image, similarity-descending with ties by ascending id.
struct NeighborSet {
  uint64_t query_id = 0;
  std::vector<Neighbor> neighbors;

  friend bool operator==(const NeighborSet&, const NeighborSet&) = default;
};

// Exact cosine KNN over a whole-image store, self excluded. Each list has
// min(k, n - 1) entries. Throws DataError with fewer than two images.
std::vector<NeighborSet> knn_images(const EmbeddingStore& store, size_t k,
                                    int workers = 1);

struct SimilarityMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;  // row-major

  double at(size_t r, size_t c) const { return values[r * cols + c]; }
};

SimilarityMatrix roi_pair_matrix(std::span<const EmbeddingVector> query_rois,
                                 std::span<const EmbeddingVector> neighbor_rois);
SimilarityMatrix roi_pair_matrix(std::span<const EmbeddingRecord* const> query_rois,
                                 std::span<const EmbeddingRecord* const> neighbor_rois);

struct MatrixEntry {
  size_t row = 0;
  size_t col = 0;
  double similarity = 0.0;

  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

// ceil(fraction * rows * cols), at least one.
size_t top_pair_count(size_t rows, size_t cols, double fraction);

// Globally ranked matrix entries: similarity-descending, ties by (row, col).
std::vector<MatrixEntry> top_entries(const SimilarityMatrix& m, double fraction);

struct CorrespondencePair {
  uint64_t query_id = 0;
  uint64_t neighbor_id = 0;
  BoundingBox query_box;
  BoundingBox neighbor_box;
  double similarity = 0.0;

  friend bool operator==(const CorrespondencePair&, const CorrespondencePair&) = default;
};

std::vector<CorrespondencePair> select_top_pairs(
    const SimilarityMatrix& m, uint64_t query_id, uint64_t neighbor_id,
    std::span<const BoundingBox> query_boxes,
    std::span<const BoundingBox> neighbor_boxes, double fraction);

// For every (query, neighbor) image pair, ranks all RoI pairs and keeps the
// top fraction. Output is grouped by ascending (query_id, neighbor_id).
std::vector<CorrespondencePair> discover_correspondence(
    const ProposalsFile& proposals, std::span<const NeighborSet> neighbors,
    const EmbeddingStore& roi_store, double fraction, int workers = 1);

// One line per image: {"query_id", "neighbors": [[image_id, similarity], ...]}.
struct KnnFile {
  std::optional<StageHeader> header;
  std::vector<NeighborSet> sets;

  std::string format() const;
  static KnnFile read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
};

// One line per pair: {"query_id", "neighbor_id", "query_box", "neighbor_box",
// "similarity"}.
struct CorrespondenceFile {
  std::optional<StageHeader> header;
  std::vector<CorrespondencePair> pairs;

  std::string format() const;
  static CorrespondenceFile read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
};

}  // namespace orl

#endif  // ORL_RETRIEVAL_H_
