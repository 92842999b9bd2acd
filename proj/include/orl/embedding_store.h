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

#ifndef ORL_EMBEDDING_STORE_H_
#define ORL_EMBEDDING_STORE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace orl {

enum class StoreKind : uint8_t { kImage = 0, kRoi = 1 };

inline constexpr uint32_t kWholeImage = 0xFFFFFFFFu;

struct EmbeddingRecord {
  uint64_t image_id = 0;
  uint32_t roi_index = kWholeImage;
  std::vector<float> values;

  friend bool operator==(const EmbeddingRecord&, const EmbeddingRecord&) = default;
};

// Binary layout, all little-endian:
//   "ORLE" | version u32 | kind u8 | dim u32 | count u64 |
//   count x (image_id u64 | roi_index u32 | dim x f32)
class EmbeddingStore {
 public:
  static constexpr uint32_t kVersion = 1;

  EmbeddingStore() = default;
  EmbeddingStore(StoreKind kind, uint32_t dim);

  StoreKind kind() const { return kind_; }
  uint32_t dim() const { return dim_; }
  size_t size() const { return records_.size(); }
  const std::vector<EmbeddingRecord>& records() const { return records_; }

  // Throws DataError on a dimension mismatch, a non-finite value or a
  // duplicate (image_id, roi_index) key.
  void add(uint64_t image_id, uint32_t roi_index, std::span<const double> values);

  const EmbeddingRecord* find(uint64_t image_id,
                              uint32_t roi_index = kWholeImage) const;
  // RoI records of one image, ordered by roi_index.
  std::vector<const EmbeddingRecord*> rois_of(uint64_t image_id) const;

  std::vector<uint8_t> serialize() const;
  static EmbeddingStore deserialize(std::span<const uint8_t> bytes);
  void write(const std::filesystem::path& path) const;
  static EmbeddingStore read(const std::filesystem::path& path);

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
    return a.kind_ == b.kind_ && a.dim_ == b.dim_ && a.records_ == b.records_;
  }

 private:
  StoreKind kind_ = StoreKind::kImage;
  uint32_t dim_ = 0;
  std::vector<EmbeddingRecord> records_;
  std::map<std::pair<uint64_t, uint32_t>, size_t> index_;
};

}  // namespace orl

#endif  // ORL_EMBEDDING_STORE_H_
