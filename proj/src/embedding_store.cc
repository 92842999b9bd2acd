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

#include "orl/embedding_store.h"

#include <bit>
#include <cmath>
#include <cstring>

#include "orl/error.h"
#include "orl/stage_header.h"

namespace orl {
namespace {

template <typename T>
void put_le(std::vector<uint8_t>& out, T v) {
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(v);
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<uint8_t>(u & 0xff));
    u = static_cast<U>(u >> 8);
  }
}

class LeReader {
 public:
  explicit LeReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw DataError("embedding store truncated");
    }
    std::make_unsigned_t<T> u = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

}  // namespace

EmbeddingStore::EmbeddingStore(StoreKind kind, uint32_t dim)
    : kind_(kind), dim_(dim) {}

void EmbeddingStore::add(uint64_t image_id, uint32_t roi_index,
                         std::span<const double> values) {
  if (values.size() != dim_) {
    throw DataError("embedding dimension " + std::to_string(values.size()) +
                    " does not match store dimension " + std::to_string(dim_));
  }
  EmbeddingRecord rec{image_id, roi_index, {}};
  rec.values.reserve(dim_);
  for (double v : values) {
    const float f = static_cast<float>(v);
    if (!std::isfinite(f)) throw DataError("non-finite embedding value");
    rec.values.push_back(f);
  }
  const auto key = std::make_pair(image_id, roi_index);
  if (!index_.emplace(key, records_.size()).second) {
    throw DataError("duplicate embedding key (" + std::to_string(image_id) +
                    ", " + std::to_string(roi_index) + ")");
  }
  records_.push_back(std::move(rec));
}

const EmbeddingRecord* EmbeddingStore::find(uint64_t image_id,
                                            uint32_t roi_index) const {
  auto it = index_.find({image_id, roi_index});
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<const EmbeddingRecord*> EmbeddingStore::rois_of(
    uint64_t image_id) const {
  std::vector<const EmbeddingRecord*> out;
  for (auto it = index_.lower_bound({image_id, 0});
       it != index_.end() && it->first.first == image_id; ++it) {
    if (it->first.second != kWholeImage) out.push_back(&records_[it->second]);
  }
  return out;
}

std::vector<uint8_t> EmbeddingStore::serialize() const {
  std::vector<uint8_t> out = {'O', 'R', 'L', 'E'};
  out.reserve(4 + 4 + 1 + 4 + 8 + records_.size() * (12 + 4 * size_t{dim_}));
  put_le<uint32_t>(out, kVersion);
  put_le<uint8_t>(out, static_cast<uint8_t>(kind_));
  put_le<uint32_t>(out, dim_);
  put_le<uint64_t>(out, records_.size());
  for (const auto& r : records_) {
    put_le<uint64_t>(out, r.image_id);
    put_le<uint32_t>(out, r.roi_index);
    for (float v : r.values) put_le<uint32_t>(out, std::bit_cast<uint32_t>(v));
  }
  return out;
}

EmbeddingStore EmbeddingStore::deserialize(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "ORLE", 4) != 0) {
    throw DataError("not an embedding store (bad magic)");
  }
  LeReader in(bytes.subspan(4));
  const uint32_t version = in.get<uint32_t>();
  if (version != kVersion) {
    throw DataError("unsupported embedding store version " +
                    std::to_string(version));
  }
  const uint8_t kind = in.get<uint8_t>();
  if (kind > 1) throw DataError("unknown embedding store kind");
  EmbeddingStore store(static_cast<StoreKind>(kind), in.get<uint32_t>());
  const uint64_t count = in.get<uint64_t>();
  std::vector<double> values(store.dim_);
  for (uint64_t i = 0; i < count; ++i) {
    const uint64_t image_id = in.get<uint64_t>();
    const uint32_t roi = in.get<uint32_t>();
    for (auto& v : values) v = std::bit_cast<float>(in.get<uint32_t>());
    store.add(image_id, roi, values);
  }
  if (!in.done()) throw DataError("trailing bytes after embedding store");
  return store;
}

void EmbeddingStore::write(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                    bytes.size()));
}

EmbeddingStore EmbeddingStore::read(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return deserialize(std::span(reinterpret_cast<const uint8_t*>(bytes.data()),
                                 bytes.size()));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace orl
