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

#ifndef ORL_MANIFEST_H_
#define ORL_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "orl/image.h"

namespace orl {

struct ManifestEntry {
  uint64_t image_id = 0;
  std::string path;
  int width = 0;
  int height = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// Ordered list of dataset images. Ids are dense: entry i has image_id i.
// Relative paths resolve against the directory holding the manifest file.
class DatasetManifest {
 public:
  DatasetManifest() = default;
  DatasetManifest(std::vector<ManifestEntry> entries,
                  std::filesystem::path base_dir);

  static DatasetManifest read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
  std::string format() const;

  const std::vector<ManifestEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  const ManifestEntry& at(uint64_t image_id) const;
  std::filesystem::path resolve(const ManifestEntry& e) const;

  // Loads an image and checks it against the recorded dimensions.
  ImageBuffer load(uint64_t image_id) const;
  std::vector<ImageBuffer> load_all(int workers) const;

 private:
  void validate() const;

  std::vector<ManifestEntry> entries_;
  std::filesystem::path base_dir_;
};

}  // namespace orl

#endif  // ORL_MANIFEST_H_
