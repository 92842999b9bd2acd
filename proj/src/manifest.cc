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

#include "orl/manifest.h"

#include "orl/error.h"
#include "orl/parallel.h"
#include "orl/stage_header.h"

namespace orl {

DatasetManifest::DatasetManifest(std::vector<ManifestEntry> entries,
                                 std::filesystem::path base_dir)
    : entries_(std::move(entries)), base_dir_(std::move(base_dir)) {
  validate();
}

void DatasetManifest::validate() const {
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].image_id != i) {
      throw DataError("manifest image ids must be dense and ordered: entry " +
                      std::to_string(i) + " has id " +
                      std::to_string(entries_[i].image_id));
    }
    if (entries_[i].width < 1 || entries_[i].height < 1) {
      throw DataError("manifest entry " + std::to_string(i) +
                      " has non-positive dimensions");
    }
  }
}

DatasetManifest DatasetManifest::read(const std::filesystem::path& path) {
  std::vector<ManifestEntry> entries;
  const auto lines = read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    const Json j = parse_json_line(lines[i], path, i + 1);
    try {
      entries.push_back({j.at("image_id").get<uint64_t>(),
                         j.at("path").get<std::string>(),
                         j.at("width").get<int>(), j.at("height").get<int>()});
    } catch (const Json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": " +
                      e.what());
    }
  }
  if (entries.empty()) throw DataError("empty manifest: " + path.string());
  return DatasetManifest(std::move(entries), path.parent_path());
}

std::string DatasetManifest::format() const {
  std::string out;
  for (const auto& e : entries_) {
    Json j;
    j["image_id"] = e.image_id;
    j["path"] = e.path;
    j["width"] = e.width;
    j["height"] = e.height;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void DatasetManifest::write(const std::filesystem::path& path) const {
  write_file(path, format());
}

const ManifestEntry& DatasetManifest::at(uint64_t image_id) const {
  if (image_id >= entries_.size()) {
    throw DataError("unknown image id " + std::to_string(image_id));
  }
  return entries_[image_id];
}

std::filesystem::path DatasetManifest::resolve(const ManifestEntry& e) const {
  const std::filesystem::path p(e.path);
  return p.is_absolute() ? p : base_dir_ / p;
}

ImageBuffer DatasetManifest::load(uint64_t image_id) const {
  const ManifestEntry& e = at(image_id);
  const auto path = resolve(e);
  if (!std::filesystem::exists(path)) {
    throw DataError("missing image file: " + path.string());
  }
  ImageBuffer img = load_image(path);
  if (img.width() != e.width || img.height() != e.height) {
    throw DataError("image " + path.string() + " is " +
                    std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + " but the manifest says " +
                    std::to_string(e.width) + "x" + std::to_string(e.height));
  }
  return img;
}

std::vector<ImageBuffer> DatasetManifest::load_all(int workers) const {
  std::vector<ImageBuffer> images(entries_.size());
  parallel_for(entries_.size(), workers,
               [&](size_t i) { images[i] = load(i); });
  return images;
}

}  // namespace orl
