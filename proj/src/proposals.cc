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

#include "orl/proposals.h"

#include <algorithm>
#include <sstream>

#include "orl/error.h"

namespace orl {

Json box_to_json(const BoundingBox& b) {
  return Json::array({b.x, b.y, b.width, b.height});
}

BoundingBox box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw DataError("box must be [x_min, y_min, width, height]");
  }
  BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                j[3].get<double>()};
  if (!b.valid()) throw DataError("invalid box with non-positive extent");
  return b;
}

const ImageProposals* ProposalsFile::find(uint64_t image_id) const {
  auto it = std::lower_bound(
      images.begin(), images.end(), image_id,
      [](const ImageProposals& p, uint64_t id) { return p.image_id < id; });
  if (it == images.end() || it->image_id != image_id) return nullptr;
  return &*it;
}

std::string ProposalsFile::format() const {
  std::string out;
  if (header) out += header->to_json().dump() + '\n';
  for (const auto& p : images) {
    Json j;
    j["image_id"] = p.image_id;
    Json boxes = Json::array();
    for (const auto& b : p.boxes) boxes.push_back(box_to_json(b));
    j["boxes"] = boxes;
    j["objectness"] = p.objectness;
    if (!p.labels.empty()) j["labels"] = p.labels;
    out += j.dump();
    out += '\n';
  }
  return out;
}

ProposalsFile ProposalsFile::parse(const std::string& text,
                                   const std::filesystem::path& source) {
  ProposalsFile f;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const Json j = parse_json_line(line, source, line_no);
    if (StageHeader::is_header(j)) {
      if (line_no != 1) throw DataError(source.string() + ": misplaced header");
      f.header = StageHeader::from_json(j);
      continue;
    }
    try {
      ImageProposals p;
      p.image_id = j.at("image_id").get<uint64_t>();
      for (const auto& b : j.at("boxes")) p.boxes.push_back(box_from_json(b));
      p.objectness = j.at("objectness").get<std::vector<double>>();
      if (j.contains("labels")) {
        p.labels = j.at("labels").get<std::vector<std::string>>();
      }
      if (p.objectness.size() != p.boxes.size() ||
          (!p.labels.empty() && p.labels.size() != p.boxes.size())) {
        throw DataError("box/score count mismatch");
      }
      f.images.push_back(std::move(p));
    } catch (const Json::exception& e) {
      throw DataError(source.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError(source.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  std::sort(f.images.begin(), f.images.end(),
            [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  for (size_t i = 1; i < f.images.size(); ++i) {
    if (f.images[i].image_id == f.images[i - 1].image_id) {
      throw DataError(source.string() + ": duplicate image_id " +
                      std::to_string(f.images[i].image_id));
    }
  }
  return f;
}

ProposalsFile ProposalsFile::read(const std::filesystem::path& path) {
  return parse(read_file(path), path);
}

void ProposalsFile::write(const std::filesystem::path& path) const {
  write_file(path, format());
}

}  // namespace orl
