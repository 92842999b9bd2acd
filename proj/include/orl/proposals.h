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

#ifndef ORL_PROPOSALS_H_
#define ORL_PROPOSALS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "orl/geometry.h"
#include "orl/stage_header.h"

namespace orl {

// Objectness-ranked boxes for one image. `labels` is only populated by
// ground-truth sidecars (one label per box).
struct ImageProposals {
  uint64_t image_id = 0;
  std::vector<BoundingBox> boxes;
  std::vector<double> objectness;
  std::vector<std::string> labels;

  friend bool operator==(const ImageProposals&, const ImageProposals&) = default;
};

// One line per image: {"image_id", "boxes": [[x, y, w, h], ...],
// "objectness": [...]}, optionally preceded by a stage header line.
struct ProposalsFile {
  std::optional<StageHeader> header;
  std::vector<ImageProposals> images;

  const ImageProposals* find(uint64_t image_id) const;

  std::string format() const;
  static ProposalsFile parse(const std::string& text,
                             const std::filesystem::path& source = {});
  static ProposalsFile read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
};

Json box_to_json(const BoundingBox& b);
BoundingBox box_from_json(const Json& j);

}  // namespace orl

#endif  // ORL_PROPOSALS_H_
