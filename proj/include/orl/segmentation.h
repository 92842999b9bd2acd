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

#ifndef ORL_SEGMENTATION_H_
#define ORL_SEGMENTATION_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "orl/geometry.h"
#include "orl/image.h"

namespace orl {

struct SegParams {
  double k = 100.0;        // threshold scale
  int min_size = 20;       // pixels
  double sigma = 0.8;      // pre-smoothing; 0 disables
  double w_color = 1.0;
  double w_texture = 1.0;
  double w_size = 1.0;
  double w_fill = 1.0;
  uint64_t seed = 0;

  void validate() const;
  double weight_sum() const { return w_color + w_texture + w_size + w_fill; }
};

// Partition of the image into 4-connected components, ids in row-major order
// of first appearance.
struct SegmentLabelMap {
  int width = 0;
  int height = 0;
  std::vector<int32_t> labels;
  int component_count = 0;
};

// Graph-based over-segmentation on the 4-connected pixel grid.
SegmentLabelMap felzenszwalb_segment(const ImageBuffer& img, const SegParams& p);

inline constexpr int kColorBins = 25;
inline constexpr int kOrientationBins = 8;
inline constexpr int kMagnitudeBins = 10;
inline constexpr int kColorHistSize = kColorBins * 3;
inline constexpr int kTextureHistSize = kOrientationBins * kMagnitudeBins * 3;

// A node of the selective-search hierarchy. Both histograms are L1-normalized
// over all channels.
struct Region {
  int64_t pixel_count = 0;
  BoundingBox bbox;
  std::vector<double> color_hist;
  std::vector<double> texture_hist;
  std::optional<std::pair<int, int>> merged_from;
  int merge_step = 0;
};

// Color histogram bin of an 8-bit intensity.
inline int color_bin(uint8_t v) { return v * kColorBins / 256; }

// Texture bin (orientation octant x magnitude decile) of an integer gradient.
int texture_bin(int gx, int gy);

std::vector<Region> initial_regions(const ImageBuffer& img,
                                    const SegmentLabelMap& labels);

// Size-weighted union of two regions.
Region merge_regions(const Region& a, const Region& b);

// Weighted sum of color, texture, size and fill similarity, each in [0, 1].
double region_similarity(const Region& ri, const Region& rj, double image_area,
                         const SegParams& p);

struct ScoredBox {
  BoundingBox box;
  double score = 0.0;

  friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
};

struct SelectiveSearchResult {
  // Deduplicated boxes, score-descending.
  std::vector<ScoredBox> proposals;
  // Every region created, initial ones first, merged ones in merge order.
  std::vector<Region> regions;
  size_t initial_count = 0;
  double min_similarity = 0.0;
  double max_similarity = 0.0;
};

SelectiveSearchResult run_selective_search(const ImageBuffer& img,
                                           const SegParams& p);

// Proposals only; objectness = merge_step * Uniform(0, 1] drawn from p.seed.
std::vector<ScoredBox> selective_search(const ImageBuffer& img,
                                        const SegParams& p);

}  // namespace orl

#endif  // ORL_SEGMENTATION_H_
