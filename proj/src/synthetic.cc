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

#include "orl/synthetic.h"

#include <algorithm>
#include <array>
#include <cstdio>

#include "orl/error.h"
#include "orl/parallel.h"
#include "orl/rng.h"

namespace orl {
namespace {

constexpr uint64_t kSceneTag = 0x5CE7E;

struct Color {
  const char* name;
  std::array<int, 3> rgb;
};

constexpr std::array<Color, 4> kPalette = {{
    {"red", {220, 30, 30}},
    {"green", {30, 200, 40}},
    {"blue", {30, 50, 220}},
    {"yellow", {230, 220, 30}},
}};

uint8_t clamp_u8(int v) { return static_cast<uint8_t>(std::clamp(v, 0, 255)); }

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.index(static_cast<uint64_t>(hi - lo + 1)));
}

}  // namespace

void SyntheticParams::validate() const {
  if (count < 1) throw ConfigError("synthetic count must be >= 1");
  if (min_shapes < 1 || max_shapes < min_shapes || max_shapes > 4) {
    throw ConfigError("synthetic shape count must satisfy 1 <= min <= max <= 4");
  }
  if (min_side < 1 || max_side < min_side || 2 * max_side > std::min(width, height)) {
    throw ConfigError("synthetic shape sides must fit in a 2x2 grid cell");
  }
}

SyntheticScene make_scene(const SyntheticParams& p, uint64_t image_id) {
  Rng rng = Rng::derive(p.seed, {kSceneTag, image_id});
  SyntheticScene scene;
  scene.image = ImageBuffer(p.width, p.height);
  ImageBuffer& img = scene.image;

  // Grayish tinted base with per-pixel noise.
  const int gray = uniform_int(rng, 90, 160);
  std::array<int, 3> base;
  for (int& b : base) b = gray + uniform_int(rng, -15, 15);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const int n = uniform_int(rng, -20, 20);
      for (int c = 0; c < 3; ++c) img.set(x, y, c, clamp_u8(base[c] + n + uniform_int(rng, -6, 6)));
    }
  }

  std::array<int, 4> cells = {0, 1, 2, 3};
  for (int i = 3; i > 0; --i) std::swap(cells[i], cells[rng.index(i + 1)]);
  const int shapes = uniform_int(rng, p.min_shapes, p.max_shapes);
  const int cell_w = p.width / 2;
  const int cell_h = p.height / 2;
  for (int s = 0; s < shapes; ++s) {
    const Color& color = p.two_color ? kPalette[(image_id % 2) * 2]
                                     : kPalette[rng.index(kPalette.size())];
    const int w = uniform_int(rng, p.min_side, p.max_side);
    const int h = uniform_int(rng, p.min_side, p.max_side);
    const int x0 = (cells[s] % 2) * cell_w + uniform_int(rng, 0, cell_w - w);
    const int y0 = (cells[s] / 2) * cell_h + uniform_int(rng, 0, cell_h - h);
    const bool ellipse = rng.bernoulli(0.5);
    int bx0 = x0 + w, by0 = y0 + h, bx1 = x0, by1 = y0;
    for (int y = y0; y < y0 + h; ++y) {
      for (int x = x0; x < x0 + w; ++x) {
        if (ellipse) {
          const double dx = (x + 0.5 - x0 - 0.5 * w) / (0.5 * w);
          const double dy = (y + 0.5 - y0 - 0.5 * h) / (0.5 * h);
          if (dx * dx + dy * dy > 1.0) continue;
        }
        const int n = uniform_int(rng, -8, 8);
        for (int c = 0; c < 3; ++c) img.set(x, y, c, clamp_u8(color.rgb[c] + n));
        bx0 = std::min(bx0, x);
        by0 = std::min(by0, y);
        bx1 = std::max(bx1, x + 1);
        by1 = std::max(by1, y + 1);
      }
    }
    scene.boxes.push_back({static_cast<double>(bx0), static_cast<double>(by0),
                           static_cast<double>(bx1 - bx0),
                           static_cast<double>(by1 - by0)});
    scene.labels.push_back(color.name);
  }
  return scene;
}

SyntheticDataset write_synthetic(const std::filesystem::path& dir,
                                 const SyntheticParams& p, int workers) {
  p.validate();
  std::filesystem::create_directories(dir / "images");
  std::vector<ManifestEntry> entries(p.count);
  ProposalsFile gt;
  gt.images.resize(p.count);
  parallel_for(p.count, workers, [&](size_t i) {
    const SyntheticScene scene = make_scene(p, i);
    char name[32];
    std::snprintf(name, sizeof(name), "images/%04zu.ppm", i);
    save_image(scene.image, dir / name);
    entries[i] = {i, name, p.width, p.height};
    ImageProposals& g = gt.images[i];
    g.image_id = i;
    g.boxes = scene.boxes;
    g.objectness.assign(scene.boxes.size(), 1.0);
    g.labels = scene.labels;
  });
  SyntheticDataset out{dir / "manifest.jsonl", dir / "gt.jsonl"};
  DatasetManifest(std::move(entries), dir).write(out.manifest_path);
  gt.write(out.ground_truth_path);
  return out;
}

}  // namespace orl
