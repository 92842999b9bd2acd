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

#include "orl/segmentation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include "orl/error.h"
#include "orl/rng.h"

namespace orl {
namespace {

class DisjointSet {
 public:
  explicit DisjointSet(size_t n) : parent_(n), size_(n, 1), internal_(n, 0.0) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }

  uint32_t find(uint32_t x) {
    uint32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const uint32_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  // Joins two roots; the larger component (then the smaller index) becomes
  // the new root.
  uint32_t join(uint32_t a, uint32_t b, double w) {
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    internal_[a] = std::max({internal_[a], internal_[b], w});
    return a;
  }

  uint32_t size(uint32_t root) const { return size_[root]; }
  double internal(uint32_t root) const { return internal_[root]; }

 private:
  std::vector<uint32_t> parent_;
  std::vector<uint32_t> size_;
  std::vector<double> internal_;
};

struct Edge {
  double w;
  uint32_t a;
  uint32_t b;
};

// Separable 3-tap gaussian approximation with clamped borders.
std::vector<double> smooth(const ImageBuffer& img, double sigma) {
  const int w = img.width();
  const int h = img.height();
  std::vector<double> src(img.pixels().begin(), img.pixels().end());
  if (sigma <= 0.0) return src;
  const double side = std::exp(-1.0 / (2.0 * sigma * sigma));
  const double norm = 1.0 + 2.0 * side;
  const double k0 = 1.0 / norm;
  const double k1 = side / norm;
  std::vector<double> tmp(src.size());
  auto idx = [w](int x, int y, int c) {
    return (static_cast<size_t>(y) * w + x) * 3 + c;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int xl = std::max(x - 1, 0);
      const int xr = std::min(x + 1, w - 1);
      for (int c = 0; c < 3; ++c) {
        tmp[idx(x, y, c)] = k1 * src[idx(xl, y, c)] + k0 * src[idx(x, y, c)] +
                            k1 * src[idx(xr, y, c)];
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    const int yu = std::max(y - 1, 0);
    const int yd = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        src[idx(x, y, c)] = k1 * tmp[idx(x, yu, c)] + k0 * tmp[idx(x, y, c)] +
                            k1 * tmp[idx(x, yd, c)];
      }
    }
  }
  return src;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double histogram_intersection(const std::vector<double>& a,
                              const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::min(a[i], b[i]);
  return s;
}

}  // namespace

void SegParams::validate() const {
  if (!(k > 0.0)) throw ConfigError("segmentation: k must be positive");
  if (min_size < 1) throw ConfigError("segmentation: min_size must be >= 1");
  if (!(sigma >= 0.0)) throw ConfigError("segmentation: sigma must be >= 0");
  if (w_color < 0 || w_texture < 0 || w_size < 0 || w_fill < 0 ||
      !(weight_sum() > 0.0)) {
    throw ConfigError(
        "segmentation: similarity weights must be >= 0 and not all zero");
  }
}

SegmentLabelMap felzenszwalb_segment(const ImageBuffer& img,
                                     const SegParams& p) {
  const int w = img.width();
  const int h = img.height();
  const size_t n = static_cast<size_t>(w) * h;
  const std::vector<double> s = smooth(img, p.sigma);

  auto dist = [&](size_t i, size_t j) {
    const double dr = s[i * 3] - s[j * 3];
    const double dg = s[i * 3 + 1] - s[j * 3 + 1];
    const double db = s[i * 3 + 2] - s[j * 3 + 2];
    return std::sqrt(dr * dr + dg * dg + db * db);
  };

  std::vector<Edge> edges;
  edges.reserve(2 * n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const uint32_t i = static_cast<uint32_t>(y) * w + x;
      if (x + 1 < w) edges.push_back({dist(i, i + 1), i, i + 1});
      if (y + 1 < h) edges.push_back({dist(i, i + w), i, i + static_cast<uint32_t>(w)});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.w, a.a, a.b) < std::tie(b.w, b.a, b.b);
  });

  DisjointSet ds(n);
  for (const Edge& e : edges) {
    const uint32_t a = ds.find(e.a);
    const uint32_t b = ds.find(e.b);
    if (a == b) continue;
    const double ta = ds.internal(a) + p.k / ds.size(a);
    const double tb = ds.internal(b) + p.k / ds.size(b);
    if (e.w <= std::min(ta, tb)) ds.join(a, b, e.w);
  }
  // Absorb undersized components into the neighbor across their cheapest edge.
  for (const Edge& e : edges) {
    const uint32_t a = ds.find(e.a);
    const uint32_t b = ds.find(e.b);
    if (a == b) continue;
    if (ds.size(a) < static_cast<uint32_t>(p.min_size) ||
        ds.size(b) < static_cast<uint32_t>(p.min_size)) {
      ds.join(a, b, e.w);
    }
  }

  SegmentLabelMap out;
  out.width = w;
  out.height = h;
  out.labels.assign(n, -1);
  std::vector<int32_t> root_label(n, -1);
  int32_t next = 0;
  for (size_t i = 0; i < n; ++i) {
    const uint32_t r = ds.find(static_cast<uint32_t>(i));
    if (root_label[r] < 0) root_label[r] = next++;
    out.labels[i] = root_label[r];
  }
  out.component_count = next;
  return out;
}

int texture_bin(int gx, int gy) {
  int octant = 0;
  if (gx == 0 && gy == 0) {
    octant = 0;
  } else if (gx > 0 && gy >= 0) {
    octant = gy < gx ? 0 : 1;
  } else if (gx <= 0 && gy > 0) {
    octant = gy > -gx ? 2 : 3;
  } else if (gx < 0 && gy <= 0) {
    octant = -gy < -gx ? 4 : 5;
  } else {
    octant = gx < -gy ? 6 : 7;
  }
  // Central differences of 8-bit data stay below 362 in magnitude.
  constexpr double kBinWidth = 362.0 / kMagnitudeBins;
  const double mag2 = static_cast<double>(gx) * gx + static_cast<double>(gy) * gy;
  int mag = 0;
  while (mag + 1 < kMagnitudeBins &&
         mag2 >= ((mag + 1) * kBinWidth) * ((mag + 1) * kBinWidth)) {
    ++mag;
  }
  return octant * kMagnitudeBins + mag;
}

std::vector<Region> initial_regions(const ImageBuffer& img,
                                    const SegmentLabelMap& labels) {
  const int w = img.width();
  const int h = img.height();
  const int n = labels.component_count;
  std::vector<Region> regions(n);
  std::vector<int> x0(n, w), y0(n, h), x1(n, -1), y1(n, -1);
  for (auto& r : regions) {
    r.color_hist.assign(kColorHistSize, 0.0);
    r.texture_hist.assign(kTextureHistSize, 0.0);
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int l = labels.labels[static_cast<size_t>(y) * w + x];
      Region& r = regions[l];
      ++r.pixel_count;
      x0[l] = std::min(x0[l], x);
      y0[l] = std::min(y0[l], y);
      x1[l] = std::max(x1[l], x);
      y1[l] = std::max(y1[l], y);
      const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
      const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
      for (int c = 0; c < 3; ++c) {
        r.color_hist[c * kColorBins + color_bin(img.at(x, y, c))] += 1.0;
        const int gx = int(img.at(xr, y, c)) - int(img.at(xl, y, c));
        const int gy = int(img.at(x, yd, c)) - int(img.at(x, yu, c));
        r.texture_hist[c * kOrientationBins * kMagnitudeBins +
                       texture_bin(gx, gy)] += 1.0;
      }
    }
  }
  for (int l = 0; l < n; ++l) {
    Region& r = regions[l];
    const double total = 3.0 * static_cast<double>(r.pixel_count);
    for (double& v : r.color_hist) v /= total;
    for (double& v : r.texture_hist) v /= total;
    r.bbox = {double(x0[l]), double(y0[l]), double(x1[l] - x0[l] + 1),
              double(y1[l] - y0[l] + 1)};
  }
  return regions;
}

Region merge_regions(const Region& a, const Region& b) {
  Region r;
  r.pixel_count = a.pixel_count + b.pixel_count;
  r.bbox = box_union(a.bbox, b.bbox);
  const double wa = static_cast<double>(a.pixel_count) / r.pixel_count;
  const double wb = static_cast<double>(b.pixel_count) / r.pixel_count;
  r.color_hist.resize(a.color_hist.size());
  for (size_t i = 0; i < r.color_hist.size(); ++i) {
    r.color_hist[i] = wa * a.color_hist[i] + wb * b.color_hist[i];
  }
  r.texture_hist.resize(a.texture_hist.size());
  for (size_t i = 0; i < r.texture_hist.size(); ++i) {
    r.texture_hist[i] = wa * a.texture_hist[i] + wb * b.texture_hist[i];
  }
  return r;
}

double region_similarity(const Region& ri, const Region& rj, double image_area,
                         const SegParams& p) {
  const double sizes = static_cast<double>(ri.pixel_count + rj.pixel_count);
  const double s_color = clamp01(histogram_intersection(ri.color_hist, rj.color_hist));
  const double s_texture =
      clamp01(histogram_intersection(ri.texture_hist, rj.texture_hist));
  const double s_size = clamp01(1.0 - sizes / image_area);
  const double s_fill =
      clamp01(1.0 - (box_union(ri.bbox, rj.bbox).area() - sizes) / image_area);
  return p.w_color * s_color + p.w_texture * s_texture + p.w_size * s_size +
         p.w_fill * s_fill;
}

SelectiveSearchResult run_selective_search(const ImageBuffer& img,
                                           const SegParams& p) {
  const SegmentLabelMap labels = felzenszwalb_segment(img, p);
  SelectiveSearchResult out;
  out.regions = initial_regions(img, labels);
  out.initial_count = out.regions.size();
  const double image_area = double(img.width()) * img.height();

  std::vector<std::set<int>> adjacent(out.regions.size());
  const int w = labels.width;
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = labels.labels[static_cast<size_t>(y) * w + x];
      if (x + 1 < w) {
        const int b = labels.labels[static_cast<size_t>(y) * w + x + 1];
        if (a != b) adjacent[a].insert(b), adjacent[b].insert(a);
      }
      if (y + 1 < labels.height) {
        const int b = labels.labels[static_cast<size_t>(y + 1) * w + x];
        if (a != b) adjacent[a].insert(b), adjacent[b].insert(a);
      }
    }
  }

  // Most similar pair first; ties go to the smaller (i, j).
  using Candidate = std::tuple<double, int, int>;
  auto worse = [](const Candidate& a, const Candidate& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) >
           std::tie(std::get<1>(b), std::get<2>(b));
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> queue(worse);
  out.min_similarity = p.weight_sum();
  out.max_similarity = 0.0;
  auto push = [&](int a, int b) {
    const double s = region_similarity(out.regions[a], out.regions[b], image_area, p);
    out.min_similarity = std::min(out.min_similarity, s);
    out.max_similarity = std::max(out.max_similarity, s);
    queue.emplace(s, std::min(a, b), std::max(a, b));
  };
  for (size_t a = 0; a < adjacent.size(); ++a) {
    for (int b : adjacent[a]) {
      if (static_cast<int>(a) < b) push(static_cast<int>(a), b);
    }
  }

  std::vector<char> alive(out.regions.size(), 1);
  int step = 0;
  while (!queue.empty()) {
    const auto [sim, i, j] = queue.top();
    queue.pop();
    if (!alive[i] || !alive[j]) continue;
    ++step;
    Region merged = merge_regions(out.regions[i], out.regions[j]);
    merged.merged_from = std::make_pair(i, j);
    merged.merge_step = step;
    const int t = static_cast<int>(out.regions.size());
    out.regions.push_back(std::move(merged));
    alive[i] = alive[j] = 0;
    alive.push_back(1);

    std::set<int> nbrs;
    for (int k : {i, j}) {
      for (int nb : adjacent[k]) {
        if (nb != i && nb != j && alive[nb]) nbrs.insert(nb);
      }
      std::set<int>().swap(adjacent[k]);
    }
    adjacent.emplace_back();
    for (int nb : nbrs) {
      adjacent[nb].erase(i);
      adjacent[nb].erase(j);
      adjacent[nb].insert(t);
      adjacent[t].insert(nb);
      push(nb, t);
    }
  }

  Rng rng(p.seed);
  std::map<std::tuple<double, double, double, double>, double> best;
  for (const Region& r : out.regions) {
    const double score = r.merge_step * rng.uniform_open_closed();
    const auto key = std::make_tuple(r.bbox.x, r.bbox.y, r.bbox.width, r.bbox.height);
    auto [it, inserted] = best.emplace(key, score);
    if (!inserted) it->second = std::max(it->second, score);
  }
  for (const auto& [key, score] : best) {
    out.proposals.push_back(
        {{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key)},
         score});
  }
  // std::map iteration already orders equal scores by box.
  std::stable_sort(out.proposals.begin(), out.proposals.end(),
                   [](const ScoredBox& a, const ScoredBox& b) {
                     return a.score > b.score;
                   });
  if (out.regions.size() == out.initial_count) {
    out.min_similarity = out.max_similarity = 0.0;
  }
  return out;
}

std::vector<ScoredBox> selective_search(const ImageBuffer& img,
                                        const SegParams& p) {
  return run_selective_search(img, p).proposals;
}

}  // namespace orl
