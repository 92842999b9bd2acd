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

#include "orl/retrieval.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orl/error.h"
#include "orl/log.h"
#include "orl/parallel.h"

namespace orl {
namespace {

bool ranks_before(const MatrixEntry& a, const MatrixEntry& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  if (a.row != b.row) return a.row < b.row;
  return a.col < b.col;
}

std::span<const double> as_span(const EmbeddingVector& v) { return v; }
std::span<const float> as_span(const EmbeddingRecord* r) { return r->values; }

template <typename T>
SimilarityMatrix build_matrix(std::span<const T> q, std::span<const T> n) {
  if (q.empty() || n.empty()) {
    throw DataError("roi_pair_matrix: both RoI lists must be nonempty");
  }
  SimilarityMatrix m{q.size(), n.size(), {}};
  m.values.resize(q.size() * n.size());
  for (size_t r = 0; r < q.size(); ++r) {
    for (size_t c = 0; c < n.size(); ++c) {
      m.values[r * m.cols + c] = cosine_similarity(as_span(q[r]), as_span(n[c]));
    }
  }
  return m;
}

Json pair_to_json(const CorrespondencePair& p) {
  Json j;
  j["query_id"] = p.query_id;
  j["neighbor_id"] = p.neighbor_id;
  j["query_box"] = box_to_json(p.query_box);
  j["neighbor_box"] = box_to_json(p.neighbor_box);
  j["similarity"] = p.similarity;
  return j;
}

}  // namespace

std::vector<NeighborSet> knn_images(const EmbeddingStore& store, size_t k,
                                    int workers) {
  if (store.kind() != StoreKind::kImage) {
    throw DataError("knn_images needs a whole-image embedding store");
  }
  const auto& recs = store.records();
  if (recs.size() < 2) throw DataError("knn_images needs at least two images");
  if (k < 1) throw ConfigError("K must be >= 1");
  const size_t keep = std::min(k, recs.size() - 1);

  std::vector<NeighborSet> out(recs.size());
  parallel_for(recs.size(), workers, [&](size_t q) {
    std::vector<Neighbor> cand;
    cand.reserve(recs.size() - 1);
    for (size_t i = 0; i < recs.size(); ++i) {
      if (i == q) continue;
      cand.push_back({recs[i].image_id,
                      cosine_similarity(std::span<const float>(recs[q].values),
                                        std::span<const float>(recs[i].values))});
    }
    std::partial_sort(cand.begin(), cand.begin() + keep, cand.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                        if (a.similarity != b.similarity) {
                          return a.similarity > b.similarity;
                        }
                        return a.image_id < b.image_id;
                      });
    cand.resize(keep);
    out[q] = {recs[q].image_id, std::move(cand)};
  });
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.query_id < b.query_id;
  });
  return out;
}

SimilarityMatrix roi_pair_matrix(std::span<const EmbeddingVector> query_rois,
                                 std::span<const EmbeddingVector> neighbor_rois) {
  return build_matrix(query_rois, neighbor_rois);
}

SimilarityMatrix roi_pair_matrix(std::span<const EmbeddingRecord* const> query_rois,
                                 std::span<const EmbeddingRecord* const> neighbor_rois) {
  return build_matrix(query_rois, neighbor_rois);
}

size_t top_pair_count(size_t rows, size_t cols, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("pair fraction must lie in (0, 1]");
  }
  const double total = static_cast<double>(rows) * static_cast<double>(cols);
  // The slack keeps products like 0.1 * 10000 from rounding up past 1000.
  const double want = std::ceil(fraction * total - 1e-9);
  return std::clamp<size_t>(static_cast<size_t>(want), 1, rows * cols);
}

std::vector<MatrixEntry> top_entries(const SimilarityMatrix& m, double fraction) {
  const size_t keep = top_pair_count(m.rows, m.cols, fraction);
  std::vector<MatrixEntry> all;
  all.reserve(m.rows * m.cols);
  for (size_t r = 0; r < m.rows; ++r) {
    for (size_t c = 0; c < m.cols; ++c) all.push_back({r, c, m.at(r, c)});
  }
  std::partial_sort(all.begin(), all.begin() + keep, all.end(), ranks_before);
  all.resize(keep);
  return all;
}

std::vector<CorrespondencePair> select_top_pairs(
    const SimilarityMatrix& m, uint64_t query_id, uint64_t neighbor_id,
    std::span<const BoundingBox> query_boxes,
    std::span<const BoundingBox> neighbor_boxes, double fraction) {
  if (query_boxes.size() != m.rows || neighbor_boxes.size() != m.cols) {
    throw DataError("select_top_pairs: box lists do not match the matrix");
  }
  std::vector<CorrespondencePair> out;
  for (const MatrixEntry& e : top_entries(m, fraction)) {
    out.push_back({query_id, neighbor_id, query_boxes[e.row],
                   neighbor_boxes[e.col], e.similarity});
  }
  return out;
}

std::vector<CorrespondencePair> discover_correspondence(
    const ProposalsFile& proposals, std::span<const NeighborSet> neighbors,
    const EmbeddingStore& roi_store, double fraction, int workers) {
  if (roi_store.kind() != StoreKind::kRoi) {
    throw DataError("discover_correspondence needs a RoI embedding store");
  }
  auto boxes_of = [&](uint64_t id) -> const ImageProposals& {
    const ImageProposals* p = proposals.find(id);
    if (!p) {
      throw DataError("image " + std::to_string(id) +
                      " has no entry in the proposals file");
    }
    return *p;
  };
  auto rois_of = [&](uint64_t id) {
    auto rois = roi_store.rois_of(id);
    const auto& boxes = boxes_of(id).boxes;
    if (rois.size() != boxes.size()) {
      throw DataError("image " + std::to_string(id) + " has " +
                      std::to_string(boxes.size()) + " proposals but " +
                      std::to_string(rois.size()) + " RoI embeddings");
    }
    for (size_t i = 0; i < rois.size(); ++i) {
      if (rois[i]->roi_index != i) {
        throw DataError("missing RoI embedding (" + std::to_string(id) + ", " +
                        std::to_string(i) + ")");
      }
    }
    return rois;
  };

  std::vector<std::vector<CorrespondencePair>> per_query(neighbors.size());
  parallel_for(neighbors.size(), workers, [&](size_t qi) {
    const NeighborSet& set = neighbors[qi];
    const auto q_rois = rois_of(set.query_id);
    const auto& q_boxes = boxes_of(set.query_id).boxes;
    std::vector<Neighbor> ordered = set.neighbors;
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
    for (const Neighbor& nb : ordered) {
      if (nb.image_id == set.query_id) {
        throw DataError("image " + std::to_string(nb.image_id) +
                        " lists itself as a neighbor");
      }
      const auto n_rois = rois_of(nb.image_id);
      if (q_rois.empty() || n_rois.empty()) {
        log_warning("no proposals for pair (" + std::to_string(set.query_id) +
                    ", " + std::to_string(nb.image_id) + "); skipped");
        continue;
      }
      const SimilarityMatrix m = roi_pair_matrix(
          std::span<const EmbeddingRecord* const>(q_rois),
          std::span<const EmbeddingRecord* const>(n_rois));
      auto pairs = select_top_pairs(m, set.query_id, nb.image_id, q_boxes,
                                    boxes_of(nb.image_id).boxes, fraction);
      per_query[qi].insert(per_query[qi].end(), pairs.begin(), pairs.end());
    }
  });

  std::vector<size_t> order(neighbors.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return neighbors[a].query_id < neighbors[b].query_id;
  });
  std::vector<CorrespondencePair> out;
  for (size_t i : order) {
    out.insert(out.end(), per_query[i].begin(), per_query[i].end());
  }
  return out;
}

std::string KnnFile::format() const {
  std::string out;
  if (header) out += header->to_json().dump() + '\n';
  for (const auto& s : sets) {
    Json j;
    j["query_id"] = s.query_id;
    Json nbrs = Json::array();
    for (const auto& n : s.neighbors) nbrs.push_back(Json::array({n.image_id, n.similarity}));
    j["neighbors"] = nbrs;
    out += j.dump();
    out += '\n';
  }
  return out;
}

KnnFile KnnFile::read(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw DataError("missing knn file: " + path.string());
  }
  KnnFile f;
  const auto lines = read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    const Json j = parse_json_line(lines[i], path, i + 1);
    if (i == 0 && StageHeader::is_header(j)) {
      f.header = StageHeader::from_json(j);
      continue;
    }
    try {
      NeighborSet s;
      s.query_id = j.at("query_id").get<uint64_t>();
      for (const auto& n : j.at("neighbors")) {
        s.neighbors.push_back({n.at(0).get<uint64_t>(), n.at(1).get<double>()});
      }
      f.sets.push_back(std::move(s));
    } catch (const Json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": " +
                      e.what());
    }
  }
  return f;
}

void KnnFile::write(const std::filesystem::path& path) const {
  write_file(path, format());
}

std::string CorrespondenceFile::format() const {
  std::string out;
  if (header) out += header->to_json().dump() + '\n';
  for (const auto& p : pairs) {
    out += pair_to_json(p).dump();
    out += '\n';
  }
  return out;
}

CorrespondenceFile CorrespondenceFile::read(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw DataError("missing correspondence file: " + path.string());
  }
  CorrespondenceFile f;
  const auto lines = read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    const Json j = parse_json_line(lines[i], path, i + 1);
    if (i == 0 && StageHeader::is_header(j)) {
      f.header = StageHeader::from_json(j);
      continue;
    }
    try {
      f.pairs.push_back({j.at("query_id").get<uint64_t>(),
                         j.at("neighbor_id").get<uint64_t>(),
                         box_from_json(j.at("query_box")),
                         box_from_json(j.at("neighbor_box")),
                         j.at("similarity").get<double>()});
    } catch (const Json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": " +
                      e.what());
    }
  }
  return f;
}

void CorrespondenceFile::write(const std::filesystem::path& path) const {
  write_file(path, format());
}

}  // namespace orl
