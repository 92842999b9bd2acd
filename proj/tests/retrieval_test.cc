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

#include <random>
#include <set>

#include "doctest.h"
#include "oracles.h"
#include "orl/embedding.h"
#include "orl/error.h"
#include "orl/proposals.h"
#include "orl/retrieval.h"
#include "test_util.h"

using orl::EmbeddingStore;
using orl::EmbeddingVector;
using orl::SimilarityMatrix;
using orl::StoreKind;

namespace {

EmbeddingStore random_store(size_t n, uint32_t dim, uint32_t seed) {
  std::mt19937 g(seed);
  std::normal_distribution<double> nd;
  EmbeddingStore s(StoreKind::kImage, dim);
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = nd(g);
    s.add(i, orl::kWholeImage, v);
  }
  return s;
}

SimilarityMatrix random_matrix(size_t rows, size_t cols, std::mt19937& g, bool coarse) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SimilarityMatrix m{rows, cols, {}};
  for (size_t i = 0; i < rows * cols; ++i) {
    const double v = u(g);
    m.values.push_back(coarse ? std::round(v * 4) / 4 : v);
  }
  return m;
}

}  // namespace

TEST_CASE("knn: duplicate vector is the top neighbor") {
  EmbeddingStore s(StoreKind::kImage, 3);
  std::mt19937 g(1);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> vs(10, std::vector<double>(3));
  for (auto& v : vs) {
    for (auto& x : v) x = nd(g);
  }
  vs[7] = vs[3];
  for (size_t i = 0; i < vs.size(); ++i) s.add(i, orl::kWholeImage, vs[i]);
  const auto sets = orl::knn_images(s, 2);
  CHECK(sets[3].neighbors[0].image_id == 7);
  CHECK(sets[3].neighbors[0].similarity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sets[7].neighbors[0].image_id == 3);
}

TEST_CASE("knn matches the exhaustive oracle") {
  for (size_t n : {2, 3, 17, 120}) {
    const auto store = random_store(n, 8, static_cast<uint32_t>(n));
    for (size_t k : {1, 5, 10, 500}) {
      const auto got = orl::knn_images(store, k, 2);
      CHECK(got == orl_test::knn_oracle(store, k));
      for (const auto& set : got) {
        CHECK(set.neighbors.size() == std::min(k, n - 1));
        for (const auto& nb : set.neighbors) CHECK(nb.image_id != set.query_id);
        for (size_t i = 1; i < set.neighbors.size(); ++i) {
          CHECK(set.neighbors[i - 1].similarity >= set.neighbors[i].similarity);
        }
      }
    }
  }
}

TEST_CASE("knn ties break by ascending id") {
  EmbeddingStore s(StoreKind::kImage, 2);
  s.add(0, orl::kWholeImage, std::vector<double>{1, 0});
  s.add(1, orl::kWholeImage, std::vector<double>{0, 1});
  s.add(2, orl::kWholeImage, std::vector<double>{0, 2});
  s.add(3, orl::kWholeImage, std::vector<double>{0, 1});
  const auto sets = orl::knn_images(s, 3);
  CHECK(sets[0].neighbors[0].image_id == 1);
  CHECK(sets[0].neighbors[1].image_id == 2);
  CHECK(sets[0].neighbors[2].image_id == 3);
  CHECK_THROWS_AS(orl::knn_images(random_store(1, 2, 0), 1), orl::DataError);
}

TEST_CASE("roi_pair_matrix examples") {
  const std::vector<EmbeddingVector> one = {{0.3, -0.2, 0.9}};
  const auto m1 = orl::roi_pair_matrix(one, one);
  CHECK(m1.rows == 1);
  CHECK(m1.cols == 1);
  CHECK(m1.at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<EmbeddingVector> q = {{1, 0}, {0, 1}};
  const std::vector<EmbeddingVector> n = {{0, 1}};
  const auto m2 = orl::roi_pair_matrix(q, n);
  CHECK(m2.at(0, 0) == 0.0);
  CHECK(m2.at(1, 0) == 1.0);

  std::mt19937 g(3);
  std::normal_distribution<double> nd;
  std::vector<EmbeddingVector> a(5, EmbeddingVector(6)), b(4, EmbeddingVector(6));
  for (auto& v : a) {
    for (auto& x : v) x = nd(g);
  }
  for (auto& v : b) {
    for (auto& x : v) x = nd(g);
  }
  const auto m = orl::roi_pair_matrix(a, b);
  for (size_t i = 0; i < 5; ++i) {
    for (size_t j = 0; j < 4; ++j) {
      double dot = 0, na = 0, nb = 0;
      for (size_t d = 0; d < 6; ++d) {
        dot += a[i][d] * b[j][d];
        na += a[i][d] * a[i][d];
        nb += b[j][d] * b[j][d];
      }
      CHECK(m.at(i, j) == doctest::Approx(dot / std::sqrt(na * nb)).epsilon(1e-14));
    }
  }
  const std::vector<EmbeddingVector> bad = {{1, 0, 0}};
  CHECK_THROWS_AS(orl::roi_pair_matrix(q, bad), orl::DataError);
}

TEST_CASE("select_top_pairs examples") {
  const SimilarityMatrix m{2, 2, {0.9, 0.1, 0.2, 0.8}};
  const std::vector<orl::BoundingBox> qb = {{0, 0, 1, 1}, {1, 1, 1, 1}};
  const std::vector<orl::BoundingBox> nb = {{2, 2, 1, 1}, {3, 3, 1, 1}};
  const auto half = orl::select_top_pairs(m, 0, 1, qb, nb, 0.5);
  REQUIRE(half.size() == 2);
  CHECK(half[0].query_box == qb[0]);
  CHECK(half[0].neighbor_box == nb[0]);
  CHECK(half[1].query_box == qb[1]);
  CHECK(half[1].neighbor_box == nb[1]);

  const auto all = orl::select_top_pairs(m, 0, 1, qb, nb, 1.0);
  REQUIRE(all.size() == 4);
  CHECK(all[2].similarity == 0.2);
  CHECK(all[3].similarity == 0.1);

  std::mt19937 g(1);
  const auto big = random_matrix(100, 100, g, false);
  CHECK(orl::top_entries(big, 0.1).size() == 1000);
  CHECK(orl::top_pair_count(100, 100, 0.1) == 1000);
  CHECK(orl::top_pair_count(3, 3, 0.1) == 1);
  CHECK(orl::top_pair_count(7, 3, 0.5) == 11);
}

TEST_CASE("top_entries matches the enumeration oracle") {
  std::mt19937 g(9);
  std::uniform_int_distribution<size_t> side(1, 50);
  const double fractions[] = {0.01, 0.1, 0.37, 0.5, 1.0};
  for (int t = 0; t < 200; ++t) {
    const auto m = random_matrix(side(g), side(g), g, t % 2 == 0);
    const double f = fractions[t % 5];
    const auto got = orl::top_entries(m, f);
    CHECK(got == orl_test::top_entries_oracle(m, f));
    CHECK(got.size() == orl::top_pair_count(m.rows, m.cols, f));
  }
}

TEST_CASE("discover_correspondence: both directions for two images") {
  orl::ProposalsFile props;
  props.images = {{0, {{0, 0, 10, 10}, {5, 5, 10, 10}}, {2, 1}, {}},
                  {1, {{1, 1, 8, 8}}, {1}, {}}};
  EmbeddingStore rois(StoreKind::kRoi, 2);
  rois.add(0, 0, std::vector<double>{1, 0});
  rois.add(0, 1, std::vector<double>{0, 1});
  rois.add(1, 0, std::vector<double>{1, 0.1});
  EmbeddingStore images(StoreKind::kImage, 2);
  images.add(0, orl::kWholeImage, std::vector<double>{1, 1});
  images.add(1, orl::kWholeImage, std::vector<double>{1, 0.5});
  const auto knn = orl::knn_images(images, 1);
  const auto pairs = orl::discover_correspondence(props, knn, rois, 0.5);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].query_id == 0);
  CHECK(pairs[0].neighbor_id == 1);
  CHECK(pairs[0].query_box == props.images[0].boxes[0]);
  CHECK(pairs[1].query_id == 1);
  CHECK(pairs[1].neighbor_id == 0);
  CHECK(pairs[1].neighbor_box == props.images[0].boxes[0]);

  EmbeddingStore short_rois(StoreKind::kRoi, 2);
  short_rois.add(0, 0, std::vector<double>{1, 0});
  short_rois.add(1, 0, std::vector<double>{1, 0});
  CHECK_THROWS_AS(orl::discover_correspondence(props, knn, short_rois, 0.5),
                  orl::DataError);
}

TEST_CASE("discover_correspondence emits n*K groups in sorted order") {
  const size_t n = 9, k = 3;
  std::mt19937 g(4);
  std::normal_distribution<double> nd;
  orl::ProposalsFile props;
  EmbeddingStore rois(StoreKind::kRoi, 4);
  for (size_t i = 0; i < n; ++i) {
    orl::ImageProposals p;
    p.image_id = i;
    for (int r = 0; r < 3 + static_cast<int>(i % 3); ++r) {
      p.boxes.push_back({double(r), 0, 5, 5});
      p.objectness.push_back(10.0 - r);
      rois.add(i, r, std::vector<double>{nd(g), nd(g), nd(g), nd(g)});
    }
    props.images.push_back(p);
  }
  const auto knn = orl::knn_images(random_store(n, 4, 2), k);
  const auto pairs = orl::discover_correspondence(props, knn, rois, 0.3, 3);
  std::set<std::pair<uint64_t, uint64_t>> groups;
  for (size_t i = 0; i < pairs.size(); ++i) {
    groups.insert({pairs[i].query_id, pairs[i].neighbor_id});
    CHECK(pairs[i].query_id != pairs[i].neighbor_id);
    if (i == 0) continue;
    const auto& a = pairs[i - 1];
    const auto& b = pairs[i];
    const bool ordered = a.query_id < b.query_id ||
                         (a.query_id == b.query_id && (a.neighbor_id < b.neighbor_id ||
                                                       (a.neighbor_id == b.neighbor_id &&
                                                        a.similarity >= b.similarity)));
    CHECK(ordered);
  }
  CHECK(groups.size() == n * k);
  CHECK(orl::discover_correspondence(props, knn, rois, 0.3, 1) == pairs);
}

TEST_CASE("knn and correspondence files round-trip byte-stably") {
  orl_test::TempDir dir("retrieval_files");
  orl::KnnFile knn;
  knn.sets = orl::knn_images(random_store(5, 3, 8), 2);
  knn.write(dir / "knn.jsonl");
  const auto back = orl::KnnFile::read(dir / "knn.jsonl");
  CHECK(back.sets == knn.sets);
  CHECK(back.format() == knn.format());

  orl::CorrespondenceFile c;
  c.pairs = {{0, 1, {0.5, 1, 2, 3}, {4, 5, 6, 7.25}, 0.1 + 0.2}};
  c.write(dir / "c.jsonl");
  CHECK(orl_test::read_first_line(dir / "c.jsonl") ==
        R"({"query_id":0,"neighbor_id":1,"query_box":[0.5,1.0,2.0,3.0],)"
        R"("neighbor_box":[4.0,5.0,6.0,7.25],"similarity":0.30000000000000004})");
  CHECK(orl::CorrespondenceFile::read(dir / "c.jsonl").pairs == c.pairs);
  CHECK(orl_test::error_message<orl::DataError>([&] {
          orl::KnnFile::read(dir / "absent.jsonl");
        }).find("missing knn file") != std::string::npos);
}
