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

#include <fstream>

#include "doctest.h"
#include "orl/error.h"
#include "orl/image.h"
#include "orl/manifest.h"
#include "test_util.h"

using orl::BoundingBox;
using orl::DataError;
using orl::ImageBuffer;
using orl_test::error_message;
using orl_test::TempDir;

namespace {

std::vector<uint8_t> bytes_of(const std::string& s) {
  return std::vector<uint8_t>(s.begin(), s.end());
}

void write_bytes(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST_CASE("load_image decodes a 2x2 red P6") {
  TempDir dir("image_red");
  std::string file = "P6\n2 2\n255\n";
  for (int i = 0; i < 4; ++i) file += std::string("\xff\x00\x00", 3);
  write_bytes(dir / "red.ppm", file);
  const ImageBuffer img = orl::load_image(dir / "red.ppm");
  CHECK(img.width() == 2);
  CHECK(img.height() == 2);
  CHECK(img == orl_test::solid(2, 2, 255, 0, 0));
}

TEST_CASE("save then load round-trips the raster") {
  TempDir dir("image_roundtrip");
  const ImageBuffer img = orl_test::random_image(13, 7, 3);
  orl::save_image(img, dir / "a.ppm");
  const ImageBuffer back = orl::load_image(dir / "a.ppm");
  CHECK(back == img);
  orl::save_image(back, dir / "b.ppm");
  CHECK(orl::load_image(dir / "b.ppm") == img);
}

TEST_CASE("grayscale P5 is replicated to three channels") {
  const auto img = orl::decode_pnm(bytes_of(std::string("P5\n2 1\n255\n\x10\x80", 13)));
  CHECK(img.at(0, 0, 0) == 0x10);
  CHECK(img.at(0, 0, 2) == 0x10);
  CHECK(img.at(1, 0, 1) == 0x80);
}

TEST_CASE("malformed files are rejected") {
  auto decode = [](const std::string& s) {
    return error_message<DataError>([&] { orl::decode_pnm(bytes_of(s)); });
  };
  CHECK(decode("P6\n2").find("unsupported format / truncated") != std::string::npos);
  CHECK(decode("P6\n2 2\n255\n\x01\x02").find("unsupported format / truncated") !=
        std::string::npos);
  CHECK(decode("P3\n1 1\n255\n0 0 0").find("unsupported format") != std::string::npos);
  CHECK(decode("P6\n100000 100000\n255\n").find("overflow") != std::string::npos);
  CHECK(decode("P6\n1 1\n65535\n\0\0\0\0\0\0").find("unsupported format") !=
        std::string::npos);
  TempDir dir("image_missing");
  CHECK_THROWS_AS(orl::load_image(dir / "nope.ppm"), DataError);
}

TEST_CASE("decoding the same file twice is byte-identical") {
  TempDir dir("image_twice");
  orl::save_image(orl_test::random_image(9, 9, 5), dir / "x.ppm");
  CHECK(orl::load_image(dir / "x.ppm") == orl::load_image(dir / "x.ppm"));
}

TEST_CASE("resize_bilinear examples") {
  const ImageBuffer img = orl_test::random_image(11, 6, 8);
  CHECK(orl::resize_bilinear(img, 11, 6) == img);

  ImageBuffer two(2, 2);
  two.set_rgb(0, 1, 255, 255, 255);
  two.set_rgb(1, 1, 255, 255, 255);
  // The 1x1 sample sits at the exact center: (0 + 0 + 255 + 255) / 4 = 127.5.
  const ImageBuffer one = orl::resize_bilinear(two, 1, 1);
  CHECK(one.at(0, 0, 0) == 128);
  CHECK(one.at(0, 0, 2) == 128);

  const ImageBuffer dot = orl_test::solid(1, 1, 12, 34, 56);
  CHECK(orl::resize_bilinear(dot, 7, 5) == orl_test::solid(7, 5, 12, 34, 56));

  CHECK_THROWS_AS(orl::resize_bilinear(img, 0, 3), DataError);
}

TEST_CASE("resize of a constant image is constant at every size") {
  const ImageBuffer c = orl_test::solid(5, 9, 200, 3, 77);
  for (int w : {1, 2, 3, 8, 17}) {
    for (int h : {1, 4, 13}) {
      CHECK(orl::resize_bilinear(c, w, h) == orl_test::solid(w, h, 200, 3, 77));
    }
  }
}

TEST_CASE("resize output stays within the input range") {
  for (uint32_t seed = 0; seed < 5; ++seed) {
    const ImageBuffer img = orl_test::random_image(7 + seed, 5 + seed, seed);
    int lo[3] = {255, 255, 255}, hi[3] = {0, 0, 0};
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        for (int c = 0; c < 3; ++c) {
          lo[c] = std::min<int>(lo[c], img.at(x, y, c));
          hi[c] = std::max<int>(hi[c], img.at(x, y, c));
        }
      }
    }
    const ImageBuffer out = orl::resize_bilinear(img, 23, 4 + 3 * seed);
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        for (int c = 0; c < 3; ++c) {
          CHECK(out.at(x, y, c) >= lo[c] - 1);
          CHECK(out.at(x, y, c) <= hi[c] + 1);
        }
      }
    }
  }
}

TEST_CASE("crop_region examples") {
  const ImageBuffer img = orl_test::random_image(10, 8, 1);
  CHECK(orl::crop_region(img, {0, 0, 10, 8}) == img);

  // Pixel ids 0..15 in row-major order on a 4x4 image.
  ImageBuffer ids(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      const auto v = static_cast<uint8_t>(y * 4 + x);
      ids.set_rgb(x, y, v, v, v);
    }
  }
  const ImageBuffer c = orl::crop_region(ids, {1, 1, 2, 1});
  REQUIRE(c.width() == 2);
  REQUIRE(c.height() == 1);
  CHECK(c.at(0, 0, 0) == 5);
  CHECK(c.at(1, 0, 0) == 6);

  CHECK_THROWS_AS(orl::crop_region(ids, {-10, 0, 5, 4}), DataError);
  // Half-up rounding of both edges: [0.5, 2.5) -> [1, 3).
  const ImageBuffer r = orl::crop_region(ids, {0.5, 0, 2, 1});
  CHECK(r.width() == 2);
  CHECK(r.at(0, 0, 0) == 1);
}

TEST_CASE("manifest read, validation and load") {
  TempDir dir("manifest");
  const ImageBuffer a = orl_test::random_image(4, 3, 1);
  orl::save_image(a, dir / "a.ppm");
  orl::DatasetManifest m({{0, "a.ppm", 4, 3}}, dir.path());
  m.write(dir / "m.jsonl");
  const auto back = orl::DatasetManifest::read(dir / "m.jsonl");
  CHECK(back.entries() == m.entries());
  CHECK(back.load(0) == a);
  CHECK(orl_test::read_first_line(dir / "m.jsonl") ==
        R"({"image_id":0,"path":"a.ppm","width":4,"height":3})");

  orl::DatasetManifest missing({{0, "gone.ppm", 4, 3}}, dir.path());
  CHECK(error_message<DataError>([&] { missing.load(0); }).find("gone.ppm") !=
        std::string::npos);

  orl::DatasetManifest wrong({{0, "a.ppm", 5, 3}}, dir.path());
  CHECK_THROWS_AS(wrong.load(0), DataError);
  CHECK_THROWS_AS(orl::DatasetManifest({{1, "a.ppm", 4, 3}}, dir.path()), DataError);

  orl_test::write_text(dir / "empty.jsonl", "");
  CHECK(error_message<DataError>([&] { orl::DatasetManifest::read(dir / "empty.jsonl"); })
            .find("empty manifest") != std::string::npos);
}
