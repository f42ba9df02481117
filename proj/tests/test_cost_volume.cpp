// Copyright 2026 The dispint Authors.
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

#include <algorithm>
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "dispint/cost_volume.hpp"
#include "dispint/disparity.hpp"
#include "support.hpp"

using namespace dispint;
using namespace dispint::testing;

namespace {

GrayImage image_from(int h, int w, std::initializer_list<int> values) {
  GrayImage img;
  img.pixels.resize(h, w);
  auto it = values.begin();
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) img.pixels(i, j) = static_cast<std::uint16_t>(*it++);
  }
  return img;
}

// Straight-line census: neighbours in row-major order, centre skipped.
std::string census_oracle(const GrayImage& img, int i, int j, int wr, int wc) {
  std::string bits;
  const int h = img.height(), w = img.width();
  const int centre = img.pixels(i, j);
  for (int di = -wr / 2; di <= wr / 2; ++di) {
    for (int dj = -wc / 2; dj <= wc / 2; ++dj) {
      if (di == 0 && dj == 0) continue;
      const int y = std::clamp(i + di, 0, h - 1), x = std::clamp(j + dj, 0, w - 1);
      bits += img.pixels(y, x) < centre ? '1' : '0';
    }
  }
  return bits;
}

int hamming_oracle(const std::string& a, const std::string& b) {
  int n = 0;
  for (std::size_t k = 0; k < a.size(); ++k) n += a[k] != b[k];
  return n;
}

}  // namespace

TEST_CASE("census of a constant image is all zeros") {
  GrayImage img;
  img.pixels = Plane<std::uint16_t>::Constant(6, 7, 42);
  const CensusField f = census_transform(img, 5, 5);
  CHECK(f.bits() == 24);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 7; ++j) CHECK(f.signature_string(i, j) == std::string(24, '0'));
  }
}

TEST_CASE("3x3 census around 5 with neighbours 1..9") {
  const GrayImage img = image_from(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const CensusField f = census_transform(img, 3, 3);
  CHECK(f.signature_string(1, 1) == "11110000");
}

TEST_CASE("census window preconditions") {
  GrayImage img;
  img.pixels = Plane<std::uint16_t>::Zero(8, 8);
  CHECK_THROWS_AS(census_transform(img, 4, 4), Error);
  CHECK_THROWS_AS(census_transform(img, 5, 4), Error);
  GrayImage tiny;
  tiny.pixels = Plane<std::uint16_t>::Zero(3, 3);
  CHECK_THROWS_AS(census_transform(tiny, 5, 5), Error);
}

TEST_CASE("census matches the straight-line oracle") {
  Rng rng(5);
  for (const auto [wr, wc] : {std::pair{3, 3}, std::pair{5, 5}, std::pair{3, 7}, std::pair{11, 11}}) {
    const GrayImage img = random_image(13, 14, rng);
    const CensusField f = census_transform(img, wr, wc);
    for (int i = 0; i < img.height(); ++i) {
      for (int j = 0; j < img.width(); ++j) REQUIRE(f.signature_string(i, j) == census_oracle(img, i, j, wr, wc));
    }
  }
}

TEST_CASE("identical images give zero cost on the d = 0 plane") {
  Rng rng(1);
  const GrayImage img = random_image(10, 12, rng);
  const CensusField f = census_transform(img, 5, 5);
  const CostVolume v = build_cost_volume(f, f, DisparityRange(-3, 0));
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 12; ++j) {
      REQUIRE(v.valid(i, j, 3));
      CHECK(v.cost(i, j, 3) == 0.0f);
    }
  }
}

TEST_CASE("out-of-frame matches are invalid") {
  Rng rng(2);
  const GrayImage img = random_image(6, 9, rng);
  const CensusField f = census_transform(img, 3, 3);
  const CostVolume v = build_cost_volume(f, f, DisparityRange(-4, 2));
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 9; ++j) {
      for (int k = 0; k < 7; ++k) {
        const int jr = j + v.range().disparity(k);
        CHECK(v.valid(i, j, k) == (jr >= 0 && jr < 9));
        if (!v.valid(i, j, k)) CHECK(std::isinf(v.cost(i, j, k)));
      }
    }
  }
}

TEST_CASE("cost volume entries equal the oracle Hamming distance") {
  Rng rng(9);
  const GrayImage l = random_image(9, 11, rng), r = random_image(9, 11, rng);
  const CensusField fl = census_transform(l, 5, 5), fr = census_transform(r, 5, 5);
  const DisparityRange range(-5, 3);
  const CostVolume v = build_cost_volume(fl, fr, range);
  float lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 11; ++j) {
      for (int k = 0; k < range.size(); ++k) {
        const int jr = j + range.disparity(k);
        if (jr < 0 || jr >= 11) continue;
        const int expected = hamming_oracle(census_oracle(l, i, j, 5, 5), census_oracle(r, i, jr, 5, 5));
        REQUIRE(v.cost(i, j, k) == static_cast<float>(expected));
        CHECK(v.cost(i, j, k) >= 0.0f);
        CHECK(v.cost(i, j, k) <= 24.0f);
        lo = std::min(lo, v.cost(i, j, k));
        hi = std::max(hi, v.cost(i, j, k));
        // symmetric in the two signatures
        CHECK(fl.hamming(i, j, fr, i, jr) == fr.hamming(i, jr, fl, i, j));
      }
    }
  }
  CHECK(v.cost_min() == lo);
  CHECK(v.cost_max() == hi);
}

TEST_CASE("range entirely out of frame is an empty valid set") {
  Rng rng(4);
  const GrayImage img = random_image(5, 5, rng);
  const CensusField f = census_transform(img, 3, 3);
  CHECK_THROWS_WITH_AS(build_cost_volume(f, f, DisparityRange(10, 12)), doctest::Contains("empty valid set"), Error);
}

TEST_CASE("shifted 16x16 pattern: argmin is the shift") {
  Rng rng(21);
  const GrayImage right = random_image(16, 16, rng);
  GrayImage left = right;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) left.pixels(i, j) = right.pixels(i, std::max(0, j - 2));
  }
  const CostVolume v = build_cost_volume(census_transform(left, 5, 5), census_transform(right, 5, 5),
                                         DisparityRange(-4, 4));
  // Windows avoid the borders and the replicated left columns.
  for (int i = 2; i < 14; ++i) {
    for (int j = 6; j < 14; ++j) {
      int best = -1;
      for (int k = 0; k < v.num_disparities(); ++k) {
        if (v.valid(i, j, k) && (best < 0 || v.cost(i, j, k) < v.cost(i, j, best))) best = k;
      }
      CHECK(v.range().disparity(best) == -2);
    }
  }
}

TEST_CASE("property: translated pairs reach zero cost at the translation away from borders") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int h = 12 + static_cast<int>(rng() % 21), w = 16 + static_cast<int>(rng() % 17);
    const int t = static_cast<int>(rng() % 6);
    const GrayImage right = random_image(h, w, rng);
    GrayImage left = right;
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) left.pixels(i, j) = right.pixels(i, std::max(0, j - t));
    }
    const CostVolume v = build_cost_volume(census_transform(left, 5, 5), census_transform(right, 5, 5),
                                           DisparityRange(-7, 0));
    const DisparityMap d = wta(v);
    for (int i = 2; i < h - 2; ++i) {
      for (int j = t + 2 + 7; j < w - 2; ++j) {
        REQUIRE(v.cost(i, j, 7 - t) == 0.0f);
        // a window-minimum centre gives an all-zero signature, so ties are possible
        if (d(i, j) != static_cast<float>(-t)) REQUIRE(v.cost(i, j, v.range().index(static_cast<int>(d(i, j)))) == 0.0f);
      }
    }
  }
}

TEST_CASE("export then import is identical") {
  const auto dir = scratch_dir("cv_rt");
  Rng rng(8);
  CostVolume v = random_volume(4, 5, DisparityRange(-3, 2), rng, 24, 0.3);
  v.set_cost(0, 0, 0, 1.25f);
  v.update_extrema();
  export_cost_volume(v, dir / "v.cvol");
  const std::string bytes = read_bytes(dir / "v.cvol");
  CHECK(bytes.size() == 32 + 4 * 4 * 5 * 6);
  CHECK(bytes.substr(0, 4) == "CVOL");
  const CostVolume back = import_cost_volume(dir / "v.cvol", {DisparityRange(-3, 2), 4, 5});
  CHECK(back.range() == v.range());
  CHECK(back.valid() == v.valid());
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 6; ++k) {
        if (v.valid(i, j, k)) CHECK(back.cost(i, j, k) == v.cost(i, j, k));
      }
    }
  }
  CHECK(back.cost_min() == v.cost_min());
  CHECK(back.cost_max() == v.cost_max());
}

TEST_CASE("import rejects inconsistent files") {
  const auto dir = scratch_dir("cv_bad");
  Rng rng(8);
  const CostVolume v = random_volume(3, 3, DisparityRange(0, 3), rng);
  export_cost_volume(v, dir / "v.cvol");
  std::string bytes = read_bytes(dir / "v.cvol");

  write_bytes(dir / "short.cvol", bytes.substr(0, bytes.size() - 4));
  CHECK_THROWS_AS(import_cost_volume(dir / "short.cvol"), Error);

  std::string wrong_range = bytes;
  wrong_range[20] = 9;  // d_max = 9: header count no longer matches payload
  write_bytes(dir / "range.cvol", wrong_range);
  CHECK_THROWS_AS(import_cost_volume(dir / "range.cvol"), Error);

  CHECK_THROWS_AS(import_cost_volume(dir / "v.cvol", {DisparityRange(-3, 0), {}, {}}), Error);
  CHECK_THROWS_AS(import_cost_volume(dir / "v.cvol", {{}, 4, {}}), Error);

  std::string all_nan = bytes;
  const float nan = NAN;
  for (std::size_t at = 32; at < all_nan.size(); at += 4) std::memcpy(&all_nan[at], &nan, 4);
  write_bytes(dir / "nan.cvol", all_nan);
  CHECK_THROWS_WITH_AS(import_cost_volume(dir / "nan.cvol"), doctest::Contains("empty valid set"), Error);

  write_bytes(dir / "magic.cvol", "XXXX" + bytes.substr(4));
  CHECK_THROWS_AS(import_cost_volume(dir / "magic.cvol"), Error);
}
