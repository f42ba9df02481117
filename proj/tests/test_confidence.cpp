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
#include <set>

#include "doctest.h"
#include "dispint/confidence.hpp"
#include "support.hpp"

using namespace dispint;
using namespace dispint::testing;

namespace {

CostVolume curve_volume(const std::vector<float>& costs) {
  CostVolume v(1, 1, DisparityRange(0, static_cast<int>(costs.size()) - 1));
  for (std::size_t k = 0; k < costs.size(); ++k) v.set_cost(0, 0, static_cast<int>(k), costs[k]);
  v.update_extrema();
  return v;
}

// Recursive 8-connected search that only ever visits rows within the band.
void visit(const Mask& m, int y, int x, int top, int bottom, std::set<std::pair<int, int>>& seen) {
  if (y < top || y > bottom || x < 0 || x >= m.cols() || !m(y, x) || seen.count({y, x})) return;
  seen.insert({y, x});
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) visit(m, y + dy, x + dx, top, bottom, seen);
  }
}

std::set<std::pair<int, int>> area_oracle(const Mask& m, Pixel seed, int band) {
  std::set<std::pair<int, int>> seen;
  visit(m, seed.row, seed.col, std::max(0, seed.row - band), std::min<int>(m.rows() - 1, seed.row + band), seen);
  return seen;
}

std::set<std::pair<int, int>> as_set(const LowConfidenceArea& a) {
  std::set<std::pair<int, int>> s;
  for (const auto& p : a.pixels) s.insert({p.row, p.col});
  return s;
}

Mask random_mask(int h, int w, double p, Rng& rng) {
  Mask m(h, w);
  std::bernoulli_distribution b(p);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) m(i, j) = b(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("flat curve has ambiguity confidence 0") {
  const Plane<float> amb = ambiguity(curve_volume(std::vector<float>(8, 5.0f)), AmbiguityParams{2.0, 10, 1.0});
  CHECK(amb(0, 0) == 0.0f);
}

TEST_CASE("one strict minimum far below the rest gives 1 - 1/|D|") {
  std::vector<float> c(8, 10.0f);
  c[3] = 1.0f;
  const Plane<float> amb = ambiguity(curve_volume(c), AmbiguityParams{2.0, 10, 1.0});
  CHECK(amb(0, 0) == doctest::Approx(1.0 - 1.0 / 8.0));
}

TEST_CASE("ambiguity counts thresholds eta_k = k * eta_max / k_max") {
  // m = 0; entries at 0.5 enter from k = 3 (eta = 0.6), entry at 1.5 from k = 8.
  const std::vector<float> c{0.0f, 0.5f, 1.5f, 5.0f};
  const Plane<float> amb = ambiguity(curve_volume(c), AmbiguityParams{2.0, 10, 1.0});
  const double total = 10 * 1 + 8 * 1 + 3 * 1;
  CHECK(amb(0, 0) == doctest::Approx(1.0 - total / 40.0));
  // cost_scale divides the costs first
  const Plane<float> scaled = ambiguity(curve_volume({0.0f, 5.0f, 15.0f, 50.0f}), AmbiguityParams{2.0, 10, 10.0});
  CHECK(scaled(0, 0) == doctest::Approx(amb(0, 0)));
}

TEST_CASE("sharper curves have higher ambiguity confidence") {
  const AmbiguityParams p{2.0, 10, 1.0};
  std::vector<float> sharp(10, 4.0f), medium(10), flat(10);
  sharp[5] = 0.0f;
  for (int k = 0; k < 10; ++k) {
    medium[k] = 0.5f * std::abs(k - 5);
    flat[k] = 0.1f * std::abs(k - 5);
  }
  const float a = ambiguity(curve_volume(sharp), p)(0, 0);
  const float b = ambiguity(curve_volume(medium), p)(0, 0);
  const float c = ambiguity(curve_volume(flat), p)(0, 0);
  CHECK(a > b);
  CHECK(b > c);
}

TEST_CASE("property: ambiguity lies in [0, 1] and is 0 exactly for saturated counts") {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const CostVolume v = random_volume(5, 5, DisparityRange(0, 9), rng, 24, 0.0);
    const Plane<float> amb = ambiguity(v, AmbiguityParams{2.0, 10, 24.0});
    CHECK((amb.array() >= 0.0f).all());
    CHECK((amb.array() <= 1.0f).all());
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        float lo = INFINITY;
        for (int k = 0; k < 10; ++k) lo = std::min(lo, v.cost(i, j, k));
        bool saturated = true;
        for (int k = 0; k < 10; ++k) saturated &= v.cost(i, j, k) / 24.0 <= lo / 24.0 + 0.2;
        CHECK((amb(i, j) == 0.0f) == saturated);
      }
    }
  }
}

TEST_CASE("ambiguity parameter validation") {
  const CostVolume v = curve_volume({1, 2});
  CHECK_THROWS_AS(ambiguity(v, AmbiguityParams{0.0, 10, 1.0}), Error);
  CHECK_THROWS_AS(ambiguity(v, AmbiguityParams{2.0, 0, 1.0}), Error);
  CHECK_THROWS_AS(ambiguity(v, AmbiguityParams{2.0, 10, 0.0}), Error);
}

TEST_CASE("a single low value poisons every 5-wide window touching it") {
  Plane<float> amb(1, 5);
  amb << 0.9f, 0.9f, 0.1f, 0.9f, 0.9f;
  const ConfidenceMap c = smooth_and_threshold(amb, 0.6);
  for (int j = 0; j < 5; ++j) {
    CHECK(c.low(0, j));
    CHECK(c.amb_smooth(0, j) == 0.1f);
  }
}

TEST_CASE("smoothing window is 1x5") {
  Plane<float> amb = Plane<float>::Constant(2, 9, 0.9f);
  amb(0, 4) = 0.2f;
  const ConfidenceMap c = smooth_and_threshold(amb, 0.6);
  for (int j = 0; j < 9; ++j) {
    CHECK(c.low(0, j) == (std::abs(j - 4) <= 2));
    CHECK_FALSE(c.low(1, j));
  }
}

TEST_CASE("threshold edge cases") {
  const Plane<float> ones = Plane<float>::Ones(3, 4);
  CHECK_FALSE(smooth_and_threshold(ones, 0.6).low_mask.any());
  CHECK(smooth_and_threshold(ones, 1.0).low_mask.all());
  Plane<float> at = Plane<float>::Constant(1, 3, 0.6f);
  CHECK(smooth_and_threshold(at, 0.6).low_mask.all());
  CHECK_THROWS_AS(smooth_and_threshold(ones, 1.5), Error);
}

TEST_CASE("property: smoothing never raises and masks grow with tau") {
  Rng rng(62);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  for (int trial = 0; trial < 100; ++trial) {
    Plane<float> amb(6, 11);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 11; ++j) amb(i, j) = u(rng);
    }
    const double t1 = u(rng), t2 = u(rng);
    const ConfidenceMap a = smooth_and_threshold(amb, std::min(t1, t2));
    const ConfidenceMap b = smooth_and_threshold(amb, std::max(t1, t2));
    CHECK((a.amb_smooth.array() <= amb.array()).all());
    CHECK((a.low_mask.array() <= b.low_mask.array()).all());
  }
}

TEST_CASE("build_area examples") {
  Mask m = Mask::Constant(9, 9, false);
  m(4, 4) = true;
  CHECK(build_area(m, {4, 4}).pixels == std::vector<Pixel>{{4, 4}});

  Mask block = Mask::Constant(9, 9, false);
  block.block(2, 1, 5, 4).setConstant(true);
  CHECK(build_area(block, {4, 2}).pixels.size() == 20);

  Mask tall = Mask::Constant(12, 5, false);
  tall.block(1, 2, 9, 1).setConstant(true);
  const LowConfidenceArea a = build_area(tall, {5, 2});
  CHECK(a.pixels.size() == 5);
  for (const auto& p : a.pixels) CHECK(std::abs(p.row - 5) <= 2);

  CHECK_THROWS_AS(build_area(tall, {0, 0}), Error);
  CHECK_THROWS_AS(build_area(tall, {20, 0}), Error);
}

TEST_CASE("band restriction cuts paths that leave the band") {
  // A U shape: its two arms only meet three rows below the seed row.
  Mask m = Mask::Constant(8, 5, false);
  m.col(0).setConstant(true);
  m.col(4).setConstant(true);
  m.row(7).setConstant(true);
  const LowConfidenceArea a = build_area(m, {2, 0}, 2);
  for (const auto& p : a.pixels) CHECK(p.col == 0);
  const LowConfidenceArea wide = build_area(m, {5, 0}, 2);
  bool reaches_right = false;
  for (const auto& p : wide.pixels) reaches_right |= p.col == 4;
  CHECK(reaches_right);
}

TEST_CASE("build_area and AreaIndex agree with the flood-fill oracle") {
  Rng rng(63);
  for (int trial = 0; trial < 60; ++trial) {
    const Mask m = random_mask(14, 17, 0.55, rng);
    const int band = static_cast<int>(trial % 4);
    const AreaIndex index(m, band);
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        if (!m(i, j)) {
          CHECK(index.area_of(i, j) == -1);
          continue;
        }
        const auto expected = area_oracle(m, {i, j}, band);
        REQUIRE(as_set(build_area(m, {i, j}, band)) == expected);
        const int id = index.area_of(i, j);
        REQUIRE(id >= 0);
        REQUIRE(as_set(index.areas()[id]) == expected);
        CHECK(index.areas()[id].anchor_row == i);
      }
    }
  }
}

TEST_CASE("nearest-rank quantile") {
  std::vector<float> v(19, 0.0f);
  v.push_back(-10.0f);
  CHECK(nearest_rank_quantile(v, 0.10) == 0.0f);
  CHECK(nearest_rank_quantile(v, 0.05) == -10.0f);
  CHECK(nearest_rank_quantile({7.0f}, 0.1) == 7.0f);
  CHECK(nearest_rank_quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.9) == 9.0f);
  CHECK(nearest_rank_quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.0) == 1.0f);
  CHECK(nearest_rank_quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 1.0) == 10.0f);
  CHECK_THROWS_AS(nearest_rank_quantile({}, 0.5), Error);
}

TEST_CASE("regularization sets low-confidence bounds to area quantiles") {
  IntervalMap iv(4, 5);
  iv.lower.setConstant(0.0f);
  iv.upper.setConstant(2.0f);
  iv.lower(1, 1) = -10.0f;
  iv.upper(1, 3) = 30.0f;
  Mask low = Mask::Constant(4, 5, false);
  low.row(1).setConstant(true);
  low.row(2).setConstant(true);
  const IntervalMap out = regularize_intervals(iv, AreaIndex(low, 2));
  // 10 pixels in the area: q10 is rank 1, q90 is rank 9.
  for (int j = 0; j < 5; ++j) {
    CHECK(out.lower(1, j) == -10.0f);
    CHECK(out.upper(1, j) == 2.0f);
    CHECK(out.lower(0, j) == 0.0f);
    CHECK(out.upper(0, j) == 2.0f);
  }
  CHECK(out.upper(3, 0) == 2.0f);
}

TEST_CASE("regularization of a singleton area changes nothing") {
  IntervalMap iv(3, 3);
  iv.lower.setConstant(-1.0f);
  iv.upper.setConstant(1.0f);
  iv.lower(1, 1) = -3.0f;
  iv.upper(1, 1) = 4.0f;
  Mask low = Mask::Constant(3, 3, false);
  low(1, 1) = true;
  const IntervalMap out = regularize_intervals(iv, AreaIndex(low));
  CHECK(out.lower == iv.lower);
  CHECK(out.upper == iv.upper);
}

TEST_CASE("property: regularized bounds stay within area extremes and keep lower <= upper") {
  Rng rng(64);
  std::uniform_int_distribution<int> d(-20, 0), wdist(0, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const int h = 10, w = 12;
    IntervalMap iv(h, w);
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        iv.lower(i, j) = static_cast<float>(d(rng));
        iv.upper(i, j) = iv.lower(i, j) + static_cast<float>(wdist(rng));
      }
    }
    const Mask low = random_mask(h, w, 0.5, rng);
    const AreaIndex index(low, 2);
    const IntervalMap out = regularize_intervals(iv, index);
    RegularizationParams narrow;
    narrow.q_low = 0.3;
    const IntervalMap out_narrow = regularize_intervals(iv, index, narrow);
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        if (!low(i, j)) {
          CHECK(out.lower(i, j) == iv.lower(i, j));
          CHECK(out.upper(i, j) == iv.upper(i, j));
          continue;
        }
        const auto& area = index.areas()[index.area_of(i, j)];
        float max_lower = -INFINITY, min_upper = INFINITY;
        for (const auto& p : area.pixels) {
          max_lower = std::max(max_lower, iv.lower(p.row, p.col));
          min_upper = std::min(min_upper, iv.upper(p.row, p.col));
        }
        CHECK(out.lower(i, j) <= max_lower);
        CHECK(out.upper(i, j) >= min_upper);
        CHECK(out.lower(i, j) <= out.upper(i, j));
        CHECK(out.lower(i, j) <= out_narrow.lower(i, j));
      }
    }
  }
}

TEST_CASE("regularization input checks") {
  IntervalMap iv(2, 2);
  ConfidenceMap c = smooth_and_threshold(Plane<float>::Zero(3, 3), 0.6);
  CHECK_THROWS_AS(regularize_intervals(iv, c), Error);
  RegularizationParams bad;
  bad.q_low = 0.9;
  bad.q_high = 0.1;
  CHECK_THROWS_AS(regularize_intervals(iv, AreaIndex(Mask::Constant(2, 2, true)), bad), Error);
}
