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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "dispint/cost_volume.hpp"
#include "dispint/types.hpp"

namespace dispint::testing {

using Rng = std::mt19937_64;

inline std::filesystem::path data_dir() { return DISPINT_TEST_DATA; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::current_path() / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

/// Integer-valued costs in [0, max_cost] so ties are common; each entry is
/// invalid with probability `invalid_p`, but every pixel keeps one valid entry.
inline CostVolume random_volume(int h, int w, DisparityRange range, Rng& rng, int max_cost = 24,
                                double invalid_p = 0.0) {
  CostVolume v(h, w, range);
  std::uniform_int_distribution<int> cost(0, max_cost);
  std::bernoulli_distribution drop(invalid_p);
  std::uniform_int_distribution<int> keep(0, range.size() - 1);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const int forced = keep(rng);
      for (int k = 0; k < range.size(); ++k) {
        if (k == forced || !drop(rng)) v.set_cost(i, j, k, static_cast<float>(cost(rng)));
      }
    }
  }
  v.update_extrema();
  return v;
}

inline GrayImage random_image(int h, int w, Rng& rng) {
  GrayImage img;
  img.pixels.resize(h, w);
  std::uniform_int_distribution<int> px(0, 255);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) img.pixels(i, j) = static_cast<std::uint16_t>(px(rng));
  }
  return img;
}

/// Stereo pair where left(i, j) = right(i, j + d(i, j)) with negative
/// disparities. Rows inside `flat_rows` are a single intensity in both views.
struct SyntheticScene {
  GrayImage left, right;
  GroundTruthMap truth;  // negative convention
  DisparityRange range;
};

inline SyntheticScene make_scene(int h, int w, int ndisp, Rng& rng, double flat_fraction = 0.0) {
  SyntheticScene s;
  s.range = DisparityRange(-(ndisp - 1), 0);
  s.right = random_image(h, w, rng);
  s.left = s.right;
  s.truth = GroundTruthMap(h, w);
  // Vertical stripes of constant disparity.
  std::uniform_int_distribution<int> disp(-(ndisp - 2), -2);
  std::vector<int> stripe_disp;
  const int stripe = std::max(8, w / 6);
  for (int x = 0; x < w; x += stripe) stripe_disp.push_back(disp(rng));
  const int flat_rows = static_cast<int>(flat_fraction * h);
  const int flat_begin = (h - flat_rows) / 2;
  for (int i = 0; i < h; ++i) {
    const bool flat = i >= flat_begin && i < flat_begin + flat_rows;
    for (int j = 0; j < w; ++j) {
      const int d = stripe_disp[j / stripe];
      const int jr = std::clamp(j + d, 0, w - 1);
      s.left.pixels(i, j) = s.right.pixels(i, jr);
      if (j + d >= 0) s.truth(i, j) = static_cast<float>(d);
    }
    if (flat) {
      for (int j = 0; j < w; ++j) {
        s.left.pixels(i, j) = 128;
        s.right.pixels(i, j) = 128;
      }
    }
  }
  return s;
}

}  // namespace dispint::testing
