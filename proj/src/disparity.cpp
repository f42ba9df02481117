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

#include "dispint/disparity.hpp"

#include <algorithm>
#include <vector>

namespace dispint {

template <typename Scalar>
DisparityMap wta(const CostVolumeT<Scalar>& volume) {
  DisparityMap out(volume.height(), volume.width());
  const int nd = volume.num_disparities();
  for (int i = 0; i < volume.height(); ++i) {
    for (int j = 0; j < volume.width(); ++j) {
      int best = -1;
      Scalar best_cost = Scalar(0);
      for (int k = 0; k < nd; ++k) {
        if (!volume.valid(i, j, k)) continue;
        const Scalar c = volume.cost(i, j, k);
        if (best < 0 || c < best_cost) {
          best = k;
          best_cost = c;
        }
      }
      if (best >= 0) out(i, j) = static_cast<float>(volume.range().disparity(best));
    }
  }
  return out;
}

template <typename Scalar>
DisparityMap vfit_refine(const CostVolumeT<Scalar>& volume, const DisparityMap& disparity) {
  DisparityMap out = disparity;
  const auto& range = volume.range();
  for (int i = 0; i < volume.height(); ++i) {
    for (int j = 0; j < volume.width(); ++j) {
      if (!disparity.valid(i, j)) continue;
      const int d = static_cast<int>(std::lround(disparity(i, j)));
      if (d <= range.min() || d >= range.max()) continue;
      const int k = range.index(d);
      if (!volume.valid(i, j, k - 1) || !volume.valid(i, j, k) || !volume.valid(i, j, k + 1)) continue;
      const Scalar offset = vfit_offset(volume.cost(i, j, k - 1), volume.cost(i, j, k), volume.cost(i, j, k + 1));
      out(i, j) = static_cast<float>(d + offset);
    }
  }
  return out;
}

template <typename Scalar>
Plane<Scalar> median_filter(const Plane<Scalar>& plane, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) throw Error("median filter: kernel size must be odd");
  const int h = static_cast<int>(plane.rows());
  const int w = static_cast<int>(plane.cols());
  const int r = kernel / 2;
  Plane<Scalar> out = plane;
  std::vector<Scalar> window;
  window.reserve(static_cast<std::size_t>(kernel) * kernel);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      if (!is_valid(plane(i, j))) continue;
      window.clear();
      for (int y = std::max(0, i - r); y <= std::min(h - 1, i + r); ++y) {
        for (int x = std::max(0, j - r); x <= std::min(w - 1, j + r); ++x) {
          if (is_valid(plane(y, x))) window.push_back(plane(y, x));
        }
      }
      // 1-based rank ceil(n / 2).
      const auto rank = (window.size() + 1) / 2 - 1;
      std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(rank), window.end());
      out(i, j) = window[rank];
    }
  }
  return out;
}

template DisparityMap wta(const CostVolumeT<float>&);
template DisparityMap wta(const CostVolumeT<double>&);
template DisparityMap vfit_refine(const CostVolumeT<float>&, const DisparityMap&);
template DisparityMap vfit_refine(const CostVolumeT<double>&, const DisparityMap&);
template Plane<float> median_filter(const Plane<float>&, int);
template Plane<double> median_filter(const Plane<double>&, int);

}  // namespace dispint
