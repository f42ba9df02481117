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

#include <algorithm>
#include <cmath>

#include "dispint/cost_volume.hpp"

namespace dispint {

/// Winner-takes-all: argmin over valid disparities, ties to the smallest d.
/// Pixels without a valid entry are invalid.
template <typename Scalar>
DisparityMap wta(const CostVolumeT<Scalar>& volume);

/// V-fit sub-pixel offset for costs (c0, c1, c2) at (d - 1, d, d + 1),
/// clamped to [-0.5, 0.5]; zero when the curve is flat.
template <typename Scalar>
Scalar vfit_offset(Scalar c0, Scalar c1, Scalar c2) {
  const Scalar m = std::max(c0 - c1, c2 - c1);
  if (!(m > Scalar(0))) return Scalar(0);
  return std::clamp((c0 - c2) / (Scalar(2) * m), Scalar(-0.5), Scalar(0.5));
}

/// Applies vfit_offset at every pixel whose integer disparity has valid
/// neighbours on both sides; range-boundary disparities are left as is.
template <typename Scalar>
DisparityMap vfit_refine(const CostVolumeT<Scalar>& volume, const DisparityMap& disparity);

/// kernel x kernel median over valid (non-NaN) samples, window truncated at
/// the image border. Even sample counts take the lower median, so every
/// output is one of the inputs. Invalid pixels stay invalid.
template <typename Scalar>
Plane<Scalar> median_filter(const Plane<Scalar>& plane, int kernel = 3);

inline DisparityMap median_filter(const DisparityMap& map, int kernel = 3) {
  return DisparityMap(median_filter(map.values, kernel));
}

/// Filters the lower and upper planes independently.
inline IntervalMap median_filter(const IntervalMap& intervals, int kernel = 3) {
  IntervalMap out;
  out.lower = median_filter(intervals.lower, kernel);
  out.upper = median_filter(intervals.upper, kernel);
  return out;
}

}  // namespace dispint
