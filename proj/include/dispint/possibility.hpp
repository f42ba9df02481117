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

#include <span>
#include <vector>

#include "dispint/cost_volume.hpp"

namespace dispint {

/// Per-pixel possibility distributions over the disparity range. Every pixel
/// with a valid entry reaches exactly 1; invalid entries are 0.
using PossibilityVolume = Volume<double>;

using Curve = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using CurveMask = Eigen::Matrix<bool, 1, Eigen::Dynamic>;

class AlphaLevel {
 public:
  explicit AlphaLevel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("alpha must lie in (0, 1]");
  }
  double value() const { return alpha_; }

 private:
  double alpha_;
};

/// Affine map of costs onto [0, 1] using the global extrema of the volume:
/// the volume minimum goes to 1 and the maximum to 0. Invalid entries are 0.
/// Throws "constant cost volume" when the extrema coincide.
template <typename Scalar>
PossibilityVolume normalize_volume(const CostVolumeT<Scalar>& volume);

/// Shifts the valid entries of one normalized curve by 1 - max so the curve
/// peaks at exactly 1. Invalid entries are set to 0.
void to_possibility(Eigen::Ref<Curve> curve, const Eigen::Ref<const CurveMask>& valid);

/// In-place shift of every pixel of a normalized volume.
void to_possibility(PossibilityVolume& normalized);

/// normalize_volume followed by to_possibility, with the peak-equals-one
/// check applied to every pixel.
template <typename Scalar>
PossibilityVolume possibility_volume(const CostVolumeT<Scalar>& volume);

/// Largest |max_d pi - 1| over pixels with at least one valid entry.
double max_normalization_error(const PossibilityVolume& volume);

/// Disparities d (valid entries only) with pi(d) >= alpha, ascending.
std::vector<int> alpha_cut(const Eigen::Ref<const Curve>& possibility, const Eigen::Ref<const CurveMask>& valid,
                           const DisparityRange& range, AlphaLevel alpha);

struct Interval {
  double lower;
  double upper;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Hull of the cut, widened by one on each side where the WTA disparity sits
/// on that bound (both sides for a singleton cut). `extend = false` returns
/// the bare hull.
Interval interval_from_cut(std::span<const int> cut, int wta_disparity, bool extend = true);

/// Per-pixel alpha_cut + interval_from_cut. Pixels whose WTA disparity or
/// curve is invalid get invalid bounds.
IntervalMap compute_intervals(const PossibilityVolume& possibility, const DisparityMap& wta_disparity,
                              AlphaLevel alpha, bool extend = true);

/// Naive reference intervals: each curve min-max normalized on its own
/// (best cost = 1), interval = hull of entries >= threshold. Constant curves
/// give the full range.
template <typename Scalar>
IntervalMap baseline_intervals(const CostVolumeT<Scalar>& volume, double threshold = 0.9);

}  // namespace dispint
