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

#include <vector>

#include "dispint/cost_volume.hpp"

namespace dispint {

struct AmbiguityParams {
  double eta_max = 2.0;
  int k_max = 10;
  /// Costs are divided by this before thresholding (census window bits).
  double cost_scale = 1.0;

  void validate() const;
};

/// Confidence from ambiguity. With c the scaled curve and m its minimum,
///   count_k = #{valid d : c(d) <= m + k * eta_max / k_max},  k = 1..k_max
///   amb     = 1 - sum_k count_k / (k_max * |D|)
/// Sharp isolated minima give values near 1, flat curves give 0. Pixels
/// without a valid entry get 0.
template <typename Scalar>
Plane<float> ambiguity(const CostVolumeT<Scalar>& volume, const AmbiguityParams& params);

struct ConfidenceMap {
  Plane<float> amb;
  Plane<float> amb_smooth;
  double tau = 0.6;
  Mask low_mask;

  int height() const { return static_cast<int>(amb.rows()); }
  int width() const { return static_cast<int>(amb.cols()); }
  bool low(int i, int j) const { return low_mask(i, j); }
};

/// 1x5 horizontal min filter (edge replicated) then low = amb_smooth <= tau.
ConfidenceMap smooth_and_threshold(const Plane<float>& amb, double tau = 0.6);

/// Connected low-confidence pixels reachable from a seed row without leaving
/// the band [anchor_row - band, anchor_row + band]. Every pixel of the
/// anchor row in `pixels` yields this same area when used as the seed.
struct LowConfidenceArea {
  int anchor_row = 0;
  int band = 2;
  std::vector<Pixel> pixels;

  std::vector<Pixel> seeds() const;
};

/// 8-connected, band-restricted flood fill from `seed`. Pixels are sorted.
LowConfidenceArea build_area(const Mask& mask, Pixel seed, int band = 2);

/// Area of every low-confidence pixel, computed once per (anchor row,
/// component) instead of once per pixel.
class AreaIndex {
 public:
  AreaIndex(const Mask& mask, int band = 2);

  const std::vector<LowConfidenceArea>& areas() const { return areas_; }
  /// Index into areas() for a low-confidence pixel, -1 otherwise.
  int area_of(int i, int j) const { return owner_(i, j); }
  int band() const { return band_; }

 private:
  int band_;
  std::vector<LowConfidenceArea> areas_;
  Plane<int> owner_;
};

/// Nearest-rank quantile: element ceil(q * n) (1-based) of the ascending sort.
float nearest_rank_quantile(std::vector<float> values, double q);

struct RegularizationParams {
  int band = 2;
  double q_low = 0.10;
  double q_high = 0.90;
};

/// Replaces the bounds of every low-confidence pixel with the q_low quantile
/// of the lower bounds and the q_high quantile of the upper bounds over its
/// area. High-confidence pixels are copied unchanged.
IntervalMap regularize_intervals(const IntervalMap& intervals, const ConfidenceMap& confidence,
                                 const RegularizationParams& params = {});

IntervalMap regularize_intervals(const IntervalMap& intervals, const AreaIndex& areas,
                                 const RegularizationParams& params = {});

}  // namespace dispint
