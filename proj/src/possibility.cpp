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

#include "dispint/possibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dispint {

namespace {
constexpr double kNormalizationTolerance = 1e-12;
}

template <typename Scalar>
PossibilityVolume normalize_volume(const CostVolumeT<Scalar>& volume) {
  const double lo = static_cast<double>(volume.cost_min());
  const double hi = static_cast<double>(volume.cost_max());
  if (!(hi > lo)) throw Error("constant cost volume: cannot normalize (min == max)");
  PossibilityVolume out(volume.height(), volume.width(), volume.range(), 0.0);
  out.valid() = volume.valid();
  const double denom = lo - hi;
  const auto& costs = volume.values();
  auto& values = out.values();
  for (Eigen::Index p = 0; p < costs.rows(); ++p) {
    for (Eigen::Index k = 0; k < costs.cols(); ++k) {
      if (out.valid()(p, k)) values(p, k) = (static_cast<double>(costs(p, k)) - hi) / denom;
    }
  }
  return out;
}

void to_possibility(Eigen::Ref<Curve> curve, const Eigen::Ref<const CurveMask>& valid) {
  double peak = -1.0;
  bool any = false;
  for (Eigen::Index k = 0; k < curve.size(); ++k) {
    if (!valid(k)) continue;
    peak = any ? std::max(peak, curve(k)) : curve(k);
    any = true;
  }
  const double shift = 1.0 - peak;
  for (Eigen::Index k = 0; k < curve.size(); ++k) {
    if (!valid(k)) {
      curve(k) = 0.0;
    } else if (curve(k) == peak) {
      // Pin the argmax entries so the peak is 1 without rounding error.
      curve(k) = 1.0;
    } else {
      curve(k) += shift;
    }
  }
}

void to_possibility(PossibilityVolume& normalized) {
  auto& values = normalized.values();
  const auto& valid = normalized.valid();
  for (Eigen::Index p = 0; p < values.rows(); ++p) {
    to_possibility(values.row(p), valid.row(p));
  }
}

double max_normalization_error(const PossibilityVolume& volume) {
  double worst = 0.0;
  const auto& values = volume.values();
  const auto& valid = volume.valid();
  for (Eigen::Index p = 0; p < values.rows(); ++p) {
    bool any = false;
    double peak = 0.0;
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      if (!valid(p, k)) continue;
      peak = any ? std::max(peak, values(p, k)) : values(p, k);
      any = true;
    }
    if (any) worst = std::max(worst, std::abs(peak - 1.0));
  }
  return worst;
}

template <typename Scalar>
PossibilityVolume possibility_volume(const CostVolumeT<Scalar>& volume) {
  PossibilityVolume pv = normalize_volume(volume);
  to_possibility(pv);
  const double err = max_normalization_error(pv);
  if (err > kNormalizationTolerance) {
    std::ostringstream msg;
    msg << "possibility normalization violated: max |sup pi - 1| = " << err;
    throw Error(msg.str());
  }
  return pv;
}

std::vector<int> alpha_cut(const Eigen::Ref<const Curve>& possibility, const Eigen::Ref<const CurveMask>& valid,
                           const DisparityRange& range, AlphaLevel alpha) {
  std::vector<int> cut;
  for (Eigen::Index k = 0; k < possibility.size(); ++k) {
    if (valid(k) && possibility(k) >= alpha.value()) cut.push_back(range.disparity(static_cast<int>(k)));
  }
  return cut;
}

Interval interval_from_cut(std::span<const int> cut, int wta_disparity, bool extend) {
  if (cut.empty()) throw Error("interval: empty alpha-cut");
  const auto [lo_it, hi_it] = std::minmax_element(cut.begin(), cut.end());
  Interval iv{static_cast<double>(*lo_it), static_cast<double>(*hi_it)};
  if (extend) {
    if (wta_disparity == *lo_it) iv.lower -= 1.0;
    if (wta_disparity == *hi_it) iv.upper += 1.0;
  }
  return iv;
}

IntervalMap compute_intervals(const PossibilityVolume& possibility, const DisparityMap& wta_disparity,
                              AlphaLevel alpha, bool extend) {
  if (wta_disparity.height() != possibility.height() || wta_disparity.width() != possibility.width()) {
    throw Error("intervals: disparity map and possibility volume differ in size");
  }
  IntervalMap out(possibility.height(), possibility.width());
  const auto& range = possibility.range();
  for (int i = 0; i < possibility.height(); ++i) {
    for (int j = 0; j < possibility.width(); ++j) {
      if (!wta_disparity.valid(i, j) || !possibility.pixel_valid(i, j)) continue;
      const auto cut = alpha_cut(possibility.curve(i, j), possibility.curve_valid(i, j), range, alpha);
      if (cut.empty()) continue;
      const auto iv = interval_from_cut(cut, static_cast<int>(std::lround(wta_disparity(i, j))), extend);
      out.lower(i, j) = static_cast<float>(iv.lower);
      out.upper(i, j) = static_cast<float>(iv.upper);
    }
  }
  return out;
}

template <typename Scalar>
IntervalMap baseline_intervals(const CostVolumeT<Scalar>& volume, double threshold) {
  IntervalMap out(volume.height(), volume.width());
  const auto& range = volume.range();
  const int nd = range.size();
  for (int i = 0; i < volume.height(); ++i) {
    for (int j = 0; j < volume.width(); ++j) {
      if (!volume.pixel_valid(i, j)) continue;
      double lo = 0.0, hi = 0.0;
      bool any = false;
      for (int k = 0; k < nd; ++k) {
        if (!volume.valid(i, j, k)) continue;
        const double c = volume.cost(i, j, k);
        lo = any ? std::min(lo, c) : c;
        hi = any ? std::max(hi, c) : c;
        any = true;
      }
      if (!(hi > lo)) {
        out.lower(i, j) = static_cast<float>(range.min());
        out.upper(i, j) = static_cast<float>(range.max());
        continue;
      }
      int first = -1, last = -1;
      for (int k = 0; k < nd; ++k) {
        if (!volume.valid(i, j, k)) continue;
        const double v = (hi - static_cast<double>(volume.cost(i, j, k))) / (hi - lo);
        if (v >= threshold) {
          if (first < 0) first = k;
          last = k;
        }
      }
      out.lower(i, j) = static_cast<float>(range.disparity(first));
      out.upper(i, j) = static_cast<float>(range.disparity(last));
    }
  }
  return out;
}

template PossibilityVolume normalize_volume(const CostVolumeT<float>&);
template PossibilityVolume normalize_volume(const CostVolumeT<double>&);
template PossibilityVolume possibility_volume(const CostVolumeT<float>&);
template PossibilityVolume possibility_volume(const CostVolumeT<double>&);
template IntervalMap baseline_intervals(const CostVolumeT<float>&, double);
template IntervalMap baseline_intervals(const CostVolumeT<double>&, double);

}  // namespace dispint
