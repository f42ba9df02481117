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

#include "dispint/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace dispint {

void AmbiguityParams::validate() const {
  if (!(eta_max > 0.0)) throw Error("ambiguity: eta_max must be > 0");
  if (k_max < 1) throw Error("ambiguity: k_max must be >= 1");
  if (!(cost_scale > 0.0)) throw Error("ambiguity: cost_scale must be > 0");
}

template <typename Scalar>
Plane<float> ambiguity(const CostVolumeT<Scalar>& volume, const AmbiguityParams& params) {
  params.validate();
  const int nd = volume.num_disparities();
  Plane<float> amb = Plane<float>::Zero(volume.height(), volume.width());
  std::vector<double> scaled;
  scaled.reserve(nd);
  for (int i = 0; i < volume.height(); ++i) {
    for (int j = 0; j < volume.width(); ++j) {
      scaled.clear();
      for (int k = 0; k < nd; ++k) {
        if (volume.valid(i, j, k)) scaled.push_back(static_cast<double>(volume.cost(i, j, k)) / params.cost_scale);
      }
      if (scaled.empty()) continue;
      const double m = *std::min_element(scaled.begin(), scaled.end());
      long long total = 0;
      for (int step = 1; step <= params.k_max; ++step) {
        const double eta = step * params.eta_max / params.k_max;
        total += std::count_if(scaled.begin(), scaled.end(), [&](double c) { return c <= m + eta; });
      }
      const double ratio = static_cast<double>(total) / (static_cast<double>(params.k_max) * nd);
      amb(i, j) = static_cast<float>(std::clamp(1.0 - ratio, 0.0, 1.0));
    }
  }
  return amb;
}

template Plane<float> ambiguity(const CostVolumeT<float>&, const AmbiguityParams&);
template Plane<float> ambiguity(const CostVolumeT<double>&, const AmbiguityParams&);

ConfidenceMap smooth_and_threshold(const Plane<float>& amb, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error("confidence: tau must lie in [0, 1]");
  ConfidenceMap out;
  out.amb = amb;
  out.tau = tau;
  out.amb_smooth.resize(amb.rows(), amb.cols());
  const auto w = amb.cols();
  for (Eigen::Index i = 0; i < amb.rows(); ++i) {
    for (Eigen::Index j = 0; j < w; ++j) {
      float v = amb(i, j);
      for (Eigen::Index k = -2; k <= 2; ++k) {
        v = std::min(v, amb(i, std::clamp<Eigen::Index>(j + k, 0, w - 1)));
      }
      out.amb_smooth(i, j) = v;
    }
  }
  out.low_mask = (out.amb_smooth.array() <= static_cast<float>(tau)).matrix();
  return out;
}

std::vector<Pixel> LowConfidenceArea::seeds() const {
  std::vector<Pixel> out;
  for (const auto& p : pixels) {
    if (p.row == anchor_row) out.push_back(p);
  }
  return out;
}

namespace {

// Band-restricted 8-connected flood fill. `stamp` marks visited pixels with
// `label`; pixels already carrying `label` are skipped.
std::vector<Pixel> flood_band(const Mask& mask, Pixel seed, int band, Plane<int>& stamp, int label) {
  const int h = static_cast<int>(mask.rows());
  const int w = static_cast<int>(mask.cols());
  const int top = std::max(0, seed.row - band);
  const int bottom = std::min(h - 1, seed.row + band);
  std::vector<Pixel> out;
  std::deque<Pixel> queue{seed};
  stamp(seed.row, seed.col) = label;
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop_front();
    out.push_back(p);
    for (int dy = -1; dy <= 1; ++dy) {
      const int y = p.row + dy;
      if (y < top || y > bottom) continue;
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = p.col + dx;
        if ((dy == 0 && dx == 0) || x < 0 || x >= w) continue;
        if (!mask(y, x) || stamp(y, x) == label) continue;
        stamp(y, x) = label;
        queue.push_back({y, x});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

LowConfidenceArea build_area(const Mask& mask, Pixel seed, int band) {
  if (band < 0) throw Error("area: band must be >= 0");
  if (seed.row < 0 || seed.row >= mask.rows() || seed.col < 0 || seed.col >= mask.cols()) {
    throw Error("area: seed outside the image");
  }
  if (!mask(seed.row, seed.col)) throw Error("area: seed pixel is not low-confidence");
  Plane<int> stamp = Plane<int>::Constant(mask.rows(), mask.cols(), -1);
  return LowConfidenceArea{seed.row, band, flood_band(mask, seed, band, stamp, 0)};
}

AreaIndex::AreaIndex(const Mask& mask, int band)
    : band_(band), owner_(Plane<int>::Constant(mask.rows(), mask.cols(), -1)) {
  if (band < 0) throw Error("area: band must be >= 0");
  Plane<int> stamp = Plane<int>::Constant(mask.rows(), mask.cols(), -1);
  for (int i = 0; i < mask.rows(); ++i) {
    for (int j = 0; j < mask.cols(); ++j) {
      if (!mask(i, j) || owner_(i, j) >= 0) continue;
      const int label = static_cast<int>(areas_.size());
      LowConfidenceArea area{i, band, flood_band(mask, {i, j}, band, stamp, label)};
      for (const auto& p : area.pixels) {
        if (p.row == i) owner_(p.row, p.col) = label;
      }
      areas_.push_back(std::move(area));
    }
  }
}

float nearest_rank_quantile(std::vector<float> values, double q) {
  if (values.empty()) throw Error("quantile of an empty set");
  const auto n = static_cast<double>(values.size());
  // Small slack so q * n that is integral up to rounding is not bumped up.
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

IntervalMap regularize_intervals(const IntervalMap& intervals, const AreaIndex& areas,
                                 const RegularizationParams& params) {
  if (!(params.q_low >= 0.0 && params.q_low <= params.q_high && params.q_high <= 1.0)) {
    throw Error("regularization: need 0 <= q_low <= q_high <= 1");
  }
  IntervalMap out = intervals;
  std::vector<float> lowers, uppers;
  for (const auto& area : areas.areas()) {
    lowers.clear();
    uppers.clear();
    for (const auto& p : area.pixels) {
      if (!intervals.valid(p.row, p.col)) continue;
      lowers.push_back(intervals.lower(p.row, p.col));
      uppers.push_back(intervals.upper(p.row, p.col));
    }
    if (lowers.empty()) continue;
    const float lo = nearest_rank_quantile(lowers, params.q_low);
    const float hi = nearest_rank_quantile(uppers, params.q_high);
    for (const auto& p : area.pixels) {
      if (p.row != area.anchor_row || !intervals.valid(p.row, p.col)) continue;
      out.lower(p.row, p.col) = lo;
      out.upper(p.row, p.col) = hi;
    }
  }
  return out;
}

IntervalMap regularize_intervals(const IntervalMap& intervals, const ConfidenceMap& confidence,
                                 const RegularizationParams& params) {
  if (intervals.height() != confidence.height() || intervals.width() != confidence.width()) {
    throw Error("regularization: interval map and confidence map differ in size");
  }
  return regularize_intervals(intervals, AreaIndex(confidence.low_mask, params.band), params);
}

}  // namespace dispint
