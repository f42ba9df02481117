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

#include "dispint/sgm.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace dispint {

void SgmParams::validate() const {
  if (!(p1 >= 0.0) || !(p2 >= p1)) throw Error("sgm: penalties must satisfy 0 <= P1 <= P2");
  if (num_paths != 4 && num_paths != 8) throw Error("sgm: num_paths must be 4 or 8");
}

namespace {

// Runs one scan direction and hands every finished pixel curve to `sink`.
template <typename Scalar, typename Sink>
void scan_direction(const CostVolumeT<Scalar>& volume, const SgmParams& params, PathDirection dir, Sink&& sink) {
  constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();
  const int h = volume.height();
  const int w = volume.width();
  const int nd = volume.num_disparities();
  const auto p1 = static_cast<Scalar>(params.p1);
  const auto p2 = static_cast<Scalar>(params.p2);

  using Rows = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Rows previous = Rows::Constant(w, nd, kInf);
  Rows current = Rows::Constant(w, nd, kInf);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> previous_min = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(w, kInf);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> current_min = previous_min;

  for (int step_i = 0; step_i < h; ++step_i) {
    const int i = dir.dy >= 0 ? step_i : h - 1 - step_i;
    for (int step_j = 0; step_j < w; ++step_j) {
      const int j = dir.dx >= 0 ? step_j : w - 1 - step_j;
      const int qi = i - dir.dy;
      const int qj = j - dir.dx;
      const bool has_pred = qi >= 0 && qi < h && qj >= 0 && qj < w;
      const Scalar* pred = nullptr;
      Scalar pred_min = kInf;
      if (has_pred) {
        if (dir.dy == 0) {
          pred = current.row(qj).data();
          pred_min = current_min(qj);
        } else {
          pred = previous.row(qj).data();
          pred_min = previous_min(qj);
        }
      }
      Scalar* out = current.row(j).data();
      Scalar out_min = kInf;
      for (int k = 0; k < nd; ++k) {
        if (!volume.valid(i, j, k)) {
          out[k] = kInf;
          continue;
        }
        const Scalar c = volume.cost(i, j, k);
        Scalar l = c;
        if (pred_min < kInf) {
          Scalar best = std::min(pred[k], pred_min + p2);
          if (k > 0) best = std::min(best, pred[k - 1] + p1);
          if (k + 1 < nd) best = std::min(best, pred[k + 1] + p1);
          l = c + (best - pred_min);
        }
        out[k] = l;
        out_min = std::min(out_min, l);
      }
      current_min(j) = out_min;
      sink(i, j, out);
    }
    std::swap(previous, current);
    std::swap(previous_min, current_min);
  }
}

}  // namespace

template <typename Scalar>
CostVolumeT<Scalar> aggregate_path(const CostVolumeT<Scalar>& volume, const SgmParams& params,
                                   PathDirection direction) {
  params.validate();
  CostVolumeT<Scalar> out = volume;
  const int nd = volume.num_disparities();
  scan_direction(volume, params, direction, [&](int i, int j, const Scalar* curve) {
    for (int k = 0; k < nd; ++k) {
      if (volume.valid(i, j, k)) out.set_cost(i, j, k, curve[k]);
    }
  });
  if (out.valid_count() > 0) out.update_extrema();
  return out;
}

template <typename Scalar>
CostVolumeT<Scalar> aggregate(const CostVolumeT<Scalar>& volume, const SgmParams& params) {
  params.validate();
  const int nd = volume.num_disparities();
  // Double accumulation keeps the path sum of float inputs exact.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> sum =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(volume.values().rows(), nd);
  for (int r = 0; r < params.num_paths; ++r) {
    scan_direction(volume, params, kPathDirections[r], [&](int i, int j, const Scalar* curve) {
      auto row = sum.row(volume.pixel_index(i, j));
      for (int k = 0; k < nd; ++k) row(k) += static_cast<double>(curve[k]);
    });
  }
  const double scale = params.normalize_by_paths ? 1.0 / params.num_paths : 1.0;
  CostVolumeT<Scalar> out(volume.height(), volume.width(), volume.range());
  for (int i = 0; i < volume.height(); ++i) {
    for (int j = 0; j < volume.width(); ++j) {
      const auto row = sum.row(volume.pixel_index(i, j));
      for (int k = 0; k < nd; ++k) {
        if (volume.valid(i, j, k)) out.set_cost(i, j, k, static_cast<Scalar>(row(k) * scale));
      }
    }
  }
  if (out.valid_count() > 0) out.update_extrema();
  return out;
}

template CostVolumeT<float> aggregate(const CostVolumeT<float>&, const SgmParams&);
template CostVolumeT<double> aggregate(const CostVolumeT<double>&, const SgmParams&);
template CostVolumeT<float> aggregate_path(const CostVolumeT<float>&, const SgmParams&, PathDirection);
template CostVolumeT<double> aggregate_path(const CostVolumeT<double>&, const SgmParams&, PathDirection);

}  // namespace dispint
