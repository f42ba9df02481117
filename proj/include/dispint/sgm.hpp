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

#include <array>

#include "dispint/cost_volume.hpp"

namespace dispint {

struct SgmParams {
  double p1 = 8.0;
  double p2 = 32.0;
  int num_paths = 8;
  bool normalize_by_paths = true;

  void validate() const;
};

struct PathDirection {
  int dy;
  int dx;
};

/// The first `num_paths` entries are the scan directions used by aggregate().
inline constexpr std::array<PathDirection, 8> kPathDirections{{
    {0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

/// Semi-global aggregation with constant penalties:
///   L_r(p, d) = C(p, d) + min(L_r(q, d), L_r(q, d +- 1) + P1, min_k L_r(q, k) + P2) - min_k L_r(q, k)
/// with q = p - r. Invalid entries act as +inf inside the minima and stay
/// invalid in the output.
template <typename Scalar>
CostVolumeT<Scalar> aggregate(const CostVolumeT<Scalar>& volume, const SgmParams& params);

/// Aggregation along a single direction, without path summation. Exposed for
/// tests and diagnostics.
template <typename Scalar>
CostVolumeT<Scalar> aggregate_path(const CostVolumeT<Scalar>& volume, const SgmParams& params,
                                   PathDirection direction);

}  // namespace dispint
