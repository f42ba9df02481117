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

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dispint {

/// Row-major dense raster. Row index is the image line, column index the
/// pixel within the line.
template <typename Scalar>
using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Mask = Plane<bool>;

/// Library error. `stage` names the pipeline step that raised it so the CLI
/// can report "<stage>: <message>".
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message, std::string stage = {})
      : std::runtime_error(message), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Inclusive integer disparity range [min, max] with at least two values.
class DisparityRange {
 public:
  DisparityRange() = default;
  DisparityRange(int d_min, int d_max) : min_(d_min), max_(d_max) {
    if (d_min > d_max) {
      throw Error("disparity range: d_min " + std::to_string(d_min) + " > d_max " +
                  std::to_string(d_max));
    }
    if (d_max - d_min + 1 < 2) {
      throw Error("disparity range: need at least two disparities");
    }
  }

  int min() const { return min_; }
  int max() const { return max_; }
  int size() const { return max_ - min_ + 1; }
  int width() const { return max_ - min_; }
  bool contains(int d) const { return d >= min_ && d <= max_; }
  int index(int d) const { return d - min_; }
  int disparity(int index) const { return min_ + index; }

  friend bool operator==(const DisparityRange&, const DisparityRange&) = default;

 private:
  int min_ = 0;
  int max_ = 1;
};

/// 8- or 16-bit luminance image. Samples are kept at their stored depth.
struct GrayImage {
  Plane<std::uint16_t> pixels;
  int bit_depth = 8;

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
};

template <typename Scalar>
constexpr Scalar invalid_value() {
  return std::numeric_limits<Scalar>::quiet_NaN();
}

template <typename Scalar>
bool is_valid(Scalar v) {
  return !std::isnan(v);
}

/// Per-pixel float disparity; NaN marks an invalid pixel. Ground truth uses
/// the same representation.
template <typename Scalar>
struct DisparityMapT {
  Plane<Scalar> values;

  DisparityMapT() = default;
  DisparityMapT(int height, int width) : values(Plane<Scalar>::Constant(height, width, invalid_value<Scalar>())) {}
  explicit DisparityMapT(Plane<Scalar> v) : values(std::move(v)) {}

  int height() const { return static_cast<int>(values.rows()); }
  int width() const { return static_cast<int>(values.cols()); }
  bool valid(int i, int j) const { return is_valid(values(i, j)); }
  Scalar operator()(int i, int j) const { return values(i, j); }
  Scalar& operator()(int i, int j) { return values(i, j); }
};

using DisparityMap = DisparityMapT<float>;
using GroundTruthMap = DisparityMapT<float>;

/// Per-pixel [lower, upper] disparity bounds; NaN bounds mark invalid pixels.
template <typename Scalar>
struct IntervalMapT {
  Plane<Scalar> lower;
  Plane<Scalar> upper;

  IntervalMapT() = default;
  IntervalMapT(int height, int width)
      : lower(Plane<Scalar>::Constant(height, width, invalid_value<Scalar>())),
        upper(Plane<Scalar>::Constant(height, width, invalid_value<Scalar>())) {}

  int height() const { return static_cast<int>(lower.rows()); }
  int width() const { return static_cast<int>(lower.cols()); }
  bool valid(int i, int j) const { return is_valid(lower(i, j)) && is_valid(upper(i, j)); }
  Scalar width_at(int i, int j) const { return upper(i, j) - lower(i, j); }
};

using IntervalMap = IntervalMapT<float>;

struct Pixel {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

}  // namespace dispint
