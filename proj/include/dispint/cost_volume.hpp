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

#include <bit>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>

#include "dispint/types.hpp"

namespace dispint {

/// Dense H x W x |D| volume. Storage is one row per pixel (row-major pixel
/// order) and one column per disparity, so a pixel's curve is contiguous.
template <typename Scalar>
class Volume {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using ValidMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Volume() = default;
  Volume(int height, int width, DisparityRange range, Scalar fill = Scalar(0))
      : height_(height),
        width_(width),
        range_(range),
        values_(Matrix::Constant(Eigen::Index(height) * width, range.size(), fill)),
        valid_(ValidMatrix::Constant(Eigen::Index(height) * width, range.size(), false)) {}

  int height() const { return height_; }
  int width() const { return width_; }
  const DisparityRange& range() const { return range_; }
  int num_disparities() const { return range_.size(); }
  Eigen::Index pixel_index(int i, int j) const { return Eigen::Index(i) * width_ + j; }

  Scalar value(int i, int j, int k) const { return values_(pixel_index(i, j), k); }
  Scalar& value(int i, int j, int k) { return values_(pixel_index(i, j), k); }
  bool valid(int i, int j, int k) const { return valid_(pixel_index(i, j), k); }
  void set_valid(int i, int j, int k, bool v) { valid_(pixel_index(i, j), k) = v; }

  /// Curve of pixel (i, j) indexed by disparity offset k = d - d_min.
  auto curve(int i, int j) const { return values_.row(pixel_index(i, j)); }
  auto curve(int i, int j) { return values_.row(pixel_index(i, j)); }
  auto curve_valid(int i, int j) const { return valid_.row(pixel_index(i, j)); }

  bool pixel_valid(int i, int j) const { return curve_valid(i, j).any(); }

  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }
  const ValidMatrix& valid() const { return valid_; }
  ValidMatrix& valid() { return valid_; }

 protected:
  int height_ = 0;
  int width_ = 0;
  DisparityRange range_;
  Matrix values_;
  ValidMatrix valid_;
};

/// Matching costs, lower is more similar. Invalid entries hold +inf and never
/// take part in the global extrema.
template <typename Scalar>
class CostVolumeT : public Volume<Scalar> {
 public:
  static constexpr Scalar kInvalidCost = std::numeric_limits<Scalar>::infinity();

  CostVolumeT() = default;
  CostVolumeT(int height, int width, DisparityRange range) : Volume<Scalar>(height, width, range, kInvalidCost) {}

  Scalar cost(int i, int j, int k) const { return this->value(i, j, k); }
  void set_cost(int i, int j, int k, Scalar c) {
    this->value(i, j, k) = c;
    this->set_valid(i, j, k, true);
  }
  void invalidate(int i, int j, int k) {
    this->value(i, j, k) = kInvalidCost;
    this->set_valid(i, j, k, false);
  }

  Scalar cost_min() const { return cost_min_; }
  Scalar cost_max() const { return cost_max_; }
  Eigen::Index valid_count() const { return this->valid_.count(); }

  /// Recomputes extrema over valid entries; throws "empty valid set" when
  /// there are none.
  void update_extrema();

 private:
  Scalar cost_min_ = 0;
  Scalar cost_max_ = 0;
};

using CostVolume = CostVolumeT<float>;

/// Census signatures: bit k of a pixel is set when the k-th window neighbour
/// (row-major, centre skipped) is strictly darker than the centre.
class CensusField {
 public:
  CensusField(int height, int width, int window_rows, int window_cols);

  int height() const { return height_; }
  int width() const { return width_; }
  int window_rows() const { return window_rows_; }
  int window_cols() const { return window_cols_; }
  int bits() const { return window_rows_ * window_cols_ - 1; }

  bool bit(int i, int j, int k) const {
    return (words_(index(i, j), k / 64) >> (k % 64)) & 1u;
  }
  void set_bit(int i, int j, int k) { words_(index(i, j), k / 64) |= std::uint64_t{1} << (k % 64); }

  int hamming(int i, int j, const CensusField& other, int oi, int oj) const {
    const auto a = words_.row(index(i, j));
    const auto b = other.words_.row(other.index(oi, oj));
    int distance = 0;
    for (Eigen::Index w = 0; w < a.size(); ++w) distance += std::popcount(a(w) ^ b(w));
    return distance;
  }

  /// Signature rendered most-significant-first: character k is bit k.
  std::string signature_string(int i, int j) const;

 private:
  Eigen::Index index(int i, int j) const { return Eigen::Index(i) * width_ + j; }

  int height_;
  int width_;
  int window_rows_;
  int window_cols_;
  Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> words_;
};

/// Edge-replicated census transform; window dimensions must be odd.
CensusField census_transform(const GrayImage& image, int window_rows, int window_cols);

/// costs(i, j, d) = Hamming(left(i, j), right(i, j + d)); entries with j + d
/// outside the image are invalid.
CostVolume build_cost_volume(const CensusField& left, const CensusField& right, DisparityRange range);

/// Interchange file: 32-byte header ("CVOL", version, H, W, d_min, d_max as
/// little-endian int32, 8 reserved bytes), then H*W*|D| little-endian float32
/// with NaN for invalid entries, disparity fastest.
void export_cost_volume(const CostVolume& volume, const std::filesystem::path& path);

struct CostVolumeExpectation {
  std::optional<DisparityRange> range;
  std::optional<int> height;
  std::optional<int> width;
};

/// Loads a volume and recomputes extrema. Throws when the header disagrees
/// with `expected` or with the payload size.
CostVolume import_cost_volume(const std::filesystem::path& path, const CostVolumeExpectation& expected = {});

}  // namespace dispint
