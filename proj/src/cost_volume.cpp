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

#include "dispint/cost_volume.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <vector>

namespace dispint {

template <typename Scalar>
void CostVolumeT<Scalar>::update_extrema() {
  bool any = false;
  Scalar lo = std::numeric_limits<Scalar>::infinity();
  Scalar hi = -std::numeric_limits<Scalar>::infinity();
  const auto& values = this->values_;
  const auto& valid = this->valid_;
  for (Eigen::Index p = 0; p < values.rows(); ++p) {
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      if (!valid(p, k)) continue;
      any = true;
      lo = std::min(lo, values(p, k));
      hi = std::max(hi, values(p, k));
    }
  }
  if (!any) throw Error("empty valid set: cost volume has no valid entry");
  cost_min_ = lo;
  cost_max_ = hi;
}

template class CostVolumeT<float>;
template class CostVolumeT<double>;

CensusField::CensusField(int height, int width, int window_rows, int window_cols)
    : height_(height), width_(width), window_rows_(window_rows), window_cols_(window_cols) {
  const int words = (window_rows * window_cols - 1 + 63) / 64;
  words_.setZero(Eigen::Index(height) * width, std::max(words, 1));
}

std::string CensusField::signature_string(int i, int j) const {
  std::string s(bits(), '0');
  for (int k = 0; k < bits(); ++k) {
    if (bit(i, j, k)) s[k] = '1';
  }
  return s;
}

CensusField census_transform(const GrayImage& image, int window_rows, int window_cols) {
  if (window_rows < 1 || window_cols < 1 || window_rows % 2 == 0 || window_cols % 2 == 0) {
    throw Error("census: window dimensions must be odd, got " + std::to_string(window_rows) + "x" +
                std::to_string(window_cols));
  }
  if (window_rows * window_cols < 3) throw Error("census: window must contain at least one neighbour");
  if (image.height() < window_rows || image.width() < window_cols) {
    throw Error("census: image smaller than the window");
  }
  const int h = image.height();
  const int w = image.width();
  const int ry = window_rows / 2;
  const int rx = window_cols / 2;
  CensusField field(h, w, window_rows, window_cols);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const auto centre = image.pixels(i, j);
      int k = 0;
      for (int dy = -ry; dy <= ry; ++dy) {
        const int y = std::clamp(i + dy, 0, h - 1);
        for (int dx = -rx; dx <= rx; ++dx) {
          if (dy == 0 && dx == 0) continue;
          const int x = std::clamp(j + dx, 0, w - 1);
          if (image.pixels(y, x) < centre) field.set_bit(i, j, k);
          ++k;
        }
      }
    }
  }
  return field;
}

CostVolume build_cost_volume(const CensusField& left, const CensusField& right, DisparityRange range) {
  if (left.height() != right.height() || left.width() != right.width()) {
    throw Error("cost volume: left and right census fields differ in size");
  }
  if (left.bits() != right.bits()) throw Error("cost volume: census windows differ");
  CostVolume volume(left.height(), left.width(), range);
  for (int i = 0; i < left.height(); ++i) {
    for (int j = 0; j < left.width(); ++j) {
      for (int k = 0; k < range.size(); ++k) {
        const int jr = j + range.disparity(k);
        if (jr < 0 || jr >= right.width()) continue;
        volume.set_cost(i, j, k, static_cast<float>(left.hamming(i, j, right, i, jr)));
      }
    }
  }
  volume.update_extrema();
  return volume;
}

namespace {

constexpr std::array<char, 4> kMagic{'C', 'V', 'O', 'L'};
constexpr std::int32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 32;

void put_i32(std::vector<unsigned char>& out, std::size_t at, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out[at + b] = static_cast<unsigned char>((u >> (8 * b)) & 0xff);
}

std::int32_t get_i32(const std::vector<unsigned char>& in, std::size_t at) {
  std::uint32_t u = 0;
  for (int b = 0; b < 4; ++b) u |= std::uint32_t{in[at + b]} << (8 * b);
  return static_cast<std::int32_t>(u);
}

}  // namespace

void export_cost_volume(const CostVolume& volume, const std::filesystem::path& path) {
  const auto n = static_cast<std::size_t>(volume.values().size());
  std::vector<unsigned char> bytes(kHeaderSize + 4 * n, 0);
  std::memcpy(bytes.data(), kMagic.data(), 4);
  put_i32(bytes, 4, kVersion);
  put_i32(bytes, 8, volume.height());
  put_i32(bytes, 12, volume.width());
  put_i32(bytes, 16, volume.range().min());
  put_i32(bytes, 20, volume.range().max());
  const auto& values = volume.values();
  const auto& valid = volume.valid();
  std::size_t at = kHeaderSize;
  for (Eigen::Index p = 0; p < values.rows(); ++p) {
    for (Eigen::Index k = 0; k < values.cols(); ++k, at += 4) {
      const float v = valid(p, k) ? values(p, k) : std::numeric_limits<float>::quiet_NaN();
      put_i32(bytes, at, std::bit_cast<std::int32_t>(v));
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("I/O failure writing " + path.string());
}

CostVolume import_cost_volume(const std::filesystem::path& path, const CostVolumeExpectation& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderSize || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error("cost volume: bad magic in " + path.string());
  }
  if (get_i32(bytes, 4) != kVersion) throw Error("cost volume: unsupported version in " + path.string());
  const int h = get_i32(bytes, 8);
  const int w = get_i32(bytes, 12);
  const int d_min = get_i32(bytes, 16);
  const int d_max = get_i32(bytes, 20);
  if (h < 1 || w < 1) throw Error("cost volume: bad dimensions in " + path.string());
  const DisparityRange range(d_min, d_max);
  const auto n = static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * static_cast<std::size_t>(range.size());
  if (bytes.size() != kHeaderSize + 4 * n) {
    throw Error("cost volume: header announces " + std::to_string(n) + " entries but payload holds " +
                std::to_string((bytes.size() - kHeaderSize) / 4));
  }
  if (expected.range && !(*expected.range == range)) {
    throw Error("cost volume: disparity range [" + std::to_string(d_min) + ", " + std::to_string(d_max) +
                "] does not match the configured range");
  }
  if ((expected.height && *expected.height != h) || (expected.width && *expected.width != w)) {
    throw Error("cost volume: dimensions do not match the configured images");
  }

  CostVolume volume(h, w, range);
  std::size_t at = kHeaderSize;
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      for (int k = 0; k < range.size(); ++k, at += 4) {
        const float v = std::bit_cast<float>(get_i32(bytes, at));
        if (std::isfinite(v)) volume.set_cost(i, j, k, v);
      }
    }
  }
  volume.update_extrema();
  return volume;
}

}  // namespace dispint
