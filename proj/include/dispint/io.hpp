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

#include <filesystem>
#include <optional>

#include "dispint/types.hpp"

namespace dispint {

/// Reads PGM (P5), PPM (P6) or PNG. Color inputs are reduced to luminance
/// with integer-rounded Rec.601 weights; 16-bit samples are kept as stored.
GrayImage load_gray_image(const std::filesystem::path& path);

void write_pgm(const GrayImage& image, const std::filesystem::path& path);

/// Writes a boolean mask as an 8-bit PGM with 0 / 255 samples.
void write_mask_pgm(const Mask& mask, const std::filesystem::path& path);

/// Middlebury PFM ("Pf", single channel). Rows are returned top-to-bottom;
/// non-finite samples become NaN (invalid).
GroundTruthMap read_pfm(const std::filesystem::path& path);

/// Writes scale -1.0 (little-endian), rows bottom-to-top, NaN as +inf.
void write_pfm(const Plane<float>& values, const std::filesystem::path& path);

inline void write_pfm(const DisparityMap& map, const std::filesystem::path& path) {
  write_pfm(map.values, path);
}

/// How calibration `ndisp` maps onto signed disparities. With
/// kNegativeLeft the left pixel (i, j) matches right pixel (i, j + d) for
/// d in [-(ndisp - 1), 0], and stored (positive) ground truth is negated.
enum class DisparityConvention { kNegativeLeft, kPositive };

DisparityConvention parse_convention(const std::string& name);
std::string to_string(DisparityConvention convention);

/// Reads `ndisp` from a Middlebury key=value calib file. Explicit overrides
/// take precedence; either bound may be overridden alone when a calib file
/// supplies the other.
DisparityRange parse_disparity_range(const std::optional<std::filesystem::path>& calib,
                                     std::optional<int> d_min, std::optional<int> d_max,
                                     DisparityConvention convention = DisparityConvention::kNegativeLeft);

}  // namespace dispint
