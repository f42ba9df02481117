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
#include <span>
#include <string>
#include <vector>

#include "dispint/confidence.hpp"

namespace dispint {

/// Pixels where both the interval and the ground truth are valid.
Mask evaluable_mask(const IntervalMap& intervals, const GroundTruthMap& truth);

/// Fraction of region pixels with lower <= truth <= upper. Invalid truth or
/// intervals are skipped; throws on an empty region.
double accuracy(const IntervalMap& intervals, const GroundTruthMap& truth, const Mask& region);

/// Lower median over the region of (upper - lower) / (d_max - d_min), bounds
/// clamped to the range first.
double relative_size(const IntervalMap& intervals, const DisparityRange& range, const Mask& region);

/// Per-pixel overestimation terms 1 - delta / (upper - lower), where delta is
/// the largest |d - truth| over the pixel's area. One term per seed pixel of
/// each area; zero-width intervals give 0.
std::vector<double> overestimation_terms(const IntervalMap& intervals, const DisparityMap& disparity,
                                         const GroundTruthMap& truth, std::span<const LowConfidenceArea> areas);

/// Lower median of overestimation_terms(); throws when no term exists.
double overestimation(const IntervalMap& intervals, const DisparityMap& disparity, const GroundTruthMap& truth,
                      std::span<const LowConfidenceArea> areas);

/// Lower median (element ceil(n/2) of the ascending sort).
double lower_median(std::vector<double> values);

/// Raw samples for one region, kept so datasets can be pooled pixel-wise.
struct RegionStats {
  long long count = 0;
  long long accurate = 0;
  std::vector<double> relative_sizes;
  std::vector<double> overestimation_terms;

  double accuracy() const;       // NaN when empty
  double relative_size() const;  // NaN when empty
  double overestimation() const; // NaN when empty

  void merge(const RegionStats& other);
};

struct EvalReport {
  std::string dataset;
  std::string scene;
  std::string config_digest;
  RegionStats global;
  RegionStats high;
  RegionStats low;
};

/// Accuracy / size for the global, high- and low-confidence regions, and
/// overestimation over the low-confidence areas.
EvalReport evaluate(const IntervalMap& intervals, const DisparityMap& disparity, const GroundTruthMap& truth,
                    const DisparityRange& range, const Mask& low_mask, const AreaIndex& areas);

/// Pixel-pooled aggregate of several scene reports.
EvalReport pool_reports(std::span<const EvalReport> reports, const std::string& dataset);

struct SceneFailure {
  std::string dataset;
  std::string scene;
  std::string message;
};

enum class ReportFormat { kCsv, kJson };

inline constexpr const char* kReportCsvHeader = "dataset,scene,region,metric,value";

/// Per-scene rows, then for each dataset a pixel-pooled row set (scene
/// "pooled") and a scene-averaged one (scene "scene_mean"). Rows are
/// ordered by dataset then scene id.
void emit_report(std::span<const EvalReport> reports, ReportFormat format, const std::filesystem::path& path,
                 std::span<const SceneFailure> failures = {});

inline constexpr const char* kProfileCsvHeader = "j,lower,upper,disparity,truth,low_conf_flag,wrong_interval";

/// One image row of intervals, disparity and truth for plotting.
void emit_profile(const IntervalMap& intervals, const DisparityMap& disparity, const GroundTruthMap& truth,
                  const ConfidenceMap& confidence, int row, const std::filesystem::path& path);

inline constexpr const char* kPixelDumpCsvHeader = "i,j,lower,upper,disparity,truth,confidence,low_conf_flag";

/// Every pixel as one CSV line.
void emit_pixel_dump(const IntervalMap& intervals, const DisparityMap& disparity, const GroundTruthMap& truth,
                     const ConfidenceMap& confidence, const std::filesystem::path& path);

/// True where the truth is valid but falls outside the interval.
Mask wrong_interval_mask(const IntervalMap& intervals, const GroundTruthMap& truth);

}  // namespace dispint
