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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dispint/confidence.hpp"
#include "dispint/cost_volume.hpp"
#include "dispint/io.hpp"
#include "dispint/metrics.hpp"
#include "dispint/possibility.hpp"
#include "dispint/sgm.hpp"

namespace dispint {

enum class ReportOutput { kCsv, kJson, kBoth };

struct PipelineConfig {
  // Inputs. Either left + right or import_cv is the cost source.
  std::optional<std::filesystem::path> left, right, truth, calib, manifest;
  std::optional<int> d_min, d_max;
  DisparityConvention convention = DisparityConvention::kNegativeLeft;
  bool truth_zero_invalid = true;

  int census_rows = 5;
  int census_cols = 5;
  bool enable_sgm = true;
  SgmParams sgm;

  double alpha = 0.9;
  bool enable_extension = true;
  AmbiguityParams ambiguity;
  bool auto_cost_scale = true;  // cost_scale = census window bits
  double tau = 0.6;
  RegularizationParams regularization;
  int median_kernel = 3;

  bool enable_regularization = true;
  bool enable_median = true;
  bool enable_vfit = true;
  bool baseline_mode = false;
  double baseline_threshold = 0.9;

  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> import_cv, export_cv, cache_dir;
  bool import_aggregate = false;  // run SGM on imported volumes
  std::optional<int> profile_row;
  bool pixel_dump = false;
  bool write_artifacts = true;
  ReportOutput report = ReportOutput::kBoth;

  std::string dataset = "default";
  std::string scene = "scene";
  std::vector<double> alpha_sweep;
  int workers = 1;

  /// Throws Error("config", ...) when a field is out of range.
  void validate() const;
};

/// Sets one key from its text form. Unknown keys and malformed values throw.
void apply_config_value(PipelineConfig& config, const std::string& key, const std::string& value);

/// Flat "key = value" lines; '#' starts a comment. Relative paths are
/// resolved against the file's directory.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Defaults, then `file_values`, then `overrides`.
PipelineConfig make_config(const std::map<std::string, std::string>& file_values,
                           const std::map<std::string, std::string>& overrides);

/// Keys in the order used by config_dump().
const std::vector<std::string>& config_keys();

/// Canonical "key=value" listing of every algorithmic parameter.
std::string config_dump(const PipelineConfig& config);

/// 16 hex digits of FNV-1a 64 over config_dump().
std::string config_digest(const PipelineConfig& config);

/// Products of the expensive stages. Everything downstream of the cost
/// volume is cheap to recompute for another alpha or flag set.
struct SceneState {
  CostVolume cost;             // final (aggregated) cost volume
  PossibilityVolume possibility;
  DisparityMap wta;
  ConfidenceMap confidence;
  std::optional<GroundTruthMap> truth;
};

struct SceneOutputs {
  DisparityMap raw_disparity;  // WTA before refinement
  DisparityMap disparity;
  IntervalMap raw_intervals;   // compute_intervals / baseline output
  IntervalMap intervals;
  ConfidenceMap confidence;
  std::optional<GroundTruthMap> truth;
  std::optional<EvalReport> report;
};

/// Cost volume, possibility, WTA and confidence for one scene.
SceneState prepare_scene(const PipelineConfig& config);

/// Intervals, refinement, regularization and metrics on a prepared scene.
/// `config` may differ from the one used in prepare_scene() in any field
/// that does not affect the cost volume.
SceneOutputs finish_scene(const PipelineConfig& config, const SceneState& state);

/// prepare + finish, then writes artifacts into config.out.
SceneOutputs run_scene(const PipelineConfig& config);

/// Writes disparity, interval bounds, confidence, masks and optional
/// profile or pixel dump for a finished scene.
void write_scene_artifacts(const PipelineConfig& config, const SceneOutputs& outputs);

struct ManifestScene {
  std::string dataset;
  std::string id;
  std::map<std::string, std::string> values;  // per-scene keys (paths resolved)
};

struct Manifest {
  std::string dataset;
  std::vector<ManifestScene> scenes;
};

/// JSON manifest:
///   {"dataset": "name", "scenes": [{"id": "a", "left": "...", ...}, ...]}
/// Scene entries take any config key; paths are relative to the manifest.
Manifest read_manifest(const std::filesystem::path& path);

struct ManifestResult {
  std::vector<EvalReport> reports;  // sorted by (dataset, scene)
  std::vector<EvalReport> pooled;   // one per dataset
  std::vector<SceneFailure> failures;
  /// variant name -> per-dataset pooled accuracy, filled when an alpha sweep is requested.
  std::map<std::string, std::map<std::string, double>> sweep;
  std::vector<std::string> sweep_columns;
};

/// Same as run_manifest() on an in-memory manifest.
ManifestResult run_scenes(const Manifest& manifest, const std::map<std::string, std::string>& file_values,
                          const std::map<std::string, std::string>& overrides);

/// Runs every scene with defaults < `file_values` < scene keys < `overrides`,
/// writes report.{csv,json} (and alpha_sweep.csv) under the resulting `out`,
/// and keeps going past failing scenes.
ManifestResult run_manifest(const std::filesystem::path& manifest_path,
                            const std::map<std::string, std::string>& file_values = {},
                            const std::map<std::string, std::string>& overrides = {});

}  // namespace dispint
