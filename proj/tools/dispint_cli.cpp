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

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "dispint/pipeline.hpp"

namespace {

using dispint::EvalReport;

void print_report(const EvalReport& r) {
  std::printf("%s/%s  global acc=%.4f size=%.4f (n=%lld)  high acc=%.4f (n=%lld)  low acc=%.4f O_rel=%.4f (n=%lld)\n",
              r.dataset.c_str(), r.scene.c_str(), r.global.accuracy(), r.global.relative_size(), r.global.count,
              r.high.accuracy(), r.high.count, r.low.accuracy(), r.low.overestimation(), r.low.count);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disparity confidence intervals from stereo cost volumes"};
  std::map<std::string, std::string> overrides;
  auto value = [&](const char* flag, const char* key, const char* help) {
    app.add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };
  auto toggle = [&](const char* flag, const char* key, const char* val, const char* help) {
    app.add_flag_callback(flag, [&overrides, key, val] { overrides[key] = val; }, help);
  };

  std::string config_file;
  app.add_option("--config", config_file, "flat key=value config file")->check(CLI::ExistingFile);
  value("--left", "left", "left image (PGM/PPM/PNG)");
  value("--right", "right", "right image");
  value("--truth", "truth", "ground-truth disparity PFM");
  value("--calib", "calib", "calibration file with ndisp");
  value("--dmin", "d_min", "minimum disparity");
  value("--dmax", "d_max", "maximum disparity");
  value("--convention", "convention", "negative | positive");
  value("--alpha", "alpha", "possibility level in (0, 1]");
  value("--tau", "tau", "low-confidence threshold in [0, 1]");
  toggle("--no-reg", "enable_regularization", "false", "disable regularization");
  toggle("--no-median", "enable_median", "false", "disable the median filter");
  toggle("--no-vfit", "enable_vfit", "false", "disable subpixel refinement");
  toggle("--baseline", "baseline_mode", "true", "min/max normalization baseline intervals");
  value("--import-cv", "import_cv", "read the cost volume from this file");
  value("--export-cv", "export_cv", "write the cost volume to this file");
  value("--cache-dir", "cache_dir", "cache cost volumes in this directory");
  value("--out", "out", "output directory");
  value("--profile-row", "profile_row", "write profile.csv for this image row");
  value("--alpha-sweep", "alpha_sweep", "comma-separated alphas for an ablation grid");
  value("--workers", "workers", "scenes processed in parallel");
  value("--scene", "scene", "scene id in reports");
  value("--dataset", "dataset", "dataset name in reports");
  std::string manifest;
  app.add_option("--manifest", manifest, "JSON manifest of scenes");
  std::vector<std::string> sets;
  app.add_option("--set", sets, "extra key=value overrides (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw dispint::Error("--set expects key=value, got '" + s + "'", "config");
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    const auto file_values = config_file.empty() ? std::map<std::string, std::string>{}
                                                 : dispint::read_config_file(config_file);
    const dispint::PipelineConfig config = dispint::make_config(file_values, overrides);
    if (manifest.empty() && config.manifest) manifest = config.manifest->string();

    if (!manifest.empty() || !config.alpha_sweep.empty()) {
      dispint::ManifestResult result;
      if (!manifest.empty()) {
        result = dispint::run_manifest(manifest, file_values, overrides);
      } else {
        // A single scene with an ablation grid runs as a one-entry manifest.
        dispint::Manifest m;
        m.dataset = config.dataset;
        m.scenes.push_back({config.dataset, config.scene, {}});
        result = dispint::run_scenes(m, file_values, overrides);
      }
      for (const auto& r : result.reports) print_report(r);
      for (const auto& r : result.pooled) print_report(r);
      for (const auto& f : result.failures) {
        std::fprintf(stderr, "%s/%s failed: %s\n", f.dataset.c_str(), f.scene.c_str(), f.message.c_str());
      }
      if (!result.sweep_columns.empty()) {
        std::printf("alpha sweep (pooled global accuracy):\n");
        for (const auto& p : result.pooled) {
          std::printf("  %s", p.dataset.c_str());
          for (const auto& c : result.sweep_columns) {
            const auto it = result.sweep.find(c);
            const double acc = it != result.sweep.end() && it->second.count(p.dataset) ? it->second.at(p.dataset)
                                                                                       : std::nan("");
            std::printf("  %s=%.3f", c.c_str(), acc);
          }
          std::printf("\n");
        }
      }
      return result.reports.empty() ? 1 : 0;
    }

    const auto outputs = dispint::run_scene(config);
    if (outputs.report) print_report(*outputs.report);
    else std::printf("no ground truth given; wrote maps to %s\n", config.out.string().c_str());
    return 0;
  } catch (const dispint::Error& e) {
    std::fprintf(stderr, "%s: %s\n", e.stage().empty() ? "error" : e.stage().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
