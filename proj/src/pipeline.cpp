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

#include "dispint/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "dispint/disparity.hpp"
#include "json.hpp"

namespace dispint {
namespace {

const std::set<std::string> kInputPathKeys{"left", "right", "truth", "calib", "manifest", "import_cv"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error("bad value '" + value + "' for key '" + key + "'", "config");
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc{} || ptr != end) bad_value(key, value);
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) bad_value(key, value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad_value(key, value);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream in(value);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t hash_file(const std::filesystem::path& path, std::uint64_t h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a(bytes, h);
}

// Runs `fn`, tagging untagged errors with `stage`.
template <typename Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw Error(e.what(), stage);
  } catch (const std::exception& e) {
    throw Error(e.what(), stage);
  }
}

// Build the volume on the mirrored negative range and relabel, so that under
// the positive convention d still means "right pixel at j - d".
CostVolume positive_cost_volume(const CensusField& left, const CensusField& right, const DisparityRange& range) {
  const DisparityRange mirrored(-range.max(), -range.min());
  const CostVolume neg = build_cost_volume(left, right, mirrored);
  CostVolume out(neg.height(), neg.width(), range);
  const int nd = range.size();
  for (int i = 0; i < neg.height(); ++i) {
    for (int j = 0; j < neg.width(); ++j) {
      for (int k = 0; k < nd; ++k) {
        if (neg.valid(i, j, nd - 1 - k)) out.set_cost(i, j, k, neg.cost(i, j, nd - 1 - k));
      }
    }
  }
  out.update_extrema();
  return out;
}

GroundTruthMap load_truth(const PipelineConfig& config, int height, int width) {
  GroundTruthMap truth = read_pfm(*config.truth);
  if (truth.height() != height || truth.width() != width) {
    throw Error("ground truth is " + std::to_string(truth.width()) + "x" + std::to_string(truth.height()) +
                ", images are " + std::to_string(width) + "x" + std::to_string(height));
  }
  const float sign = config.convention == DisparityConvention::kNegativeLeft ? -1.0f : 1.0f;
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      float& t = truth(i, j);
      if (std::isnan(t)) continue;
      if (config.truth_zero_invalid && t == 0.0f) {
        t = invalid_value<float>();
      } else {
        t *= sign;
      }
    }
  }
  return truth;
}

std::filesystem::path cache_path(const PipelineConfig& config, const DisparityRange& range) {
  std::uint64_t h = hash_file(*config.left, 0xcbf29ce484222325ULL);
  h = hash_file(*config.right, h);
  std::ostringstream key;
  key << config.census_rows << 'x' << config.census_cols << ';' << range.min() << ':' << range.max() << ';'
      << to_string(config.convention) << ';' << config.enable_sgm << ';' << format_double(config.sgm.p1) << ';'
      << format_double(config.sgm.p2) << ';' << config.sgm.num_paths << ';' << config.sgm.normalize_by_paths;
  h = fnv1a(key.str(), h);
  return *config.cache_dir / ("cv_" + hex64(h) + ".cvol");
}

CostVolume compute_cost_volume(const PipelineConfig& config, const DisparityRange& range) {
  const GrayImage left = staged("load", [&] { return load_gray_image(*config.left); });
  const GrayImage right = staged("load", [&] { return load_gray_image(*config.right); });
  if (left.width() != right.width() || left.height() != right.height()) {
    throw Error("left and right images differ in size", "load");
  }
  const CensusField cl = staged("census", [&] { return census_transform(left, config.census_rows, config.census_cols); });
  const CensusField cr = staged("census", [&] { return census_transform(right, config.census_rows, config.census_cols); });
  CostVolume raw = staged("cost-volume", [&] {
    return config.convention == DisparityConvention::kNegativeLeft ? build_cost_volume(cl, cr, range)
                                                                   : positive_cost_volume(cl, cr, range);
  });
  if (!config.enable_sgm) return raw;
  return staged("sgm", [&] { return aggregate(raw, config.sgm); });
}

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(msg, "config"); };
  const bool pair = left.has_value() || right.has_value();
  if (pair && import_cv) fail("give either a stereo pair or an imported cost volume, not both");
  if (!pair && !import_cv) fail("no cost source: need left and right images or import_cv");
  if (pair && !(left && right)) fail("both left and right images are required");
  if (census_rows < 1 || census_cols < 1 || census_rows % 2 == 0 || census_cols % 2 == 0) {
    fail("census window dimensions must be odd and positive");
  }
  if (census_rows * census_cols - 1 > 128) fail("census window larger than 128 bits");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must lie in (0, 1]");
  for (double a : alpha_sweep) {
    if (!(a > 0.0 && a <= 1.0)) fail("alpha_sweep values must lie in (0, 1]");
  }
  if (!(tau >= 0.0 && tau <= 1.0)) fail("tau must lie in [0, 1]");
  if (regularization.band < 0) fail("band must be >= 0");
  if (!(regularization.q_low >= 0.0 && regularization.q_low <= regularization.q_high &&
        regularization.q_high <= 1.0)) {
    fail("need 0 <= q_low <= q_high <= 1");
  }
  if (median_kernel < 1 || median_kernel % 2 == 0) fail("median_kernel must be odd and positive");
  if (!(baseline_threshold >= 0.0 && baseline_threshold <= 1.0)) fail("baseline_threshold must lie in [0, 1]");
  if (workers < 1) fail("workers must be >= 1");
  try {
    sgm.validate();
    ambiguity.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "left", "right", "truth", "calib", "manifest", "d_min", "d_max", "convention", "truth_zero_invalid",
      "census_rows", "census_cols", "enable_sgm", "sgm_p1", "sgm_p2", "sgm_paths", "sgm_normalize",
      "alpha", "enable_extension", "eta_max", "k_max", "amb_cost_scale", "tau", "band", "q_low", "q_high",
      "median_kernel", "enable_regularization", "enable_median", "enable_vfit", "baseline_mode",
      "baseline_threshold", "out", "import_cv", "export_cv", "cache_dir", "import_aggregate", "profile_row",
      "pixel_dump", "write_artifacts", "report", "dataset", "scene", "alpha_sweep", "workers"};
  return keys;
}

void apply_config_value(PipelineConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto opt_path = [&] { return v.empty() ? std::nullopt : std::optional<std::filesystem::path>(v); };
  if (key == "left") c.left = opt_path();
  else if (key == "right") c.right = opt_path();
  else if (key == "truth") c.truth = opt_path();
  else if (key == "calib") c.calib = opt_path();
  else if (key == "manifest") c.manifest = opt_path();
  else if (key == "d_min") c.d_min = v.empty() ? std::nullopt : std::optional<int>(parse_int(key, v));
  else if (key == "d_max") c.d_max = v.empty() ? std::nullopt : std::optional<int>(parse_int(key, v));
  else if (key == "convention") {
    try {
      c.convention = parse_convention(v);
    } catch (const Error&) {
      bad_value(key, v);
    }
  }
  else if (key == "truth_zero_invalid") c.truth_zero_invalid = parse_bool(key, v);
  else if (key == "census_rows") c.census_rows = parse_int(key, v);
  else if (key == "census_cols") c.census_cols = parse_int(key, v);
  else if (key == "enable_sgm") c.enable_sgm = parse_bool(key, v);
  else if (key == "sgm_p1") c.sgm.p1 = parse_double(key, v);
  else if (key == "sgm_p2") c.sgm.p2 = parse_double(key, v);
  else if (key == "sgm_paths") c.sgm.num_paths = parse_int(key, v);
  else if (key == "sgm_normalize") c.sgm.normalize_by_paths = parse_bool(key, v);
  else if (key == "alpha") c.alpha = parse_double(key, v);
  else if (key == "enable_extension") c.enable_extension = parse_bool(key, v);
  else if (key == "eta_max") c.ambiguity.eta_max = parse_double(key, v);
  else if (key == "k_max") c.ambiguity.k_max = parse_int(key, v);
  else if (key == "amb_cost_scale") {
    if (v == "auto") {
      c.auto_cost_scale = true;
    } else {
      c.auto_cost_scale = false;
      c.ambiguity.cost_scale = parse_double(key, v);
    }
  }
  else if (key == "tau") c.tau = parse_double(key, v);
  else if (key == "band" || key == "l") c.regularization.band = parse_int(key, v);
  else if (key == "q_low") c.regularization.q_low = parse_double(key, v);
  else if (key == "q_high") c.regularization.q_high = parse_double(key, v);
  else if (key == "median_kernel") c.median_kernel = parse_int(key, v);
  else if (key == "enable_regularization") c.enable_regularization = parse_bool(key, v);
  else if (key == "enable_median") c.enable_median = parse_bool(key, v);
  else if (key == "enable_vfit") c.enable_vfit = parse_bool(key, v);
  else if (key == "baseline_mode") c.baseline_mode = parse_bool(key, v);
  else if (key == "baseline_threshold") c.baseline_threshold = parse_double(key, v);
  else if (key == "out") {
    if (v.empty()) bad_value(key, v);
    c.out = v;
  }
  else if (key == "import_cv") c.import_cv = opt_path();
  else if (key == "export_cv") c.export_cv = opt_path();
  else if (key == "cache_dir") c.cache_dir = opt_path();
  else if (key == "import_aggregate") c.import_aggregate = parse_bool(key, v);
  else if (key == "profile_row") c.profile_row = v.empty() ? std::nullopt : std::optional<int>(parse_int(key, v));
  else if (key == "pixel_dump") c.pixel_dump = parse_bool(key, v);
  else if (key == "write_artifacts") c.write_artifacts = parse_bool(key, v);
  else if (key == "report") {
    if (v == "csv") c.report = ReportOutput::kCsv;
    else if (v == "json") c.report = ReportOutput::kJson;
    else if (v == "both") c.report = ReportOutput::kBoth;
    else bad_value(key, v);
  }
  else if (key == "dataset") c.dataset = v;
  else if (key == "scene") c.scene = v;
  else if (key == "alpha_sweep") c.alpha_sweep = parse_double_list(key, v);
  else if (key == "workers") c.workers = parse_int(key, v);
  else throw Error("unknown key '" + key + "'", "config");
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string(), "config");
  const auto base = path.parent_path();
  std::map<std::string, std::string> values;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected key = value", "config");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (kInputPathKeys.count(key) && !value.empty() && std::filesystem::path(value).is_relative()) {
      value = (base / value).lexically_normal().string();
    }
    values[key] = value;
  }
  return values;
}

PipelineConfig make_config(const std::map<std::string, std::string>& file_values,
                           const std::map<std::string, std::string>& overrides) {
  PipelineConfig c;
  for (const auto& [k, v] : file_values) apply_config_value(c, k, v);
  for (const auto& [k, v] : overrides) apply_config_value(c, k, v);
  return c;
}

std::string config_dump(const PipelineConfig& c) {
  std::ostringstream out;
  auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string{}; };
  out << "d_min=" << opt(c.d_min) << '\n'
      << "d_max=" << opt(c.d_max) << '\n'
      << "convention=" << to_string(c.convention) << '\n'
      << "truth_zero_invalid=" << c.truth_zero_invalid << '\n'
      << "census_rows=" << c.census_rows << '\n'
      << "census_cols=" << c.census_cols << '\n'
      << "enable_sgm=" << c.enable_sgm << '\n'
      << "sgm_p1=" << format_double(c.sgm.p1) << '\n'
      << "sgm_p2=" << format_double(c.sgm.p2) << '\n'
      << "sgm_paths=" << c.sgm.num_paths << '\n'
      << "sgm_normalize=" << c.sgm.normalize_by_paths << '\n'
      << "alpha=" << format_double(c.alpha) << '\n'
      << "enable_extension=" << c.enable_extension << '\n'
      << "eta_max=" << format_double(c.ambiguity.eta_max) << '\n'
      << "k_max=" << c.ambiguity.k_max << '\n'
      << "amb_cost_scale=" << (c.auto_cost_scale ? std::string("auto") : format_double(c.ambiguity.cost_scale)) << '\n'
      << "tau=" << format_double(c.tau) << '\n'
      << "band=" << c.regularization.band << '\n'
      << "q_low=" << format_double(c.regularization.q_low) << '\n'
      << "q_high=" << format_double(c.regularization.q_high) << '\n'
      << "median_kernel=" << c.median_kernel << '\n'
      << "enable_regularization=" << c.enable_regularization << '\n'
      << "enable_median=" << c.enable_median << '\n'
      << "enable_vfit=" << c.enable_vfit << '\n'
      << "baseline_mode=" << c.baseline_mode << '\n'
      << "baseline_threshold=" << format_double(c.baseline_threshold) << '\n'
      << "import_aggregate=" << c.import_aggregate << '\n';
  return out.str();
}

std::string config_digest(const PipelineConfig& config) { return hex64(fnv1a(config_dump(config))); }

SceneState prepare_scene(const PipelineConfig& config) {
  staged("config", [&] { config.validate(); });
  SceneState state;
  if (config.import_cv) {
    std::optional<DisparityRange> expected;
    if (config.calib || config.d_min || config.d_max) {
      expected = staged("config", [&] {
        return parse_disparity_range(config.calib, config.d_min, config.d_max, config.convention);
      });
    }
    state.cost = staged("import", [&] { return import_cost_volume(*config.import_cv, {expected, {}, {}}); });
    if (config.import_aggregate) state.cost = staged("sgm", [&] { return aggregate(state.cost, config.sgm); });
  } else {
    const DisparityRange range = staged("config", [&] {
      return parse_disparity_range(config.calib, config.d_min, config.d_max, config.convention);
    });
    std::optional<std::filesystem::path> cached;
    if (config.cache_dir) cached = staged("cache", [&] { return cache_path(config, range); });
    if (cached && std::filesystem::exists(*cached)) {
      state.cost = staged("cache", [&] { return import_cost_volume(*cached, {range, {}, {}}); });
    } else {
      state.cost = compute_cost_volume(config, range);
      if (cached) {
        staged("cache", [&] {
          std::filesystem::create_directories(*config.cache_dir);
          // Write then rename so concurrent scenes never read a partial file.
          auto tmp = *cached;
          tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
          export_cost_volume(state.cost, tmp);
          std::filesystem::rename(tmp, *cached);
        });
      }
    }
  }
  if (config.export_cv) {
    staged("export", [&] {
      if (config.export_cv->has_parent_path()) std::filesystem::create_directories(config.export_cv->parent_path());
      export_cost_volume(state.cost, *config.export_cv);
    });
  }
  if (config.truth) {
    state.truth = staged("load", [&] { return load_truth(config, state.cost.height(), state.cost.width()); });
  }
  state.possibility = staged("possibility", [&] { return possibility_volume(state.cost); });
  state.wta = staged("disparity", [&] { return wta(state.cost); });
  state.confidence = staged("confidence", [&] {
    AmbiguityParams params = config.ambiguity;
    if (config.auto_cost_scale) params.cost_scale = config.import_cv ? 1.0 : config.census_rows * config.census_cols - 1;
    return smooth_and_threshold(ambiguity(state.cost, params), config.tau);
  });
  return state;
}

SceneOutputs finish_scene(const PipelineConfig& config, const SceneState& state) {
  staged("config", [&] { config.validate(); });
  SceneOutputs out;
  out.raw_disparity = state.wta;
  out.truth = state.truth;
  out.confidence = state.confidence;
  if (config.tau != state.confidence.tau) {
    out.confidence = staged("confidence", [&] { return smooth_and_threshold(state.confidence.amb, config.tau); });
  }
  out.raw_intervals = staged("intervals", [&] {
    return config.baseline_mode ? baseline_intervals(state.cost, config.baseline_threshold)
                                : compute_intervals(state.possibility, state.wta, AlphaLevel(config.alpha),
                                                    config.enable_extension);
  });
  out.disparity = config.enable_vfit ? staged("disparity", [&] { return vfit_refine(state.cost, state.wta); })
                                     : state.wta;
  out.intervals = out.raw_intervals;
  if (config.enable_median) {
    staged("median", [&] {
      out.disparity = median_filter(out.disparity, config.median_kernel);
      out.intervals = median_filter(out.intervals, config.median_kernel);
    });
  }
  const AreaIndex areas = staged("regularization", [&] {
    return AreaIndex(out.confidence.low_mask, config.regularization.band);
  });
  if (config.enable_regularization && !config.baseline_mode) {
    out.intervals = staged("regularization", [&] {
      return regularize_intervals(out.intervals, areas, config.regularization);
    });
  }
  if (state.truth) {
    out.report = staged("metrics", [&] {
      EvalReport r = evaluate(out.intervals, out.disparity, *state.truth, state.cost.range(),
                              out.confidence.low_mask, areas);
      r.dataset = config.dataset;
      r.scene = config.scene;
      r.config_digest = config_digest(config);
      return r;
    });
  }
  return out;
}

void write_scene_artifacts(const PipelineConfig& config, const SceneOutputs& o) {
  staged("output", [&] {
    const auto& dir = config.out;
    std::filesystem::create_directories(dir);
    write_pfm(o.disparity, dir / "disparity.pfm");
    write_pfm(o.intervals.lower, dir / "lower.pfm");
    write_pfm(o.intervals.upper, dir / "upper.pfm");
    write_pfm(o.confidence.amb_smooth, dir / "confidence.pfm");
    write_mask_pgm(o.confidence.low_mask, dir / "low_mask.pgm");
    {
      std::ofstream cfg(dir / "config.txt");
      cfg << config_dump(config);
      if (!cfg) throw Error("I/O failure writing " + (dir / "config.txt").string());
    }
    const GroundTruthMap truth = o.truth ? *o.truth : GroundTruthMap(o.intervals.height(), o.intervals.width());
    if (o.truth) write_mask_pgm(wrong_interval_mask(o.intervals, truth), dir / "wrong_mask.pgm");
    if (config.profile_row) emit_profile(o.intervals, o.disparity, truth, o.confidence, *config.profile_row, dir / "profile.csv");
    if (config.pixel_dump) emit_pixel_dump(o.intervals, o.disparity, truth, o.confidence, dir / "pixels.csv");
  });
}

namespace {

void emit_reports(const PipelineConfig& config, std::span<const EvalReport> reports,
                  std::span<const SceneFailure> failures) {
  staged("output", [&] {
    std::filesystem::create_directories(config.out);
    if (config.report != ReportOutput::kJson) emit_report(reports, ReportFormat::kCsv, config.out / "report.csv", failures);
    if (config.report != ReportOutput::kCsv) emit_report(reports, ReportFormat::kJson, config.out / "report.json", failures);
  });
}

std::string percent_label(double alpha) {
  std::ostringstream s;
  s << alpha * 100.0;
  return s.str();
}

}  // namespace

SceneOutputs run_scene(const PipelineConfig& config) {
  const SceneState state = prepare_scene(config);
  SceneOutputs out = finish_scene(config, state);
  if (config.write_artifacts) write_scene_artifacts(config, out);
  if (out.report) emit_reports(config, std::span(&*out.report, 1), {});
  return out;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string(), "manifest");
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw Error("unreadable manifest " + path.string() + ": " + e.what(), "manifest");
  }
  if (!root.is_object() || !root.contains("scenes") || !root["scenes"].is_array()) {
    throw Error("manifest needs a \"scenes\" array", "manifest");
  }
  const auto base = path.parent_path();
  Manifest m;
  m.dataset = root.value("dataset", std::string("default"));
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& entry : root["scenes"]) {
    if (!entry.is_object()) throw Error("manifest scene entries must be objects", "manifest");
    ManifestScene scene;
    scene.dataset = m.dataset;
    for (const auto& [key, value] : entry.items()) {
      std::string text;
      if (value.is_string()) text = value.get<std::string>();
      else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
      else if (value.is_number_integer()) text = std::to_string(value.get<long long>());
      else if (value.is_number()) text = format_double(value.get<double>());
      else throw Error("manifest value for '" + key + "' must be a scalar", "manifest");
      if (key == "id") {
        scene.id = text;
        continue;
      }
      if (key == "dataset") {
        scene.dataset = text;
        continue;
      }
      if (kInputPathKeys.count(key) && !text.empty() && std::filesystem::path(text).is_relative()) {
        text = (base / text).lexically_normal().string();
      }
      scene.values[key] = text;
    }
    if (scene.id.empty()) throw Error("manifest scene without \"id\"", "manifest");
    if (!seen.insert({scene.dataset, scene.id}).second) {
      throw Error("duplicate scene id '" + scene.id + "'", "manifest");
    }
    m.scenes.push_back(std::move(scene));
  }
  if (m.scenes.empty()) throw Error("manifest lists no scenes", "manifest");
  return m;
}

ManifestResult run_scenes(const Manifest& manifest, const std::map<std::string, std::string>& file_values,
                          const std::map<std::string, std::string>& overrides) {
  const PipelineConfig base = make_config(file_values, overrides);
  std::vector<std::string> columns;
  std::vector<PipelineConfig> variants;  // built per scene from the scene config
  const bool sweep = !base.alpha_sweep.empty();
  if (sweep) {
    columns.push_back("baseline");
    bool placed_reg = false;
    for (double a : base.alpha_sweep) {
      columns.push_back(percent_label(a));
      if (a == base.alpha && !placed_reg) {
        columns.push_back(percent_label(a) + " w/ reg");
        placed_reg = true;
      }
    }
    if (!placed_reg) columns.push_back(percent_label(base.alpha) + " w/ reg");
  }

  struct Slot {
    std::optional<EvalReport> report;
    std::optional<SceneFailure> failure;
    std::map<std::string, EvalReport> sweep;
  };
  std::vector<Slot> slots(manifest.scenes.size());

  auto run_one = [&](std::size_t index) {
    const ManifestScene& scene = manifest.scenes[index];
    Slot& slot = slots[index];
    try {
      std::map<std::string, std::string> values = file_values;
      for (const auto& [k, v] : scene.values) values[k] = v;
      PipelineConfig config = make_config(values, overrides);
      config.dataset = scene.dataset;
      config.scene = scene.id;
      config.out = base.out / scene.dataset / scene.id;
      const SceneState state = prepare_scene(config);
      const SceneOutputs outputs = finish_scene(config, state);
      if (config.write_artifacts) write_scene_artifacts(config, outputs);
      if (!outputs.report) throw Error("scene has no ground truth", "metrics");
      slot.report = *outputs.report;
      if (sweep) {
        for (const auto& column : columns) {
          PipelineConfig v = config;
          if (column == "baseline") {
            v.baseline_mode = true;
            v.enable_regularization = false;
          } else if (column.ends_with(" w/ reg")) {
            v.enable_regularization = true;
          } else {
            v.alpha = std::stod(column) / 100.0;
            v.enable_regularization = false;
          }
          SceneOutputs r = finish_scene(v, state);
          slot.sweep[column] = *r.report;
        }
      }
    } catch (const Error& e) {
      const std::string stage = e.stage().empty() ? std::string("error") : e.stage();
      slot.failure = SceneFailure{scene.dataset, scene.id, stage + ": " + e.what()};
    } catch (const std::exception& e) {
      slot.failure = SceneFailure{scene.dataset, scene.id, std::string("error: ") + e.what()};
    }
  };

  const int workers = std::min<int>(base.workers, static_cast<int>(manifest.scenes.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < slots.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < slots.size(); i = next++) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  ManifestResult result;
  result.sweep_columns = columns;
  std::map<std::string, std::vector<EvalReport>> by_dataset;
  std::map<std::string, std::map<std::string, std::vector<EvalReport>>> sweep_by;
  for (const auto& slot : slots) {
    if (slot.failure) result.failures.push_back(*slot.failure);
    if (!slot.report) continue;
    result.reports.push_back(*slot.report);
    by_dataset[slot.report->dataset].push_back(*slot.report);
    for (const auto& [col, rep] : slot.sweep) sweep_by[col][rep.dataset].push_back(rep);
  }
  auto key = [](const auto& r) { return std::tie(r.dataset, r.scene); };
  std::sort(result.reports.begin(), result.reports.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  std::sort(result.failures.begin(), result.failures.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  for (const auto& [dataset, reps] : by_dataset) result.pooled.push_back(pool_reports(reps, dataset));
  for (const auto& [col, per_dataset] : sweep_by) {
    for (const auto& [dataset, reps] : per_dataset) {
      result.sweep[col][dataset] = pool_reports(reps, dataset).global.accuracy();
    }
  }

  emit_reports(base, result.reports, result.failures);
  if (sweep) {
    staged("output", [&] {
      std::ofstream out(base.out / "alpha_sweep.csv");
      out << "dataset";
      for (const auto& c : columns) out << ',' << c;
      out << '\n';
      for (const auto& [dataset, reps] : by_dataset) {
        out << dataset;
        for (const auto& c : columns) {
          const auto it = result.sweep.find(c);
          out << ',';
          if (it != result.sweep.end() && it->second.count(dataset)) out << it->second.at(dataset);
        }
        out << '\n';
      }
      if (!out) throw Error("I/O failure writing alpha_sweep.csv");
    });
  }
  return result;
}

ManifestResult run_manifest(const std::filesystem::path& manifest_path,
                            const std::map<std::string, std::string>& file_values,
                            const std::map<std::string, std::string>& overrides) {
  return run_scenes(read_manifest(manifest_path), file_values, overrides);
}

}  // namespace dispint
