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

#include "dispint/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace dispint {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_same_size(const IntervalMap& intervals, const GroundTruthMap& truth) {
  if (intervals.height() != truth.height() || intervals.width() != truth.width()) {
    throw Error("metrics: interval map and ground truth differ in size");
  }
}

bool contains(const IntervalMap& intervals, const GroundTruthMap& truth, int i, int j) {
  const float t = truth(i, j);
  return intervals.lower(i, j) <= t && t <= intervals.upper(i, j);
}

double clamped_relative_size(const IntervalMap& intervals, const DisparityRange& range, int i, int j) {
  const double lo = std::clamp<double>(intervals.lower(i, j), range.min(), range.max());
  const double hi = std::clamp<double>(intervals.upper(i, j), range.min(), range.max());
  return (hi - lo) / range.width();
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json json_number(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

struct NamedRegion {
  const char* name;
  const RegionStats* stats;
};

std::vector<NamedRegion> regions_of(const EvalReport& r) {
  return {{"global", &r.global}, {"high", &r.high}, {"low", &r.low}};
}

// Scene-averaged metrics: mean over scenes of each scene's metric.
struct SceneMean {
  double accuracy[3] = {kNaN, kNaN, kNaN};
  double relative_size[3] = {kNaN, kNaN, kNaN};
  double overestimation = kNaN;
};

SceneMean scene_mean(std::span<const EvalReport* const> reports) {
  SceneMean out;
  auto mean = [](const std::vector<double>& v) {
    std::vector<double> finite;
    for (double x : v) {
      if (!std::isnan(x)) finite.push_back(x);
    }
    if (finite.empty()) return kNaN;
    double s = 0;
    for (double x : finite) s += x;
    return s / static_cast<double>(finite.size());
  };
  for (int r = 0; r < 3; ++r) {
    std::vector<double> acc, size;
    for (const auto* rep : reports) {
      const auto& stats = *regions_of(*rep)[r].stats;
      acc.push_back(stats.accuracy());
      size.push_back(stats.relative_size());
    }
    out.accuracy[r] = mean(acc);
    out.relative_size[r] = mean(size);
  }
  std::vector<double> over;
  for (const auto* rep : reports) over.push_back(rep->low.overestimation());
  out.overestimation = mean(over);
  return out;
}

}  // namespace

double lower_median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty set");
  const auto rank = (values.size() + 1) / 2 - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank), values.end());
  return values[rank];
}

Mask evaluable_mask(const IntervalMap& intervals, const GroundTruthMap& truth) {
  check_same_size(intervals, truth);
  Mask m(intervals.height(), intervals.width());
  for (int i = 0; i < intervals.height(); ++i) {
    for (int j = 0; j < intervals.width(); ++j) m(i, j) = intervals.valid(i, j) && truth.valid(i, j);
  }
  return m;
}

double accuracy(const IntervalMap& intervals, const GroundTruthMap& truth, const Mask& region) {
  check_same_size(intervals, truth);
  long long n = 0, hits = 0;
  for (int i = 0; i < intervals.height(); ++i) {
    for (int j = 0; j < intervals.width(); ++j) {
      if (!region(i, j) || !intervals.valid(i, j) || !truth.valid(i, j)) continue;
      ++n;
      if (contains(intervals, truth, i, j)) ++hits;
    }
  }
  if (n == 0) throw Error("accuracy: empty region");
  return static_cast<double>(hits) / static_cast<double>(n);
}

double relative_size(const IntervalMap& intervals, const DisparityRange& range, const Mask& region) {
  std::vector<double> sizes;
  for (int i = 0; i < intervals.height(); ++i) {
    for (int j = 0; j < intervals.width(); ++j) {
      if (region(i, j) && intervals.valid(i, j)) sizes.push_back(clamped_relative_size(intervals, range, i, j));
    }
  }
  if (sizes.empty()) throw Error("relative size: empty region");
  return lower_median(std::move(sizes));
}

std::vector<double> overestimation_terms(const IntervalMap& intervals, const DisparityMap& disparity,
                                         const GroundTruthMap& truth, std::span<const LowConfidenceArea> areas) {
  check_same_size(intervals, truth);
  std::vector<double> terms;
  for (const auto& area : areas) {
    double delta = -1.0;
    for (const auto& p : area.pixels) {
      if (!truth.valid(p.row, p.col) || !disparity.valid(p.row, p.col)) continue;
      delta = std::max(delta, std::abs(static_cast<double>(disparity(p.row, p.col)) - truth(p.row, p.col)));
    }
    if (delta < 0.0) continue;
    for (const auto& p : area.pixels) {
      if (p.row != area.anchor_row) continue;
      if (!truth.valid(p.row, p.col) || !intervals.valid(p.row, p.col)) continue;
      const double width = intervals.width_at(p.row, p.col);
      terms.push_back(width > 0.0 ? 1.0 - delta / width : 0.0);
    }
  }
  return terms;
}

double overestimation(const IntervalMap& intervals, const DisparityMap& disparity, const GroundTruthMap& truth,
                      std::span<const LowConfidenceArea> areas) {
  auto terms = overestimation_terms(intervals, disparity, truth, areas);
  if (terms.empty()) throw Error("overestimation: no low-confidence area with valid ground truth");
  return lower_median(std::move(terms));
}

double RegionStats::accuracy() const {
  return count == 0 ? kNaN : static_cast<double>(accurate) / static_cast<double>(count);
}

double RegionStats::relative_size() const {
  return relative_sizes.empty() ? kNaN : lower_median(relative_sizes);
}

double RegionStats::overestimation() const {
  return overestimation_terms.empty() ? kNaN : lower_median(overestimation_terms);
}

void RegionStats::merge(const RegionStats& other) {
  count += other.count;
  accurate += other.accurate;
  relative_sizes.insert(relative_sizes.end(), other.relative_sizes.begin(), other.relative_sizes.end());
  overestimation_terms.insert(overestimation_terms.end(), other.overestimation_terms.begin(),
                              other.overestimation_terms.end());
}

EvalReport evaluate(const IntervalMap& intervals, const DisparityMap& disparity, const GroundTruthMap& truth,
                    const DisparityRange& range, const Mask& low_mask, const AreaIndex& areas) {
  check_same_size(intervals, truth);
  EvalReport report;
  for (int i = 0; i < intervals.height(); ++i) {
    for (int j = 0; j < intervals.width(); ++j) {
      if (!intervals.valid(i, j) || !truth.valid(i, j)) continue;
      const bool hit = contains(intervals, truth, i, j);
      const double size = clamped_relative_size(intervals, range, i, j);
      for (RegionStats* s : {&report.global, low_mask(i, j) ? &report.low : &report.high}) {
        ++s->count;
        s->accurate += hit ? 1 : 0;
        s->relative_sizes.push_back(size);
      }
    }
  }
  report.low.overestimation_terms = overestimation_terms(intervals, disparity, truth, areas.areas());
  return report;
}

EvalReport pool_reports(std::span<const EvalReport> reports, const std::string& dataset) {
  EvalReport out;
  out.dataset = dataset;
  out.scene = "pooled";
  for (const auto& r : reports) {
    out.global.merge(r.global);
    out.high.merge(r.high);
    out.low.merge(r.low);
    if (out.config_digest.empty()) out.config_digest = r.config_digest;
  }
  return out;
}

void emit_report(std::span<const EvalReport> reports, ReportFormat format, const std::filesystem::path& path,
                 std::span<const SceneFailure> failures) {
  if (reports.empty() && failures.empty()) throw Error("report: nothing to emit");
  std::map<std::string, std::vector<const EvalReport*>> by_dataset;
  for (const auto& r : reports) by_dataset[r.dataset].push_back(&r);
  for (auto& [name, list] : by_dataset) {
    std::sort(list.begin(), list.end(), [](const EvalReport* a, const EvalReport* b) { return a->scene < b->scene; });
  }
  std::vector<SceneFailure> sorted_failures(failures.begin(), failures.end());
  std::sort(sorted_failures.begin(), sorted_failures.end(),
            [](const SceneFailure& a, const SceneFailure& b) { return std::tie(a.dataset, a.scene) < std::tie(b.dataset, b.scene); });

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const std::string digest = reports.empty() ? std::string{} : reports.front().config_digest;

  if (format == ReportFormat::kCsv) {
    out << "# aggregation: pooled pixels across scenes (scene_mean rows average per-scene metrics); config "
        << digest << '\n';
    out << kReportCsvHeader << '\n';
    auto emit_regions = [&](const std::string& dataset, const std::string& scene, const EvalReport& r) {
      for (const auto& [name, stats] : regions_of(r)) {
        const std::string prefix = csv_field(dataset) + ',' + csv_field(scene) + ',' + name + ',';
        out << prefix << "accuracy," << format_value(stats->accuracy()) << '\n';
        out << prefix << "relative_size," << format_value(stats->relative_size()) << '\n';
        if (stats == &r.low) out << prefix << "overestimation," << format_value(stats->overestimation()) << '\n';
        out << prefix << "count," << stats->count << '\n';
      }
    };
    for (const auto& [dataset, list] : by_dataset) {
      for (const auto* r : list) emit_regions(dataset, r->scene, *r);
      std::vector<EvalReport> copies;
      for (const auto* r : list) copies.push_back(*r);
      emit_regions(dataset, "pooled", pool_reports(copies, dataset));
      const SceneMean m = scene_mean(list);
      static constexpr const char* kNames[3] = {"global", "high", "low"};
      for (int k = 0; k < 3; ++k) {
        const std::string prefix = csv_field(dataset) + ",scene_mean," + kNames[k] + ',';
        out << prefix << "accuracy," << format_value(m.accuracy[k]) << '\n';
        out << prefix << "relative_size," << format_value(m.relative_size[k]) << '\n';
        if (k == 2) out << prefix << "overestimation," << format_value(m.overestimation) << '\n';
      }
    }
    for (const auto& f : sorted_failures) {
      out << csv_field(f.dataset) << ',' << csv_field(f.scene) << ",global,error," << csv_field(f.message) << '\n';
    }
  } else {
    using nlohmann::json;
    auto region_json = [](const RegionStats& s, bool with_over) {
      json j = {{"accuracy", json_number(s.accuracy())},
                {"relative_size", json_number(s.relative_size())},
                {"count", s.count}};
      if (with_over) j["overestimation"] = json_number(s.overestimation());
      return j;
    };
    auto report_json = [&](const EvalReport& r) {
      return json{{"scene", r.scene},
                  {"global", region_json(r.global, false)},
                  {"high", region_json(r.high, false)},
                  {"low", region_json(r.low, true)}};
    };
    json root;
    root["aggregation"] = "pooled pixels";
    root["config_digest"] = digest;
    root["datasets"] = json::array();
    for (const auto& [dataset, list] : by_dataset) {
      json d;
      d["dataset"] = dataset;
      d["scenes"] = json::array();
      std::vector<EvalReport> copies;
      for (const auto* r : list) {
        d["scenes"].push_back(report_json(*r));
        copies.push_back(*r);
      }
      d["pooled"] = report_json(pool_reports(copies, dataset));
      const SceneMean m = scene_mean(list);
      d["scene_mean"] = {
          {"global", {{"accuracy", json_number(m.accuracy[0])}, {"relative_size", json_number(m.relative_size[0])}}},
          {"high", {{"accuracy", json_number(m.accuracy[1])}, {"relative_size", json_number(m.relative_size[1])}}},
          {"low",
           {{"accuracy", json_number(m.accuracy[2])},
            {"relative_size", json_number(m.relative_size[2])},
            {"overestimation", json_number(m.overestimation)}}}};
      root["datasets"].push_back(d);
    }
    root["failures"] = json::array();
    for (const auto& f : sorted_failures) {
      root["failures"].push_back({{"dataset", f.dataset}, {"scene", f.scene}, {"error", f.message}});
    }
    out << root.dump(2) << '\n';
  }
  if (!out) throw Error("I/O failure writing " + path.string());
}

void emit_profile(const IntervalMap& intervals, const DisparityMap& disparity, const GroundTruthMap& truth,
                  const ConfidenceMap& confidence, int row, const std::filesystem::path& path) {
  if (row < 0 || row >= intervals.height()) throw Error("profile: row " + std::to_string(row) + " out of bounds");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << kProfileCsvHeader << '\n';
  for (int j = 0; j < intervals.width(); ++j) {
    const bool wrong = truth.valid(row, j) && intervals.valid(row, j) && !contains(intervals, truth, row, j);
    out << j << ',' << format_value(intervals.lower(row, j)) << ',' << format_value(intervals.upper(row, j)) << ','
        << format_value(disparity(row, j)) << ',' << format_value(truth(row, j)) << ','
        << (confidence.low(row, j) ? 1 : 0) << ',' << (wrong ? 1 : 0) << '\n';
  }
  if (!out) throw Error("I/O failure writing " + path.string());
}

void emit_pixel_dump(const IntervalMap& intervals, const DisparityMap& disparity, const GroundTruthMap& truth,
                     const ConfidenceMap& confidence, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << kPixelDumpCsvHeader << '\n';
  for (int i = 0; i < intervals.height(); ++i) {
    for (int j = 0; j < intervals.width(); ++j) {
      out << i << ',' << j << ',' << format_value(intervals.lower(i, j)) << ','
          << format_value(intervals.upper(i, j)) << ',' << format_value(disparity(i, j)) << ','
          << format_value(truth(i, j)) << ',' << format_value(confidence.amb_smooth(i, j)) << ','
          << (confidence.low(i, j) ? 1 : 0) << '\n';
    }
  }
  if (!out) throw Error("I/O failure writing " + path.string());
}

Mask wrong_interval_mask(const IntervalMap& intervals, const GroundTruthMap& truth) {
  check_same_size(intervals, truth);
  Mask m = Mask::Constant(intervals.height(), intervals.width(), false);
  for (int i = 0; i < intervals.height(); ++i) {
    for (int j = 0; j < intervals.width(); ++j) {
      m(i, j) = truth.valid(i, j) && intervals.valid(i, j) && !contains(intervals, truth, i, j);
    }
  }
  return m;
}

}  // namespace dispint
