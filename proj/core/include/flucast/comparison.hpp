// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flucast/epi_week.hpp"
#include "flucast/features.hpp"
#include "flucast/metrics.hpp"
#include "flucast/msop.hpp"
#include "flucast/panel.hpp"
#include "flucast/regressor.hpp"

namespace flucast {

enum class Hemisphere { Northern, Southern };

std::string_view to_string(Hemisphere h) noexcept;
std::optional<Hemisphere> parse_hemisphere(std::string_view text) noexcept;

/// country -> hemisphere, read from `country=northern|southern` lines.
class HemisphereMap {
 public:
  HemisphereMap() = default;

  /// Australia and Brazil southern; China, Japan, UK and USA northern (both
  /// the short names and the FluNet long names).
  static HemisphereMap defaults();

  static HemisphereMap parse(std::istream& in);
  static HemisphereMap load_file(const std::string& path);
  void save(std::ostream& out) const;

  void set(const std::string& country, Hemisphere h) { entries_[country] = h; }
  /// Throws Error(UnknownCountry) when the country has no entry.
  Hemisphere at(const std::string& country) const;
  bool contains(const std::string& country) const { return entries_.count(country) != 0; }
  void merge(const HemisphereMap& other);

  const std::map<std::string, Hemisphere>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, Hemisphere> entries_;
};

struct ReportRow {
  std::string country;
  Hemisphere hemisphere = Hemisphere::Northern;
  ModelKind model = ModelKind::NaiveLast;
  std::size_t horizon = 0;
  bool spatial = false;
  double mape = 0.0;
  double rmse = 0.0;
  std::size_t n_evaluated = 0;
  std::size_t skipped = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ForecastReport {
  std::vector<ReportRow> rows;

  /// nullptr when absent.
  const ReportRow* find(const std::string& country, ModelKind model, std::size_t horizon, bool spatial) const;

  friend bool operator==(const ForecastReport&, const ForecastReport&) = default;
};

/// One tidy row of forecast-vs-actual data (forecast is the median across seeds).
struct PlotPoint {
  std::string country;
  ModelKind model = ModelKind::NaiveLast;
  bool spatial = false;
  std::size_t horizon = 0;
  EpiWeek origin;
  EpiWeek target_week;
  double forecast = 0.0;
  double actual = 0.0;
};

struct ComparisonPlan {
  std::vector<std::string> targets;
  std::vector<ModelKind> models;
  FeatureSpec spec;  // `spatial` is ignored: both modes always run
  EpiWeek test_from;
  MetricConfig metric;
  std::vector<std::uint64_t> seeds{0};
  ModelConfigs configs;
  HemisphereMap hemispheres = HemisphereMap::defaults();
  std::size_t jobs = 1;
};

struct ComparisonResult {
  ForecastReport report;
  std::vector<PlotPoint> plot;
};

/// For each (target, model, spatial on/off): build features, split at
/// test_from, train one MSOP bundle per seed, forecast the test rows and score
/// each horizon. Cells report the median over seeds. Output order is
/// target, model, horizon, then spatial-on before spatial-off, independent of
/// `jobs`.
ComparisonResult run_comparison(const CountryPanel& panel, const ComparisonPlan& plan);

/// Median with the mid-point rule for even counts.
double median(std::vector<double> values);

}  // namespace flucast
