// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flucast/epi_week.hpp"
#include "flucast/matrix.hpp"
#include "flucast/panel.hpp"

namespace flucast {

enum class RollingStat { Mean, Median, Std, Max, Min };

std::string_view to_string(RollingStat stat) noexcept;
std::optional<RollingStat> parse_rolling_stat(std::string_view text) noexcept;

/// Shape of the supervised design matrix.
struct FeatureSpec {
  std::size_t lag_depth = 52;
  std::vector<std::size_t> windows{1, 2, 3, 4, 9, 13, 26, 52};
  std::vector<RollingStat> stats{RollingStat::Mean, RollingStat::Median, RollingStat::Std, RollingStat::Max,
                                 RollingStat::Min};
  bool include_first_diff = true;
  bool spatial = true;
  std::vector<std::size_t> horizons{1, 2, 3, 4};

  /// Throws Error(InvalidConfig) when lag_depth < max(windows), a window is
  /// zero, or horizons / windows / stats repeat.
  void validate() const;

  std::size_t max_horizon() const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Canonical single-line form, e.g. `lag_depth=52;windows=1,2;stats=mean;diff=1;spatial=1;horizons=1,2`.
std::string format_spec(const FeatureSpec& spec);
FeatureSpec parse_spec(std::string_view text);

/// lag_depth + (diff ? lag_depth-1 : 0) + |windows|*|stats| + (spatial ? (n_countries-1)*lag_depth : 0)
std::size_t expected_column_count(const FeatureSpec& spec, std::size_t n_countries);

/// Per-target-country design matrix. Row r is the forecast origin origins[r];
/// y(r, j) is the target value at origins[r] + spec.horizons[j].
struct FeatureMatrix {
  std::string target_country;
  FeatureSpec spec;
  std::vector<EpiWeek> origins;
  ColumnNames feature_names;
  Matrix x;
  Matrix y;

  std::size_t rows() const noexcept { return origins.size(); }
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  /// Column index of `name`, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

/// Column names: `t.lag.K`, `t.diff.K`, `t.w{W}.{stat}`, `s.{country}.lag.K`.
std::string lag_name(std::size_t k);
std::string diff_name(std::size_t k);
std::string rolling_name(std::size_t window, RollingStat stat);
std::string spatial_lag_name(std::string_view country, std::size_t k);
std::string target_name(std::size_t horizon);

/// Builds lag, first-difference, rolling-window and (optionally) spatial lag
/// features for `target`. Rows needing history before the panel start or
/// targets after its end are dropped.
FeatureMatrix build_features(const CountryPanel& panel, const std::string& target, const FeatureSpec& spec);

/// Chronological split: train has origins < test_from, test the rest.
std::pair<FeatureMatrix, FeatureMatrix> split_walk_forward(const FeatureMatrix& fm, EpiWeek test_from);

/// Window statistic over `window` (population std, mid-point median).
double rolling_statistic(std::span<const double> window, RollingStat stat);

// ---------------------------------------------------------------------------
// z-score scaling

struct ColumnScaling {
  std::vector<double> mean;
  std::vector<double> stddev;  // population; 0 marks a constant column

  void apply(Matrix& m) const;
  void invert(Matrix& m) const;
  double apply(double v, std::size_t col) const;
  double invert(double z, std::size_t col) const;

  friend bool operator==(const ColumnScaling&, const ColumnScaling&) = default;
};

ColumnScaling fit_columns(const Matrix& m);

struct ScalingStats {
  ColumnScaling features;
  ColumnScaling targets;

  friend bool operator==(const ScalingStats&, const ScalingStats&) = default;
};

/// Standardizes features and targets with `stats`, or with statistics fitted
/// on `fm` when none are supplied. Constant columns map to zero.
std::pair<FeatureMatrix, ScalingStats> standardize(const FeatureMatrix& fm,
                                                   const std::optional<ScalingStats>& stats = std::nullopt);
FeatureMatrix unstandardize(const FeatureMatrix& fm, const ScalingStats& stats);

// ---------------------------------------------------------------------------
// delimited export: `#FLUFEATURES v1 target=<name> spec=<spec>` then a header
// `origin,<features...>,y.h1,...` and one row per origin (17 significant digits).

void save_features(const FeatureMatrix& fm, std::ostream& out);
FeatureMatrix load_features(std::istream& in);
void save_features_file(const FeatureMatrix& fm, const std::string& path);
FeatureMatrix load_features_file(const std::string& path);

}  // namespace flucast
