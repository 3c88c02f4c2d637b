// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flucast/epi_week.hpp"
#include "flucast/features.hpp"
#include "flucast/metrics.hpp"
#include "flucast/msop.hpp"
#include "flucast/panel.hpp"
#include "flucast/regressor.hpp"

namespace flucast::cli {

/// Bad flag or config value; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // paths
  std::string csv;
  std::string panel;
  std::string out;
  std::string scenario;
  std::string features;
  std::string bundle;
  std::string report;
  std::string plot;
  std::string hemispheres;
  std::string hemispheres_out;

  ColumnMapping mapping;
  FeatureSpec spec;

  std::string target;
  std::vector<std::string> targets;
  ModelKind model = ModelKind::Lstm;
  std::vector<ModelKind> models{ModelKind::Lstm, ModelKind::Forest, ModelKind::Svr};
  ModelConfigs configs;

  std::optional<EpiWeek> test_from;
  MetricConfig metric;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds{0};
  std::size_t jobs = 1;
  std::string format;  // empty: the command's default
};

/// Every setting key, in canonical order. Keys double as long flag names
/// (`--lag-depth`) and config file keys (`lag-depth=52`).
const std::vector<std::string>& setting_keys();

/// Throws UsageError naming `source` (e.g. "--test-from" or "config line 3").
void apply_setting(RunConfig& config, std::string_view key, std::string_view value, std::string_view source);
std::string setting_value(const RunConfig& config, std::string_view key);
std::string setting_help(std::string_view key);

/// `key=value` lines, `#` comments. Unknown keys are usage errors.
std::vector<std::pair<std::string, std::string>> read_config_entries(std::istream& in, std::string_view origin);
RunConfig parse_run_config(std::istream& in, std::string_view origin = "config");
/// All keys in canonical order; parse_run_config reads it back to the same text.
void format_run_config(const RunConfig& config, std::ostream& out);

}  // namespace flucast::cli
