// SPDX-License-Identifier: Apache-2.0
#include "flucast/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "flucast/delimited.hpp"
#include "flucast/error.hpp"

namespace flucast {

std::string_view to_string(RollingStat stat) noexcept {
  switch (stat) {
    case RollingStat::Mean: return "mean";
    case RollingStat::Median: return "median";
    case RollingStat::Std: return "std";
    case RollingStat::Max: return "max";
    case RollingStat::Min: return "min";
  }
  return "?";
}

std::optional<RollingStat> parse_rolling_stat(std::string_view text) noexcept {
  for (auto s : {RollingStat::Mean, RollingStat::Median, RollingStat::Std, RollingStat::Max, RollingStat::Min}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

void FeatureSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (lag_depth == 0) fail("lag_depth must be positive");
  if (horizons.empty()) fail("at least one horizon is required");
  if (std::set<std::size_t>(horizons.begin(), horizons.end()).size() != horizons.size()) fail("horizons repeat");
  if (std::set<std::size_t>(windows.begin(), windows.end()).size() != windows.size()) fail("windows repeat");
  if (std::set<RollingStat>(stats.begin(), stats.end()).size() != stats.size()) fail("stats repeat");
  for (auto h : horizons) {
    if (h == 0) fail("horizons must be positive");
  }
  for (auto w : windows) {
    if (w == 0) fail("windows must be positive");
    if (w > lag_depth) fail("window " + std::to_string(w) + " exceeds lag_depth " + std::to_string(lag_depth));
  }
}

std::size_t FeatureSpec::max_horizon() const {
  return horizons.empty() ? 0 : *std::max_element(horizons.begin(), horizons.end());
}

namespace {

template <typename T, typename F>
std::string join_mapped(const std::vector<T>& items, F&& fn) {
  std::vector<std::string> parts;
  for (const auto& it : items) parts.push_back(fn(it));
  return join(parts, ",");
}

std::vector<std::size_t> parse_sizes(const std::string& text, const std::string& key) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) {
    long long v = 0;
    if (!parse_int(part, v) || v < 0) throw Error(ErrorCode::InvalidConfig, "bad " + key + " entry '" + part + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

bool parse_flag(const std::string& text, const std::string& key) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw Error(ErrorCode::InvalidConfig, "bad " + key + " value '" + text + "'");
}

}  // namespace

std::string format_spec(const FeatureSpec& spec) {
  auto num = [](std::size_t v) { return std::to_string(v); };
  return "lag_depth=" + std::to_string(spec.lag_depth) + ";windows=" + join_mapped(spec.windows, num) +
         ";stats=" + join_mapped(spec.stats, [](RollingStat s) { return std::string(to_string(s)); }) +
         ";diff=" + (spec.include_first_diff ? "1" : "0") + ";spatial=" + (spec.spatial ? "1" : "0") +
         ";horizons=" + join_mapped(spec.horizons, num);
}

FeatureSpec parse_spec(std::string_view text) {
  FeatureSpec spec;
  std::set<std::string> seen;
  for (const auto& item : split(trim(text), ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "bad spec item '" + item + "'");
    const auto key = item.substr(0, eq);
    const auto val = item.substr(eq + 1);
    seen.insert(key);
    if (key == "lag_depth") {
      long long v = 0;
      if (!parse_int(val, v) || v <= 0) throw Error(ErrorCode::InvalidConfig, "bad lag_depth '" + val + "'");
      spec.lag_depth = static_cast<std::size_t>(v);
    } else if (key == "windows") {
      spec.windows = parse_sizes(val, key);
    } else if (key == "stats") {
      spec.stats.clear();
      if (!val.empty()) {
        for (const auto& s : split(val, ',')) {
          auto stat = parse_rolling_stat(s);
          if (!stat) throw Error(ErrorCode::InvalidConfig, "unknown stat '" + s + "'");
          spec.stats.push_back(*stat);
        }
      }
    } else if (key == "diff") {
      spec.include_first_diff = parse_flag(val, key);
    } else if (key == "spatial") {
      spec.spatial = parse_flag(val, key);
    } else if (key == "horizons") {
      spec.horizons = parse_sizes(val, key);
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown spec key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

std::size_t expected_column_count(const FeatureSpec& spec, std::size_t n_countries) {
  std::size_t n = spec.lag_depth;
  if (spec.include_first_diff) n += spec.lag_depth - 1;
  n += spec.windows.size() * spec.stats.size();
  if (spec.spatial && n_countries > 0) n += (n_countries - 1) * spec.lag_depth;
  return n;
}

std::string lag_name(std::size_t k) { return "t.lag." + std::to_string(k); }
std::string diff_name(std::size_t k) { return "t.diff." + std::to_string(k); }
std::string rolling_name(std::size_t window, RollingStat stat) {
  return "t.w" + std::to_string(window) + "." + std::string(to_string(stat));
}
std::string spatial_lag_name(std::string_view country, std::size_t k) {
  return "s." + std::string(country) + ".lag." + std::to_string(k);
}
std::string target_name(std::size_t horizon) { return "y.h" + std::to_string(horizon); }

double rolling_statistic(std::span<const double> window, RollingStat stat) {
  const auto n = window.size();
  switch (stat) {
    case RollingStat::Mean: {
      double sum = 0.0;
      for (double v : window) sum += v;
      return sum / static_cast<double>(n);
    }
    case RollingStat::Std: {
      double sum = 0.0;
      for (double v : window) sum += v;
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (double v : window) ss += (v - mean) * (v - mean);
      return std::sqrt(ss / static_cast<double>(n));
    }
    case RollingStat::Max: return *std::max_element(window.begin(), window.end());
    case RollingStat::Min: return *std::min_element(window.begin(), window.end());
    case RollingStat::Median: {
      std::vector<double> buf(window.begin(), window.end());
      const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(n / 2);
      std::nth_element(buf.begin(), mid, buf.end());
      const double upper = *mid;
      if (n % 2 == 1) return upper;
      const double lower = *std::max_element(buf.begin(), mid);
      return 0.5 * (lower + upper);
    }
  }
  return 0.0;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.target_country = target_country;
  out.spec = spec;
  out.feature_names = feature_names;
  for (auto r : rows) out.origins.push_back(origins[r]);
  out.x = x.select_rows(rows);
  out.y = y.select_rows(rows);
  return out;
}

std::optional<std::size_t> FeatureMatrix::column(std::string_view name) const {
  auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names.begin());
}

FeatureMatrix build_features(const CountryPanel& panel, const std::string& target, const FeatureSpec& spec) {
  spec.validate();
  const auto target_idx = panel.index_of(target);
  if (!target_idx) throw Error(ErrorCode::UnknownCountry, "'" + target + "' is not in the panel");

  std::vector<std::size_t> others;
  if (spec.spatial) {
    for (std::size_t i = 0; i < panel.num_countries(); ++i) {
      if (i != *target_idx) others.push_back(i);
    }
  }
  std::vector<std::size_t> used{*target_idx};
  used.insert(used.end(), others.begin(), others.end());
  for (auto i : used) {
    if (panel.missing_count(i) > 0) {
      throw Error(ErrorCode::MissingDataInScope, "'" + panel.countries()[i] + "' has " +
                                                     std::to_string(panel.missing_count(i)) + " missing weeks");
    }
  }

  const std::size_t L = spec.lag_depth;
  const std::size_t H = spec.max_horizon();
  const std::size_t n = panel.num_weeks();
  if (n < L + H) {
    throw Error(ErrorCode::InsufficientHistory, "panel has " + std::to_string(n) + " weeks; need at least " +
                                                    std::to_string(L + H));
  }

  FeatureMatrix fm;
  fm.target_country = target;
  fm.spec = spec;

  auto& names = fm.feature_names;
  for (std::size_t k = 0; k < L; ++k) names.push_back(lag_name(k));
  if (spec.include_first_diff) {
    for (std::size_t k = 0; k + 1 < L; ++k) names.push_back(diff_name(k));
  }
  for (auto w : spec.windows) {
    for (auto s : spec.stats) names.push_back(rolling_name(w, s));
  }
  for (auto c : others) {
    for (std::size_t k = 0; k < L; ++k) names.push_back(spatial_lag_name(panel.countries()[c], k));
  }

  const std::size_t first = L - 1;
  const std::size_t last = n - 1 - H;
  const std::size_t rows = last - first + 1;
  fm.x = Matrix(rows, names.size());
  fm.y = Matrix(rows, spec.horizons.size());

  const auto series = panel.values().row(*target_idx);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = first + r;
    fm.origins.push_back(panel.week_at(t));
    auto out = fm.x.row(r);
    std::size_t col = 0;
    for (std::size_t k = 0; k < L; ++k) out[col++] = series[t - k];
    if (spec.include_first_diff) {
      for (std::size_t k = 0; k + 1 < L; ++k) out[col++] = series[t - k] - series[t - k - 1];
    }
    for (auto w : spec.windows) {
      const auto window = series.subspan(t + 1 - w, w);
      for (auto s : spec.stats) out[col++] = rolling_statistic(window, s);
    }
    for (auto c : others) {
      const auto other = panel.values().row(c);
      for (std::size_t k = 0; k < L; ++k) out[col++] = other[t - k];
    }
    for (std::size_t j = 0; j < spec.horizons.size(); ++j) fm.y(r, j) = series[t + spec.horizons[j]];
  }
  return fm;
}

std::pair<FeatureMatrix, FeatureMatrix> split_walk_forward(const FeatureMatrix& fm, EpiWeek test_from) {
  std::vector<std::size_t> train, test;
  for (std::size_t r = 0; r < fm.rows(); ++r) (fm.origins[r] < test_from ? train : test).push_back(r);
  if (train.empty() || test.empty()) {
    throw Error(ErrorCode::EmptySplit, "split at " + test_from.str() + " leaves " + std::to_string(train.size()) +
                                           " train / " + std::to_string(test.size()) + " test rows");
  }
  return {fm.select_rows(train), fm.select_rows(test)};
}

}  // namespace flucast
