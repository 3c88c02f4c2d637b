// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flucast/epi_week.hpp"
#include "flucast/matrix.hpp"

namespace flucast {

/// Aligned weekly case counts, countries x contiguous epi-weeks, with a
/// missingness mask. Immutable once constructed.
class CountryPanel {
 public:
  CountryPanel() = default;

  /// Validates shape, uniqueness of country ids, and non-negativity of
  /// observed cells. Values under the mask are normalized to zero.
  CountryPanel(std::vector<std::string> countries, EpiWeek start, Matrix values,
               std::vector<std::uint8_t> missing);

  const std::vector<std::string>& countries() const noexcept { return countries_; }
  std::size_t num_countries() const noexcept { return countries_.size(); }
  std::size_t num_weeks() const noexcept { return values_.cols(); }
  EpiWeek start() const noexcept { return start_; }
  EpiWeek end() const { return start_.plus(static_cast<std::int64_t>(num_weeks()) - 1); }

  const Matrix& values() const noexcept { return values_; }
  double value(std::size_t country, std::size_t week) const { return values_(country, week); }
  bool is_missing(std::size_t country, std::size_t week) const {
    return missing_[country * num_weeks() + week] != 0;
  }
  const std::vector<std::uint8_t>& missing_mask() const noexcept { return missing_; }
  std::size_t missing_count(std::size_t country) const;

  std::optional<std::size_t> index_of(const std::string& country) const;
  EpiWeek week_at(std::size_t column) const { return start_.plus(static_cast<std::int64_t>(column)); }
  /// Column of `week`, or nullopt when outside [start, end].
  std::optional<std::size_t> column_of(EpiWeek week) const;

  friend bool operator==(const CountryPanel&, const CountryPanel&) = default;

 private:
  std::vector<std::string> countries_;
  EpiWeek start_;
  Matrix values_;
  std::vector<std::uint8_t> missing_;
};

/// Which source columns hold the fields the panel needs. Defaults match the
/// FluNet CSV export headers; header matching is case-insensitive and extra
/// columns are ignored.
struct ColumnMapping {
  std::string country = "Country";
  std::string year = "Year";
  std::string week = "Week";
  std::string count = "ALL_INF";  // total influenza-positive specimens
  char delimiter = ',';
};

struct PanelSelection {
  std::vector<std::string> kept;
  std::vector<std::pair<std::string, std::size_t>> dropped;  // (country, missing weeks)
};

/// Reads delimited text with a header row. Countries are ordered
/// lexicographically so that row order in the source does not matter.
CountryPanel ingest_panel(std::istream& source, const ColumnMapping& mapping = {});

PanelSelection select_complete_countries(const CountryPanel& panel);

CountryPanel slice_panel(const CountryPanel& panel, EpiWeek from, EpiWeek to);

/// Sub-panel restricted to `countries`, in the order given.
CountryPanel subset_countries(const CountryPanel& panel, const std::vector<std::string>& countries);

/// `FLUPANEL v1` text container.
void save_panel(const CountryPanel& panel, std::ostream& out);
CountryPanel load_panel(std::istream& in);

void save_panel_file(const CountryPanel& panel, const std::string& path);
CountryPanel load_panel_file(const std::string& path);

}  // namespace flucast
