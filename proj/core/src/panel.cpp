// SPDX-License-Identifier: Apache-2.0
#include "flucast/panel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <set>

#include "flucast/delimited.hpp"
#include "flucast/error.hpp"

namespace flucast {

CountryPanel::CountryPanel(std::vector<std::string> countries, EpiWeek start, Matrix values,
                           std::vector<std::uint8_t> missing)
    : countries_(std::move(countries)), start_(start), values_(std::move(values)), missing_(std::move(missing)) {
  if (countries_.empty() || values_.cols() == 0) throw Error(ErrorCode::EmptyPanel, "panel has no countries or weeks");
  if (values_.rows() != countries_.size() || missing_.size() != values_.rows() * values_.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "panel values/mask do not match country and week counts");
  }
  std::set<std::string> seen;
  for (const auto& c : countries_) {
    if (!seen.insert(c).second) throw Error(ErrorCode::DuplicateCell, "duplicate country '" + c + "'");
  }
  for (std::size_t i = 0; i < values_.rows(); ++i) {
    for (std::size_t j = 0; j < values_.cols(); ++j) {
      if (missing_[i * values_.cols() + j]) {
        values_(i, j) = 0.0;
      } else if (!(values_(i, j) >= 0.0) || !std::isfinite(values_(i, j))) {
        throw Error(ErrorCode::NonFiniteInput, "negative or non-finite count for '" + countries_[i] + "' at " +
                                                   week_at(j).str());
      }
    }
  }
}

std::size_t CountryPanel::missing_count(std::size_t country) const {
  const auto first = missing_.begin() + static_cast<std::ptrdiff_t>(country * num_weeks());
  return static_cast<std::size_t>(std::count(first, first + static_cast<std::ptrdiff_t>(num_weeks()), 1));
}

std::optional<std::size_t> CountryPanel::index_of(const std::string& country) const {
  auto it = std::find(countries_.begin(), countries_.end(), country);
  if (it == countries_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - countries_.begin());
}

std::optional<std::size_t> CountryPanel::column_of(EpiWeek week) const {
  const auto d = EpiWeek::distance(start_, week);
  if (d < 0 || d >= static_cast<std::int64_t>(num_weeks())) return std::nullopt;
  return static_cast<std::size_t>(d);
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  const auto want = lower(trim(name));
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(trim(header[i])) == want) return i;
  }
  throw Error(ErrorCode::MalformedRow, "line 1: header has no column '" + name + "'");
}

}  // namespace

CountryPanel ingest_panel(std::istream& source, const ColumnMapping& mapping) {
  std::string line;
  std::vector<std::string> fields;
  std::size_t line_no = 0;

  // skip leading blank lines before the header
  while (std::getline(source, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw Error(ErrorCode::EmptyPanel, "no header row");
  if (!split_record(line, mapping.delimiter, fields)) {
    throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": unterminated quote");
  }
  const auto header = fields;
  const std::size_t c_country = find_column(header, mapping.country);
  const std::size_t c_year = find_column(header, mapping.year);
  const std::size_t c_week = find_column(header, mapping.week);
  const std::size_t c_count = find_column(header, mapping.count);
  const std::size_t needed = std::max({c_country, c_year, c_week, c_count}) + 1;

  struct Cell {
    std::optional<double> count;
    std::size_t line;
  };
  std::map<std::string, std::map<EpiWeek, Cell>> cells;
  std::optional<EpiWeek> min_week, max_week;

  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto where = "line " + std::to_string(line_no);
    if (!split_record(line, mapping.delimiter, fields)) {
      throw Error(ErrorCode::MalformedRow, where + ": unterminated quote");
    }
    if (fields.size() < needed) throw Error(ErrorCode::MalformedRow, where + ": too few fields");
    const std::string country{trim(fields[c_country])};
    long long year = 0, week = 0;
    if (country.empty()) throw Error(ErrorCode::MalformedRow, where + ": empty country");
    if (!parse_int(fields[c_year], year) || !parse_int(fields[c_week], week) || year < 1 || year > 9999 ||
        week < 1 || week > iso_weeks_in_year(static_cast<int>(year))) {
      throw Error(ErrorCode::MalformedRow, where + ": invalid year/week");
    }
    const EpiWeek ew(static_cast<int>(year), static_cast<int>(week));

    std::optional<double> count;
    double parsed = 0.0;
    if (parse_double(fields[c_count], parsed) && std::isfinite(parsed)) {
      if (parsed < 0.0) throw Error(ErrorCode::MalformedRow, where + ": negative count");
      count = parsed;
    }

    auto [it, inserted] = cells[country].emplace(ew, Cell{count, line_no});
    if (!inserted) {
      throw Error(ErrorCode::DuplicateCell, country + " " + ew.str() + " (lines " + std::to_string(it->second.line) +
                                                " and " + std::to_string(line_no) + ")");
    }
    if (!min_week || ew < *min_week) min_week = ew;
    if (!max_week || ew > *max_week) max_week = ew;
  }
  if (cells.empty()) throw Error(ErrorCode::EmptyPanel, "no data rows");

  const auto n_weeks = static_cast<std::size_t>(EpiWeek::distance(*min_week, *max_week) + 1);
  std::vector<std::string> countries;
  Matrix values(cells.size(), n_weeks);
  std::vector<std::uint8_t> missing(cells.size() * n_weeks, 1);
  std::size_t i = 0;
  for (const auto& [country, weeks] : cells) {
    countries.push_back(country);
    for (const auto& [ew, cell] : weeks) {
      if (!cell.count) continue;
      const auto j = static_cast<std::size_t>(EpiWeek::distance(*min_week, ew));
      values(i, j) = *cell.count;
      missing[i * n_weeks + j] = 0;
    }
    ++i;
  }
  return CountryPanel(std::move(countries), *min_week, std::move(values), std::move(missing));
}

PanelSelection select_complete_countries(const CountryPanel& panel) {
  PanelSelection sel;
  for (std::size_t i = 0; i < panel.num_countries(); ++i) {
    const auto n = panel.missing_count(i);
    if (n == 0) {
      sel.kept.push_back(panel.countries()[i]);
    } else {
      sel.dropped.emplace_back(panel.countries()[i], n);
    }
  }
  return sel;
}

CountryPanel slice_panel(const CountryPanel& panel, EpiWeek from, EpiWeek to) {
  const auto first = panel.column_of(from);
  const auto last = panel.column_of(to);
  if (!first || !last || *first > *last) {
    throw Error(ErrorCode::RangeOutOfBounds, "slice [" + from.str() + ", " + to.str() + "] outside panel [" +
                                                 panel.start().str() + ", " + panel.end().str() + "]");
  }
  const std::size_t width = *last - *first + 1;
  Matrix values(panel.num_countries(), width);
  std::vector<std::uint8_t> missing(panel.num_countries() * width);
  for (std::size_t i = 0; i < panel.num_countries(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      values(i, j) = panel.value(i, *first + j);
      missing[i * width + j] = panel.is_missing(i, *first + j) ? 1 : 0;
    }
  }
  return CountryPanel(panel.countries(), from, std::move(values), std::move(missing));
}

CountryPanel subset_countries(const CountryPanel& panel, const std::vector<std::string>& countries) {
  const std::size_t width = panel.num_weeks();
  Matrix values(countries.size(), width);
  std::vector<std::uint8_t> missing(countries.size() * width);
  for (std::size_t k = 0; k < countries.size(); ++k) {
    const auto i = panel.index_of(countries[k]);
    if (!i) throw Error(ErrorCode::UnknownCountry, "'" + countries[k] + "' is not in the panel");
    for (std::size_t j = 0; j < width; ++j) {
      values(k, j) = panel.value(*i, j);
      missing[k * width + j] = panel.is_missing(*i, j) ? 1 : 0;
    }
  }
  return CountryPanel(countries, panel.start(), std::move(values), std::move(missing));
}

}  // namespace flucast
