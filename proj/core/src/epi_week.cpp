// SPDX-License-Identifier: Apache-2.0
#include "flucast/epi_week.hpp"

#include <chrono>
#include <cstdio>

#include "flucast/error.hpp"

namespace flucast {

namespace {

using std::chrono::days;
using std::chrono::sys_days;

// Monday of ISO week 1: the week containing January 4th.
sys_days iso_year_start(int year) {
  const sys_days jan4{std::chrono::year{year} / std::chrono::January / 4};
  const unsigned iso_dow = std::chrono::weekday{jan4}.iso_encoding();  // Mon=1..Sun=7
  return jan4 - days{iso_dow - 1};
}

// 1970-01-01 is a Thursday; ordinals count weeks from Monday 1969-12-29.
constexpr std::int64_t kEpochMondayOffset = 3;

std::int64_t ordinal(int year, int week) {
  const sys_days monday = iso_year_start(year) + days{7 * (week - 1)};
  return (monday.time_since_epoch().count() + kEpochMondayOffset) / 7;
}

EpiWeek from_ordinal(std::int64_t ord) {
  const sys_days monday{days{ord * 7 - kEpochMondayOffset}};
  // The Thursday of an ISO week always lies in its ISO year.
  const std::chrono::year_month_day thursday{monday + days{3}};
  const int year = static_cast<int>(thursday.year());
  const auto offset = (monday - iso_year_start(year)).count();
  return EpiWeek(year, static_cast<int>(offset / 7) + 1);
}

}  // namespace

int iso_weeks_in_year(int year) noexcept {
  return static_cast<int>((iso_year_start(year + 1) - iso_year_start(year)).count() / 7);
}

EpiWeek::EpiWeek(int year, int week) : year_(year), week_(week) {
  if (year < 1 || year > 9999 || week < 1 || week > iso_weeks_in_year(year)) {
    throw Error(ErrorCode::RangeOutOfBounds,
                "invalid ISO week " + std::to_string(year) + "-W" + std::to_string(week));
  }
}

EpiWeek EpiWeek::succ() const { return plus(1); }
EpiWeek EpiWeek::pred() const { return plus(-1); }

EpiWeek EpiWeek::plus(std::int64_t weeks) const {
  if (weeks > 0 && week_ + weeks <= 52) return EpiWeek(year_, week_ + static_cast<int>(weeks));
  return from_ordinal(ordinal(year_, week_) + weeks);
}

std::int64_t EpiWeek::distance(EpiWeek from, EpiWeek to) noexcept {
  return ordinal(to.year_, to.week_) - ordinal(from.year_, from.week_);
}

std::string EpiWeek::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-W%02d", year_, week_);
  return buf;
}

std::optional<EpiWeek> EpiWeek::parse(std::string_view text) {
  if (text.size() < 6 || text.size() > 8) return std::nullopt;
  int year = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (text[i] < '0' || text[i] > '9') return std::nullopt;
    year = year * 10 + (text[i] - '0');
  }
  std::size_t pos = 4;
  if (text[pos] == '-') ++pos;
  if (pos >= text.size() || text[pos] != 'W') return std::nullopt;
  ++pos;
  const std::size_t digits = text.size() - pos;
  if (digits < 1 || digits > 2) return std::nullopt;
  int week = 0;
  for (; pos < text.size(); ++pos) {
    if (text[pos] < '0' || text[pos] > '9') return std::nullopt;
    week = week * 10 + (text[pos] - '0');
  }
  if (year < 1 || week < 1 || week > iso_weeks_in_year(year)) return std::nullopt;
  return EpiWeek(year, week);
}

EpiWeek EpiWeek::from_string(std::string_view text) {
  auto parsed = parse(text);
  if (!parsed) throw Error(ErrorCode::RangeOutOfBounds, "invalid epi-week '" + std::string(text) + "'");
  return *parsed;
}

}  // namespace flucast
