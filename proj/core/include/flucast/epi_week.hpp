// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace flucast {

/// ISO-8601 (year, week) coordinate. FluNet week numbers are ISO weeks.
class EpiWeek {
 public:
  EpiWeek() = default;

  /// Throws Error(RangeOutOfBounds) unless week is valid for the ISO year.
  EpiWeek(int year, int week);

  int year() const noexcept { return year_; }
  int week() const noexcept { return week_; }

  EpiWeek succ() const;
  EpiWeek pred() const;
  EpiWeek plus(std::int64_t weeks) const;

  /// Signed number of weeks from `from` to `to` (to - from).
  static std::int64_t distance(EpiWeek from, EpiWeek to) noexcept;

  /// Canonical `YYYY-Www` form.
  std::string str() const;

  /// Accepts `YYYY-Www`, `YYYYWww`, `YYYY-Ww` and `YYYYWw`.
  static std::optional<EpiWeek> parse(std::string_view text);

  /// Like parse() but throws Error(RangeOutOfBounds) on bad input.
  static EpiWeek from_string(std::string_view text);

  friend auto operator<=>(const EpiWeek&, const EpiWeek&) = default;
  friend bool operator==(const EpiWeek&, const EpiWeek&) = default;

 private:
  int year_ = 1970;
  int week_ = 1;
};

/// Number of ISO weeks (52 or 53) in the given ISO year.
int iso_weeks_in_year(int year) noexcept;

}  // namespace flucast
