// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "flucast/comparison.hpp"

namespace flucast {

enum class ReportFormat { Table, Delimited, Json };

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept;

/// Delimited and JSON forms carry the columns
///   country, hemisphere, model, horizon, spatial, mape, rmse, n, skipped
/// in that order. The table form pivots models x {with, without} against
/// (country, step ahead).
void emit_report(const ForecastReport& report, ReportFormat format, std::ostream& out);

ForecastReport parse_delimited_report(std::istream& in);
ForecastReport parse_json_report(std::istream& in);

/// Tidy forecast-vs-actual rows:
///   country, model, spatial, horizon, origin, target_week, forecast, actual
void emit_plot_data(const std::vector<PlotPoint>& points, std::ostream& out);

}  // namespace flucast
