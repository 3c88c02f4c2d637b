// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

namespace flucast {

/// Which actual value divides the absolute error: A_t (current) or A_{t-1}
/// (previous; the first point has no predecessor and is skipped).
enum class Denominator { Current, Previous };

/// What happens when the denominator is exactly zero.
enum class ZeroPolicy { Skip, Epsilon };

struct MetricConfig {
  Denominator denominator = Denominator::Current;
  ZeroPolicy zero_policy = ZeroPolicy::Skip;
  double epsilon = 1.0;  // replaces a zero denominator under ZeroPolicy::Epsilon

  void validate() const;
};

struct MapeResult {
  double value = 0.0;  // fraction, not percent
  std::size_t n_evaluated = 0;
  std::size_t skipped = 0;
};

/// Mean of |F_t - A_t| / D_t over evaluated points. Throws DimensionMismatch
/// on unequal or empty input and AllPointsSkipped when nothing is evaluated.
MapeResult mape(std::span<const double> forecast, std::span<const double> actual, const MetricConfig& config = {});

double rmse(std::span<const double> forecast, std::span<const double> actual);

}  // namespace flucast
