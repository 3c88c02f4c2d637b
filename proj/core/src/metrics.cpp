// SPDX-License-Identifier: Apache-2.0
#include "flucast/metrics.hpp"

#include <cmath>
#include <string>

#include "flucast/error.hpp"

namespace flucast {

void MetricConfig::validate() const {
  if (zero_policy == ZeroPolicy::Epsilon && !(epsilon > 0.0 && std::isfinite(epsilon))) {
    throw Error(ErrorCode::InvalidConfig, "MAPE epsilon must be finite and positive");
  }
}

namespace {
void check_lengths(std::size_t f, std::size_t a) {
  if (f != a || f == 0) {
    throw Error(ErrorCode::DimensionMismatch, "forecast/actual lengths " + std::to_string(f) + " and " +
                                                  std::to_string(a) + " must be equal and non-zero");
  }
}
}  // namespace

MapeResult mape(std::span<const double> forecast, std::span<const double> actual, const MetricConfig& config) {
  config.validate();
  check_lengths(forecast.size(), actual.size());
  MapeResult out;
  double sum = 0.0;
  for (std::size_t t = 0; t < actual.size(); ++t) {
    double denom;
    if (config.denominator == Denominator::Previous) {
      if (t == 0) {
        ++out.skipped;
        continue;
      }
      denom = actual[t - 1];
    } else {
      denom = actual[t];
    }
    if (denom == 0.0) {
      if (config.zero_policy == ZeroPolicy::Skip) {
        ++out.skipped;
        continue;
      }
      denom = config.epsilon;
    }
    sum += std::abs(forecast[t] - actual[t]) / std::abs(denom);
    ++out.n_evaluated;
  }
  if (out.n_evaluated == 0) throw Error(ErrorCode::AllPointsSkipped, "no point has a usable denominator");
  out.value = sum / static_cast<double>(out.n_evaluated);
  return out;
}

double rmse(std::span<const double> forecast, std::span<const double> actual) {
  check_lengths(forecast.size(), actual.size());
  double ss = 0.0;
  for (std::size_t t = 0; t < actual.size(); ++t) ss += (forecast[t] - actual[t]) * (forecast[t] - actual[t]);
  return std::sqrt(ss / static_cast<double>(actual.size()));
}

}  // namespace flucast
