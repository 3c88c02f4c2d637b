// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "flucast/error.hpp"
#include "flucast/features.hpp"

namespace flucast {

ColumnScaling fit_columns(const Matrix& m) {
  ColumnScaling s;
  s.mean.assign(m.cols(), 0.0);
  s.stddev.assign(m.cols(), 0.0);
  if (m.rows() == 0) return s;
  const double n = static_cast<double>(m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) sum += m(r, c);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) ss += (m(r, c) - mean) * (m(r, c) - mean);
    s.mean[c] = mean;
    s.stddev[c] = std::sqrt(ss / n);
  }
  return s;
}

double ColumnScaling::apply(double v, std::size_t col) const {
  return stddev[col] > 0.0 ? (v - mean[col]) / stddev[col] : 0.0;
}

double ColumnScaling::invert(double z, std::size_t col) const { return mean[col] + z * stddev[col]; }

void ColumnScaling::apply(Matrix& m) const {
  if (m.cols() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "scaling has " + std::to_string(mean.size()) + " columns, matrix has " +
                                                  std::to_string(m.cols()));
  }
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = apply(m(r, c), c);
}

void ColumnScaling::invert(Matrix& m) const {
  if (m.cols() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "scaling has " + std::to_string(mean.size()) + " columns, matrix has " +
                                                  std::to_string(m.cols()));
  }
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = invert(m(r, c), c);
}

std::pair<FeatureMatrix, ScalingStats> standardize(const FeatureMatrix& fm, const std::optional<ScalingStats>& stats) {
  ScalingStats used;
  if (stats) {
    if (stats->features.mean.size() != fm.x.cols() || stats->targets.mean.size() != fm.y.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "scaling stats do not match feature matrix columns");
    }
    used = *stats;
  } else {
    used.features = fit_columns(fm.x);
    used.targets = fit_columns(fm.y);
  }
  FeatureMatrix out = fm;
  used.features.apply(out.x);
  used.targets.apply(out.y);
  return {std::move(out), std::move(used)};
}

FeatureMatrix unstandardize(const FeatureMatrix& fm, const ScalingStats& stats) {
  FeatureMatrix out = fm;
  stats.features.invert(out.x);
  stats.targets.invert(out.y);
  return out;
}

}  // namespace flucast
