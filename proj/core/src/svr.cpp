// SPDX-License-Identifier: Apache-2.0
#include "flucast/svr.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "flucast/error.hpp"
#include "flucast/rng.hpp"
#include "model_text.hpp"

namespace flucast {

void SvrConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, "svr: " + msg); };
  if (!(epsilon >= 0.0)) fail("epsilon must be >= 0");
  if (!(c > 0.0)) fail("c must be > 0");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
}

double svr_loss_subgradient(double residual, double epsilon) noexcept {
  if (residual > epsilon) return 1.0;
  if (residual < -epsilon) return -1.0;
  return 0.0;
}

double svr_objective(std::span<const double> weights, double bias, const Matrix& x, std::span<const double> y,
                     const SvrConfig& config) {
  double data = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double pred = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) pred += weights[k] * row[k];
    data += std::max(0.0, std::abs(pred - y[r]) - config.epsilon);
  }
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return config.c * data + 0.5 * reg;
}

SvrRegressor::SvrRegressor(SvrConfig config) : config_(config) { config_.validate(); }

void SvrRegressor::fit(const Matrix& x, const ColumnNames& columns, std::span<const double> y, std::uint64_t seed) {
  config_.validate();
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (columns.size() != d) throw Error(ErrorCode::DimensionMismatch, "column names do not match matrix");
  if (y.size() != n) throw Error(ErrorCode::DimensionMismatch, "target length differs from row count");
  if (n == 0) throw Error(ErrorCode::InsufficientData, "svr needs at least one row");
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite feature value");
  }
  config_.seed = seed;
  columns_ = columns;
  objective_trace_.clear();

  // Each epoch's iterates are averaged; the model kept is the best such
  // average seen so far, since subgradient steps need not descend.
  std::vector<double> w(d, 0.0), avg_w(d, 0.0), best_w(d, 0.0);
  double b = 0.0, avg_b = 0.0, best_b = 0.0;
  double best_objective = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    const double step = config_.learning_rate / std::sqrt(static_cast<double>(epoch + 1));
    rng.shuffle(order);
    std::fill(avg_w.begin(), avg_w.end(), 0.0);
    avg_b = 0.0;
    for (auto r : order) {
      const auto row = x.row(r);
      double pred = b;
      for (std::size_t k = 0; k < d; ++k) pred += w[k] * row[k];
      const double s = config_.c * svr_loss_subgradient(pred - y[r], config_.epsilon);
      for (std::size_t k = 0; k < d; ++k) w[k] -= step * (s * row[k] + w[k] * inv_n);
      b -= step * s;
      for (std::size_t k = 0; k < d; ++k) avg_w[k] += w[k];
      avg_b += b;
    }
    for (auto& v : avg_w) v *= inv_n;
    avg_b *= inv_n;
    const double objective = svr_objective(avg_w, avg_b, x, y, config_);
    if (!std::isfinite(objective)) {
      throw Error(ErrorCode::DivergedTraining, "non-finite SVR objective at epoch " + std::to_string(epoch + 1));
    }
    if (objective < best_objective) {
      best_objective = objective;
      best_w = avg_w;
      best_b = avg_b;
    }
    objective_trace_.push_back(best_objective);
  }
  weights_ = std::move(best_w);
  bias_ = best_b;
}

std::vector<double> SvrRegressor::predict(const Matrix& x, const ColumnNames& columns) const {
  if (columns != columns_) throw Error(ErrorCode::SchemaMismatch, "feature columns differ from training schema");
  if (x.cols() != weights_.size()) throw Error(ErrorCode::DimensionMismatch, "column count differs from weights");
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double pred = bias_;
    for (std::size_t k = 0; k < weights_.size(); ++k) pred += weights_[k] * row[k];
    out[r] = pred;
  }
  return out;
}

std::vector<double> SvrRegressor::parameters() const {
  std::vector<double> out = weights_;
  out.push_back(bias_);
  return out;
}

void SvrRegressor::save(std::ostream& out) const {
  detail::write_model(out, to_string(kind()),
                      {{"epsilon", format_double(config_.epsilon)},
                       {"c", format_double(config_.c)},
                       {"epochs", std::to_string(config_.epochs)},
                       {"learning_rate", format_double(config_.learning_rate)},
                       {"seed", std::to_string(config_.seed)},
                       {"columns", detail::encode_columns(columns_)}},
                      parameters());
}

SvrRegressor fit_svr(const SvrConfig& config, const Matrix& x, const ColumnNames& columns,
                     std::span<const double> y) {
  SvrRegressor model(config);
  model.fit(x, columns, y, config.seed);
  return model;
}

}  // namespace flucast
