// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flucast/matrix.hpp"
#include "flucast/regressor.hpp"

namespace flucast {

/// Linear epsilon-insensitive regression trained by stochastic subgradient
/// descent on  C * sum_i max(0, |w.x_i + b - y_i| - epsilon) + 0.5 * |w|^2.
struct SvrConfig {
  double epsilon = 0.1;
  double c = 1.0;
  std::size_t epochs = 100;
  double learning_rate = 0.01;  // step in epoch e is learning_rate / sqrt(e + 1)
  std::uint64_t seed = 0;

  void validate() const;
};

/// d/dr of max(0, |r| - epsilon): zero inside the tube, sign(r) outside.
double svr_loss_subgradient(double residual, double epsilon) noexcept;

double svr_objective(std::span<const double> weights, double bias, const Matrix& x, std::span<const double> y,
                     const SvrConfig& config);

class SvrRegressor final : public Regressor {
 public:
  explicit SvrRegressor(SvrConfig config = {});

  ModelKind kind() const noexcept override { return ModelKind::Svr; }
  void fit(const Matrix& x, const ColumnNames& columns, std::span<const double> y, std::uint64_t seed) override;
  std::vector<double> predict(const Matrix& x, const ColumnNames& columns) const override;
  std::vector<double> parameters() const override;
  void save(std::ostream& out) const override;
  std::unique_ptr<Regressor> clone() const override { return std::make_unique<SvrRegressor>(*this); }

  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  /// Objective of each epoch's averaged iterate.
  const std::vector<double>& objective_trace() const noexcept { return objective_trace_; }

 private:
  friend class detail::ModelLoader;

  SvrConfig config_;
  ColumnNames columns_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::vector<double> objective_trace_;
};

SvrRegressor fit_svr(const SvrConfig& config, const Matrix& x, const ColumnNames& columns,
                     std::span<const double> y);

}  // namespace flucast
