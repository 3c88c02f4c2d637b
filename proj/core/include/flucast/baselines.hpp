// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "flucast/regressor.hpp"

namespace flucast {

/// Persistence (`t.lag.0`) and same-week-last-year (`t.lag.51`) forecasts.
/// Fitting only resolves the column; targets are ignored.
class NaiveRegressor final : public Regressor {
 public:
  explicit NaiveRegressor(ModelKind kind);

  ModelKind kind() const noexcept override { return kind_; }
  void fit(const Matrix& x, const ColumnNames& columns, std::span<const double> y, std::uint64_t seed) override;
  std::vector<double> predict(const Matrix& x, const ColumnNames& columns) const override;
  std::vector<double> parameters() const override { return {}; }
  void save(std::ostream& out) const override;
  std::unique_ptr<Regressor> clone() const override { return std::make_unique<NaiveRegressor>(*this); }

  /// Name of the feature column this baseline echoes.
  const std::string& source_column() const noexcept { return source_; }

 private:
  friend class detail::ModelLoader;

  ModelKind kind_;
  std::string source_;
  ColumnNames columns_;
  std::size_t index_ = 0;
};

/// Throws Error(InvalidConfig) unless kind is NaiveLast or NaiveSeasonal.
std::unique_ptr<Regressor> naive_baseline(ModelKind kind);

}  // namespace flucast
