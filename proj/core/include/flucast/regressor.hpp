// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flucast/matrix.hpp"

namespace flucast {

namespace detail {
class ModelLoader;
}

enum class ModelKind { Lstm, Forest, Svr, NaiveLast, NaiveSeasonal };

/// "lstm", "rf", "svr", "naive", "seasonal52"
std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept;

/// Gradient-trained kinds get z-scored features and targets; trees and the
/// naive baselines see raw values.
bool uses_scaling(ModelKind kind) noexcept;

/// Uniform fit/predict contract. Column names travel with the matrix so that
/// models can locate named features and reject schema drift at predict time.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual ModelKind kind() const noexcept = 0;

  virtual void fit(const Matrix& x, const ColumnNames& columns, std::span<const double> y, std::uint64_t seed) = 0;

  /// Throws Error(SchemaMismatch) when `columns` differ from those seen in fit.
  virtual std::vector<double> predict(const Matrix& x, const ColumnNames& columns) const = 0;

  /// All learned parameters flattened in a fixed order; used for bit-level
  /// reproducibility checks.
  virtual std::vector<double> parameters() const = 0;

  virtual void save(std::ostream& out) const = 0;

  virtual std::unique_ptr<Regressor> clone() const = 0;
};

/// Reads any model written by Regressor::save.
std::unique_ptr<Regressor> load_regressor(std::istream& in);

}  // namespace flucast
