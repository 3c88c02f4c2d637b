// SPDX-License-Identifier: Apache-2.0
#include "flucast/baselines.hpp"

#include <algorithm>
#include <ostream>

#include "flucast/error.hpp"
#include "model_text.hpp"

namespace flucast {

NaiveRegressor::NaiveRegressor(ModelKind kind) : kind_(kind) {
  if (kind == ModelKind::NaiveLast) {
    source_ = "t.lag.0";
  } else if (kind == ModelKind::NaiveSeasonal) {
    source_ = "t.lag.51";
  } else {
    throw Error(ErrorCode::InvalidConfig, "not a naive model kind: " + std::string(to_string(kind)));
  }
}

void NaiveRegressor::fit(const Matrix& x, const ColumnNames& columns, std::span<const double> y, std::uint64_t) {
  if (columns.size() != x.cols()) throw Error(ErrorCode::DimensionMismatch, "column names do not match matrix");
  if (y.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "target length differs from row count");
  auto it = std::find(columns.begin(), columns.end(), source_);
  if (it == columns.end()) throw Error(ErrorCode::MissingFeatureColumn, "baseline needs column " + source_);
  index_ = static_cast<std::size_t>(it - columns.begin());
  columns_ = columns;
}

std::vector<double> NaiveRegressor::predict(const Matrix& x, const ColumnNames& columns) const {
  if (columns_.empty()) {
    // unfitted baselines still work on any schema carrying the source column
    auto it = std::find(columns.begin(), columns.end(), source_);
    if (it == columns.end()) throw Error(ErrorCode::MissingFeatureColumn, "baseline needs column " + source_);
    return x.col(static_cast<std::size_t>(it - columns.begin()));
  }
  if (columns != columns_) throw Error(ErrorCode::SchemaMismatch, "feature columns differ from training schema");
  return x.col(index_);
}

void NaiveRegressor::save(std::ostream& out) const {
  detail::write_model(out, to_string(kind_), {{"columns", detail::encode_columns(columns_)}}, {});
}

std::unique_ptr<Regressor> naive_baseline(ModelKind kind) { return std::make_unique<NaiveRegressor>(kind); }

}  // namespace flucast
