// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "flucast/matrix.hpp"
#include "flucast/regressor.hpp"

namespace flucast {

/// Candidate features per split: an absolute count, or a fraction of all
/// features (rounded up, at least one).
using FeaturesPerSplit = std::variant<std::size_t, double>;

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 12;  // 0 = unlimited
  std::size_t min_leaf = 2;
  FeaturesPerSplit features_per_split = 1.0 / 3.0;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t resolve_features(std::size_t n_features) const;
};

/// CART regression tree grown by variance reduction.
class RegressionTree {
 public:
  struct Node {
    long feature = -1;  // -1 for leaves
    double threshold = 0.0;  // go left when x[feature] <= threshold
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0.0;  // mean target of the node's rows
  };

  RegressionTree() = default;
  explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  /// Grows a tree on `rows` (indices into x, repeats allowed).
  static RegressionTree grow(const Matrix& x, std::span<const double> y, std::vector<std::size_t> rows,
                             const ForestConfig& config, std::uint64_t seed);

  double predict(std::span<const double> features) const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<Node> nodes_;
};

class ForestRegressor final : public Regressor {
 public:
  explicit ForestRegressor(ForestConfig config = {});

  ModelKind kind() const noexcept override { return ModelKind::Forest; }
  void fit(const Matrix& x, const ColumnNames& columns, std::span<const double> y, std::uint64_t seed) override;
  std::vector<double> predict(const Matrix& x, const ColumnNames& columns) const override;
  std::vector<double> parameters() const override;
  void save(std::ostream& out) const override;
  std::unique_ptr<Regressor> clone() const override { return std::make_unique<ForestRegressor>(*this); }

  const ForestConfig& config() const noexcept { return config_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

 private:
  friend class detail::ModelLoader;

  ForestConfig config_;
  ColumnNames columns_;
  std::vector<RegressionTree> trees_;
};

ForestRegressor fit_forest(const ForestConfig& config, const Matrix& x, const ColumnNames& columns,
                           std::span<const double> y);

}  // namespace flucast
