// SPDX-License-Identifier: Apache-2.0
#include "flucast/forest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "flucast/error.hpp"
#include "flucast/rng.hpp"
#include "model_text.hpp"

namespace flucast {

void ForestConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, "forest: " + msg); };
  if (n_trees < 1) fail("n_trees must be >= 1");
  if (min_leaf < 1) fail("min_leaf must be >= 1");
  if (const auto* frac = std::get_if<double>(&features_per_split)) {
    if (!(*frac > 0.0 && *frac <= 1.0)) fail("features_per_split fraction must be in (0, 1]");
  } else if (std::get<std::size_t>(features_per_split) == 0) {
    fail("features_per_split must be >= 1");
  }
}

std::size_t ForestConfig::resolve_features(std::size_t n_features) const {
  std::size_t k;
  if (const auto* frac = std::get_if<double>(&features_per_split)) {
    k = static_cast<std::size_t>(std::ceil(*frac * static_cast<double>(n_features) - 1e-9));
  } else {
    k = std::get<std::size_t>(features_per_split);
  }
  return std::clamp<std::size_t>(k, 1, n_features);
}

namespace {

struct Grower {
  const Matrix& x;
  std::span<const double> y;
  const ForestConfig& config;
  Rng rng;
  std::vector<RegressionTree::Node> nodes;
  std::vector<std::size_t> features;
  std::vector<std::pair<double, double>> sorted;  // (x, y) scratch

  std::size_t build(std::vector<std::size_t>& rows, std::size_t depth) {
    const std::size_t id = nodes.size();
    nodes.emplace_back();
    double sum = 0.0;
    for (auto r : rows) sum += y[r];
    const double n = static_cast<double>(rows.size());
    nodes[id].value = sum / n;

    const bool depth_ok = config.max_depth == 0 || depth < config.max_depth;
    if (!depth_ok || rows.size() < 2 * config.min_leaf) return id;
    bool constant = true;
    for (auto r : rows) {
      if (y[r] != y[rows.front()]) {
        constant = false;
        break;
      }
    }
    if (constant) return id;

    // partial Fisher-Yates draw of k distinct features, then ascending order
    const std::size_t k = config.resolve_features(x.cols());
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.index(features.size() - i);
      std::swap(features[i], features[j]);
    }
    std::vector<std::size_t> candidates(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(candidates.begin(), candidates.end());

    // maximize sumL^2/nL + sumR^2/nR, equivalent to maximal variance reduction
    const double parent_score = sum * sum / n;
    double best_score = parent_score;
    long best_feature = -1;
    double best_threshold = 0.0;
    const std::size_t m = rows.size();
    for (auto f : candidates) {
      sorted.resize(m);
      for (std::size_t i = 0; i < m; ++i) sorted[i] = {x(rows[i], f), y[rows[i]]};
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (sorted.front().first == sorted.back().first) continue;
      double left_sum = 0.0;
      for (std::size_t i = 1; i < m; ++i) {
        left_sum += sorted[i - 1].second;
        if (i < config.min_leaf || m - i < config.min_leaf) continue;
        const double a = sorted[i - 1].first, b = sorted[i].first;
        if (!(a < b)) continue;
        const double nl = static_cast<double>(i), nr = static_cast<double>(m - i);
        const double right_sum = sum - left_sum;
        const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
        // strict improvement keeps the lowest feature / lowest threshold on ties
        if (score > best_score + 1e-12 * std::abs(best_score)) {
          best_score = score;
          best_feature = static_cast<long>(f);
          double t = a + 0.5 * (b - a);
          if (!(t < b)) t = a;
          best_threshold = t;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      (x(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::size_t l = build(left, depth + 1);
    const std::size_t r = build(right, depth + 1);
    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }
};

}  // namespace

RegressionTree RegressionTree::grow(const Matrix& x, std::span<const double> y, std::vector<std::size_t> rows,
                                    const ForestConfig& config, std::uint64_t seed) {
  Grower g{x, y, config, Rng(seed), {}, {}, {}};
  g.features.resize(x.cols());
  for (std::size_t i = 0; i < x.cols(); ++i) g.features[i] = i;
  g.build(rows, 0);
  return RegressionTree(std::move(g.nodes));
}

double RegressionTree::predict(std::span<const double> features) const {
  std::size_t id = 0;
  while (nodes_[id].feature >= 0) {
    const auto& n = nodes_[id];
    id = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[id].value;
}

std::size_t RegressionTree::depth() const {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[id].feature >= 0) {
      stack.emplace_back(nodes_[id].left, d + 1);
      stack.emplace_back(nodes_[id].right, d + 1);
    }
  }
  return deepest;
}

ForestRegressor::ForestRegressor(ForestConfig config) : config_(config) { config_.validate(); }

void ForestRegressor::fit(const Matrix& x, const ColumnNames& columns, std::span<const double> y,
                          std::uint64_t seed) {
  config_.validate();
  if (columns.size() != x.cols()) throw Error(ErrorCode::DimensionMismatch, "column names do not match matrix");
  if (y.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "target length differs from row count");
  if (x.cols() == 0 || x.rows() < 2 * config_.min_leaf) {
    throw Error(ErrorCode::InsufficientData, std::to_string(x.rows()) + " rows; need at least " +
                                                 std::to_string(2 * config_.min_leaf));
  }
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite feature value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite target value");
  }
  config_.seed = seed;
  columns_ = columns;
  trees_.clear();
  const std::size_t n = x.rows();
  for (std::size_t t = 0; t < config_.n_trees; ++t) {
    const std::uint64_t tree_seed = derive_seed(seed, t);
    std::vector<std::size_t> rows(n);
    if (config_.bootstrap) {
      Rng boot(derive_seed(tree_seed, 0xB007));
      for (auto& r : rows) r = boot.index(n);
    } else {
      for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    }
    trees_.push_back(RegressionTree::grow(x, y, std::move(rows), config_, tree_seed));
  }
}

std::vector<double> ForestRegressor::predict(const Matrix& x, const ColumnNames& columns) const {
  if (trees_.empty()) throw Error(ErrorCode::ShapeMismatch, "forest has not been fitted");
  if (columns != columns_) throw Error(ErrorCode::SchemaMismatch, "feature columns differ from training schema");
  if (x.cols() != columns.size()) throw Error(ErrorCode::DimensionMismatch, "column names do not match matrix");
  std::vector<double> out(x.rows(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict(x.row(r));
    out[r] = sum / static_cast<double>(trees_.size());
  }
  return out;
}

std::vector<double> ForestRegressor::parameters() const {
  // per tree: node count, then (feature, threshold, left, right, value) per node
  std::vector<double> out;
  for (const auto& tree : trees_) {
    out.push_back(static_cast<double>(tree.nodes().size()));
    for (const auto& n : tree.nodes()) {
      out.push_back(static_cast<double>(n.feature));
      out.push_back(n.threshold);
      out.push_back(static_cast<double>(n.left));
      out.push_back(static_cast<double>(n.right));
      out.push_back(n.value);
    }
  }
  return out;
}

void ForestRegressor::save(std::ostream& out) const {
  std::string fps;
  if (const auto* frac = std::get_if<double>(&config_.features_per_split)) {
    fps = "fraction:" + format_double(*frac);
  } else {
    fps = "count:" + std::to_string(std::get<std::size_t>(config_.features_per_split));
  }
  detail::write_model(out, to_string(kind()),
                      {{"n_trees", std::to_string(config_.n_trees)},
                       {"max_depth", std::to_string(config_.max_depth)},
                       {"min_leaf", std::to_string(config_.min_leaf)},
                       {"features_per_split", fps},
                       {"bootstrap", config_.bootstrap ? "1" : "0"},
                       {"seed", std::to_string(config_.seed)},
                       {"columns", detail::encode_columns(columns_)}},
                      parameters());
}

ForestRegressor fit_forest(const ForestConfig& config, const Matrix& x, const ColumnNames& columns,
                           std::span<const double> y) {
  ForestRegressor model(config);
  model.fit(x, columns, y, config.seed);
  return model;
}

}  // namespace flucast
