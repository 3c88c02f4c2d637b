// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flucast/comparison.hpp"
#include "flucast/error.hpp"
#include "flucast/forest.hpp"
#include "test_support.hpp"

using namespace flucast;

namespace {

ColumnNames names(std::size_t n) {
  ColumnNames c;
  for (std::size_t i = 0; i < n; ++i) c.push_back("f" + std::to_string(i));
  return c;
}

double train_mse(const Regressor& m, const Matrix& x, const std::vector<double>& y) {
  const auto p = m.predict(x, names(x.cols()));
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (p[i] - y[i]) * (p[i] - y[i]);
  return s / static_cast<double>(y.size());
}

}  // namespace

TEST(Forest, ConstantTargetPredictsConstantExactly) {
  Rng rng(1);
  Matrix x(30, 3);
  for (auto& v : x.values()) v = rng.normal();
  const std::vector<double> y(30, 4.25);
  ForestConfig cfg;
  cfg.n_trees = 10;
  const auto f = fit_forest(cfg, x, names(3), y);
  Matrix probe(5, 3);
  for (auto& v : probe.values()) v = rng.normal() * 10;
  for (double p : f.predict(probe, names(3))) EXPECT_EQ(p, 4.25);
}

TEST(Forest, StumpThresholdFallsInTheGap) {
  // x in two clusters; brute-force the best split and compare.
  Rng rng(2);
  const std::size_t n = 40;
  Matrix x(n, 1);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool high = i % 2 == 0;
    x(i, 0) = high ? rng.uniform(0.5, 2.0) : rng.uniform(-2.0, -0.3);
    y[i] = high ? 10.0 : -1.0;
  }
  double best_sse = INFINITY;
  double best_lo = 0, best_hi = 0;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x(i, 0);
  std::sort(xs.begin(), xs.end());
  for (std::size_t k = 1; k < n; ++k) {
    const double thr = xs[k - 1];
    double sl = 0, sr = 0, ql = 0, qr = 0, nl = 0, nr = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x(i, 0) <= thr) sl += y[i], ql += y[i] * y[i], ++nl;
      else sr += y[i], qr += y[i] * y[i], ++nr;
    }
    const double sse = (ql - sl * sl / nl) + (qr - sr * sr / nr);
    if (sse < best_sse) best_sse = sse, best_lo = xs[k - 1], best_hi = xs[k];
  }

  ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.max_depth = 1;
  cfg.min_leaf = 1;
  cfg.bootstrap = false;
  cfg.features_per_split = std::size_t{1};
  const auto f = fit_forest(cfg, x, names(1), y);
  const auto& nodes = f.trees().at(0).nodes();
  ASSERT_EQ(nodes.size(), 3u);
  ASSERT_EQ(nodes[0].feature, 0);
  EXPECT_GT(nodes[0].threshold, best_lo);
  EXPECT_LT(nodes[0].threshold, best_hi);
  EXPECT_GT(nodes[0].threshold, -0.3);
  EXPECT_LT(nodes[0].threshold, 0.5);
  EXPECT_EQ(f.trees()[0].depth(), 1u);
}

TEST(Forest, DeepTreesFitAtLeastTheMean) {
  Rng rng(3);
  Matrix x(80, 4);
  std::vector<double> y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    for (std::size_t k = 0; k < 4; ++k) x(i, k) = rng.normal();
    y[i] = std::sin(x(i, 0)) + x(i, 1) * x(i, 2) + 0.1 * rng.normal();
  }
  double mean = 0;
  for (double v : y) mean += v;
  mean /= 80;
  double mse_mean = 0;
  for (double v : y) mse_mean += (v - mean) * (v - mean);
  mse_mean /= 80;

  ForestConfig cfg;
  cfg.n_trees = 5;
  cfg.max_depth = 0;
  cfg.min_leaf = 1;
  cfg.bootstrap = false;
  EXPECT_LE(train_mse(fit_forest(cfg, x, names(4), y), x, y), mse_mean);
}

TEST(Forest, MoreTreesDoNotHurtTrainingFit) {
  std::vector<double> one, many;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    Matrix x(60, 6);
    std::vector<double> y(60);
    for (std::size_t i = 0; i < 60; ++i) {
      for (std::size_t k = 0; k < 6; ++k) x(i, k) = rng.normal();
      y[i] = x(i, 0) - 2 * x(i, 3) + rng.normal();
    }
    ForestConfig cfg;
    cfg.max_depth = 4;
    cfg.bootstrap = false;
    cfg.seed = seed;
    cfg.n_trees = 1;
    one.push_back(train_mse(fit_forest(cfg, x, names(6), y), x, y));
    cfg.n_trees = 64;
    many.push_back(train_mse(fit_forest(cfg, x, names(6), y), x, y));
  }
  EXPECT_GE(median(one), median(many));
}

TEST(Forest, DeterministicAndRoundTrips) {
  Rng rng(4);
  Matrix x(50, 5);
  std::vector<double> y(50);
  for (auto& v : x.values()) v = rng.normal();
  for (auto& v : y) v = rng.normal();
  ForestConfig cfg;
  cfg.n_trees = 8;
  cfg.seed = 9;
  const auto a = fit_forest(cfg, x, names(5), y);
  const auto b = fit_forest(cfg, x, names(5), y);
  EXPECT_EQ(a.parameters(), b.parameters());
  cfg.seed = 10;
  EXPECT_NE(fit_forest(cfg, x, names(5), y).parameters(), a.parameters());

  std::stringstream buf;
  a.save(buf);
  const auto loaded = load_regressor(buf);
  EXPECT_EQ(loaded->kind(), ModelKind::Forest);
  EXPECT_EQ(loaded->parameters(), a.parameters());
  EXPECT_EQ(loaded->predict(x, names(5)), a.predict(x, names(5)));
}

TEST(Forest, ConfigAndDataErrors) {
  ForestConfig cfg;
  cfg.n_trees = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.min_leaf = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.features_per_split = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  EXPECT_EQ(cfg.resolve_features(9), 3u);
  cfg.features_per_split = std::size_t{50};
  EXPECT_EQ(cfg.resolve_features(9), 9u);

  Matrix x(3, 1);
  std::vector<double> y(3, 1.0);
  cfg = {};
  try {
    fit_forest(cfg, x, names(1), y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
}
