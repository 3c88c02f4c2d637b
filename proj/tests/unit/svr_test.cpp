// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "flucast/error.hpp"
#include "flucast/svr.hpp"
#include "test_support.hpp"

using namespace flucast;

TEST(Svr, SubgradientIsZeroInsideTheTube) {
  EXPECT_EQ(svr_loss_subgradient(0.05, 0.1), 0.0);
  EXPECT_EQ(svr_loss_subgradient(-0.1, 0.1), 0.0);
  EXPECT_EQ(svr_loss_subgradient(0.3, 0.1), 1.0);
  EXPECT_EQ(svr_loss_subgradient(-0.3, 0.1), -1.0);
}

TEST(Svr, TargetsInsideTubeKeepZeroWeights) {
  Rng rng(1);
  Matrix x(40, 3);
  std::vector<double> y(40);
  for (auto& v : x.values()) v = rng.normal();
  for (auto& v : y) v = rng.uniform(-0.09, 0.09);
  SvrConfig cfg;
  cfg.epsilon = 0.1;
  const auto m = fit_svr(cfg, x, {"a", "b", "c"}, y);
  for (double w : m.weights()) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(m.bias(), 0.0);
}

TEST(Svr, RecoversLinearSlope) {
  Rng rng(2);
  Matrix x(100, 1);
  std::vector<double> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x(i, 0) = rng.uniform(-1.0, 1.0);
    y[i] = 3.0 * x(i, 0);
  }
  SvrConfig cfg;
  cfg.epsilon = 0.0;
  const auto m = fit_svr(cfg, x, {"x"}, y);
  EXPECT_NEAR(m.weights()[0], 3.0, 0.1);
}

TEST(Svr, ObjectiveTraceIsNonIncreasing) {
  Rng rng(3);
  Matrix x(120, 4);
  std::vector<double> y(120);
  for (std::size_t i = 0; i < 120; ++i) {
    for (std::size_t k = 0; k < 4; ++k) x(i, k) = rng.normal();
    y[i] = 1.5 * x(i, 0) - 0.5 * x(i, 2) + 0.2 + 0.3 * rng.normal();
  }
  const ColumnNames cols{"a", "b", "c", "d"};
  SvrConfig cfg;
  cfg.epochs = 40;
  const auto m = fit_svr(cfg, x, cols, y);
  const auto& trace = m.objective_trace();
  ASSERT_EQ(trace.size(), cfg.epochs);
  for (std::size_t e = 1; e < trace.size(); ++e) EXPECT_LE(trace[e], trace[e - 1]) << "epoch " << e;
  EXPECT_LT(trace.back(), 0.5 * trace.front());

  // Each trace entry is the objective of the model a shorter run returns.
  for (std::size_t k = 1; k <= cfg.epochs; ++k) {
    SvrConfig shorter = cfg;
    shorter.epochs = k;
    const auto prefix = fit_svr(shorter, x, cols, y);
    EXPECT_EQ(trace[k - 1], svr_objective(prefix.weights(), prefix.bias(), x, y, cfg)) << "epoch " << k;
  }
}

TEST(Svr, DeterministicAndRoundTrips) {
  Rng rng(4);
  Matrix x(30, 2);
  std::vector<double> y(30);
  for (auto& v : x.values()) v = rng.normal();
  for (auto& v : y) v = rng.normal();
  SvrConfig cfg;
  cfg.seed = 5;
  const auto a = fit_svr(cfg, x, {"p", "q"}, y);
  EXPECT_EQ(a.parameters(), fit_svr(cfg, x, {"p", "q"}, y).parameters());
  std::stringstream buf;
  a.save(buf);
  const auto loaded = load_regressor(buf);
  EXPECT_EQ(loaded->predict(x, {"p", "q"}), a.predict(x, {"p", "q"}));
  EXPECT_THROW(loaded->predict(x, {"q", "p"}), Error);
}

TEST(Svr, ConfigValidation) {
  SvrConfig cfg;
  cfg.c = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.epsilon = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
}
