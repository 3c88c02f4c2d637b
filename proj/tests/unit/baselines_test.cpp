// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flucast/baselines.hpp"
#include "flucast/error.hpp"
#include "flucast/features.hpp"
#include "test_support.hpp"

using namespace flucast;

TEST(Naive, EchoesItsSourceColumn) {
  const auto fm = build_features(support::random_panel(2, 120, 1), "C0", FeatureSpec{});
  auto last = naive_baseline(ModelKind::NaiveLast);
  auto seasonal = naive_baseline(ModelKind::NaiveSeasonal);
  const std::vector<double> ignored(fm.rows(), 0.0);
  last->fit(fm.x, fm.feature_names, ignored, 0);
  seasonal->fit(fm.x, fm.feature_names, ignored, 0);
  const auto a = last->predict(fm.x, fm.feature_names);
  const auto b = seasonal->predict(fm.x, fm.feature_names);
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    EXPECT_EQ(a[r], fm.x(r, *fm.column("t.lag.0")));
    EXPECT_EQ(b[r], fm.x(r, *fm.column("t.lag.51")));
  }
}

TEST(Naive, SeasonalIsExactOnPeriodicSeries) {
  std::vector<double> s(200);
  for (std::size_t t = 0; t < s.size(); ++t) s[t] = 100 + 50 * std::sin(2 * std::numbers::pi * static_cast<double>(t % 52) / 52.0);
  const auto fm = build_features(support::series_panel(s), "X", FeatureSpec{});
  auto m = naive_baseline(ModelKind::NaiveSeasonal);
  m->fit(fm.x, fm.feature_names, std::vector<double>(fm.rows()), 0);
  const auto p = m->predict(fm.x, fm.feature_names);
  for (std::size_t r = 0; r < fm.rows(); ++r) EXPECT_EQ(p[r], fm.y(r, 0));
}

TEST(Naive, MissingColumnAndBadKind) {
  auto m = naive_baseline(ModelKind::NaiveSeasonal);
  Matrix x(3, 2);
  try {
    m->fit(x, {"t.lag.0", "t.lag.1"}, std::vector<double>(3), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingFeatureColumn);
  }
  EXPECT_THROW(naive_baseline(ModelKind::Lstm), Error);
}
