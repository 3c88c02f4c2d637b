// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "flucast/error.hpp"
#include "flucast/features.hpp"
#include "test_support.hpp"

using namespace flucast;

namespace {

// Independent recomputation: sort a copy, two-pass mean and population std.
double oracle_stat(std::vector<double> w, RollingStat s) {
  std::sort(w.begin(), w.end());
  const std::size_t n = w.size();
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= static_cast<double>(n);
  switch (s) {
    case RollingStat::Mean: return mean;
    case RollingStat::Median: return n % 2 ? w[n / 2] : (w[n / 2 - 1] + w[n / 2]) / 2.0;
    case RollingStat::Max: return w.back();
    case RollingStat::Min: return w.front();
    case RollingStat::Std: {
      double ss = 0.0;
      for (double v : w) ss += (v - mean) * (v - mean);
      return std::sqrt(ss / static_cast<double>(n));
    }
  }
  return NAN;
}

FeatureSpec small_spec() {
  FeatureSpec s;
  s.lag_depth = 8;
  s.windows = {1, 2, 4, 8};
  s.horizons = {1, 3};
  return s;
}

}  // namespace

TEST(FeatureSpec, ValidatesInvariants) {
  FeatureSpec s;
  EXPECT_NO_THROW(s.validate());
  s.lag_depth = 26;
  EXPECT_THROW(s.validate(), Error);  // window 52 exceeds lag depth
  s = {};
  s.horizons = {1, 1};
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.horizons = {0};
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.windows = {0, 1};
  EXPECT_THROW(s.validate(), Error);
}

TEST(FeatureSpec, TextRoundTrip) {
  FeatureSpec s = small_spec();
  s.stats = {RollingStat::Max, RollingStat::Mean};
  s.include_first_diff = false;
  EXPECT_EQ(parse_spec(format_spec(s)), s);
  EXPECT_EQ(parse_spec(format_spec(FeatureSpec{})), FeatureSpec{});
}

TEST(BuildFeatures, SpatialBlockForTwentyThreeCountries) {
  const auto panel = support::random_panel(23, 60, 1);
  const auto fm = build_features(panel, "C0", FeatureSpec{});
  const auto spatial = std::count_if(fm.feature_names.begin(), fm.feature_names.end(),
                                     [](const std::string& n) { return n.rfind("s.", 0) == 0; });
  EXPECT_EQ(spatial, 1144);
  EXPECT_EQ(fm.feature_names.size(), expected_column_count(FeatureSpec{}, 23));
  EXPECT_EQ(fm.feature_names.size(), 52u + 51u + 40u + 1144u);
}

TEST(BuildFeatures, ColumnCountFormulaHoldsForRandomSpecs) {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    FeatureSpec s;
    s.lag_depth = 1 + rng.index(20);
    s.windows.clear();
    for (std::size_t w = 1; w <= s.lag_depth; ++w) {
      if (rng.uniform() < 0.4) s.windows.push_back(w);
    }
    s.stats.clear();
    for (auto st : {RollingStat::Mean, RollingStat::Median, RollingStat::Std, RollingStat::Max, RollingStat::Min}) {
      if (rng.uniform() < 0.6) s.stats.push_back(st);
    }
    s.include_first_diff = rng.uniform() < 0.5;
    s.spatial = rng.uniform() < 0.5;
    s.horizons = {1 + rng.index(5)};
    const std::size_t n = 1 + rng.index(5);
    const auto panel = support::random_panel(n, s.lag_depth + 10, trial);
    const auto fm = build_features(panel, "C0", s);
    const std::size_t expected = s.lag_depth + (s.include_first_diff ? s.lag_depth - 1 : 0) +
                                 s.windows.size() * s.stats.size() + (s.spatial ? (n - 1) * s.lag_depth : 0);
    EXPECT_EQ(fm.feature_names.size(), expected);
    EXPECT_EQ(fm.x.cols(), expected);
    std::vector<std::string> sorted = fm.feature_names;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  }
}

TEST(BuildFeatures, ConstantSeries) {
  const auto fm = build_features(support::series_panel(std::vector<double>(70, 42.0)), "X", FeatureSpec{});
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    for (std::size_t c = 0; c < fm.feature_names.size(); ++c) {
      const auto& name = fm.feature_names[c];
      double expected = 42.0;
      if (name.rfind("t.diff.", 0) == 0 || name.find(".std") != std::string::npos) expected = 0.0;
      ASSERT_EQ(fm.x(r, c), expected) << name;
    }
  }
}

TEST(BuildFeatures, LagDiffAndTargetLayout) {
  const auto series = support::random_series(40, 3);
  const auto spec = small_spec();
  const auto fm = build_features(support::series_panel(series), "X", spec);
  ASSERT_EQ(fm.rows(), 40u - 8u - 3u + 1u);
  EXPECT_EQ(fm.origins.front(), EpiWeek(2010, 8));
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    const std::size_t t = r + 7;
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(fm.x(r, *fm.column(lag_name(k))), series[t - k]);
    for (std::size_t k = 0; k < 7; ++k) {
      EXPECT_EQ(fm.x(r, *fm.column(diff_name(k))), series[t - k] - series[t - k - 1]);
    }
    EXPECT_EQ(fm.y(r, 0), series[t + 1]);
    EXPECT_EQ(fm.y(r, 1), series[t + 3]);
    if (r + 1 < fm.rows()) {
      for (std::size_t k = 1; k < 8; ++k) EXPECT_EQ(fm.x(r + 1, k), fm.x(r, k - 1));
    }
  }
}

TEST(BuildFeatures, WindowOneDegeneracy) {
  const auto fm = build_features(support::series_panel(support::random_series(80, 4)), "X", FeatureSpec{});
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    const double lag0 = fm.x(r, 0);
    for (auto s : {RollingStat::Mean, RollingStat::Median, RollingStat::Max, RollingStat::Min}) {
      EXPECT_EQ(fm.x(r, *fm.column(rolling_name(1, s))), lag0);
    }
    EXPECT_EQ(fm.x(r, *fm.column(rolling_name(1, RollingStat::Std))), 0.0);
  }
}

TEST(BuildFeatures, RollingColumnsMatchBruteForce) {
  const auto series = support::random_series(200, 5);
  const FeatureSpec spec;
  const auto fm = build_features(support::series_panel(series), "X", spec);
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    const std::size_t t = r + spec.lag_depth - 1;
    for (auto w : spec.windows) {
      const std::vector<double> window(series.begin() + static_cast<long>(t + 1 - w), series.begin() + static_cast<long>(t + 1));
      for (auto s : spec.stats) {
        const double got = fm.x(r, *fm.column(rolling_name(w, s)));
        const double want = oracle_stat(window, s);
        if (s == RollingStat::Mean || s == RollingStat::Std) {
          ASSERT_LE(std::abs(got - want), 1e-12 * std::max(1.0, std::abs(want))) << rolling_name(w, s);
        } else {
          ASSERT_EQ(got, want) << rolling_name(w, s);
        }
      }
    }
  }
}

TEST(BuildFeatures, SpatialOffDropsExactlyTheSpatialColumns) {
  const auto panel = support::random_panel(4, 120, 6);
  FeatureSpec on = small_spec();
  FeatureSpec off = on;
  off.spatial = false;
  const auto a = build_features(panel, "C2", on);
  const auto b = build_features(panel, "C2", off);
  ASSERT_EQ(a.rows(), b.rows());
  EXPECT_EQ(a.origins, b.origins);
  EXPECT_EQ(a.y, b.y);
  for (std::size_t c = 0; c < b.feature_names.size(); ++c) {
    const auto ac = a.column(b.feature_names[c]);
    ASSERT_TRUE(ac);
    for (std::size_t r = 0; r < a.rows(); ++r) EXPECT_EQ(a.x(r, *ac), b.x(r, c));
  }
  EXPECT_EQ(a.feature_names.size() - b.feature_names.size(), 3u * on.lag_depth);
  // spatial block follows panel order and skips the target
  EXPECT_TRUE(a.column("s.C0.lag.0"));
  EXPECT_FALSE(a.column("s.C2.lag.0"));
  const auto c3 = *a.column("s.C3.lag.5");
  EXPECT_EQ(a.x(0, c3), panel.value(3, on.lag_depth - 1 - 5));
}

TEST(BuildFeatures, IsDeterministic) {
  const auto panel = support::random_panel(3, 150, 7);
  EXPECT_EQ(build_features(panel, "C1", FeatureSpec{}), build_features(panel, "C1", FeatureSpec{}));
}

TEST(BuildFeatures, Errors) {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  const auto panel = support::random_panel(2, 60, 8);
  EXPECT_EQ(code([&] { build_features(panel, "nope", FeatureSpec{}); }), ErrorCode::UnknownCountry);
  EXPECT_NO_THROW(build_features(panel, "C0", FeatureSpec{}));
  FeatureSpec far;
  far.horizons = {9};
  EXPECT_EQ(code([&] { build_features(panel, "C0", far); }), ErrorCode::InsufficientHistory);

  std::vector<std::uint8_t> mask(2 * 60, 0);
  mask[60 + 10] = 1;
  const CountryPanel holed(panel.countries(), panel.start(), panel.values(), mask);
  EXPECT_EQ(code([&] { build_features(holed, "C0", FeatureSpec{}); }), ErrorCode::MissingDataInScope);
  FeatureSpec temporal;
  temporal.spatial = false;
  EXPECT_NO_THROW(build_features(holed, "C0", temporal));  // the hole is out of scope
}

TEST(WalkForward, SplitCountsOnEightYearPanel) {
  const EpiWeek start(2010, 1), end(2018, 18);
  std::size_t n = 0;
  for (EpiWeek w = start; w <= end; w = w.succ()) ++n;
  const auto fm = build_features(support::series_panel(support::random_series(n, 9), "X", start), "X", FeatureSpec{});

  // Count by walking the calendar: first origin is the 52nd week, the last is 4 weeks before the end.
  EpiWeek first = start;
  for (int i = 0; i < 51; ++i) first = first.succ();
  EpiWeek last = end;
  for (int i = 0; i < 4; ++i) last = last.pred();
  std::size_t n_train = 0, n_test = 0;
  for (EpiWeek w = first; w <= last; w = w.succ()) (w < EpiWeek(2017, 27) ? n_train : n_test)++;

  const auto [train, test] = split_walk_forward(fm, EpiWeek(2017, 27));
  EXPECT_EQ(train.rows(), n_train);
  EXPECT_EQ(test.rows(), n_test);
  EXPECT_EQ(train.origins.back(), EpiWeek(2017, 26));
  EXPECT_EQ(test.origins.front(), EpiWeek(2017, 27));
  EXPECT_TRUE(std::is_sorted(train.origins.begin(), train.origins.end()));
  EXPECT_EQ(train.rows() + test.rows(), fm.rows());

  EXPECT_THROW(split_walk_forward(fm, fm.origins.front()), Error);
  EXPECT_THROW(split_walk_forward(fm, fm.origins.back().succ()), Error);
  EXPECT_NO_THROW(split_walk_forward(fm, fm.origins.back()));
}

TEST(FeatureIo, RoundTrip) {
  const auto panel = support::random_panel(3, 90, 10);
  for (bool spatial : {true, false}) {
    FeatureSpec s = small_spec();
    s.spatial = spatial;
    const auto fm = build_features(panel, "C1", s);
    std::stringstream buf;
    save_features(fm, buf);
    EXPECT_EQ(load_features(buf), fm);
  }
  // awkward country names survive too
  CountryPanel named({"Korea, Republic of", "Côte d'Ivoire"}, panel.start(), panel.values().select_rows(std::vector<std::size_t>{0, 1}),
                     std::vector<std::uint8_t>(2 * 90, 0));
  const auto fm = build_features(named, "Korea, Republic of", small_spec());
  std::stringstream buf;
  save_features(fm, buf);
  EXPECT_EQ(load_features(buf), fm);
}

TEST(FeatureIo, RejectsCorruptStreams) {
  const auto fm = build_features(support::random_panel(2, 40, 12), "C0", small_spec());
  std::stringstream buf;
  save_features(fm, buf);
  auto text = buf.str();
  std::istringstream cut(text.substr(0, text.size() - 20));
  EXPECT_THROW(load_features(cut), Error);
  text.replace(text.find("v1"), 2, "v9");
  std::istringstream wrong(text);
  try {
    load_features(wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FormatVersionMismatch);
  }
}
