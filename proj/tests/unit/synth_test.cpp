// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flucast/error.hpp"
#include "flucast/synth.hpp"
#include "test_support.hpp"

using namespace flucast;

namespace {

std::vector<double> row(const CountryPanel& p, std::size_t c) {
  std::vector<double> out(p.num_weeks());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = p.value(c, t);
  return out;
}

double lagged_corr(const std::vector<double>& a, const std::vector<double>& b, std::size_t lag) {
  // corr(a[t - lag], b[t])
  const std::size_t n = a.size() - lag;
  double ma = 0, mb = 0;
  for (std::size_t t = 0; t < n; ++t) ma += a[t], mb += b[t + lag];
  ma /= n, mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double da = a[t] - ma, db = b[t + lag] - mb;
    sab += da * db, saa += da * da, sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

SynthScenario two_hemispheres() {
  SynthScenario s;
  s.countries = {{"N", Hemisphere::Northern, 10.0, {}}, {"S", Hemisphere::Southern, 10.0, {}}};
  s.n_weeks = 260;
  return s;
}

}  // namespace

TEST(Synth, FlatScenarioIsConstant) {
  SynthScenario s;
  s.countries = {{"A", Hemisphere::Northern, 100.0, 0.0}, {"B", Hemisphere::Southern, 40.0, 0.0}};
  s.n_weeks = 60;
  const auto p = generate(s);
  ASSERT_EQ(p.num_weeks(), 60u);
  EXPECT_EQ(p.start(), EpiWeek(2012, 1));
  for (std::size_t t = 0; t < 60; ++t) {
    EXPECT_EQ(p.value(0, t), 100.0);
    EXPECT_EQ(p.value(1, t), 40.0);
  }
}

TEST(Synth, CouplingShowsUpAtItsLag) {
  SynthScenario s;
  s.countries = {{"A", Hemisphere::Northern, 200.0, {}}, {"B", Hemisphere::Northern, 50.0, 0.0}};
  s.amplitude = 500;
  s.noise = 40;
  s.n_weeks = 312;
  s.seed = 4;
  s.couplings = {{"A", "B", 3, 1.0}};
  const auto p = generate(s);
  const auto a = row(p, 0), b = row(p, 1);
  std::size_t best = 0;
  double best_corr = -2;
  for (std::size_t lag = 0; lag <= 8; ++lag) {
    const double c = lagged_corr(a, b, lag);
    if (c > best_corr) best_corr = c, best = lag;
  }
  EXPECT_EQ(best, 3u);
  EXPECT_GT(best_corr, 0.9);
}

TEST(Synth, SouthernPeaksHalfAYearLater) {
  const auto p = generate(two_hemispheres());
  const auto n = row(p, 0), s = row(p, 1);
  for (std::size_t block = 0; block + 52 <= p.num_weeks(); block += 52) {
    const auto pn = std::max_element(n.begin() + block, n.begin() + block + 52) - (n.begin() + block);
    const auto ps = std::max_element(s.begin() + block, s.begin() + block + 52) - (s.begin() + block);
    EXPECT_EQ(((ps - pn) % 52 + 52) % 52, 26) << "block " << block;
  }

  auto jittered = two_hemispheres();
  jittered.timing_jitter = 1.0;
  jittered.seed = 3;
  const auto q = generate(jittered);
  const auto jn = row(q, 0), js = row(q, 1);
  for (std::size_t block = 52; block + 52 <= q.num_weeks(); block += 52) {
    const auto pn = std::max_element(jn.begin() + block, jn.begin() + block + 52) - (jn.begin() + block);
    const auto ps = std::max_element(js.begin() + block, js.begin() + block + 52) - (js.begin() + block);
    const auto d = ((ps - pn) % 52 + 52) % 52;
    EXPECT_LE(std::abs(d - 26), 10) << "block " << block;
  }
}

TEST(Synth, DeterministicNonNegativeAndSeedSensitive) {
  auto s = two_hemispheres();
  s.noise = 200;
  s.severity_jitter = 0.4;
  s.timing_jitter = 3;
  s.seed = 8;
  const auto a = generate(s);
  EXPECT_EQ(a, generate(s));
  for (double v : a.values().values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_EQ(v, std::round(v));
  }
  s.seed = 9;
  EXPECT_NE(a, generate(s));
  EXPECT_TRUE(select_complete_countries(a).dropped.empty());
}

TEST(Synth, MissingRateMarksCells) {
  auto s = two_hemispheres();
  s.missing_rate = 0.2;
  s.seed = 2;
  const auto p = generate(s);
  const auto gaps = p.missing_count(0) + p.missing_count(1);
  EXPECT_GT(gaps, 60u);
  EXPECT_LT(gaps, 150u);
  EXPECT_EQ(select_complete_countries(p).kept.size(), 0u);
}

TEST(Synth, ScenarioTextRoundTrip) {
  SynthScenario s;
  s.countries = {{"Viet Nam", Hemisphere::Northern, 12.5, {}}, {"S=1", Hemisphere::Southern, 3.0, 700.0}};
  s.couplings = {{"Viet Nam", "S=1", 2, 0.25}};
  s.noise = 1.0 / 3.0;
  s.seed = 99;
  s.start = EpiWeek(2015, 53);
  std::stringstream buf;
  format_scenario(s, buf);
  const auto back = parse_scenario(buf);
  EXPECT_EQ(generate(back), generate(s));
  std::stringstream again;
  format_scenario(back, again);
  std::stringstream first;
  format_scenario(s, first);
  EXPECT_EQ(again.str(), first.str());
}

TEST(Synth, InvalidScenarios) {
  const auto expect_invalid = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_scenario(in).validate();
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidScenario) << text;
    }
  };
  expect_invalid("country=A northern 1\ncountry=A southern 1\n");
  expect_invalid("country=A northern -1\n");
  expect_invalid("country=A northern 1\ncountry=B northern 1\ncoupling=A B 0 0.5\n");
  expect_invalid("country=A northern 1\ncountry=B northern 1\ncoupling=A B 1 1.5\n");
  expect_invalid("country=A northern 1\ncountry=B northern 1\ncoupling=A C 1 0.5\n");
  expect_invalid("n_weeks=80\ncountry=A northern 1\ncountry=B northern 1\ncoupling=A B 1 0.5\n");
  expect_invalid("country=A eastern 1\n");
  expect_invalid("bogus=1\ncountry=A northern 1\n");
  expect_invalid("n_countries=3\ncountry=A northern 1\n");
  EXPECT_EQ(raised_cosine(0, 13), 1.0);
  EXPECT_EQ(raised_cosine(13, 13), 0.0);
  EXPECT_NEAR(raised_cosine(6.5, 13), 0.5, 1e-15);
}
