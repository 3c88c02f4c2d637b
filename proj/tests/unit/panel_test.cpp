// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "flucast/error.hpp"
#include "flucast/panel.hpp"
#include "flucast/synth.hpp"
#include "test_support.hpp"

using namespace flucast;

namespace {

CountryPanel ingest_text(const std::string& text, const ColumnMapping& mapping = {}) {
  std::istringstream in(text);
  return ingest_panel(in, mapping);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(Ingest, SingleCountryThreeWeeks) {
  const auto p = ingest_text("Country,Year,Week,ALL_INF\nChina,2010,1,5\nChina,2010,2,0\nChina,2010,3,7\n");
  ASSERT_EQ(p.num_countries(), 1u);
  ASSERT_EQ(p.num_weeks(), 3u);
  EXPECT_EQ(p.start(), EpiWeek(2010, 1));
  EXPECT_EQ(p.end(), EpiWeek(2010, 3));
  EXPECT_EQ(p.value(0, 0), 5);
  EXPECT_EQ(p.value(0, 1), 0);
  EXPECT_EQ(p.value(0, 2), 7);
  EXPECT_EQ(p.missing_count(0), 0u);
}

TEST(Ingest, MarksAbsentAndEmptyCellsMissing) {
  const auto p = ingest_text(
      "Country,Year,Week,ALL_INF\nA,2010,1,1\nA,2010,2,2\nA,2010,3,3\nB,2010,1,4\nB,2010,3,\n");
  ASSERT_EQ(p.countries(), (std::vector<std::string>{"A", "B"}));
  EXPECT_FALSE(p.is_missing(1, 0));
  EXPECT_TRUE(p.is_missing(1, 1));
  EXPECT_TRUE(p.is_missing(1, 2));
  EXPECT_EQ(p.missing_count(1), 2u);
}

TEST(Ingest, ExplicitZeroIsAValue) {
  const auto p = ingest_text("Country,Year,Week,ALL_INF\nA,2010,1,0\n");
  EXPECT_FALSE(p.is_missing(0, 0));
}

TEST(Ingest, DuplicateCellIsAnError) {
  EXPECT_EQ(code_of([] { ingest_text("Country,Year,Week,ALL_INF\nChina,2015,10,1\nChina,2015,10,2\n"); }),
            ErrorCode::DuplicateCell);
}

TEST(Ingest, ReportsMalformedRowsAndEmptyInput) {
  EXPECT_EQ(code_of([] { ingest_text("Country,Year,Week,ALL_INF\nChina,2015\n"); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { ingest_text("Country,Year,Week,ALL_INF\nChina,2015,60,1\n"); }),
            ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { ingest_text("Country,Year,Week,ALL_INF\nChina,2015,2,-3\n"); }),
            ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { ingest_text("Country,Year,Week,ALL_INF\n"); }), ErrorCode::EmptyPanel);
  EXPECT_EQ(code_of([] { ingest_text("Nation,Year,Week,ALL_INF\nA,2010,1,1\n"); }), ErrorCode::MalformedRow);
  try {
    ingest_text("Country,Year,Week,ALL_INF\nA,2010,1,1\nA,x,2,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Ingest, HonoursMappingAndIgnoresExtraColumns) {
  ColumnMapping m;
  m.country = "region";
  m.count = "cases";
  m.delimiter = ';';
  const auto p = ingest_text("junk;REGION;year;WEEK;cases\nz;\"North, East\";2010;52;3\nz;\"North, East\";2011;1;4\n", m);
  ASSERT_EQ(p.countries(), (std::vector<std::string>{"North, East"}));
  EXPECT_EQ(p.num_weeks(), 2u);
  EXPECT_EQ(p.value(0, 1), 4);
}

TEST(Ingest, IsRowOrderInsensitive) {
  std::vector<std::string> rows;
  for (int c = 0; c < 3; ++c) {
    for (int w = 1; w <= 20; ++w) {
      rows.push_back("K" + std::to_string(c) + ",2012," + std::to_string(w) + "," + std::to_string(c * 100 + w));
    }
  }
  auto text = [&] {
    std::string s = "Country,Year,Week,ALL_INF\n";
    for (const auto& r : rows) s += r + "\n";
    return s;
  };
  const auto reference = ingest_text(text());
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    rng.shuffle(rows);
    EXPECT_EQ(ingest_text(text()), reference);
  }
}

TEST(Select, AllCompleteKeepsEverything) {
  const auto p = support::random_panel(4, 30, 1);
  const auto sel = select_complete_countries(p);
  EXPECT_EQ(sel.kept, p.countries());
  EXPECT_TRUE(sel.dropped.empty());
}

TEST(Select, SynthPanelWithOneInjectedGap) {
  SynthScenario s;
  for (int i = 1; i <= 5; ++i) s.countries.push_back({"country" + std::to_string(i), Hemisphere::Northern, 50.0, {}});
  s.n_weeks = 120;
  s.noise = 3.0;
  s.seed = 17;
  const auto full = generate(s);
  std::vector<std::uint8_t> mask = full.missing_mask();
  mask[2 * full.num_weeks() + 40] = 1;
  const CountryPanel holed(full.countries(), full.start(), full.values(), mask);

  const auto sel = select_complete_countries(holed);
  ASSERT_EQ(sel.dropped.size(), 1u);
  EXPECT_EQ(sel.dropped[0].first, "country3");
  EXPECT_EQ(sel.dropped[0].second, 1u);
  EXPECT_EQ(sel.kept.size(), 4u);

  // kept and dropped partition the panel
  std::vector<std::string> all = sel.kept;
  for (const auto& d : sel.dropped) all.push_back(d.first);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, holed.countries());

  // idempotent on the kept-only sub-panel
  const auto again = select_complete_countries(subset_countries(holed, sel.kept));
  EXPECT_EQ(again.kept, sel.kept);
  EXPECT_TRUE(again.dropped.empty());
}

TEST(Slice, IdentitySingleWeekAndComposition) {
  const auto p = support::random_panel(3, 60, 2, EpiWeek(2015, 40));
  EXPECT_EQ(slice_panel(p, p.start(), p.end()), p);

  const auto one = slice_panel(p, EpiWeek(2015, 53), EpiWeek(2015, 53));
  ASSERT_EQ(one.num_weeks(), 1u);
  EXPECT_EQ(one.value(1, 0), p.value(1, 13));

  const auto a = slice_panel(slice_panel(p, EpiWeek(2015, 45), EpiWeek(2016, 30)), EpiWeek(2016, 2), EpiWeek(2016, 20));
  EXPECT_EQ(a, slice_panel(p, EpiWeek(2016, 2), EpiWeek(2016, 20)));

  EXPECT_EQ(code_of([&] { slice_panel(p, EpiWeek(2015, 1), EpiWeek(2015, 50)); }), ErrorCode::RangeOutOfBounds);
  EXPECT_EQ(code_of([&] { slice_panel(p, EpiWeek(2016, 5), EpiWeek(2016, 4)); }), ErrorCode::RangeOutOfBounds);
}

TEST(PanelStore, RoundTripRandomPanels) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto nc = 1 + rng.index(6);
    const auto nw = 1 + rng.index(200);
    Matrix v(nc, nw);
    std::vector<std::uint8_t> mask(nc * nw);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < nc; ++c) {
      names.push_back(c % 2 ? "Name, with comma " + std::to_string(c) : "c" + std::to_string(c));
      for (std::size_t t = 0; t < nw; ++t) {
        mask[c * nw + t] = rng.uniform() < 0.1;
        v(c, t) = rng.uniform() < 0.5 ? std::floor(rng.uniform(0, 1e4)) : rng.uniform(0, 1e4);
      }
    }
    const CountryPanel p(names, EpiWeek(2009, 50).plus(static_cast<std::int64_t>(rng.index(100))), v, mask);
    std::stringstream buf;
    save_panel(p, buf);
    EXPECT_EQ(load_panel(buf), p);
  }
}

TEST(PanelStore, RejectsBadStreams) {
  const auto p = support::random_panel(2, 10, 4);
  std::stringstream buf;
  save_panel(p, buf);
  const auto text = buf.str();

  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_EQ(code_of([&] { load_panel(truncated); }), ErrorCode::CorruptPayload);

  auto v2 = text;
  v2.replace(v2.find("v1"), 2, "v2");
  std::istringstream wrong_version(v2);
  EXPECT_EQ(code_of([&] { load_panel(wrong_version); }), ErrorCode::FormatVersionMismatch);

  std::istringstream garbage("hello\n");
  EXPECT_EQ(code_of([&] { load_panel(garbage); }), ErrorCode::CorruptPayload);

  std::stringstream out;
  EXPECT_EQ(code_of([&] { save_panel(CountryPanel(), out); }), ErrorCode::EmptyPanel);
}

TEST(PanelStore, ConstructorValidates) {
  EXPECT_THROW(CountryPanel({"a", "a"}, EpiWeek(2010, 1), Matrix(2, 1), {0, 0}), Error);
  EXPECT_THROW(CountryPanel({"a"}, EpiWeek(2010, 1), Matrix(1, 2, -1.0), {0, 0}), Error);
  EXPECT_THROW(CountryPanel({"a"}, EpiWeek(2010, 1), Matrix(1, 2), {0}), Error);
  // negative values are fine under the mask and normalised to zero
  const CountryPanel p({"a"}, EpiWeek(2010, 1), Matrix(1, 2, -1.0), {1, 1});
  EXPECT_EQ(p.value(0, 0), 0.0);
}
