// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>

#include "flucast/error.hpp"
#include "flucast/report_io.hpp"
#include "test_support.hpp"

using namespace flucast;

namespace {

ForecastReport sample_report() {
  ForecastReport r;
  Rng rng(3);
  for (const char* c : {"Australia", "Cote d'Ivoire, Rep.", "USA"}) {
    for (const auto m : {ModelKind::Lstm, ModelKind::Forest}) {
      for (std::size_t h = 1; h <= 2; ++h) {
        for (bool sp : {true, false}) {
          ReportRow row;
          row.country = c;
          row.hemisphere = std::string(c) == "Australia" ? Hemisphere::Southern : Hemisphere::Northern;
          row.model = m;
          row.horizon = h;
          row.spatial = sp;
          row.mape = rng.uniform(0.0, 1.0) / 3.0;
          row.rmse = rng.uniform(0.0, 1e4) / 7.0;
          row.n_evaluated = 40;
          row.skipped = h;
          r.rows.push_back(row);
        }
      }
    }
  }
  return r;
}

}  // namespace

TEST(Report, DelimitedRoundTripIsExact) {
  const auto r = sample_report();
  std::stringstream buf;
  emit_report(r, ReportFormat::Delimited, buf);
  std::string header;
  std::getline(std::istringstream(buf.str()), header);
  EXPECT_EQ(header, "country,hemisphere,model,horizon,spatial,mape,rmse,n,skipped");
  EXPECT_EQ(parse_delimited_report(buf), r);
}

TEST(Report, JsonRoundTripIsExact) {
  const auto r = sample_report();
  std::stringstream buf;
  emit_report(r, ReportFormat::Json, buf);
  EXPECT_EQ(parse_json_report(buf), r);
}

TEST(Report, TableHasOneLinePerCountryAndStep) {
  const auto r = sample_report();
  std::ostringstream out;
  emit_report(r, ReportFormat::Table, out);
  const auto text = out.str();
  EXPECT_NE(text.find("Hemisphere"), std::string::npos);
  EXPECT_NE(text.find("step ahead"), std::string::npos);
  EXPECT_NE(text.find("with"), std::string::npos);
  EXPECT_NE(text.find("without"), std::string::npos);
  std::size_t lines_with_data = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.find("USA") != std::string::npos) ++lines_with_data;
  }
  EXPECT_EQ(lines_with_data, 2u);
}

TEST(Report, RejectsCorruptInput) {
  std::istringstream bad("country,model\nx,y\n");
  EXPECT_THROW(parse_delimited_report(bad), Error);
  std::istringstream bad_json("{\"rows\": 3}");
  EXPECT_THROW(parse_json_report(bad_json), Error);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::Delimited);
  EXPECT_EQ(parse_report_format("json"), ReportFormat::Json);
  EXPECT_FALSE(parse_report_format("xml"));
}

TEST(Report, PlotDataHeader) {
  PlotPoint p;
  p.country = "X";
  p.horizon = 2;
  p.origin = EpiWeek(2017, 5);
  p.target_week = EpiWeek(2017, 7);
  p.forecast = 1.5;
  p.actual = 2;
  std::ostringstream out;
  emit_plot_data({p}, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "country,model,spatial,horizon,origin,target_week,forecast,actual");
  EXPECT_NE(out.str().find("2017-W07"), std::string::npos);
}
