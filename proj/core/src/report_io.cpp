// SPDX-License-Identifier: Apache-2.0
#include "flucast/report_io.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "flucast/delimited.hpp"
#include "flucast/error.hpp"
#include <nlohmann/json.hpp>

namespace flucast {

namespace {

constexpr const char* kColumns[] = {"country", "hemisphere", "model", "horizon", "spatial",
                                    "mape",    "rmse",       "n",     "skipped"};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void emit_delimited(const ForecastReport& report, std::ostream& out) {
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const auto& r : report.rows) {
    out << quote_field(r.country, ',') << ',' << to_string(r.hemisphere) << ',' << to_string(r.model) << ','
        << r.horizon << ',' << (r.spatial ? "true" : "false") << ',' << format_double(r.mape) << ','
        << format_double(r.rmse) << ',' << r.n_evaluated << ',' << r.skipped << '\n';
  }
}

void emit_json(const ForecastReport& report, std::ostream& out) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["country"] = r.country;
    j["hemisphere"] = to_string(r.hemisphere);
    j["model"] = to_string(r.model);
    j["horizon"] = r.horizon;
    j["spatial"] = r.spatial;
    j["mape"] = r.mape;
    j["rmse"] = r.rmse;
    j["n"] = r.n_evaluated;
    j["skipped"] = r.skipped;
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["columns"] = kColumns;
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

void emit_table(const ForecastReport& report, std::ostream& out) {
  std::vector<ModelKind> models;
  std::vector<std::string> countries;
  std::map<std::string, std::set<std::size_t>> horizons;
  std::map<std::string, Hemisphere> hemi;
  for (const auto& r : report.rows) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
    if (std::find(countries.begin(), countries.end(), r.country) == countries.end()) countries.push_back(r.country);
    horizons[r.country].insert(r.horizon);
    hemi[r.country] = r.hemisphere;
  }

  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head1{"Hemisphere", "Country", "step ahead"};
  std::vector<std::string> head2{"", "", ""};
  for (auto m : models) {
    head1.push_back(std::string(to_string(m)));
    head1.push_back("");
    head2.push_back("with");
    head2.push_back("without");
  }
  cells.push_back(head1);
  cells.push_back(head2);
  for (const auto& c : countries) {
    for (auto h : horizons[c]) {
      std::vector<std::string> line{std::string(to_string(hemi[c])), c, std::to_string(h)};
      for (auto m : models) {
        for (bool spatial : {true, false}) {
          const auto* row = report.find(c, m, h, spatial);
          line.push_back(row ? fixed(row->mape, 3) : "-");
        }
      }
      cells.push_back(std::move(line));
    }
  }

  std::vector<std::size_t> width(head1.size(), 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  auto rule = [&]() {
    for (std::size_t i = 0; i < width.size(); ++i) out << '+' << std::string(width[i] + 2, '-');
    out << "+\n";
  };
  rule();
  for (std::size_t li = 0; li < cells.size(); ++li) {
    for (std::size_t i = 0; i < width.size(); ++i) {
      const auto& s = cells[li][i];
      out << "| " << s << std::string(width[i] - s.size() + 1, ' ');
    }
    out << "|\n";
    if (li == 1) rule();
  }
  rule();
}

ReportRow row_from(const std::vector<std::string>& f, std::size_t line_no) {
  const auto where = "report line " + std::to_string(line_no);
  if (f.size() != std::size(kColumns)) throw Error(ErrorCode::CorruptPayload, where + ": wrong field count");
  ReportRow r;
  r.country = f[0];
  const auto h = parse_hemisphere(f[1]);
  const auto m = parse_model_kind(f[2]);
  long long horizon = 0, n = 0, skipped = 0;
  if (!h || !m || !parse_int(f[3], horizon) || horizon < 1 || (f[4] != "true" && f[4] != "false") ||
      !parse_double(f[5], r.mape) || !parse_double(f[6], r.rmse) || !parse_int(f[7], n) || n < 0 ||
      !parse_int(f[8], skipped) || skipped < 0) {
    throw Error(ErrorCode::CorruptPayload, where + ": bad field");
  }
  r.hemisphere = *h;
  r.model = *m;
  r.horizon = static_cast<std::size_t>(horizon);
  r.spatial = f[4] == "true";
  r.n_evaluated = static_cast<std::size_t>(n);
  r.skipped = static_cast<std::size_t>(skipped);
  return r;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept {
  if (text == "table" || text == "table-text") return ReportFormat::Table;
  if (text == "csv" || text == "delimited") return ReportFormat::Delimited;
  if (text == "json") return ReportFormat::Json;
  return std::nullopt;
}

void emit_report(const ForecastReport& report, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::Table: emit_table(report, out); break;
    case ReportFormat::Delimited: emit_delimited(report, out); break;
    case ReportFormat::Json: emit_json(report, out); break;
  }
}

ForecastReport parse_delimited_report(std::istream& in) {
  std::string line;
  std::vector<std::string> fields;
  if (!std::getline(in, line) || !split_record(line, ',', fields)) {
    throw Error(ErrorCode::CorruptPayload, "missing report header");
  }
  for (std::size_t i = 0; i < std::size(kColumns); ++i) {
    if (i >= fields.size() || fields[i] != kColumns[i]) throw Error(ErrorCode::CorruptPayload, "bad report header");
  }
  ForecastReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!split_record(line, ',', fields)) throw Error(ErrorCode::CorruptPayload, "unterminated quote in report");
    report.rows.push_back(row_from(fields, line_no));
  }
  return report;
}

ForecastReport parse_json_report(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptPayload, std::string("report JSON: ") + e.what());
  }
  ForecastReport report;
  try {
    for (const auto& j : doc.at("rows")) {
      ReportRow r;
      r.country = j.at("country").get<std::string>();
      const auto h = parse_hemisphere(j.at("hemisphere").get<std::string>());
      const auto m = parse_model_kind(j.at("model").get<std::string>());
      if (!h || !m) throw Error(ErrorCode::CorruptPayload, "bad hemisphere or model in report JSON");
      r.hemisphere = *h;
      r.model = *m;
      r.horizon = j.at("horizon").get<std::size_t>();
      r.spatial = j.at("spatial").get<bool>();
      r.mape = j.at("mape").get<double>();
      r.rmse = j.at("rmse").get<double>();
      r.n_evaluated = j.at("n").get<std::size_t>();
      r.skipped = j.at("skipped").get<std::size_t>();
      report.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptPayload, std::string("report JSON: ") + e.what());
  }
  return report;
}

void emit_plot_data(const std::vector<PlotPoint>& points, std::ostream& out) {
  out << "country,model,spatial,horizon,origin,target_week,forecast,actual\n";
  for (const auto& p : points) {
    out << quote_field(p.country, ',') << ',' << to_string(p.model) << ',' << (p.spatial ? "true" : "false") << ','
        << p.horizon << ',' << p.origin.str() << ',' << p.target_week.str() << ',' << format_double(p.forecast)
        << ',' << format_double(p.actual) << '\n';
  }
}

}  // namespace flucast
