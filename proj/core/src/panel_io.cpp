// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <istream>
#include <ostream>

#include "flucast/delimited.hpp"
#include "flucast/error.hpp"
#include "flucast/panel.hpp"

// FLUPANEL v1
// countries=<encoded>,<encoded>,...
// start=YYYY-Www
// end=YYYY-Www
// <encoded country>,<v>,<v>,...,NA,...      one line per country, panel order

namespace flucast {

namespace {

constexpr std::string_view kMagic = "FLUPANEL";
constexpr std::string_view kVersion = "v1";
constexpr std::string_view kMissing = "NA";

std::string expect_key(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::CorruptPayload, "missing '" + std::string(key) + "=' line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(std::string(key) + "=", 0) != 0) {
    throw Error(ErrorCode::CorruptPayload, "expected '" + std::string(key) + "=' but found '" + line + "'");
  }
  return line.substr(key.size() + 1);
}

EpiWeek parse_week_field(const std::string& text) {
  auto w = EpiWeek::parse(text);
  if (!w) throw Error(ErrorCode::CorruptPayload, "bad week '" + text + "'");
  return *w;
}

}  // namespace

void save_panel(const CountryPanel& panel, std::ostream& out) {
  if (panel.num_countries() == 0) throw Error(ErrorCode::EmptyPanel, "cannot save a panel without countries");
  std::vector<std::string> names;
  for (const auto& c : panel.countries()) names.push_back(encode_token(c));
  out << kMagic << ' ' << kVersion << '\n';
  out << "countries=" << join(names, ",") << '\n';
  out << "start=" << panel.start().str() << '\n';
  out << "end=" << panel.end().str() << '\n';
  for (std::size_t i = 0; i < panel.num_countries(); ++i) {
    out << names[i];
    for (std::size_t j = 0; j < panel.num_weeks(); ++j) {
      out << ',';
      if (panel.is_missing(i, j)) {
        out << kMissing;
      } else {
        out << format_double(panel.value(i, j));
      }
    }
    out << '\n';
  }
}

CountryPanel load_panel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::CorruptPayload, "empty panel stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto parts = split(line, ' ');
  if (parts.size() != 2 || parts[0] != kMagic) throw Error(ErrorCode::CorruptPayload, "not a FLUPANEL stream");
  if (parts[1] != kVersion) {
    throw Error(ErrorCode::FormatVersionMismatch, "unsupported panel version '" + parts[1] + "'");
  }
  const auto country_field = expect_key(in, "countries");
  if (country_field.empty()) throw Error(ErrorCode::EmptyPanel, "panel lists no countries");
  const auto encoded = split(country_field, ',');
  const EpiWeek start = parse_week_field(expect_key(in, "start"));
  const EpiWeek end = parse_week_field(expect_key(in, "end"));
  const auto span = EpiWeek::distance(start, end);
  if (span < 0) throw Error(ErrorCode::CorruptPayload, "end precedes start");
  const auto n_weeks = static_cast<std::size_t>(span + 1);

  std::vector<std::string> countries;
  Matrix values(encoded.size(), n_weeks);
  std::vector<std::uint8_t> missing(encoded.size() * n_weeks, 0);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    countries.push_back(decode_token(encoded[i]));
    if (!std::getline(in, line)) throw Error(ErrorCode::CorruptPayload, "truncated: missing row for " + countries[i]);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split(line, ',');
    if (fields.size() != n_weeks + 1 || fields[0] != encoded[i]) {
      throw Error(ErrorCode::CorruptPayload, "row " + std::to_string(i + 1) + " malformed for " + countries[i]);
    }
    for (std::size_t j = 0; j < n_weeks; ++j) {
      const auto& f = fields[j + 1];
      if (f == kMissing) {
        missing[i * n_weeks + j] = 1;
      } else if (!parse_double(f, values(i, j))) {
        throw Error(ErrorCode::CorruptPayload, "bad value '" + f + "' for " + countries[i]);
      }
    }
  }
  return CountryPanel(std::move(countries), start, std::move(values), std::move(missing));
}

void save_panel_file(const CountryPanel& panel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  save_panel(panel, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

CountryPanel load_panel_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  return load_panel(in);
}

}  // namespace flucast
