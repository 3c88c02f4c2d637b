// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <istream>
#include <ostream>

#include "flucast/delimited.hpp"
#include "flucast/error.hpp"
#include "flucast/features.hpp"

namespace flucast {

namespace {
constexpr std::string_view kMagic = "#FLUFEATURES";
constexpr std::string_view kVersion = "v1";
}  // namespace

void save_features(const FeatureMatrix& fm, std::ostream& out) {
  out << kMagic << ' ' << kVersion << " target=" << encode_token(fm.target_country) << " spec=" << format_spec(fm.spec)
      << '\n';
  out << "origin";
  for (const auto& name : fm.feature_names) out << ',' << quote_field(name, ',');
  for (auto h : fm.spec.horizons) out << ',' << target_name(h);
  out << '\n';
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    out << fm.origins[r].str();
    for (double v : fm.x.row(r)) out << ',' << format_double(v);
    for (double v : fm.y.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

FeatureMatrix load_features(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::CorruptPayload, "empty feature stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto parts = split(line, ' ');
  if (parts.empty() || parts[0] != kMagic) throw Error(ErrorCode::CorruptPayload, "not a FLUFEATURES stream");
  if (parts.size() < 2 || parts[1] != kVersion) {
    throw Error(ErrorCode::FormatVersionMismatch, "unsupported feature-matrix version");
  }
  FeatureMatrix fm;
  bool have_target = false, have_spec = false;
  for (std::size_t i = 2; i < parts.size(); ++i) {
    if (parts[i].rfind("target=", 0) == 0) {
      fm.target_country = decode_token(parts[i].substr(7));
      have_target = true;
    } else if (parts[i].rfind("spec=", 0) == 0) {
      try {
        fm.spec = parse_spec(parts[i].substr(5));
      } catch (const Error& e) {
        throw Error(ErrorCode::CorruptPayload, std::string("bad spec: ") + e.what());
      }
      have_spec = true;
    }
  }
  if (!have_target || !have_spec) throw Error(ErrorCode::CorruptPayload, "feature preamble lacks target or spec");

  std::vector<std::string> fields;
  if (!std::getline(in, line) || !split_record(line, ',', fields) || fields.empty() || fields[0] != "origin") {
    throw Error(ErrorCode::CorruptPayload, "missing feature header row");
  }
  const std::size_t n_targets = fm.spec.horizons.size();
  if (fields.size() < 1 + n_targets) throw Error(ErrorCode::CorruptPayload, "header too short");
  const std::size_t n_features = fields.size() - 1 - n_targets;
  fm.feature_names.assign(fields.begin() + 1, fields.begin() + 1 + static_cast<std::ptrdiff_t>(n_features));
  for (std::size_t j = 0; j < n_targets; ++j) {
    if (fields[1 + n_features + j] != target_name(fm.spec.horizons[j])) {
      throw Error(ErrorCode::CorruptPayload, "target columns do not match spec horizons");
    }
  }

  std::vector<double> xs, ys;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!split_record(line, ',', fields) || fields.size() != 1 + n_features + n_targets) {
      throw Error(ErrorCode::CorruptPayload, "line " + std::to_string(line_no) + ": wrong field count");
    }
    auto origin = EpiWeek::parse(fields[0]);
    if (!origin) throw Error(ErrorCode::CorruptPayload, "line " + std::to_string(line_no) + ": bad origin");
    fm.origins.push_back(*origin);
    for (std::size_t j = 0; j < n_features + n_targets; ++j) {
      double v = 0.0;
      if (!parse_double(fields[1 + j], v)) {
        throw Error(ErrorCode::CorruptPayload, "line " + std::to_string(line_no) + ": bad number");
      }
      (j < n_features ? xs : ys).push_back(v);
    }
  }
  fm.x = Matrix(fm.origins.size(), n_features);
  std::copy(xs.begin(), xs.end(), fm.x.values().begin());
  fm.y = Matrix(fm.origins.size(), n_targets);
  std::copy(ys.begin(), ys.end(), fm.y.values().begin());
  return fm;
}

void save_features_file(const FeatureMatrix& fm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  save_features(fm, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

FeatureMatrix load_features_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  return load_features(in);
}

}  // namespace flucast
