// SPDX-License-Identifier: Apache-2.0
#include "flucast/msop.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "flucast/baselines.hpp"
#include "flucast/delimited.hpp"
#include "flucast/error.hpp"

namespace flucast {

std::unique_ptr<Regressor> make_regressor(ModelKind kind, const ModelConfigs& configs) {
  switch (kind) {
    case ModelKind::Lstm: return std::make_unique<LstmRegressor>(configs.lstm);
    case ModelKind::Forest: return std::make_unique<ForestRegressor>(configs.forest);
    case ModelKind::Svr: return std::make_unique<SvrRegressor>(configs.svr);
    case ModelKind::NaiveLast:
    case ModelKind::NaiveSeasonal: return naive_baseline(kind);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown model kind");
}

std::uint64_t spec_hash(const FeatureSpec& spec) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : format_spec(spec)) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

const HorizonModel& MsopBundle::at(std::size_t horizon) const {
  for (const auto& hm : horizon_models) {
    if (hm.horizon == horizon) return hm;
  }
  throw Error(ErrorCode::SchemaMismatch, "bundle has no model for horizon " + std::to_string(horizon));
}

MsopBundle train_msop(const FeatureMatrix& train, ModelKind kind, const ModelConfigs& configs, std::uint64_t seed) {
  train.spec.validate();
  if (train.rows() == 0) throw Error(ErrorCode::InsufficientData, "no training rows");
  if (train.y.cols() != train.spec.horizons.size() || train.y.rows() != train.rows() ||
      train.x.cols() != train.feature_names.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature matrix targets do not match its horizons");
  }

  MsopBundle bundle;
  bundle.target_country = train.target_country;
  bundle.spec = train.spec;
  bundle.model_kind = kind;
  bundle.columns = train.feature_names;
  bundle.train_start = train.origins.front();
  bundle.train_end = train.origins.back();
  bundle.seed = seed;

  const bool scaled = uses_scaling(kind);
  ColumnScaling feature_scaling;
  Matrix x = train.x;
  if (scaled) {
    feature_scaling = fit_columns(train.x);
    feature_scaling.apply(x);
  }

  for (std::size_t j = 0; j < train.spec.horizons.size(); ++j) {
    const std::size_t h = train.spec.horizons[j];
    HorizonModel hm;
    hm.horizon = h;
    hm.seed = horizon_seed(seed, h);
    Matrix target(train.rows(), 1);
    for (std::size_t r = 0; r < train.rows(); ++r) target(r, 0) = train.y(r, j);
    if (scaled) {
      hm.scaling.features = feature_scaling;
      hm.scaling.targets = fit_columns(target);
      hm.scaling.targets.apply(target);
    }
    hm.model = make_regressor(kind, configs);
    try {
      hm.model->fit(x, train.feature_names, target.values(), hm.seed);
    } catch (const Error& e) {
      throw Error(e.code(), "horizon " + std::to_string(h) + ": " + e.message());
    }
    bundle.horizon_models.push_back(std::move(hm));
  }
  return bundle;
}

Matrix predict_msop(const MsopBundle& bundle, const FeatureMatrix& rows) {
  if (rows.feature_names != bundle.columns) {
    throw Error(ErrorCode::SchemaMismatch, "feature schema does not match bundle for " + bundle.target_country);
  }
  const bool scaled = uses_scaling(bundle.model_kind);
  Matrix out(rows.rows(), bundle.horizon_models.size());
  if (rows.rows() == 0) return out;
  Matrix scaled_x;
  if (scaled) {
    scaled_x = rows.x;
    bundle.horizon_models.front().scaling.features.apply(scaled_x);
  }
  for (std::size_t j = 0; j < bundle.horizon_models.size(); ++j) {
    const auto& hm = bundle.horizon_models[j];
    const auto pred = hm.model->predict(scaled ? scaled_x : rows.x, bundle.columns);
    for (std::size_t r = 0; r < rows.rows(); ++r) out(r, j) = scaled ? hm.scaling.targets.invert(pred[r], 0) : pred[r];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void write_scaling(std::ostream& out, const ColumnScaling& s) {
  out << s.mean.size() << '\n';
  for (std::size_t i = 0; i < s.mean.size(); ++i) {
    out << format_double(s.mean[i]) << ' ' << format_double(s.stddev[i]) << '\n';
  }
}

ColumnScaling read_scaling(std::istream& in) {
  std::string line;
  long long n = 0;
  if (!std::getline(in, line) || !parse_int(line, n) || n < 0) {
    throw Error(ErrorCode::CorruptPayload, "bad scaling block");
  }
  ColumnScaling s;
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorCode::CorruptPayload, "truncated scaling block");
    const auto parts = split(trim(line), ' ');
    double m = 0.0, sd = 0.0;
    if (parts.size() != 2 || !parse_double(parts[0], m) || !parse_double(parts[1], sd)) {
      throw Error(ErrorCode::CorruptPayload, "bad scaling entry");
    }
    s.mean.push_back(m);
    s.stddev.push_back(sd);
  }
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t v = 0;
  if (text.empty()) throw Error(ErrorCode::CorruptPayload, "empty integer");
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw Error(ErrorCode::CorruptPayload, "bad integer '" + text + "'");
    v = v * 10 + static_cast<std::uint64_t>(ch - '0');
  }
  return v;
}

std::filesystem::path horizon_file(const std::filesystem::path& dir, std::size_t h) {
  return dir / ("h" + std::to_string(h) + ".model");
}

}  // namespace

void save_bundle(const MsopBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::string> cols, seeds, horizons;
  for (const auto& c : bundle.columns) cols.push_back(encode_token(c));
  for (const auto& hm : bundle.horizon_models) {
    horizons.push_back(std::to_string(hm.horizon));
    seeds.push_back(std::to_string(hm.seed));
  }
  {
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write manifest in " + dir.string());
    out << "FLUBUNDLE v1\n";
    out << "country=" << encode_token(bundle.target_country) << '\n';
    out << "model=" << to_string(bundle.model_kind) << '\n';
    out << "spec=" << format_spec(bundle.spec) << '\n';
    out << "spec_hash=" << hex64(spec_hash(bundle.spec)) << '\n';
    out << "train_start=" << bundle.train_start.str() << '\n';
    out << "train_end=" << bundle.train_end.str() << '\n';
    out << "seed=" << bundle.seed << '\n';
    out << "horizons=" << join(horizons, ",") << '\n';
    out << "horizon_seeds=" << join(seeds, ",") << '\n';
    out << "columns=" << join(cols, ",") << '\n';
  }
  for (const auto& hm : bundle.horizon_models) {
    std::ofstream out(horizon_file(dir, hm.horizon), std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write model for horizon " + std::to_string(hm.horizon));
    out << "FLUSCALING v1\n";
    write_scaling(out, hm.scaling.features);
    write_scaling(out, hm.scaling.targets);
    hm.model->save(out);
    if (!out) throw Error(ErrorCode::Io, "write failed for horizon " + std::to_string(hm.horizon));
  }
}

MsopBundle load_bundle(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt", std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read manifest in " + dir.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::CorruptPayload, "empty manifest");
  if (line.rfind("FLUBUNDLE ", 0) != 0) throw Error(ErrorCode::CorruptPayload, "not a FLUBUNDLE manifest");
  if (line != "FLUBUNDLE v1") throw Error(ErrorCode::FormatVersionMismatch, "unsupported bundle version");
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::CorruptPayload, "bad manifest line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::CorruptPayload, "manifest lacks '" + key + "'");
    return it->second;
  };

  MsopBundle bundle;
  bundle.target_country = decode_token(get("country"));
  const auto kind = parse_model_kind(get("model"));
  if (!kind) throw Error(ErrorCode::CorruptPayload, "unknown model kind in manifest");
  bundle.model_kind = *kind;
  bundle.spec = parse_spec(get("spec"));
  if (get("spec_hash") != hex64(spec_hash(bundle.spec))) {
    throw Error(ErrorCode::CorruptPayload, "spec hash does not match spec");
  }
  auto tw = [&](const std::string& key) {
    auto w = EpiWeek::parse(get(key));
    if (!w) throw Error(ErrorCode::CorruptPayload, "bad " + key);
    return *w;
  };
  bundle.train_start = tw("train_start");
  bundle.train_end = tw("train_end");
  bundle.seed = parse_u64(get("seed"));
  if (!get("columns").empty()) {
    for (const auto& c : split(get("columns"), ',')) bundle.columns.push_back(decode_token(c));
  }
  const auto horizons = split(get("horizons"), ',');
  const auto seeds = split(get("horizon_seeds"), ',');
  if (horizons.size() != seeds.size() || horizons.size() != bundle.spec.horizons.size()) {
    throw Error(ErrorCode::CorruptPayload, "manifest horizons disagree with spec");
  }
  for (std::size_t j = 0; j < horizons.size(); ++j) {
    HorizonModel hm;
    hm.horizon = static_cast<std::size_t>(parse_u64(horizons[j]));
    hm.seed = parse_u64(seeds[j]);
    if (hm.horizon != bundle.spec.horizons[j]) throw Error(ErrorCode::CorruptPayload, "horizon order mismatch");
    std::ifstream min(horizon_file(dir, hm.horizon), std::ios::binary);
    if (!min) throw Error(ErrorCode::Io, "missing model file for horizon " + horizons[j]);
    if (!std::getline(min, line) || line != "FLUSCALING v1") {
      throw Error(ErrorCode::CorruptPayload, "bad scaling header for horizon " + horizons[j]);
    }
    hm.scaling.features = read_scaling(min);
    hm.scaling.targets = read_scaling(min);
    hm.model = load_regressor(min);
    if (hm.model->kind() != bundle.model_kind) throw Error(ErrorCode::CorruptPayload, "model kind mismatch");
    bundle.horizon_models.push_back(std::move(hm));
  }
  return bundle;
}

}  // namespace flucast
