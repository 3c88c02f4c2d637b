// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "flucast/epi_week.hpp"
#include "flucast/features.hpp"
#include "flucast/forest.hpp"
#include "flucast/lstm.hpp"
#include "flucast/regressor.hpp"
#include "flucast/svr.hpp"

namespace flucast {

struct ModelConfigs {
  LstmConfig lstm;
  ForestConfig forest;
  SvrConfig svr;
};

std::unique_ptr<Regressor> make_regressor(ModelKind kind, const ModelConfigs& configs);

/// Seed for the model of horizon h: master XOR h.
constexpr std::uint64_t horizon_seed(std::uint64_t master, std::size_t horizon) noexcept {
  return master ^ static_cast<std::uint64_t>(horizon);
}

/// FNV-1a over the canonical spec string.
std::uint64_t spec_hash(const FeatureSpec& spec) noexcept;

struct HorizonModel {
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  std::unique_ptr<Regressor> model;
  /// Empty for kinds that consume raw values.
  ScalingStats scaling;
};

/// One independently trained model per horizon over identical feature rows.
struct MsopBundle {
  std::string target_country;
  FeatureSpec spec;
  ModelKind model_kind = ModelKind::NaiveLast;
  ColumnNames columns;
  EpiWeek train_start;
  EpiWeek train_end;
  std::uint64_t seed = 0;
  std::vector<HorizonModel> horizon_models;  // spec.horizons order

  const HorizonModel& at(std::size_t horizon) const;
};

/// Fits a fresh model per horizon on (X, Y[:, h]). Any horizon failing aborts
/// the whole bundle; the error message names the horizon.
MsopBundle train_msop(const FeatureMatrix& train, ModelKind kind, const ModelConfigs& configs, std::uint64_t seed);

/// rows x horizons forecast in original units. Predictions never feed back
/// into inputs.
Matrix predict_msop(const MsopBundle& bundle, const FeatureMatrix& rows);

/// Directory with `manifest.txt` and one `h<H>.model` per horizon.
void save_bundle(const MsopBundle& bundle, const std::filesystem::path& dir);
MsopBundle load_bundle(const std::filesystem::path& dir);

}  // namespace flucast
