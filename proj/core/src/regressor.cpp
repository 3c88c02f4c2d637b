// SPDX-License-Identifier: Apache-2.0
#include "flucast/regressor.hpp"

#include <istream>

#include "flucast/baselines.hpp"
#include "flucast/error.hpp"
#include "flucast/forest.hpp"
#include "flucast/lstm.hpp"
#include "flucast/svr.hpp"
#include "model_text.hpp"

namespace flucast {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Lstm: return "lstm";
    case ModelKind::Forest: return "rf";
    case ModelKind::Svr: return "svr";
    case ModelKind::NaiveLast: return "naive";
    case ModelKind::NaiveSeasonal: return "seasonal52";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept {
  for (auto k : {ModelKind::Lstm, ModelKind::Forest, ModelKind::Svr, ModelKind::NaiveLast, ModelKind::NaiveSeasonal}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

bool uses_scaling(ModelKind kind) noexcept { return kind == ModelKind::Lstm || kind == ModelKind::Svr; }

namespace detail {

class ModelLoader {
 public:
  static std::unique_ptr<Regressor> load(const ModelText& mt) {
    const auto kind = parse_model_kind(mt.kind);
    if (!kind) throw Error(ErrorCode::CorruptPayload, "unknown model kind '" + mt.kind + "'");
    switch (*kind) {
      case ModelKind::Lstm: return lstm(mt);
      case ModelKind::Forest: return forest(mt);
      case ModelKind::Svr: return svr(mt);
      case ModelKind::NaiveLast:
      case ModelKind::NaiveSeasonal: return naive(*kind, mt);
    }
    return nullptr;
  }

 private:
  static std::unique_ptr<Regressor> lstm(const ModelText& mt) {
    LstmConfig cfg;
    cfg.layers = mt.unsigned_number("layers");
    cfg.hidden_size = mt.unsigned_number("hidden_size");
    cfg.epochs = mt.unsigned_number("epochs");
    cfg.batch_size = mt.unsigned_number("batch_size");
    cfg.learning_rate = mt.number("learning_rate");
    cfg.momentum = mt.number("momentum");
    cfg.lr_decay = mt.number("lr_decay");
    cfg.gradient_clip = mt.number("gradient_clip");
    cfg.seed = mt.unsigned_number("seed");
    const auto& mode = mt.get("sequence_mode");
    if (mode != "flat" && mode != "windowed") throw Error(ErrorCode::CorruptPayload, "bad sequence_mode");
    cfg.sequence_mode = mode == "flat" ? SequenceMode::Flat : SequenceMode::Windowed;
    auto model = std::make_unique<LstmRegressor>(cfg);
    model->columns_ = mt.columns();
    const LstmShape shape{mt.unsigned_number("input_size"), cfg.hidden_size, cfg.layers,
                          mt.unsigned_number("head_inputs")};
    model->params_ = LstmParams(shape);
    if (mt.data.size() != shape.parameter_count()) {
      throw Error(ErrorCode::CorruptPayload, "LSTM parameter count mismatch");
    }
    std::copy(mt.data.begin(), mt.data.end(), model->params_.values().begin());
    return model;
  }

  static std::unique_ptr<Regressor> forest(const ModelText& mt) {
    ForestConfig cfg;
    cfg.n_trees = mt.unsigned_number("n_trees");
    cfg.max_depth = mt.unsigned_number("max_depth");
    cfg.min_leaf = mt.unsigned_number("min_leaf");
    const auto& fps = mt.get("features_per_split");
    if (fps.rfind("fraction:", 0) == 0) {
      double f = 0.0;
      if (!parse_double(fps.substr(9), f)) throw Error(ErrorCode::CorruptPayload, "bad features_per_split");
      cfg.features_per_split = f;
    } else if (fps.rfind("count:", 0) == 0) {
      long long k = 0;
      if (!parse_int(fps.substr(6), k) || k < 1) throw Error(ErrorCode::CorruptPayload, "bad features_per_split");
      cfg.features_per_split = static_cast<std::size_t>(k);
    } else {
      throw Error(ErrorCode::CorruptPayload, "bad features_per_split");
    }
    cfg.bootstrap = mt.get("bootstrap") == "1";
    cfg.seed = mt.unsigned_number("seed");
    auto model = std::make_unique<ForestRegressor>(cfg);
    model->columns_ = mt.columns();

    const auto& d = mt.data;
    std::size_t pos = 0;
    auto take = [&]() {
      if (pos >= d.size()) throw Error(ErrorCode::CorruptPayload, "truncated forest data");
      return d[pos++];
    };
    for (std::size_t t = 0; t < cfg.n_trees; ++t) {
      const auto count = static_cast<std::size_t>(take());
      std::vector<RegressionTree::Node> nodes(count);
      for (auto& n : nodes) {
        n.feature = static_cast<long>(take());
        n.threshold = take();
        n.left = static_cast<std::size_t>(take());
        n.right = static_cast<std::size_t>(take());
        n.value = take();
        if (n.feature >= 0 && (n.left >= count || n.right >= count ||
                               static_cast<std::size_t>(n.feature) >= model->columns_.size())) {
          throw Error(ErrorCode::CorruptPayload, "forest node out of range");
        }
      }
      if (nodes.empty()) throw Error(ErrorCode::CorruptPayload, "empty tree");
      model->trees_.emplace_back(std::move(nodes));
    }
    if (pos != d.size()) throw Error(ErrorCode::CorruptPayload, "trailing forest data");
    return model;
  }

  static std::unique_ptr<Regressor> svr(const ModelText& mt) {
    SvrConfig cfg;
    cfg.epsilon = mt.number("epsilon");
    cfg.c = mt.number("c");
    cfg.epochs = mt.unsigned_number("epochs");
    cfg.learning_rate = mt.number("learning_rate");
    cfg.seed = mt.unsigned_number("seed");
    auto model = std::make_unique<SvrRegressor>(cfg);
    model->columns_ = mt.columns();
    if (mt.data.size() != model->columns_.size() + 1) throw Error(ErrorCode::CorruptPayload, "SVR weight count");
    model->weights_.assign(mt.data.begin(), mt.data.end() - 1);
    model->bias_ = mt.data.back();
    return model;
  }

  static std::unique_ptr<Regressor> naive(ModelKind kind, const ModelText& mt) {
    auto model = std::make_unique<NaiveRegressor>(kind);
    const auto columns = mt.columns();
    if (!columns.empty()) {
      Matrix probe(0, columns.size());
      model->fit(probe, columns, {}, 0);
    }
    return model;
  }
};

}  // namespace detail

std::unique_ptr<Regressor> load_regressor(std::istream& in) {
  return detail::ModelLoader::load(detail::read_model(in));
}

}  // namespace flucast
