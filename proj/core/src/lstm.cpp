// SPDX-License-Identifier: Apache-2.0
#include "flucast/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "flucast/error.hpp"
#include "flucast/rng.hpp"
#include "model_text.hpp"

namespace flucast {

std::string_view to_string(SequenceMode mode) noexcept {
  return mode == SequenceMode::Flat ? "flat" : "windowed";
}

void LstmConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, "lstm: " + msg); };
  if (layers < 1) fail("layers must be >= 1");
  if (hidden_size < 1) fail("hidden_size must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(gradient_clip > 0.0)) fail("gradient_clip must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must be in [0, 1)");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) fail("lr_decay must be in (0, 1]");
}

std::size_t LstmShape::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layers; ++l) n += 4 * hidden_size * (layer_input(l) + hidden_size + 1);
  return n + hidden_size + head_inputs + 1;
}

LstmParams::LstmParams(const LstmShape& shape) : shape_(shape), values_(shape.parameter_count(), 0.0) {
  const std::size_t H = shape.hidden_size;
  std::size_t off = 0;
  for (std::size_t l = 0; l < shape.layers; ++l) {
    offsets_.push_back(off);
    off += 4 * H * shape.layer_input(l);
    offsets_.push_back(off);
    off += 4 * H * H;
    offsets_.push_back(off);
    off += 4 * H;
  }
  offsets_.push_back(off);
}

std::span<double> LstmParams::block(std::size_t layer, int which) {
  const std::size_t H = shape_.hidden_size;
  const std::size_t sizes[3] = {4 * H * shape_.layer_input(layer), 4 * H * H, 4 * H};
  return {values_.data() + offsets_[3 * layer + static_cast<std::size_t>(which)], sizes[which]};
}

std::span<const double> LstmParams::block(std::size_t layer, int which) const {
  return const_cast<LstmParams*>(this)->block(layer, which);
}

std::span<double> LstmParams::head_weights() {
  return {values_.data() + offsets_.back(), shape_.hidden_size + shape_.head_inputs};
}

std::span<const double> LstmParams::head_weights() const {
  return const_cast<LstmParams*>(this)->head_weights();
}

void LstmParams::initialize(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t H = shape_.hidden_size;
  for (std::size_t l = 0; l < shape_.layers; ++l) {
    const double r = 1.0 / std::sqrt(static_cast<double>(shape_.layer_input(l) + H));
    for (auto& w : input_weights(l)) w = rng.uniform(-r, r);
    for (auto& w : recurrent_weights(l)) w = rng.uniform(-r, r);
    auto b = bias(l);
    std::fill(b.begin(), b.end(), 0.0);
    std::fill(b.begin() + static_cast<std::ptrdiff_t>(H), b.begin() + static_cast<std::ptrdiff_t>(2 * H), 1.0);
  }
  const double r = 1.0 / std::sqrt(static_cast<double>(H + shape_.head_inputs));
  for (auto& w : head_weights()) w = rng.uniform(-r, r);
  head_bias() = 0.0;
}

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double lstm_forward_into(const LstmParams& params, const Matrix& sequence, std::span<const double> head_inputs,
                         LstmCache& cache) {
  const auto& shape = params.shape();
  const std::size_t T = sequence.rows();
  const std::size_t H = shape.hidden_size;
  if (T == 0 || sequence.cols() != shape.input_size || head_inputs.size() != shape.head_inputs) {
    throw Error(ErrorCode::ShapeMismatch, "sequence " + std::to_string(T) + "x" + std::to_string(sequence.cols()) +
                                              " with " + std::to_string(head_inputs.size()) +
                                              " head inputs does not fit network input " +
                                              std::to_string(shape.input_size) + "/" +
                                              std::to_string(shape.head_inputs));
  }
  for (double v : sequence.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite value in sequence");
  }
  for (double v : head_inputs) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite head input");
  }

  cache.steps = T;
  cache.sequence = sequence;
  cache.head_inputs.assign(head_inputs.begin(), head_inputs.end());
  cache.gates.resize(shape.layers);
  cache.cell.resize(shape.layers);
  cache.cell_tanh.resize(shape.layers);
  cache.hidden.resize(shape.layers);

  for (std::size_t l = 0; l < shape.layers; ++l) {
    cache.gates[l].resize(T * 4 * H);
    cache.cell[l].resize(T * H);
    cache.cell_tanh[l].resize(T * H);
    cache.hidden[l].resize(T * H);
  }

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t l = 0; l < shape.layers; ++l) {
      const std::size_t in = shape.layer_input(l);
      const double* x = l == 0 ? sequence.row(t).data() : cache.hidden[l - 1].data() + t * H;
      const double* W = params.input_weights(l).data();
      const double* U = params.recurrent_weights(l).data();
      const double* b = params.bias(l).data();
      double* z = cache.gates[l].data() + t * 4 * H;
      const double* h_prev = t > 0 ? cache.hidden[l].data() + (t - 1) * H : nullptr;
      const double* c_prev = t > 0 ? cache.cell[l].data() + (t - 1) * H : nullptr;

      for (std::size_t r = 0; r < 4 * H; ++r) {
        double s = b[r];
        const double* wr = W + r * in;
        for (std::size_t k = 0; k < in; ++k) s += wr[k] * x[k];
        if (h_prev) {
          const double* ur = U + r * H;
          for (std::size_t k = 0; k < H; ++k) s += ur[k] * h_prev[k];
        }
        z[r] = s;
      }
      double* c = cache.cell[l].data() + t * H;
      double* tc = cache.cell_tanh[l].data() + t * H;
      double* h = cache.hidden[l].data() + t * H;
      for (std::size_t k = 0; k < H; ++k) {
        const double i = sigmoid(z[k]);
        const double f = sigmoid(z[H + k]);
        const double o = sigmoid(z[2 * H + k]);
        const double g = std::tanh(z[3 * H + k]);
        z[k] = i;
        z[H + k] = f;
        z[2 * H + k] = o;
        z[3 * H + k] = g;
        c[k] = f * (c_prev ? c_prev[k] : 0.0) + i * g;
        tc[k] = std::tanh(c[k]);
        h[k] = o * tc[k];
      }
    }
  }

  const auto hw = params.head_weights();
  const double* h_last = cache.hidden.back().data() + (T - 1) * H;
  double y = params.head_bias();
  for (std::size_t k = 0; k < H; ++k) y += hw[k] * h_last[k];
  for (std::size_t j = 0; j < head_inputs.size(); ++j) y += hw[H + j] * head_inputs[j];
  return y;
}

LstmOutput lstm_forward(const LstmParams& params, const Matrix& sequence, std::span<const double> head_inputs) {
  LstmOutput out;
  out.prediction = lstm_forward_into(params, sequence, head_inputs, out.cache);
  return out;
}

void lstm_accumulate_gradients(const LstmParams& params, const LstmCache& cache, double loss_grad,
                               LstmParams& grads) {
  const auto& shape = params.shape();
  if (!(grads.shape() == shape) || cache.steps == 0 || cache.hidden.size() != shape.layers ||
      cache.sequence.cols() != shape.input_size || cache.head_inputs.size() != shape.head_inputs) {
    throw Error(ErrorCode::ShapeMismatch, "cache or gradient buffer does not match the network");
  }
  const std::size_t T = cache.steps;
  const std::size_t H = shape.hidden_size;
  const std::size_t top = shape.layers - 1;

  const auto hw = params.head_weights();
  auto ghw = grads.head_weights();
  const double* h_last = cache.hidden[top].data() + (T - 1) * H;
  grads.head_bias() += loss_grad;
  for (std::size_t k = 0; k < H; ++k) ghw[k] += loss_grad * h_last[k];
  for (std::size_t j = 0; j < shape.head_inputs; ++j) ghw[H + j] += loss_grad * cache.head_inputs[j];

  std::vector<std::vector<double>> dh_next(shape.layers, std::vector<double>(H, 0.0));
  std::vector<std::vector<double>> dc_next(shape.layers, std::vector<double>(H, 0.0));
  std::vector<double> dz(4 * H), dh(H), dx_below(H, 0.0);

  for (std::size_t tt = T; tt-- > 0;) {
    for (std::size_t ll = shape.layers; ll-- > 0;) {
      const std::size_t in = shape.layer_input(ll);
      for (std::size_t k = 0; k < H; ++k) {
        double v = dh_next[ll][k];
        if (ll == top) {
          if (tt == T - 1) v += loss_grad * hw[k];
        } else {
          v += dx_below[k];
        }
        dh[k] = v;
      }

      const double* gate = cache.gates[ll].data() + tt * 4 * H;
      const double* tc = cache.cell_tanh[ll].data() + tt * H;
      const double* c_prev = tt > 0 ? cache.cell[ll].data() + (tt - 1) * H : nullptr;
      const double* h_prev = tt > 0 ? cache.hidden[ll].data() + (tt - 1) * H : nullptr;
      const double* x = ll == 0 ? cache.sequence.row(tt).data() : cache.hidden[ll - 1].data() + tt * H;

      for (std::size_t k = 0; k < H; ++k) {
        const double i = gate[k], f = gate[H + k], o = gate[2 * H + k], g = gate[3 * H + k];
        const double dc = dh[k] * o * (1.0 - tc[k] * tc[k]) + dc_next[ll][k];
        dz[k] = dc * g * i * (1.0 - i);
        dz[H + k] = c_prev ? dc * c_prev[k] * f * (1.0 - f) : 0.0;
        dz[2 * H + k] = dh[k] * tc[k] * o * (1.0 - o);
        dz[3 * H + k] = dc * i * (1.0 - g * g);
        dc_next[ll][k] = dc * f;
      }

      const double* W = params.input_weights(ll).data();
      const double* U = params.recurrent_weights(ll).data();
      double* gW = grads.input_weights(ll).data();
      double* gU = grads.recurrent_weights(ll).data();
      double* gb = grads.bias(ll).data();

      for (std::size_t r = 0; r < 4 * H; ++r) {
        const double d = dz[r];
        gb[r] += d;
        double* gwr = gW + r * in;
        for (std::size_t k = 0; k < in; ++k) gwr[k] += d * x[k];
        if (h_prev) {
          double* gur = gU + r * H;
          for (std::size_t k = 0; k < H; ++k) gur[k] += d * h_prev[k];
        }
      }

      // dh for the previous step of this layer
      auto& dhn = dh_next[ll];
      std::fill(dhn.begin(), dhn.end(), 0.0);
      if (h_prev) {
        for (std::size_t r = 0; r < 4 * H; ++r) {
          const double d = dz[r];
          const double* ur = U + r * H;
          for (std::size_t k = 0; k < H; ++k) dhn[k] += d * ur[k];
        }
      }
      // gradient flowing into the layer below at this step
      if (ll > 0) {
        std::fill(dx_below.begin(), dx_below.end(), 0.0);
        for (std::size_t r = 0; r < 4 * H; ++r) {
          const double d = dz[r];
          const double* wr = W + r * in;
          for (std::size_t k = 0; k < in; ++k) dx_below[k] += d * wr[k];
        }
      }
    }
  }
}

LstmParams lstm_backward(const LstmParams& params, const LstmCache& cache, double loss_grad) {
  LstmParams grads(params.shape());
  lstm_accumulate_gradients(params, cache, loss_grad, grads);
  return grads;
}

// ---------------------------------------------------------------------------

SequenceLayout SequenceLayout::from_columns(SequenceMode mode, const ColumnNames& columns) {
  SequenceLayout layout;
  if (columns.empty()) throw Error(ErrorCode::MissingFeatureColumn, "no feature columns");
  if (mode == SequenceMode::Flat) {
    layout.steps_ = 1;
    layout.step_size_ = columns.size();
    for (std::size_t c = 0; c < columns.size(); ++c) layout.step_columns_.push_back(static_cast<long>(c));
    return layout;
  }

  auto parse_index = [](std::string_view text, std::size_t& out) {
    if (text.empty()) return false;
    out = 0;
    for (char ch : text) {
      if (ch < '0' || ch > '9') return false;
      out = out * 10 + static_cast<std::size_t>(ch - '0');
    }
    return true;
  };

  std::map<std::size_t, std::size_t> lags, diffs;
  std::vector<std::string> spatial_order;
  std::map<std::string, std::map<std::size_t, std::size_t>> spatial;
  std::vector<bool> in_sequence(columns.size(), false);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::string_view name = columns[c];
    std::size_t k = 0;
    if (name.rfind("t.lag.", 0) == 0 && parse_index(name.substr(6), k)) {
      lags[k] = c;
      in_sequence[c] = true;
    } else if (name.rfind("t.diff.", 0) == 0 && parse_index(name.substr(7), k)) {
      diffs[k] = c;
      in_sequence[c] = true;
    } else if (name.rfind("s.", 0) == 0) {
      const auto pos = name.rfind(".lag.");
      if (pos != std::string_view::npos && pos > 2 && parse_index(name.substr(pos + 5), k)) {
        std::string country(name.substr(2, pos - 2));
        if (!spatial.count(country)) spatial_order.push_back(country);
        spatial[country][k] = c;
        in_sequence[c] = true;
      }
    }
  }
  if (lags.empty() || !lags.count(0)) throw Error(ErrorCode::MissingFeatureColumn, "windowed LSTM needs t.lag.0");
  const std::size_t L = lags.size();
  if (lags.rbegin()->first != L - 1) throw Error(ErrorCode::MissingFeatureColumn, "t.lag.* columns are not contiguous");

  const bool has_diff = !diffs.empty();
  layout.steps_ = L;
  layout.step_size_ = 1 + (has_diff ? 1 : 0) + spatial_order.size();
  for (std::size_t j = 0; j < L; ++j) {
    const std::size_t K = L - 1 - j;
    layout.step_columns_.push_back(static_cast<long>(lags[K]));
    if (has_diff) {
      auto it = diffs.find(K);
      layout.step_columns_.push_back(it == diffs.end() ? -1L : static_cast<long>(it->second));
    }
    for (const auto& country : spatial_order) {
      const auto& m = spatial[country];
      auto it = m.find(K);
      layout.step_columns_.push_back(it == m.end() ? -1L : static_cast<long>(it->second));
    }
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (!in_sequence[c]) layout.head_columns_.push_back(c);
  }
  return layout;
}

void SequenceLayout::sequence(std::span<const double> row, Matrix& out) const {
  if (out.rows() != steps_ || out.cols() != step_size_) out = Matrix(steps_, step_size_);
  auto dst = out.values();
  for (std::size_t i = 0; i < step_columns_.size(); ++i) {
    const long c = step_columns_[i];
    dst[i] = c < 0 ? 0.0 : row[static_cast<std::size_t>(c)];
  }
}

void SequenceLayout::head(std::span<const double> row, std::vector<double>& out) const {
  out.resize(head_columns_.size());
  for (std::size_t i = 0; i < head_columns_.size(); ++i) out[i] = row[head_columns_[i]];
}

// ---------------------------------------------------------------------------

LstmRegressor::LstmRegressor(LstmConfig config) : config_(config) { config_.validate(); }

void LstmRegressor::fit(const Matrix& x, const ColumnNames& columns, std::span<const double> y, std::uint64_t seed) {
  config_.validate();
  const std::size_t n = x.rows();
  if (columns.size() != x.cols()) throw Error(ErrorCode::DimensionMismatch, "column names do not match matrix");
  if (y.size() != n) throw Error(ErrorCode::DimensionMismatch, "target length differs from row count");
  if (n == 0 || n < config_.batch_size) {
    throw Error(ErrorCode::InsufficientData, std::to_string(n) + " rows is fewer than batch size " +
                                                 std::to_string(config_.batch_size));
  }
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite feature value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite target value");
  }

  const auto layout = SequenceLayout::from_columns(config_.sequence_mode, columns);
  const LstmShape shape{layout.step_size(), config_.hidden_size, config_.layers, layout.head_size()};
  columns_ = columns;
  config_.seed = seed;
  params_ = LstmParams(shape);
  params_.initialize(derive_seed(seed, 0));
  epoch_loss_.clear();

  std::vector<Matrix> sequences(n);
  std::vector<std::vector<double>> heads(n);
  for (std::size_t r = 0; r < n; ++r) {
    layout.sequence(x.row(r), sequences[r]);
    layout.head(x.row(r), heads[r]);
  }

  LstmParams grads(shape), velocity(shape);
  LstmCache cache;
  Rng rng(derive_seed(seed, 1));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  double lr = config_.learning_rate;
  auto p = params_.values();
  auto g = grads.values();
  auto v = velocity.values();
  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += config_.batch_size) {
      const std::size_t stop = std::min(n, start + config_.batch_size);
      const double scale = 1.0 / static_cast<double>(stop - start);
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t r = order[b];
        const double pred = lstm_forward_into(params_, sequences[r], heads[r], cache);
        const double err = pred - y[r];
        total += err * err;
        lstm_accumulate_gradients(params_, cache, 2.0 * err * scale, grads);
      }
      double norm2 = 0.0;
      for (double gi : g) norm2 += gi * gi;
      const double norm = std::sqrt(norm2);
      const double clip = norm > config_.gradient_clip ? config_.gradient_clip / norm : 1.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        v[i] = config_.momentum * v[i] - lr * clip * g[i];
        p[i] += v[i];
      }
    }
    const double mean_loss = total / static_cast<double>(n);
    epoch_loss_.push_back(mean_loss);
    if (!std::isfinite(mean_loss)) {
      throw Error(ErrorCode::DivergedTraining, "non-finite training loss at epoch " + std::to_string(epoch + 1));
    }
    lr *= config_.lr_decay;
  }
  for (double pi : p) {
    if (!std::isfinite(pi)) throw Error(ErrorCode::DivergedTraining, "non-finite parameter after training");
  }
}

std::vector<double> LstmRegressor::predict(const Matrix& x, const ColumnNames& columns) const {
  if (params_.values().empty()) throw Error(ErrorCode::ShapeMismatch, "LSTM has not been fitted");
  if (columns != columns_) throw Error(ErrorCode::SchemaMismatch, "feature columns differ from training schema");
  if (x.cols() != columns.size()) throw Error(ErrorCode::DimensionMismatch, "column names do not match matrix");
  const auto layout = SequenceLayout::from_columns(config_.sequence_mode, columns_);
  std::vector<double> out(x.rows());
  Matrix seq;
  std::vector<double> head;
  LstmCache cache;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    layout.sequence(x.row(r), seq);
    layout.head(x.row(r), head);
    out[r] = lstm_forward_into(params_, seq, head, cache);
  }
  return out;
}

std::vector<double> LstmRegressor::parameters() const {
  return {params_.values().begin(), params_.values().end()};
}

void LstmRegressor::save(std::ostream& out) const {
  const auto& s = params_.shape();
  detail::write_model(out, to_string(kind()),
                      {{"layers", std::to_string(config_.layers)},
                       {"hidden_size", std::to_string(config_.hidden_size)},
                       {"epochs", std::to_string(config_.epochs)},
                       {"batch_size", std::to_string(config_.batch_size)},
                       {"learning_rate", format_double(config_.learning_rate)},
                       {"momentum", format_double(config_.momentum)},
                       {"lr_decay", format_double(config_.lr_decay)},
                       {"gradient_clip", format_double(config_.gradient_clip)},
                       {"seed", std::to_string(config_.seed)},
                       {"sequence_mode", std::string(to_string(config_.sequence_mode))},
                       {"input_size", std::to_string(s.input_size)},
                       {"head_inputs", std::to_string(s.head_inputs)},
                       {"columns", detail::encode_columns(columns_)}},
                      parameters());
}

LstmRegressor fit_lstm(const LstmConfig& config, const Matrix& x, const ColumnNames& columns,
                       std::span<const double> y) {
  LstmRegressor model(config);
  model.fit(x, columns, y, config.seed);
  return model;
}

}  // namespace flucast
