// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "flucast/matrix.hpp"
#include "flucast/regressor.hpp"

namespace flucast {

/// How a feature row becomes an input sequence.
///  - Windowed: the lag window is the time axis. Step j (oldest first) carries
///    the target's lag-K value, its lag-K difference (zero where absent) and
///    every spatial country's lag-K value, K = lag_depth-1-j. Remaining
///    columns (rolling statistics) feed the dense head next to the final
///    hidden state.
///  - Flat: the whole row is a single step; no head-only inputs.
enum class SequenceMode { Flat, Windowed };

std::string_view to_string(SequenceMode mode) noexcept;

struct LstmConfig {
  std::size_t layers = 3;
  std::size_t hidden_size = 32;
  std::size_t epochs = 200;
  std::size_t batch_size = 16;
  double learning_rate = 0.005;
  double momentum = 0.9;
  double lr_decay = 0.99;  // multiplicative, applied once per epoch
  double gradient_clip = 5.0;
  std::uint64_t seed = 0;
  SequenceMode sequence_mode = SequenceMode::Windowed;

  void validate() const;
};

struct LstmShape {
  std::size_t input_size = 1;
  std::size_t hidden_size = 1;
  std::size_t layers = 1;
  std::size_t head_inputs = 0;

  std::size_t layer_input(std::size_t layer) const noexcept { return layer == 0 ? input_size : hidden_size; }
  std::size_t parameter_count() const noexcept;

  friend bool operator==(const LstmShape&, const LstmShape&) = default;
};

/// All weights in one flat buffer. Per layer: W (4H x in), U (4H x H), b (4H),
/// gate blocks ordered input, forget, output, candidate. Then the dense head:
/// weights over [h_T ; head inputs] and a scalar bias.
class LstmParams {
 public:
  LstmParams() = default;
  explicit LstmParams(const LstmShape& shape);

  const LstmShape& shape() const noexcept { return shape_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<double> input_weights(std::size_t layer) { return block(layer, 0); }
  std::span<double> recurrent_weights(std::size_t layer) { return block(layer, 1); }
  std::span<double> bias(std::size_t layer) { return block(layer, 2); }
  std::span<const double> input_weights(std::size_t layer) const { return block(layer, 0); }
  std::span<const double> recurrent_weights(std::size_t layer) const { return block(layer, 1); }
  std::span<const double> bias(std::size_t layer) const { return block(layer, 2); }
  std::span<double> head_weights();
  std::span<const double> head_weights() const;
  double& head_bias() { return values_.back(); }
  double head_bias() const { return values_.back(); }

  /// uniform(-r, r), r = 1/sqrt(fan_in); forget-gate biases 1, other biases 0.
  void initialize(std::uint64_t seed);

  friend bool operator==(const LstmParams&, const LstmParams&) = default;

 private:
  std::span<double> block(std::size_t layer, int which);
  std::span<const double> block(std::size_t layer, int which) const;

  LstmShape shape_;
  std::vector<double> values_;
  std::vector<std::size_t> offsets_;  // 3 per layer + head
};

/// Activations kept for BPTT. Per layer, arrays are T x 4H (gates after their
/// nonlinearity) and T x H (cell, tanh(cell), hidden).
struct LstmCache {
  std::size_t steps = 0;
  Matrix sequence;
  std::vector<double> head_inputs;
  std::vector<std::vector<double>> gates;
  std::vector<std::vector<double>> cell;
  std::vector<std::vector<double>> cell_tanh;
  std::vector<std::vector<double>> hidden;
};

struct LstmOutput {
  double prediction = 0.0;
  LstmCache cache;
};

/// Throws ShapeMismatch or NonFiniteInput.
LstmOutput lstm_forward(const LstmParams& params, const Matrix& sequence, std::span<const double> head_inputs = {});

/// Writes the forward pass into `cache`, reusing its storage.
double lstm_forward_into(const LstmParams& params, const Matrix& sequence, std::span<const double> head_inputs,
                         LstmCache& cache);

/// Gradients of the loss w.r.t. every parameter given dLoss/dPrediction.
LstmParams lstm_backward(const LstmParams& params, const LstmCache& cache, double loss_grad);

/// Adds the gradients into `grads` (same shape as params).
void lstm_accumulate_gradients(const LstmParams& params, const LstmCache& cache, double loss_grad,
                               LstmParams& grads);

/// Column-to-sequence mapping derived from feature names.
class SequenceLayout {
 public:
  static SequenceLayout from_columns(SequenceMode mode, const ColumnNames& columns);

  std::size_t steps() const noexcept { return steps_; }
  std::size_t step_size() const noexcept { return step_size_; }
  std::size_t head_size() const noexcept { return head_columns_.size(); }

  void sequence(std::span<const double> row, Matrix& out) const;
  void head(std::span<const double> row, std::vector<double>& out) const;

 private:
  std::size_t steps_ = 0;
  std::size_t step_size_ = 0;
  std::vector<long> step_columns_;  // steps x step_size, -1 feeds a zero
  std::vector<std::size_t> head_columns_;
};

class LstmRegressor final : public Regressor {
 public:
  explicit LstmRegressor(LstmConfig config = {});

  ModelKind kind() const noexcept override { return ModelKind::Lstm; }
  void fit(const Matrix& x, const ColumnNames& columns, std::span<const double> y, std::uint64_t seed) override;
  std::vector<double> predict(const Matrix& x, const ColumnNames& columns) const override;
  std::vector<double> parameters() const override;
  void save(std::ostream& out) const override;
  std::unique_ptr<Regressor> clone() const override { return std::make_unique<LstmRegressor>(*this); }

  const LstmConfig& config() const noexcept { return config_; }
  const LstmParams& params() const noexcept { return params_; }
  /// Mean minibatch loss per epoch from the last fit.
  const std::vector<double>& epoch_loss() const noexcept { return epoch_loss_; }

 private:
  friend class detail::ModelLoader;

  LstmConfig config_;
  ColumnNames columns_;
  LstmParams params_;
  std::vector<double> epoch_loss_;
};

/// Trains with config.seed.
LstmRegressor fit_lstm(const LstmConfig& config, const Matrix& x, const ColumnNames& columns,
                       std::span<const double> y);

}  // namespace flucast
