#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace radtext {

/// One gate's affine map: z = input^T x + recurrent^T h_prev + bias.
struct GateWeights {
  Eigen::MatrixXd input;      // d x h
  Eigen::MatrixXd recurrent;  // h x h
  Eigen::VectorXd bias;       // h
};

struct LstmParams {
  GateWeights input_gate;
  GateWeights forget_gate;
  GateWeights output_gate;
  GateWeights candidate;

  std::size_t input_dim() const { return static_cast<std::size_t>(input_gate.input.rows()); }
  std::size_t hidden() const { return static_cast<std::size_t>(input_gate.input.cols()); }

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden);
  void validate() const;
};

/// Fully connected head: logits = weight^T h + bias.
struct DenseParams {
  Eigen::MatrixXd weight;  // h x c
  Eigen::VectorXd bias;    // c

  std::size_t classes() const { return static_cast<std::size_t>(bias.size()); }
  static DenseParams zeros(std::size_t hidden, std::size_t classes);
};

struct LstmStep {
  Eigen::VectorXd x;
  Eigen::VectorXd h_prev;
  Eigen::VectorXd c_prev;
  Eigen::VectorXd i, f, o, g;
  Eigen::VectorXd c, h;
};

struct LstmForward {
  Eigen::VectorXd hidden;       // final hidden state
  std::vector<LstmStep> steps;  // unmasked steps only, in time order
};

/// Runs the recurrence from zero hidden and cell state. Positions whose mask
/// entry is false are skipped and leave the state untouched. An empty mask
/// means every position is live. Throws Error(validation) on shape mismatch or
/// empty input.
LstmForward lstm_forward(std::span<const Eigen::VectorXd> inputs, const LstmParams& params,
                         std::span<const bool> mask = {});

/// Mutations of the backward pass used to prove the gradient check detects bugs.
enum class BackwardFault { none, drop_cell_carry };

/// Accumulates parameter gradients for dL/dh_final = `d_hidden` into `grads`.
void lstm_backward(const LstmForward& forward, const LstmParams& params, const Eigen::VectorXd& d_hidden,
                   LstmParams& grads, BackwardFault fault = BackwardFault::none);

struct ParameterSet {
  LstmParams lstm;
  DenseParams dense;

  static ParameterSet zeros_like(const ParameterSet& other);
};

/// Visits every parameter tensor as (name, data, rows, cols) in a fixed order.
/// Data is column-major.
template <typename Params, typename Fn>
void for_each_tensor(Params& set, Fn&& fn) {
  auto gate = [&](std::string_view prefix, auto& g) {
    fn(std::string(prefix) + ".input", g.input.data(), g.input.rows(), g.input.cols());
    fn(std::string(prefix) + ".recurrent", g.recurrent.data(), g.recurrent.rows(), g.recurrent.cols());
    fn(std::string(prefix) + ".bias", g.bias.data(), g.bias.rows(), Eigen::Index{1});
  };
  gate("lstm.input_gate", set.lstm.input_gate);
  gate("lstm.forget_gate", set.lstm.forget_gate);
  gate("lstm.output_gate", set.lstm.output_gate);
  gate("lstm.candidate", set.lstm.candidate);
  fn(std::string("dense.weight"), set.dense.weight.data(), set.dense.weight.rows(), set.dense.weight.cols());
  fn(std::string("dense.bias"), set.dense.bias.data(), set.dense.bias.rows(), Eigen::Index{1});
}

double squared_norm(const ParameterSet& set);

}  // namespace radtext
