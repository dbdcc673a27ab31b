#include "radtext/lstm.hpp"

#include <cmath>
#include <string>

#include "radtext/error.hpp"

namespace radtext {

namespace {

GateWeights zero_gate(std::size_t d, std::size_t h) {
  const auto di = static_cast<Eigen::Index>(d);
  const auto hi = static_cast<Eigen::Index>(h);
  return {Eigen::MatrixXd::Zero(di, hi), Eigen::MatrixXd::Zero(hi, hi), Eigen::VectorXd::Zero(hi)};
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double x = z[k];
    if (x >= 0) {
      out[k] = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      out[k] = e / (1.0 + e);
    }
  }
  return out;
}

Eigen::VectorXd pre_activation(const GateWeights& g, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev) {
  return g.input.transpose() * x + g.recurrent.transpose() * h_prev + g.bias;
}

void accumulate(GateWeights& grad, const Eigen::VectorXd& dz, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev) {
  grad.input.noalias() += x * dz.transpose();
  grad.recurrent.noalias() += h_prev * dz.transpose();
  grad.bias += dz;
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden) {
  return {zero_gate(input_dim, hidden), zero_gate(input_dim, hidden), zero_gate(input_dim, hidden),
          zero_gate(input_dim, hidden)};
}

void LstmParams::validate() const {
  const auto d = input_gate.input.rows();
  const auto h = input_gate.input.cols();
  for (const GateWeights* g : {&input_gate, &forget_gate, &output_gate, &candidate}) {
    if (g->input.rows() != d || g->input.cols() != h || g->recurrent.rows() != h || g->recurrent.cols() != h ||
        g->bias.size() != h) {
      throw Error(ErrorKind::validation, "inconsistent LSTM parameter shapes");
    }
    if (!g->input.allFinite() || !g->recurrent.allFinite() || !g->bias.allFinite()) {
      throw Error(ErrorKind::numeric, "non-finite LSTM parameter");
    }
  }
}

DenseParams DenseParams::zeros(std::size_t hidden, std::size_t classes) {
  return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(classes)),
          Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes))};
}

ParameterSet ParameterSet::zeros_like(const ParameterSet& other) {
  return {LstmParams::zeros(other.lstm.input_dim(), other.lstm.hidden()),
          DenseParams::zeros(other.lstm.hidden(), other.dense.classes())};
}

double squared_norm(const ParameterSet& set) {
  double total = 0.0;
  for_each_tensor(set, [&](const std::string&, const double* data, Eigen::Index rows, Eigen::Index cols) {
    for (Eigen::Index k = 0; k < rows * cols; ++k) total += data[k] * data[k];
  });
  return total;
}

LstmForward lstm_forward(std::span<const Eigen::VectorXd> inputs, const LstmParams& params, std::span<const bool> mask) {
  if (inputs.empty()) throw Error(ErrorKind::validation, "LSTM input sequence is empty");
  if (!mask.empty() && mask.size() != inputs.size()) {
    throw Error(ErrorKind::validation, "mask length does not match input length");
  }
  const auto d = static_cast<Eigen::Index>(params.input_dim());
  const auto h = static_cast<Eigen::Index>(params.hidden());

  LstmForward out;
  out.steps.reserve(inputs.size());
  Eigen::VectorXd h_state = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd c_state = Eigen::VectorXd::Zero(h);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (!mask.empty() && !mask[t]) continue;
    const auto& x = inputs[t];
    if (x.size() != d) {
      throw Error(ErrorKind::validation, "input at step " + std::to_string(t) + " has dimension " +
                                             std::to_string(x.size()) + ", expected " + std::to_string(d));
    }
    LstmStep step;
    step.x = x;
    step.h_prev = h_state;
    step.c_prev = c_state;
    step.i = sigmoid(pre_activation(params.input_gate, x, h_state));
    step.f = sigmoid(pre_activation(params.forget_gate, x, h_state));
    step.o = sigmoid(pre_activation(params.output_gate, x, h_state));
    step.g = pre_activation(params.candidate, x, h_state).array().tanh().matrix();
    step.c = step.f.cwiseProduct(c_state) + step.i.cwiseProduct(step.g);
    step.h = step.o.cwiseProduct(step.c.array().tanh().matrix());
    h_state = step.h;
    c_state = step.c;
    out.steps.push_back(std::move(step));
  }
  out.hidden = h_state;
  return out;
}

void lstm_backward(const LstmForward& forward, const LstmParams& params, const Eigen::VectorXd& d_hidden,
                   LstmParams& grads, BackwardFault fault) {
  const auto h = static_cast<Eigen::Index>(params.hidden());
  Eigen::VectorXd dh = d_hidden;
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(h);
  for (auto it = forward.steps.rbegin(); it != forward.steps.rend(); ++it) {
    const LstmStep& s = *it;
    const Eigen::ArrayXd tanh_c = s.c.array().tanh();
    const Eigen::ArrayXd d_o = dh.array() * tanh_c;
    dc.array() += dh.array() * s.o.array() * (1.0 - tanh_c.square());

    const Eigen::ArrayXd d_i = dc.array() * s.g.array();
    const Eigen::ArrayXd d_g = dc.array() * s.i.array();
    const Eigen::ArrayXd d_f = dc.array() * s.c_prev.array();

    const Eigen::VectorXd dz_i = (d_i * s.i.array() * (1.0 - s.i.array())).matrix();
    const Eigen::VectorXd dz_f = (d_f * s.f.array() * (1.0 - s.f.array())).matrix();
    const Eigen::VectorXd dz_o = (d_o * s.o.array() * (1.0 - s.o.array())).matrix();
    const Eigen::VectorXd dz_g = (d_g * (1.0 - s.g.array().square())).matrix();

    accumulate(grads.input_gate, dz_i, s.x, s.h_prev);
    accumulate(grads.forget_gate, dz_f, s.x, s.h_prev);
    accumulate(grads.output_gate, dz_o, s.x, s.h_prev);
    accumulate(grads.candidate, dz_g, s.x, s.h_prev);

    dh = params.input_gate.recurrent * dz_i + params.forget_gate.recurrent * dz_f +
         params.output_gate.recurrent * dz_o + params.candidate.recurrent * dz_g;
    if (fault == BackwardFault::drop_cell_carry) {
      dc.setZero();
    } else {
      dc = (dc.array() * s.f.array()).matrix();
    }
  }
}

}  // namespace radtext
