#include "efgcl/rl/mlp.hpp"

#include <cmath>
#include <string>

#include "efgcl/errors.hpp"

namespace efgcl::rl {

Mlp::Mlp(const std::vector<int>& sizes) {
  if (sizes.size() < 2) {
    throw ConfigError("mlp needs at least an input and an output size");
  }
  for (int s : sizes) {
    if (s <= 0) throw ConfigError("mlp layer sizes must be positive");
  }
  layers_.reserve(sizes.size() - 1);
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    layers_.push_back({Eigen::MatrixXd::Zero(sizes[i + 1], sizes[i]),
                       Eigen::VectorXd::Zero(sizes[i + 1])});
  }
}

Mlp Mlp::random(const std::vector<int>& sizes, Rng& rng, double output_gain) {
  Mlp net(sizes);
  for (std::size_t l = 0; l < net.layers_.size(); ++l) {
    auto& layer = net.layers_[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.cols() +
                                                             layer.weight.rows()));
    const double gain = (l + 1 == net.layers_.size()) ? output_gain : 1.0;
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        layer.weight(r, c) = gain * dist(rng);
      }
    }
  }
  return net;
}

int Mlp::input_size() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int Mlp::output_size() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

std::vector<int> Mlp::sizes() const {
  std::vector<int> out;
  if (layers_.empty()) return out;
  out.push_back(input_size());
  for (const auto& layer : layers_) out.push_back(static_cast<int>(layer.weight.rows()));
  return out;
}

int Mlp::parameter_count() const {
  int n = 0;
  for (const auto& layer : layers_) {
    n += static_cast<int>(layer.weight.size() + layer.bias.size());
  }
  return n;
}

void Mlp::check_input_rows(Eigen::Index rows) const {
  if (layers_.empty()) throw ConfigError("mlp has no layers");
  if (rows != layers_.front().weight.cols()) {
    throw ConfigError("mlp input has " + std::to_string(rows) +
                      " features, expected " + std::to_string(input_size()));
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  check_input_rows(input.size());
  Eigen::VectorXd x = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weight * x + layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.array().tanh();
    x = std::move(z);
  }
  return x;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& inputs) const {
  check_input_rows(inputs.rows());
  Eigen::MatrixXd x = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * x;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.array().tanh();
    x = std::move(z);
  }
  return x;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& inputs, Tape& tape) const {
  check_input_rows(inputs.rows());
  tape.activations.resize(layers_.size() + 1);
  tape.activations[0] = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * tape.activations[l];
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.array().tanh();
    tape.activations[l + 1] = std::move(z);
  }
  return tape.activations.back();
}

Eigen::MatrixXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& grad_output,
                              Mlp& grad) const {
  if (grad.layers_.size() != layers_.size()) grad = Mlp(sizes());
  Eigen::MatrixXd delta = grad_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    if (l + 1 < layers_.size()) {
      // tanh'(z) = 1 - tanh(z)^2, and the tape holds tanh(z).
      delta.array() *= 1.0 - tape.activations[l + 1].array().square();
    }
    grad.layers_[l].weight.noalias() += delta * tape.activations[l].transpose();
    grad.layers_[l].bias += delta.rowwise().sum();
    delta = layers_[l].weight.transpose() * delta;
  }
  return delta;
}

Eigen::VectorXd Mlp::flatten() const {
  Eigen::VectorXd flat(parameter_count());
  Eigen::Index offset = 0;
  for (const auto& layer : layers_) {
    flat.segment(offset, layer.weight.size()) =
        Eigen::Map<const Eigen::VectorXd>(layer.weight.data(), layer.weight.size());
    offset += layer.weight.size();
    flat.segment(offset, layer.bias.size()) = layer.bias;
    offset += layer.bias.size();
  }
  return flat;
}

void Mlp::assign(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) {
    throw ConfigError("flat parameter vector has wrong length");
  }
  Eigen::Index offset = 0;
  for (auto& layer : layers_) {
    Eigen::Map<Eigen::VectorXd>(layer.weight.data(), layer.weight.size()) =
        flat.segment(offset, layer.weight.size());
    offset += layer.weight.size();
    layer.bias = flat.segment(offset, layer.bias.size());
    offset += layer.bias.size();
  }
}

void Mlp::set_zero() {
  for (auto& layer : layers_) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
}

bool Mlp::all_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

}  // namespace efgcl::rl
