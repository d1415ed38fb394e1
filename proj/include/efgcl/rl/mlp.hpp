#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace efgcl::rl {

using Rng = std::mt19937_64;

/// Fully connected network: tanh on every hidden layer, linear output.
///
/// Batched calls take one sample per column (features x batch), which keeps
/// the forward and backward passes as plain matrix products.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out
  };

  /// Activations recorded by a batched forward pass, consumed by backward().
  struct Tape {
    std::vector<Eigen::MatrixXd> activations;  // input, hidden..., output
  };

  Mlp() = default;

  /// All-zero parameters for the given layer sizes (input first, output last).
  explicit Mlp(const std::vector<int>& sizes);

  /// Glorot-uniform weights, zero biases. The output layer is scaled by
  /// output_gain so a fresh policy starts close to its bias.
  static Mlp random(const std::vector<int>& sizes, Rng& rng,
                    double output_gain = 1.0);

  int input_size() const;
  int output_size() const;
  std::vector<int> sizes() const;
  int parameter_count() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs, Tape& tape) const;

  /// Accumulates dL/dparams into `grad` (same shape as *this) given dL/doutput
  /// for the batch recorded in `tape`. Returns dL/dinput.
  Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& grad_output,
                           Mlp& grad) const;

  /// Parameters laid out layer by layer, weight (column-major) then bias.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);

  void set_zero();
  bool all_finite() const;

 private:
  void check_input_rows(Eigen::Index rows) const;

  std::vector<Layer> layers_;
};

}  // namespace efgcl::rl
