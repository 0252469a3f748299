#pragma once

#include <Eigen/Dense>
#include <random>
#include <span>
#include <vector>

namespace tactile_rl::td3 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class OutputActivation { Linear, Tanh };

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

// Fully connected network: rectifier on hidden layers, the chosen activation
// on the output layer. Batches are column-major: one sample per column.
struct Mlp {
  std::vector<Layer> layers;
  OutputActivation output = OutputActivation::Linear;

  std::size_t input_dim() const { return layers.front().weight.cols(); }
  std::size_t output_dim() const { return layers.back().weight.rows(); }
  std::vector<int> dims() const;
  std::size_t parameter_count() const;
};

/// Uniform(+-1/sqrt(fan_in)) initialisation for weights and biases.
Mlp make_mlp(std::span<const int> dims, OutputActivation output, Rng& rng);

/// Same shape as `like`, all parameters zero.
Mlp zeros_like(const Mlp& like);

bool same_shape(const Mlp& a, const Mlp& b);

struct ForwardCache {
  std::vector<Matrix> activations;  // [0] = input, [l+1] = output of layer l
};

Matrix forward(const Mlp& net, const Matrix& input, ForwardCache* cache = nullptr);

/// Backpropagates dLoss/dOutput through a cached forward pass. Parameter
/// gradients are accumulated into `grads` when non-null; the gradient with
/// respect to the input is returned.
Matrix backward(const Mlp& net, const ForwardCache& cache, const Matrix& grad_output,
                Mlp* grads);

std::vector<double> flatten(const Mlp& net);
void unflatten(Mlp& net, std::span<const double> values);

/// target <- tau * source + (1 - tau) * target, elementwise.
void soft_update(Mlp& target, const Mlp& source, double tau);

class Adam {
 public:
  explicit Adam(const Mlp& like, double learning_rate = 1e-3, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);

  void step(Mlp& params, const Mlp& grads);
  long steps() const { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  Mlp m_;
  Mlp v_;
  long t_ = 0;
};

}  // namespace tactile_rl::td3
