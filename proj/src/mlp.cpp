#include "tactile_rl/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tactile_rl::td3 {

std::vector<int> Mlp::dims() const {
  std::vector<int> d;
  if (layers.empty()) return d;
  d.push_back(static_cast<int>(layers.front().weight.cols()));
  for (const auto& layer : layers) d.push_back(static_cast<int>(layer.weight.rows()));
  return d;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weight.size() + layer.bias.size();
  return n;
}

Mlp make_mlp(std::span<const int> dims, OutputActivation output, Rng& rng) {
  if (dims.size() < 2) throw std::invalid_argument("an MLP needs at least input and output dims");
  Mlp net;
  net.output = output;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] <= 0 || dims[l + 1] <= 0) throw std::invalid_argument("MLP dims must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    std::uniform_real_distribution<double> init(-bound, bound);
    Layer layer{Matrix(dims[l + 1], dims[l]), Vector(dims[l + 1])};
    // Explicit loops keep the draw order fixed.
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = init(rng);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = init(rng);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

Mlp zeros_like(const Mlp& like) {
  Mlp z = like;
  for (auto& layer : z.layers) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
  return z;
}

bool same_shape(const Mlp& a, const Mlp& b) { return a.dims() == b.dims(); }

Matrix forward(const Mlp& net, const Matrix& input, ForwardCache* cache) {
  if (static_cast<std::size_t>(input.rows()) != net.input_dim()) {
    throw std::invalid_argument("MLP input has " + std::to_string(input.rows()) +
                                " rows, expected " + std::to_string(net.input_dim()));
  }
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(input);
  }
  Matrix a = input;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    Matrix z = layer.weight * a;
    z.colwise() += layer.bias;
    if (l + 1 < net.layers.size()) {
      a = z.cwiseMax(0.0);
    } else if (net.output == OutputActivation::Tanh) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

Matrix backward(const Mlp& net, const ForwardCache& cache, const Matrix& grad_output,
                Mlp* grads) {
  if (cache.activations.size() != net.layers.size() + 1) {
    throw std::invalid_argument("forward cache does not match network depth");
  }
  Matrix delta = grad_output;
  for (std::size_t idx = net.layers.size(); idx-- > 0;) {
    const Matrix& out = cache.activations[idx + 1];
    if (idx + 1 == net.layers.size()) {
      if (net.output == OutputActivation::Tanh) {
        delta.array() *= 1.0 - out.array().square();
      }
    } else {
      delta.array() *= (out.array() > 0.0).cast<double>();
    }
    const Matrix& in = cache.activations[idx];
    if (grads) {
      grads->layers[idx].weight.noalias() += delta * in.transpose();
      grads->layers[idx].bias += delta.rowwise().sum();
    }
    delta = net.layers[idx].weight.transpose() * delta;
  }
  return delta;
}

std::vector<double> flatten(const Mlp& net) {
  std::vector<double> out;
  out.reserve(net.parameter_count());
  for (const auto& layer : net.layers) {
    out.insert(out.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
    out.insert(out.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
  }
  return out;
}

void unflatten(Mlp& net, std::span<const double> values) {
  if (values.size() != net.parameter_count()) {
    throw std::invalid_argument("parameter vector has " + std::to_string(values.size()) +
                                " entries, network needs " + std::to_string(net.parameter_count()));
  }
  const double* p = values.data();
  for (auto& layer : net.layers) {
    std::copy(p, p + layer.weight.size(), layer.weight.data());
    p += layer.weight.size();
    std::copy(p, p + layer.bias.size(), layer.bias.data());
    p += layer.bias.size();
  }
}

void soft_update(Mlp& target, const Mlp& source, double tau) {
  if (!same_shape(target, source)) throw std::invalid_argument("soft_update: shape mismatch");
  for (std::size_t l = 0; l < target.layers.size(); ++l) {
    auto& t = target.layers[l];
    const auto& s = source.layers[l];
    t.weight = tau * s.weight + (1.0 - tau) * t.weight;
    t.bias = tau * s.bias + (1.0 - tau) * t.bias;
  }
}

Adam::Adam(const Mlp& like, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(zeros_like(like)),
      v_(zeros_like(like)) {}

void Adam::step(Mlp& params, const Mlp& grads) {
  if (!same_shape(params, m_) || !same_shape(grads, m_)) {
    throw std::invalid_argument("Adam::step: shape mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].weight, grads.layers[l].weight, m_.layers[l].weight,
           v_.layers[l].weight);
    update(params.layers[l].bias, grads.layers[l].bias, m_.layers[l].bias, v_.layers[l].bias);
  }
}

}  // namespace tactile_rl::td3
