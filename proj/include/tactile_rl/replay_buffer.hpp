#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tactile_rl/mlp.hpp"

namespace tactile_rl::td3 {

struct Batch {
  Matrix obs;       // obs_dim x B
  Matrix action;    // action_dim x B
  Matrix reward;    // 1 x B
  Matrix next_obs;  // obs_dim x B
  Matrix done;      // 1 x B, 1.0 for terminal transitions
};

// Fixed-capacity FIFO ring of transitions with uniform sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim);

  void add(std::span<const double> obs, std::span<const double> action, double reward,
           std::span<const double> next_obs, bool done);

  /// Uniform with replacement. Requires size() >= batch_size.
  Batch sample(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t action_dim() const { return action_dim_; }

  /// Index 0 is the oldest transition still stored.
  double reward_at(std::size_t age_index) const;

 private:
  std::size_t capacity_;
  std::size_t obs_dim_;
  std::size_t action_dim_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;  // next write slot
  std::vector<double> obs_;
  std::vector<double> action_;
  std::vector<double> reward_;
  std::vector<double> next_obs_;
  std::vector<double> done_;
};

}  // namespace tactile_rl::td3
