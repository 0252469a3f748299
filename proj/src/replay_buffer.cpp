#include "tactile_rl/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tactile_rl::td3 {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim)
    : capacity_(capacity), obs_dim_(obs_dim), action_dim_(action_dim) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::add(std::span<const double> obs, std::span<const double> action, double reward,
                       std::span<const double> next_obs, bool done) {
  if (obs.size() != obs_dim_ || next_obs.size() != obs_dim_ || action.size() != action_dim_) {
    throw std::invalid_argument("replay buffer: transition dimension mismatch");
  }
  // Storage grows until capacity is reached, then slots are reused in order.
  if (size_ < capacity_) {
    obs_.insert(obs_.end(), obs.begin(), obs.end());
    action_.insert(action_.end(), action.begin(), action.end());
    reward_.push_back(reward);
    next_obs_.insert(next_obs_.end(), next_obs.begin(), next_obs.end());
    done_.push_back(done ? 1.0 : 0.0);
    ++size_;
  } else {
    std::copy(obs.begin(), obs.end(), obs_.begin() + head_ * obs_dim_);
    std::copy(action.begin(), action.end(), action_.begin() + head_ * action_dim_);
    reward_[head_] = reward;
    std::copy(next_obs.begin(), next_obs.end(), next_obs_.begin() + head_ * obs_dim_);
    done_[head_] = done ? 1.0 : 0.0;
  }
  head_ = (head_ + 1) % capacity_;
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0 || size_ < batch_size) {
    throw std::logic_error("replay buffer holds " + std::to_string(size_) +
                           " transitions, cannot sample " + std::to_string(batch_size));
  }
  const auto b = static_cast<Eigen::Index>(batch_size);
  const auto od = static_cast<Eigen::Index>(obs_dim_);
  const auto ad = static_cast<Eigen::Index>(action_dim_);
  Batch batch{Matrix(od, b), Matrix(ad, b), Matrix(1, b), Matrix(od, b), Matrix(1, b)};
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  for (Eigen::Index k = 0; k < b; ++k) {
    const std::size_t i = pick(rng);
    batch.obs.col(k) = Eigen::Map<const Vector>(obs_.data() + i * obs_dim_, od);
    batch.action.col(k) = Eigen::Map<const Vector>(action_.data() + i * action_dim_, ad);
    batch.reward(0, k) = reward_[i];
    batch.next_obs.col(k) = Eigen::Map<const Vector>(next_obs_.data() + i * obs_dim_, od);
    batch.done(0, k) = done_[i];
  }
  return batch;
}

double ReplayBuffer::reward_at(std::size_t age_index) const {
  if (age_index >= size_) throw std::out_of_range("replay buffer index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return reward_[(oldest + age_index) % capacity_];
}

}  // namespace tactile_rl::td3
