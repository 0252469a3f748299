#include "tactile_rl/td3.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tactile_rl::td3 {

namespace {

std::vector<int> layer_dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

Matrix stack(const Matrix& top, const Matrix& bottom) {
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

// Fills column by column so the draw order does not depend on Eigen internals.
Matrix gaussian(Eigen::Index rows, Eigen::Index cols, double std, Rng& rng) {
  Matrix m(rows, cols);
  std::normal_distribution<double> dist(0.0, std);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = dist(rng);
  }
  return m;
}

}  // namespace

Agent::Networks Agent::init_networks(std::size_t obs_dim, std::size_t action_dim,
                                     const TD3Config& config, std::uint64_t seed) {
  Rng rng(seed);
  const int od = static_cast<int>(obs_dim);
  const int ad = static_cast<int>(action_dim);
  Networks nets;
  nets.actor = make_mlp(layer_dims(od, config.hidden, ad), OutputActivation::Tanh, rng);
  nets.critic1 = make_mlp(layer_dims(od + ad, config.hidden, 1), OutputActivation::Linear, rng);
  nets.critic2 = make_mlp(layer_dims(od + ad, config.hidden, 1), OutputActivation::Linear, rng);
  return nets;
}

void validate(const TD3Config& config) {
  if (!(config.gamma >= 0.0 && config.gamma <= 1.0)) throw std::invalid_argument("gamma must be in [0, 1]");
  if (!(config.tau > 0.0 && config.tau <= 1.0)) throw std::invalid_argument("tau must be in (0, 1]");
  if (config.policy_delay < 1) throw std::invalid_argument("policy_delay must be at least 1");
  if (config.target_noise_std < 0.0 || config.target_noise_clip < 0.0 ||
      config.exploration_noise_std < 0.0) {
    throw std::invalid_argument("noise parameters must be non-negative");
  }
  if (config.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (config.buffer_capacity < config.batch_size) {
    throw std::invalid_argument("buffer_capacity must hold at least one batch");
  }
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (config.start_steps < 0 || config.total_timesteps < 1) {
    throw std::invalid_argument("step counts must be non-negative");
  }
  if (config.eval_window < 1) throw std::invalid_argument("eval_window must be at least 1");
  for (int h : config.hidden) {
    if (h < 1) throw std::invalid_argument("hidden layer sizes must be positive");
  }
}

ObsNormalizer ObsNormalizer::identity(std::size_t dim) {
  return {Vector::Zero(static_cast<Eigen::Index>(dim)), Vector::Ones(static_cast<Eigen::Index>(dim))};
}

ObsNormalizer ObsNormalizer::for_env(const envs::TactileEnv& env) {
  const auto& specs = env.config().sim.joint_specs;
  const std::size_t n = specs.size();
  ObsNormalizer norm = identity(env.obs_dim());
  for (std::size_t j = 0; j < n; ++j) {
    const auto& s = specs[j];
    norm.offset(j) = 0.5 * (s.q_min + s.q_max);
    norm.scale(j) = 2.0 / (s.q_max - s.q_min);
    norm.scale(n + j) = 1.0 / s.v_max;
  }
  for (std::size_t k = 2 * n; k < env.obs_dim(); ++k) norm.scale(k) = 1.0 / env.config().f_goal;
  return norm;
}

Matrix ObsNormalizer::apply(const Matrix& obs) const {
  return (obs.colwise() - offset).array().colwise() * scale.array();
}

double critic_loss(const Mlp& critic, const Matrix& obs, const Matrix& action,
                   const Matrix& target, Mlp* grads) {
  ForwardCache cache;
  const Matrix q = forward(critic, stack(obs, action), grads ? &cache : nullptr);
  const Matrix diff = q - target;
  const double n = static_cast<double>(diff.cols());
  if (grads) backward(critic, cache, (2.0 / n) * diff, grads);
  return diff.squaredNorm() / n;
}

double actor_loss(const Mlp& actor, const Mlp& critic, const Matrix& obs, Mlp* grads) {
  ForwardCache actor_cache;
  ForwardCache critic_cache;
  const Matrix action = forward(actor, obs, &actor_cache);
  const Matrix q = forward(critic, stack(obs, action), &critic_cache);
  const double n = static_cast<double>(q.cols());
  if (grads) {
    const Matrix dq = Matrix::Constant(1, q.cols(), -1.0 / n);
    const Matrix d_input = backward(critic, critic_cache, dq, nullptr);
    backward(actor, actor_cache, d_input.bottomRows(action.rows()), grads);
  }
  return -q.sum() / n;
}

Agent::Agent(std::size_t obs_dim, std::vector<double> action_high, ObsNormalizer normalizer,
             const TD3Config& config, std::uint64_t init_seed)
    : Agent(init_networks(obs_dim, action_high.size(), config, init_seed), action_high,
            std::move(normalizer), config) {}

Agent::Agent(Networks nets, std::vector<double> action_high, ObsNormalizer normalizer,
             const TD3Config& config)
    : Agent(std::move(nets.actor), std::move(nets.critic1), std::move(nets.critic2),
            std::move(action_high), std::move(normalizer), config) {}

Agent::Agent(Mlp actor, Mlp critic1, Mlp critic2, std::vector<double> action_high,
             ObsNormalizer normalizer, const TD3Config& config)
    : config_(config),
      action_high_(std::move(action_high)),
      normalizer_(std::move(normalizer)),
      actor_(std::move(actor)),
      critic1_(std::move(critic1)),
      critic2_(std::move(critic2)),
      actor_target_(actor_),
      critic1_target_(critic1_),
      critic2_target_(critic2_),
      actor_opt_(actor_, config.learning_rate),
      critic1_opt_(critic1_, config.learning_rate),
      critic2_opt_(critic2_, config.learning_rate) {
  if (actor_.output_dim() != action_high_.size()) {
    throw std::invalid_argument("actor output dimension does not match the action dimension");
  }
  if (actor_.input_dim() != static_cast<std::size_t>(normalizer_.offset.size())) {
    throw std::invalid_argument("actor input dimension does not match the observation dimension");
  }
  for (const Mlp* critic : {&critic1_, &critic2_}) {
    if (critic->output_dim() != 1 ||
        critic->input_dim() != actor_.input_dim() + actor_.output_dim()) {
      throw std::invalid_argument("critic dimensions do not match the actor");
    }
  }
}

Vector Agent::act_normalized(std::span<const double> obs, bool explore, Rng& rng) const {
  if (obs.size() != obs_dim()) {
    throw std::invalid_argument("observation has " + std::to_string(obs.size()) +
                                " entries, policy expects " + std::to_string(obs_dim()));
  }
  const Matrix x = normalizer_.apply(Eigen::Map<const Matrix>(obs.data(), obs_dim(), 1));
  Vector a = forward(actor_, x).col(0);
  if (explore) {
    std::normal_distribution<double> noise(0.0, config_.exploration_noise_std);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) += noise(rng);
  }
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

envs::Action Agent::scale_action(const Vector& normalized) const {
  envs::Action out(action_dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(normalized(static_cast<Eigen::Index>(i)), -1.0, 1.0) * action_high_[i];
  }
  return out;
}

envs::Action Agent::act(std::span<const double> obs, bool explore, Rng& rng) const {
  return scale_action(act_normalized(obs, explore, rng));
}

Matrix Agent::targets(const Batch& batch, Rng& rng) const {
  const Matrix next_obs = normalizer_.apply(batch.next_obs);
  Matrix next_action = forward(actor_target_, next_obs);
  const Matrix noise = gaussian(next_action.rows(), next_action.cols(), config_.target_noise_std, rng)
                           .cwiseMax(-config_.target_noise_clip)
                           .cwiseMin(config_.target_noise_clip);
  next_action = (next_action + noise).cwiseMax(-1.0).cwiseMin(1.0);
  const Matrix input = stack(next_obs, next_action);
  const Matrix q = forward(critic1_target_, input).cwiseMin(forward(critic2_target_, input));
  return batch.reward + config_.gamma * (1.0 - batch.done.array()).matrix().cwiseProduct(q);
}

double Agent::critic_update(const Batch& batch, Rng& rng) {
  const Matrix y = targets(batch, rng);
  const Matrix obs = normalizer_.apply(batch.obs);
  Mlp g1 = zeros_like(critic1_);
  Mlp g2 = zeros_like(critic2_);
  const double loss = critic_loss(critic1_, obs, batch.action, y, &g1) +
                      critic_loss(critic2_, obs, batch.action, y, &g2);
  critic1_opt_.step(critic1_, g1);
  critic2_opt_.step(critic2_, g2);
  ++critic_updates_;
  return loss;
}

double Agent::actor_update(const Batch& batch) {
  const Matrix obs = normalizer_.apply(batch.obs);
  Mlp g = zeros_like(actor_);
  const double loss = actor_loss(actor_, critic1_, obs, &g);
  actor_opt_.step(actor_, g);
  soft_update(critic1_target_, critic1_, config_.tau);
  soft_update(critic2_target_, critic2_, config_.tau);
  soft_update(actor_target_, actor_, config_.tau);
  ++actor_updates_;
  return loss;
}

void Agent::update(const Batch& batch, Rng& rng) {
  critic_update(batch, rng);
  if (critic_updates_ % config_.policy_delay == 0) actor_update(batch);
}

Agent with_actor(const Agent& base, const Mlp& actor) {
  return Agent(actor, base.critic1(), base.critic2(), base.action_high(), base.normalizer(),
               base.config());
}

TrainResult train(envs::TactileEnv& env, const TD3Config& config, std::uint64_t seed,
                  const TrainHooks& hooks) {
  validate(config);
  // Independent streams for every random consumer, all derived from `seed`.
  Rng seeder(seed);
  const std::uint64_t env_seed = seeder();
  const std::uint64_t init_seed = seeder();
  Rng explore_rng(seeder());
  Rng sample_rng(seeder());
  Rng target_rng(seeder());

  const auto normalizer = config.normalize_observations ? ObsNormalizer::for_env(env)
                                                        : ObsNormalizer::identity(env.obs_dim());
  Agent agent(env.obs_dim(), env.action_high(), normalizer, config, init_seed);
  ReplayBuffer buffer(std::min<std::size_t>(config.buffer_capacity,
                                            static_cast<std::size_t>(config.total_timesteps)),
                      env.obs_dim(), env.action_dim());

  TrainResult result{{}, {}, std::nullopt, agent};
  std::deque<double> window;
  double best = -std::numeric_limits<double>::infinity();
  int episode = 0;
  double episode_return = 0.0;

  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  envs::Observation obs = env.reset(env_seed);
  Vector a(static_cast<Eigen::Index>(env.action_dim()));

  for (long t = 0; t < config.total_timesteps; ++t) {
    if (t < config.start_steps) {
      for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = uniform(explore_rng);
    } else {
      a = agent.act_normalized(obs, true, explore_rng);
    }
    const envs::Action action = agent.scale_action(a);
    auto step = env.step(action);
    // Episodes only end on the step limit, which is not a terminal state of
    // the task, so the transition keeps bootstrapping.
    buffer.add(obs, std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
               step.reward, step.obs, false);
    episode_return += step.reward;
    obs = std::move(step.obs);

    if (t >= config.start_steps && buffer.size() >= config.batch_size) {
      agent.update(buffer.sample(config.batch_size, sample_rng), target_rng);
    }

    if (step.done) {
      ++episode;
      window.push_back(episode_return);
      if (static_cast<int>(window.size()) > config.eval_window) window.pop_front();
      if (static_cast<int>(window.size()) == config.eval_window) {
        const double mean =
            std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(window.size());
        if (mean > best) {
          best = mean;
          const CheckpointEvent event{t + 1, episode, mean};
          result.checkpoints.push_back(event);
          result.best_actor = agent.actor();
          if (hooks.on_checkpoint) hooks.on_checkpoint(agent, event);
        }
        const CurvePoint point{t + 1, episode, episode_return, mean, best};
        result.curve.push_back(point);
        if (hooks.on_episode) hooks.on_episode(point);
      }
      episode_return = 0.0;
      obs = env.reset();
    }
  }
  result.final_agent = agent;
  return result;
}

}  // namespace tactile_rl::td3
