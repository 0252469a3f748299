#include "tactile_rl/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tactile_rl::td3 {

namespace {

// Hidden layer sizes above this are treated as a corrupt header.
constexpr std::uint32_t kMaxDim = 1u << 20;

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(b.data(), b.size());
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) {
    throw CheckpointError("checkpoint truncated");
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) {
    throw CheckpointError("checkpoint truncated");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void put_network(std::ostream& out, const Mlp& net) {
  const auto dims = net.dims();
  put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
  for (int d : dims) put_u32(out, static_cast<std::uint32_t>(d));
  put_u32(out, net.output == OutputActivation::Tanh ? 1u : 0u);
  for (double p : flatten(net)) put_f64(out, p);
}

Mlp get_network(std::istream& in) {
  const std::uint32_t n_layers = get_u32(in);
  if (n_layers == 0 || n_layers > 64) throw CheckpointError("checkpoint: bad layer count");
  std::vector<int> dims;
  for (std::uint32_t i = 0; i <= n_layers; ++i) {
    const std::uint32_t d = get_u32(in);
    if (d == 0 || d > kMaxDim) throw CheckpointError("checkpoint: bad layer dimension");
    dims.push_back(static_cast<int>(d));
  }
  const std::uint32_t act = get_u32(in);
  if (act > 1) throw CheckpointError("checkpoint: unknown output activation");
  Rng unused(0);
  Mlp net = make_mlp(dims, act == 1 ? OutputActivation::Tanh : OutputActivation::Linear, unused);
  std::vector<double> params(net.parameter_count());
  for (double& p : params) p = get_f64(in);
  unflatten(net, params);
  return net;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Agent& agent) {
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(agent.obs_dim()));
  put_u32(out, static_cast<std::uint32_t>(agent.action_dim()));
  for (double h : agent.action_high()) put_f64(out, h);
  for (Eigen::Index i = 0; i < agent.normalizer().offset.size(); ++i) {
    put_f64(out, agent.normalizer().offset(i));
  }
  for (Eigen::Index i = 0; i < agent.normalizer().scale.size(); ++i) {
    put_f64(out, agent.normalizer().scale(i));
  }
  put_u32(out, 3);
  put_network(out, agent.actor());
  put_network(out, agent.critic1());
  put_network(out, agent.critic2());
  if (!out) throw CheckpointError("failed writing checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const Agent& agent) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, agent);
}

Agent read_checkpoint(std::istream& in, const TD3Config& config) {
  char magic[sizeof kCheckpointMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw CheckpointError("not a policy checkpoint (bad magic bytes)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t obs_dim = get_u32(in);
  const std::uint32_t action_dim = get_u32(in);
  if (obs_dim == 0 || obs_dim > kMaxDim || action_dim == 0 || action_dim > kMaxDim) {
    throw CheckpointError("checkpoint: bad observation/action dimensions");
  }
  std::vector<double> high(action_dim);
  for (double& h : high) h = get_f64(in);
  auto norm = ObsNormalizer::identity(obs_dim);
  for (Eigen::Index i = 0; i < norm.offset.size(); ++i) norm.offset(i) = get_f64(in);
  for (Eigen::Index i = 0; i < norm.scale.size(); ++i) norm.scale(i) = get_f64(in);
  if (get_u32(in) != 3) throw CheckpointError("checkpoint: expected 3 networks");
  Mlp actor = get_network(in);
  Mlp critic1 = get_network(in);
  Mlp critic2 = get_network(in);
  try {
    return Agent(std::move(actor), std::move(critic1), std::move(critic2), std::move(high),
                 std::move(norm), config);
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
}

Agent load_checkpoint(const std::filesystem::path& path, const TD3Config& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in, config);
}

}  // namespace tactile_rl::td3
