#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "tactile_rl/td3.hpp"

namespace tactile_rl::td3 {

// Binary policy checkpoint, all integers and floats little-endian:
//
//   char[8]   magic "TACTD3CK"
//   u32       format version (1)
//   u32       obs_dim, u32 action_dim
//   f64[action_dim]  action_high
//   f64[obs_dim]     normaliser offset
//   f64[obs_dim]     normaliser scale
//   u32       network count (3: actor, critic1, critic2)
//   per network:
//     u32     layer count L
//     u32[L+1] layer dims (input first)
//     u32     output activation (0 linear, 1 tanh)
//     f64[..] per layer: weight (column-major, out x in), then bias
inline constexpr char kCheckpointMagic[8] = {'T', 'A', 'C', 'T', 'D', '3', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_checkpoint(std::ostream& out, const Agent& agent);
void save_checkpoint(const std::filesystem::path& path, const Agent& agent);

// The returned agent carries `config` for any further training; its target
// networks are reset to copies of the loaded networks.
Agent read_checkpoint(std::istream& in, const TD3Config& config = {});
Agent load_checkpoint(const std::filesystem::path& path, const TD3Config& config = {});

}  // namespace tactile_rl::td3
