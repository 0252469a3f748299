#pragma once

#include <random>
#include <span>

#include "tactile_rl/simcore.hpp"

namespace tactile_rl::sensor {

using sim::PerFinger;
using Rng = std::mt19937_64;

/// Multiplier applied to the no-contact noise std-dev to obtain the binary
/// contact threshold.
inline constexpr double kThresholdSigmas = 3.0;

struct SensorModel {
  double scale = 100.0;
  double sigma = 0.0077;
  PerFinger<double> f_thresh{kThresholdSigmas * 0.0077, kThresholdSigmas * 0.0077};
  bool noise_enabled = true;
};

void validate(const SensorModel& model);

struct ForceReading {
  PerFinger<double> f_contact{0.0, 0.0};
  PerFinger<double> f_raw{0.0, 0.0};
  PerFinger<int> f_binary{0, 0};
};

/// Scaled contact force plus independent zero-mean Gaussian noise per finger.
/// Draws exactly two normals from `rng` when noise is enabled and none
/// otherwise.
PerFinger<double> raw_force(const PerFinger<double>& f_contact, const SensorModel& model, Rng& rng);

/// 1 where the raw reading strictly exceeds that finger's threshold.
PerFinger<int> binary_force(const PerFinger<double>& f_raw, const SensorModel& model);

ForceReading read_sensors(const PerFinger<double>& f_contact, const SensorModel& model, Rng& rng);

struct Calibration {
  double sigma_est = 0.0;
  double f_thresh = 0.0;
};

/// Sample std-dev (n-1 denominator) of no-contact readings and the derived
/// threshold. Requires at least two samples.
Calibration calibrate_threshold(std::span<const double> samples);

}  // namespace tactile_rl::sensor
