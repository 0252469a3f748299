#include "tactile_rl/tactile.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tactile_rl::sensor {

void validate(const SensorModel& model) {
  if (!(model.scale > 0.0)) throw std::invalid_argument("sensor scale must be positive");
  if (!(model.sigma >= 0.0)) throw std::invalid_argument("sensor sigma must be non-negative");
  for (double t : model.f_thresh) {
    if (!(t >= 0.0)) throw std::invalid_argument("sensor thresholds must be non-negative");
  }
}

PerFinger<double> raw_force(const PerFinger<double>& f_contact, const SensorModel& model, Rng& rng) {
  PerFinger<double> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f_contact[i] * model.scale;
  if (model.noise_enabled && model.sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, model.sigma);
    for (double& f : out) f += noise(rng);
  }
  return out;
}

PerFinger<int> binary_force(const PerFinger<double>& f_raw, const SensorModel& model) {
  PerFinger<int> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f_raw[i] > model.f_thresh[i] ? 1 : 0;
  return out;
}

ForceReading read_sensors(const PerFinger<double>& f_contact, const SensorModel& model, Rng& rng) {
  ForceReading reading;
  reading.f_contact = f_contact;
  reading.f_raw = raw_force(f_contact, model, rng);
  reading.f_binary = binary_force(reading.f_raw, model);
  return reading;
}

Calibration calibrate_threshold(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("calibration needs at least 2 samples, got " +
                                std::to_string(samples.size()));
  }
  // Two-pass for stability on near-constant inputs.
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  return {sigma, kThresholdSigmas * sigma};
}

}  // namespace tactile_rl::sensor
