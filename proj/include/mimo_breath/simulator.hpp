#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "breathing.hpp"
#include "config.hpp"
#include "csi_tensor.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace mimo_breath {

// One propagation path between the UE and an antenna array.
struct PathSpec {
  cdouble amplitude{1.0, 0.0};
  double base_length_m = 1.0;
  double aoa_rad = 0.0;             // angle of arrival relative to the array broadside
  double bistatic_angle_rad = 0.0;  // transmitter-target-receiver angle
  bool breathing_modulated = false;

  void validate() const {
    if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
      throw InvalidArgument("path amplitude must be finite");
    if (!std::isfinite(base_length_m) || base_length_m <= 0.0)
      throw InvalidArgument("path base length must be finite and positive");
    if (!std::isfinite(aoa_rad)) throw InvalidArgument("path angle of arrival must be finite");
    if (!std::isfinite(bistatic_angle_rad) || std::abs(bistatic_angle_rad) > std::numbers::pi)
      throw InvalidArgument("bistatic angle must be finite with magnitude <= pi");
  }
};

// A uniform linear array occupying antennas [first_antenna, first_antenna +
// num_antennas). Its paths are seen by every element, with an inter-element
// delay set by the element spacing and each path's angle of arrival.
struct AntennaGroup {
  std::size_t first_antenna = 0;
  std::size_t num_antennas = 1;
  std::vector<PathSpec> paths;
};

struct Scene {
  std::vector<AntennaGroup> groups;

  // A single array holding all antennas.
  static Scene single_array(std::size_t num_antennas, std::vector<PathSpec> paths) {
    return Scene{{AntennaGroup{0, num_antennas, std::move(paths)}}};
  }

  // Group containing antenna m and m's element index inside that group.
  std::pair<const AntennaGroup*, std::size_t> locate(std::size_t m) const {
    for (const auto& g : groups)
      if (m >= g.first_antenna && m < g.first_antenna + g.num_antennas) return {&g, m - g.first_antenna};
    return {nullptr, 0};
  }

  void validate(const SystemConfig& config) const {
    std::vector<int> owner(config.num_antennas, 0);
    for (const auto& g : groups) {
      if (g.paths.empty()) throw InvalidArgument("every antenna group needs at least one path");
      for (const auto& p : g.paths) p.validate();
      if (g.first_antenna + g.num_antennas > config.num_antennas)
        throw InvalidArgument("antenna group exceeds the configured antenna count");
      for (std::size_t m = g.first_antenna; m < g.first_antenna + g.num_antennas; ++m) ++owner[m];
    }
    for (std::size_t m = 0; m < owner.size(); ++m)
      if (owner[m] != 1)
        throw InvalidArgument("antenna " + std::to_string(m) + " must belong to exactly one group");
  }
};

// Circularly-symmetric complex white noise at `snr_db` below each antenna's
// mean noiseless signal power.
struct NoiseSpec {
  double snr_db = 20.0;
};

namespace detail {

inline std::uint64_t antenna_stream_seed(std::uint64_t seed, std::size_t m) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(m), 0x6d62u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

// Standard circular complex Gaussian (unit variance per component) by the
// Marsaglia polar method; the two 32-bit halves of one draw supply the
// candidate point.
inline cdouble complex_gaussian(std::mt19937_64& rng) {
  double u, v, s;
  do {
    const std::uint64_t bits = rng();
    u = (static_cast<double>(bits >> 32) + 0.5) * 0x1p-31 - 1.0;
    v = (static_cast<double>(bits & 0xffffffffu) + 0.5) * 0x1p-31 - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  return {u * scale, v * scale};
}

}  // namespace detail

// Channel of one antenna. The delay of path l at frame i is
//   tau = (d_l + b[i] cos(beta_l / 2)) / c + e * spacing * sin(theta_l) / c
// where the displacement term applies only to breathing-modulated paths and
// e is the element index inside the antenna's array. Subcarrier k sits at
// f_c + k * spacing. Noise draws come from a stream keyed on (seed, m), so
// an antenna simulated alone is bit-identical to the same antenna inside a
// full tensor.
inline AntennaCsi simulate_antenna(const SystemConfig& config, const Scene& scene, const BreathingWaveform& breathing,
                                   const std::optional<NoiseSpec>& noise, std::uint64_t seed, std::size_t m) {
  const std::size_t num_k = config.num_subcarriers;
  const std::size_t num_i = config.num_frames;
  auto [group, element] = scene.locate(m);
  if (group == nullptr) throw IndexError("antenna " + std::to_string(m) + " belongs to no group");

  const double two_pi = 2.0 * std::numbers::pi;
  const double element_spacing_m = config.element_spacing_wavelengths * config.wavelength_m();

  std::vector<cdouble> acc(num_k * num_i, cdouble{});
  std::vector<cdouble> phasor(num_i), step(num_i);
  for (const PathSpec& path : group->paths) {
    const double steering_delay = static_cast<double>(element) * element_spacing_m * std::sin(path.aoa_rad) / kSpeedOfLight;
    const double projection = std::cos(path.bistatic_angle_rad / 2.0);
    for (std::size_t i = 0; i < num_i; ++i) {
      double length = path.base_length_m;
      if (path.breathing_modulated) length += breathing.samples[i] * projection;
      const double tau = length / kSpeedOfLight + steering_delay;
      phasor[i] = path.amplitude * std::polar(1.0, -two_pi * config.carrier_freq_hz * tau);
      step[i] = std::polar(1.0, -two_pi * config.subcarrier_spacing_hz * tau);
    }
    for (std::size_t k = 0; k < num_k; ++k) {
      cdouble* row = acc.data() + k * num_i;
      for (std::size_t i = 0; i < num_i; ++i) {
        row[i] += phasor[i];
        phasor[i] *= step[i];
      }
    }
  }

  if (noise) {
    if (!std::isfinite(noise->snr_db)) throw InvalidArgument("snr_db must be finite");
    double signal_power = 0.0;
    for (const auto& v : acc) signal_power += std::norm(v);
    signal_power /= static_cast<double>(acc.size());
    const double sigma = std::sqrt(signal_power / std::pow(10.0, noise->snr_db / 10.0) / 2.0);
    std::mt19937_64 rng(detail::antenna_stream_seed(seed, m));
    for (auto& v : acc) v += sigma * detail::complex_gaussian(rng);
  }

  AntennaCsi out{std::vector<cfloat>(acc.size()), num_k, num_i, m};
  for (std::size_t n = 0; n < acc.size(); ++n) out.values[n] = cfloat(acc[n]);
  return out;
}

inline void validate_simulation_inputs(const SystemConfig& config, const Scene& scene,
                                       const BreathingWaveform& breathing) {
  config.validate();
  scene.validate(config);
  if (breathing.samples.size() != config.num_frames)
    throw InvalidArgument("breathing waveform has " + std::to_string(breathing.samples.size()) +
                          " samples but the configuration has " + std::to_string(config.num_frames) + " frames");
  for (double v : breathing.samples)
    if (!std::isfinite(v)) throw InvalidArgument("breathing waveform contains non-finite samples");
}

inline CsiTensor simulate_csi(const SystemConfig& config, const Scene& scene, const BreathingWaveform& breathing,
                              const std::optional<NoiseSpec>& noise, std::uint64_t seed) {
  validate_simulation_inputs(config, scene, breathing);
  CsiTensor tensor(config);
  parallel_for(config.num_antennas, [&](std::size_t m) {
    AntennaCsi block = simulate_antenna(config, scene, breathing, noise, seed, m);
    auto dst = tensor.antenna_block(m);
    std::copy(block.values.begin(), block.values.end(), dst.begin());
  });
  return tensor;
}

// All antennas form one uniform linear array seeing the same paths.
inline CsiTensor simulate_csi(const SystemConfig& config, std::span<const PathSpec> paths,
                              const BreathingWaveform& breathing, const std::optional<NoiseSpec>& noise,
                              std::uint64_t seed) {
  if (paths.empty()) throw InvalidArgument("simulation needs at least one path");
  return simulate_csi(config, Scene::single_array(config.num_antennas, {paths.begin(), paths.end()}), breathing,
                      noise, seed);
}

}  // namespace mimo_breath
