#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "error.hpp"

namespace mimo_breath {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

// Breathing band used for BNR and rate estimation: 5 to 35 breaths/min.
struct BreathBand {
  double low_hz = 0.083;
  double high_hz = 0.583;

  void validate(double frame_rate_hz) const {
    if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < frame_rate_hz / 2.0))
      throw ConfigError("breath band must satisfy 0 < low < high < frame_rate/2");
  }
};

// OFDM and array parameters. Defaults are the 64-antenna, 100-subcarrier
// 3.51 GHz testbed with 200 Hz channel estimates over one minute.
struct SystemConfig {
  double carrier_freq_hz = 3.51e9;
  std::size_t num_subcarriers = 100;
  double subcarrier_spacing_hz = 180e3;
  std::size_t num_antennas = 64;
  double frame_rate_hz = 200.0;
  std::size_t num_frames = 12'000;
  // ULA inter-element spacing in carrier wavelengths.
  double element_spacing_wavelengths = 0.5;

  double bandwidth_hz() const { return static_cast<double>(num_subcarriers) * subcarrier_spacing_hz; }
  double wavelength_m() const { return kSpeedOfLight / carrier_freq_hz; }
  double frame_period_s() const { return 1.0 / frame_rate_hz; }
  double duration_s() const { return static_cast<double>(num_frames) / frame_rate_hz; }
  std::size_t num_entries() const { return num_antennas * num_subcarriers * num_frames; }

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (num_subcarriers < 1) throw ConfigError("num_subcarriers must be >= 1");
    if (num_antennas < 1) throw ConfigError("num_antennas must be >= 1");
    if (num_frames < 2) throw ConfigError("num_frames must be >= 2, got " + std::to_string(num_frames));
    if (!positive(carrier_freq_hz)) throw ConfigError("carrier_freq_hz must be positive");
    if (!positive(subcarrier_spacing_hz)) throw ConfigError("subcarrier_spacing_hz must be positive");
    if (!positive(frame_rate_hz)) throw ConfigError("frame_rate_hz must be positive");
    if (!positive(element_spacing_wavelengths)) throw ConfigError("element_spacing_wavelengths must be positive");
    if (!(frame_rate_hz > 2.0 * BreathBand{}.high_hz))
      throw ConfigError("frame_rate_hz must exceed twice the upper breathing band edge");
  }
};

struct DerivedConstants {
  double range_resolution_m;        // c / B
  double max_unambiguous_range_m;   // c / subcarrier spacing
};

inline DerivedConstants derived_constants(const SystemConfig& config) {
  config.validate();
  return {kSpeedOfLight / config.bandwidth_hz(), kSpeedOfLight / config.subcarrier_spacing_hz};
}

}  // namespace mimo_breath
