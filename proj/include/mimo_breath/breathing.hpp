#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "signal.hpp"

namespace mimo_breath {

// Chest displacement b[i] in meters, sampled at the CSI frame rate.
struct BreathingWaveform {
  std::vector<double> samples;
  double rate_hz = 0.0;

  static constexpr double kMaxDisplacementM = 0.1;

  void validate(std::size_t expected_frames) const {
    if (samples.size() != expected_frames)
      throw InvalidArgument("breathing waveform has " + std::to_string(samples.size()) +
                            " samples, expected " + std::to_string(expected_frames));
    for (double v : samples)
      if (!std::isfinite(v) || std::abs(v) >= kMaxDisplacementM)
        throw InvalidArgument("breathing displacement must be finite and below 0.1 m");
  }
};

enum class BreathPattern { sinusoid, varying_rate, recorded_csv };

inline BreathPattern parse_breath_pattern(std::string_view name) {
  if (name == "sinusoid") return BreathPattern::sinusoid;
  if (name == "varying-rate") return BreathPattern::varying_rate;
  if (name == "recorded-csv") return BreathPattern::recorded_csv;
  throw InvalidArgument("unknown breathing pattern '" + std::string(name) + "'");
}

inline std::string_view to_string(BreathPattern p) {
  switch (p) {
    case BreathPattern::sinusoid: return "sinusoid";
    case BreathPattern::varying_rate: return "varying-rate";
    case BreathPattern::recorded_csv: return "recorded-csv";
  }
  return "";
}

struct RecordedTrace {
  std::vector<double> samples;
  double rate_hz = 0.0;
};

struct BreathingSpec {
  BreathPattern pattern = BreathPattern::sinusoid;
  double rate_bpm = 15.0;
  // varying-rate only: the rate sweeps linearly from rate_bpm to end_rate_bpm.
  double end_rate_bpm = 15.0;
  double amplitude_m = 0.005;
  double phase_rad = 0.0;
  std::optional<RecordedTrace> recorded;  // recorded-csv only
};

// Mean instantaneous rate over the record, the "true" rate of a synthetic pattern.
inline double nominal_rate_bpm(const BreathingSpec& spec) {
  return spec.pattern == BreathPattern::varying_rate ? 0.5 * (spec.rate_bpm + spec.end_rate_bpm) : spec.rate_bpm;
}

inline BreathingWaveform generate_breathing(const BreathingSpec& spec, const SystemConfig& config) {
  config.validate();
  const std::size_t n = config.num_frames;
  const double ts = config.frame_period_s();
  BreathingWaveform wave{std::vector<double>(n), config.frame_rate_hz};
  auto in_band = [](double bpm) { return bpm >= 5.0 && bpm <= 35.0; };
  if (!std::isfinite(spec.amplitude_m) || std::abs(spec.amplitude_m) >= BreathingWaveform::kMaxDisplacementM)
    throw InvalidArgument("breathing amplitude must be finite and below 0.1 m");

  switch (spec.pattern) {
    case BreathPattern::sinusoid: {
      if (!in_band(spec.rate_bpm)) throw InvalidArgument("breathing rate must lie in [5, 35] bpm");
      const double f = spec.rate_bpm / 60.0;
      for (std::size_t i = 0; i < n; ++i)
        wave.samples[i] =
            spec.amplitude_m * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) * ts + spec.phase_rad);
      break;
    }
    case BreathPattern::varying_rate: {
      if (!in_band(spec.rate_bpm) || !in_band(spec.end_rate_bpm))
        throw InvalidArgument("breathing rates must lie in [5, 35] bpm");
      // Linear chirp: f(t) = f0 + (f1 - f0) t / T.
      const double f0 = spec.rate_bpm / 60.0;
      const double f1 = spec.end_rate_bpm / 60.0;
      const double duration = config.duration_s();
      for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) * ts;
        double phase = 2.0 * std::numbers::pi * (f0 * t + 0.5 * (f1 - f0) * t * t / duration);
        wave.samples[i] = spec.amplitude_m * std::sin(phase + spec.phase_rad);
      }
      break;
    }
    case BreathPattern::recorded_csv: {
      if (!spec.recorded || spec.recorded->samples.empty())
        throw InvalidArgument("recorded-csv pattern requires a recorded trace");
      auto resampled = resample(spec.recorded->samples, spec.recorded->rate_hz, config.frame_rate_hz);
      if (static_cast<double>(resampled.size()) < 0.99 * static_cast<double>(n))
        throw DurationMismatch("recorded trace covers " + std::to_string(resampled.size()) + " frames, need " +
                               std::to_string(n));
      resampled.resize(n, resampled.empty() ? 0.0 : resampled.back());
      wave.samples = std::move(resampled);
      break;
    }
  }
  wave.validate(n);
  return wave;
}

}  // namespace mimo_breath
