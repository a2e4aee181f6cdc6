#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csi_tensor.hpp"
#include "error.hpp"
#include "fft.hpp"

namespace mimo_breath {

enum class RangeMethod { single_subcarrier, idft, diversense };

inline std::string_view to_string(RangeMethod m) {
  switch (m) {
    case RangeMethod::single_subcarrier: return "single-subcarrier";
    case RangeMethod::idft: return "idft";
    case RangeMethod::diversense: return "diversense";
  }
  return "";
}

// Complex range signal s_m[i] of one antenna after subcarrier combining.
struct RangeSignal {
  std::vector<cdouble> samples;
  std::size_t antenna = 0;
  RangeMethod method = RangeMethod::single_subcarrier;
  std::optional<std::size_t> selected_bin;           // idft only
  std::optional<std::vector<double>> steering_angles;  // diversense only, radians in [0, 2pi)
};

// Per-subcarrier alignment residual D_k against the reference subcarrier.
struct AlignmentCost {
  std::vector<double> residuals;
};

// --- single subcarrier ------------------------------------------------------

inline RangeSignal single_subcarrier(const AntennaCfr& cfr, std::size_t k) {
  auto row = cfr.row(k);
  RangeSignal out{std::vector<cdouble>(row.begin(), row.end()), cfr.antenna, RangeMethod::single_subcarrier, {}, {}};
  return out;
}

inline RangeSignal single_subcarrier(const CsiTensor& csi, std::size_t m, std::size_t k) {
  return single_subcarrier(csi.antenna(m), k);
}

// --- IDFT range profile -----------------------------------------------------

// Channel impulse response of frame i: cir[b] = (1/K) sum_k h_k[i] e^{+j2pi kb/K}.
inline std::vector<cdouble> cir(const AntennaCfr& cfr, std::size_t i) {
  if (i >= cfr.num_frames)
    throw IndexError("frame " + std::to_string(i) + " out of range [0, " + std::to_string(cfr.num_frames) + ")");
  const std::size_t num_k = cfr.num_subcarriers;
  std::vector<cdouble> buf(num_k);
  for (std::size_t k = 0; k < num_k; ++k) buf[k] = cdouble(cfr.at(k, i));
  fft::transform(buf, buf, fft::Direction::inverse);
  const double scale = 1.0 / static_cast<double>(num_k);
  for (auto& v : buf) v *= scale;
  return buf;
}

inline std::vector<cdouble> cir(const CsiTensor& csi, std::size_t m, std::size_t i) { return cir(csi.antenna(m), i); }

// Time-averaged CIR magnitude per delay bin.
inline std::vector<double> mean_range_profile(const AntennaCfr& cfr) {
  const std::size_t num_k = cfr.num_subcarriers;
  std::vector<double> profile(num_k, 0.0);
  // Frames are transformed in chunks, transposed to [frame][subcarrier].
  constexpr std::size_t kChunk = 256;
  std::vector<cdouble> buf(num_k * kChunk);
  for (std::size_t start = 0; start < cfr.num_frames; start += kChunk) {
    const std::size_t frames = std::min(kChunk, cfr.num_frames - start);
    for (std::size_t k = 0; k < num_k; ++k) {
      const auto row = cfr.row(k).subspan(start, frames);
      for (std::size_t j = 0; j < frames; ++j) buf[j * num_k + k] = cdouble(row[j]);
    }
    auto chunk = std::span(buf).first(frames * num_k);
    fft::transform_batch(chunk, num_k, fft::Direction::inverse);
    for (std::size_t j = 0; j < frames; ++j)
      for (std::size_t b = 0; b < num_k; ++b) profile[b] += std::sqrt(std::norm(chunk[j * num_k + b]));
  }
  const double scale = 1.0 / (static_cast<double>(num_k) * static_cast<double>(cfr.num_frames));
  for (auto& p : profile) p *= scale;
  return profile;
}

// Picks the delay bin with the largest time-averaged |CIR| (lowest index on
// ties) and returns that bin's complex CIR coefficient for every frame.
// A single bin for the whole record keeps the phase continuous; a per-frame
// argmax would hop between bins under noise.
inline RangeSignal idft_range_signal(const AntennaCfr& cfr) {
  const std::size_t num_k = cfr.num_subcarriers;
  const auto profile = mean_range_profile(cfr);
  std::size_t best = 0;
  for (std::size_t b = 1; b < num_k; ++b)
    if (profile[b] > profile[best]) best = b;

  std::vector<cdouble> kernel(num_k);
  for (std::size_t k = 0; k < num_k; ++k) {
    // Reduce k*b mod K first so the angle stays small and exact.
    const auto turns = static_cast<double>((k * best) % num_k) / static_cast<double>(num_k);
    kernel[k] = std::polar(1.0 / static_cast<double>(num_k), 2.0 * std::numbers::pi * turns);
  }
  std::vector<cdouble> samples(cfr.num_frames, cdouble{});
  for (std::size_t k = 0; k < num_k; ++k) {
    auto row = cfr.row(k);
    for (std::size_t i = 0; i < cfr.num_frames; ++i) samples[i] += cdouble(row[i]) * kernel[k];
  }
  return RangeSignal{std::move(samples), cfr.antenna, RangeMethod::idft, best, {}};
}

inline RangeSignal idft_range_signal(const CsiTensor& csi, std::size_t m) { return idft_range_signal(csi.antenna(m)); }

// --- DiverSense subcarrier alignment ----------------------------------------

enum class SteeringSearch { closed_form, grid };

struct DiverSenseOptions {
  std::size_t reference_k = 0;
  SteeringSearch search = SteeringSearch::closed_form;
  std::size_t grid_steps = 1024;
};

namespace detail {

struct AlignmentStats {
  double ref_energy = 0.0;   // sum |h_ref|^2
  double row_energy = 0.0;   // sum |h_k|^2
  cdouble cross{};           // sum h_k conj(h_ref)
};

inline AlignmentStats alignment_stats(std::span<const cfloat> ref, std::span<const cfloat> row) {
  AlignmentStats s;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const cdouble r(ref[i]), h(row[i]);
    s.ref_energy += std::norm(r);
    s.row_energy += std::norm(h);
    s.cross += h * std::conj(r);
  }
  return s;
}

inline double wrap_two_pi(double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

}  // namespace detail

// Residual D(gamma) = (1/I) sum_i |h_ref[i] - h_k[i] e^{-j gamma}|^2 expanded
// through the row statistics.
inline double alignment_residual(const detail::AlignmentStats& s, std::size_t frames, double gamma) {
  const double re = (std::polar(1.0, -gamma) * s.cross).real();
  return std::max(0.0, (s.ref_energy + s.row_energy - 2.0 * re) / static_cast<double>(frames));
}

// Rotates every subcarrier by the steering angle gamma_k that minimizes its
// mean squared distance to the reference subcarrier, then averages. The
// minimizer has the closed form gamma_k = arg(sum_i h_k[i] conj(h_ref[i]));
// the grid search evaluates the residual on `grid_steps` uniform angles.
inline RangeSignal diversense_align(const AntennaCfr& cfr, const DiverSenseOptions& options = {}) {
  const std::size_t num_k = cfr.num_subcarriers;
  if (options.reference_k >= num_k)
    throw IndexError("reference subcarrier " + std::to_string(options.reference_k) + " out of range");
  if (options.search == SteeringSearch::grid && options.grid_steps == 0)
    throw InvalidArgument("grid search needs at least one step");
  const auto ref = cfr.row(options.reference_k);

  std::vector<double> gammas(num_k, 0.0);
  for (std::size_t k = 0; k < num_k; ++k) {
    if (k == options.reference_k) continue;
    const auto stats = detail::alignment_stats(ref, cfr.row(k));
    if (options.search == SteeringSearch::closed_form) {
      gammas[k] = detail::wrap_two_pi(std::arg(stats.cross));
    } else {
      std::size_t best = 0;
      double best_cost = alignment_residual(stats, cfr.num_frames, 0.0);
      for (std::size_t j = 1; j < options.grid_steps; ++j) {
        const double gamma = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(options.grid_steps);
        const double cost = alignment_residual(stats, cfr.num_frames, gamma);
        if (cost < best_cost) {
          best_cost = cost;
          best = j;
        }
      }
      gammas[k] = 2.0 * std::numbers::pi * static_cast<double>(best) / static_cast<double>(options.grid_steps);
    }
  }

  std::vector<cdouble> samples(cfr.num_frames, cdouble{});
  const double scale = 1.0 / static_cast<double>(num_k);
  for (std::size_t k = 0; k < num_k; ++k) {
    const cdouble steer = std::polar(scale, -gammas[k]);
    auto row = cfr.row(k);
    for (std::size_t i = 0; i < cfr.num_frames; ++i) samples[i] += cdouble(row[i]) * steer;
  }
  return RangeSignal{std::move(samples), cfr.antenna, RangeMethod::diversense, {}, std::move(gammas)};
}

inline RangeSignal diversense_align(const CsiTensor& csi, std::size_t m, const DiverSenseOptions& options = {}) {
  return diversense_align(csi.antenna(m), options);
}

// Direct evaluation of D_k for the given steering angles.
inline AlignmentCost alignment_cost(const AntennaCfr& cfr, std::size_t reference_k, std::span<const double> gammas) {
  if (gammas.size() != cfr.num_subcarriers) throw InvalidArgument("need one steering angle per subcarrier");
  const auto ref = cfr.row(reference_k);
  AlignmentCost cost{std::vector<double>(cfr.num_subcarriers, 0.0)};
  for (std::size_t k = 0; k < cfr.num_subcarriers; ++k) {
    const auto row = cfr.row(k);
    const cdouble steer = std::polar(1.0, -gammas[k]);
    double acc = 0.0;
    for (std::size_t i = 0; i < cfr.num_frames; ++i) acc += std::norm(cdouble(ref[i]) - cdouble(row[i]) * steer);
    cost.residuals[k] = acc / static_cast<double>(cfr.num_frames);
  }
  return cost;
}

}  // namespace mimo_breath
