#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "signal.hpp"
#include "subcarrier.hpp"

namespace mimo_breath {

// Real breathing estimate of one antenna.
struct BreathEstimate {
  std::vector<double> samples;
  std::size_t antenna = 0;
  double projection_angle_rad = 0.0;  // in [0, pi)
  double bnr = 0.0;
};

inline constexpr double kBnrCap = 1e6;

// out[i] = Re(s[i]) cos(alpha) + Im(s[i]) sin(alpha)
inline std::vector<double> project(std::span<const cdouble> signal, double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  std::vector<double> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal[i].real() * c + signal[i].imag() * s;
  return out;
}

inline std::vector<double> project(const RangeSignal& signal, double alpha) { return project(signal.samples, alpha); }

namespace detail {

inline bool in_band(double f, const BreathBand& band) { return f >= band.low_hz && f <= band.high_hz; }

inline double bnr_from_powers(double breath, double total) {
  const double rest = total - breath;
  if (rest <= 0.0) return kBnrCap;
  return std::min(kBnrCap, breath / rest);
}

}  // namespace detail

// Breathing-to-noise ratio: periodogram power inside the band over the
// remaining non-DC power. The DC bin is excluded from both sums (the series
// is mean-removed first), so constant offsets do not dilute the ratio.
// Capped at kBnrCap when no power falls outside the band.
inline double bnr(std::span<const double> series, double frame_rate_hz, const BreathBand& band = {}) {
  band.validate(frame_rate_hz);
  if (is_constant(series)) throw DegenerateSignal("BNR is undefined for a constant series");
  const auto power = periodogram(series);
  const std::size_t n = power.size();
  double breath = 0.0, total = 0.0;
  for (std::size_t b = 1; b < n; ++b) {
    total += power[b];
    if (detail::in_band(bin_frequency(b, n, frame_rate_hz), band)) breath += power[b];
  }
  if (total <= 0.0) throw DegenerateSignal("BNR is undefined for a series without oscillatory power");
  return detail::bnr_from_powers(breath, total);
}

struct ProjectionOptions {
  BreathBand band{};
  std::size_t angle_steps = 180;  // uniform grid over [0, pi)
};

namespace detail {

struct ProjectionScan {
  std::vector<double> bnr;          // -infinity where the projection is constant
  std::vector<double> breath_power; // in-band periodogram power
  std::vector<double> total_power;  // periodogram power without DC
};

inline ProjectionScan scan_projections(std::span<const cdouble> signal, double frame_rate_hz,
                                       const ProjectionOptions& options) {
  options.band.validate(frame_rate_hz);
  if (options.angle_steps == 0) throw InvalidArgument("projection grid needs at least one angle");
  std::vector<double> re(signal.size()), im(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    re[i] = signal[i].real();
    im[i] = signal[i].imag();
  }
  if (is_constant(re) && is_constant(im)) throw DegenerateSignal("cannot project a constant range signal");

  const double mean_re = mean(re), mean_im = mean(im);
  for (auto& v : re) v -= mean_re;
  for (auto& v : im) v -= mean_im;
  const auto spec_re = fft::forward_real(re);
  const auto spec_im = fft::forward_real(im);

  struct Sums {
    double rr = 0.0, ii = 0.0, ri = 0.0;
  } breath, total;
  const std::size_t n = signal.size();
  for (std::size_t b = 1; b < n; ++b) {
    const double rr = std::norm(spec_re[b]);
    const double ii = std::norm(spec_im[b]);
    const double ri = (spec_re[b] * std::conj(spec_im[b])).real();
    total.rr += rr;
    total.ii += ii;
    total.ri += ri;
    if (in_band(bin_frequency(b, n, frame_rate_hz), options.band)) {
      breath.rr += rr;
      breath.ii += ii;
      breath.ri += ri;
    }
  }

  const double floor = 1e-20 * std::max(total.rr, total.ii);
  ProjectionScan scan{std::vector<double>(options.angle_steps), std::vector<double>(options.angle_steps),
                      std::vector<double>(options.angle_steps)};
  for (std::size_t j = 0; j < options.angle_steps; ++j) {
    const double alpha = std::numbers::pi * static_cast<double>(j) / static_cast<double>(options.angle_steps);
    const double c = std::cos(alpha), s = std::sin(alpha);
    auto quad = [c, s](const Sums& q) { return c * c * q.rr + s * s * q.ii + 2.0 * c * s * q.ri; };
    const double tot = quad(total);
    const double in_band_power = std::max(0.0, quad(breath));
    scan.breath_power[j] = in_band_power;
    scan.total_power[j] = tot;
    scan.bnr[j] = tot <= floor ? -std::numeric_limits<double>::infinity() : bnr_from_powers(in_band_power, tot);
  }
  return scan;
}

}  // namespace detail

// Per-angle BNR over the projection grid. The projected spectrum is linear
// in (cos a, sin a), so band and total powers follow from six sums over the
// spectra of the real and imaginary parts instead of one FFT per angle.
// Angles whose projection has no variation get -infinity.
inline std::vector<double> projection_bnr_profile(std::span<const cdouble> signal, double frame_rate_hz,
                                                  const ProjectionOptions& options = {}) {
  return detail::scan_projections(signal, frame_rate_hz, options).bnr;
}

// Relative out-of-band floor used when ranking projection angles.
inline constexpr double kProjectionFloor = 1e-3;

// Searches the projection angle on [0, pi) with the highest BNR. alpha and
// alpha + pi give negated series with the same BNR, so the half circle covers
// every candidate. Angles are ranked by
//   P_breath / (P_rest + kProjectionFloor * max_alpha P_tot)
// which equals the BNR ordering whenever noise fills the out-of-band bins,
// and keeps a noise-free arc from locking onto the second harmonic of its
// radial component. Ties go to the lowest angle. The returned BNR is the
// plain one.
inline BreathEstimate best_projection(const RangeSignal& signal, double frame_rate_hz,
                                      const ProjectionOptions& options = {}) {
  const auto scan = detail::scan_projections(signal.samples, frame_rate_hz, options);
  const double floor =
      kProjectionFloor * *std::max_element(scan.total_power.begin(), scan.total_power.end());
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t j = 0; j < scan.bnr.size(); ++j) {
    if (scan.bnr[j] == -std::numeric_limits<double>::infinity()) continue;
    const double rest = std::max(0.0, scan.total_power[j] - scan.breath_power[j]);
    const double score = scan.breath_power[j] / (rest + floor);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  const double alpha = std::numbers::pi * static_cast<double>(best) / static_cast<double>(options.angle_steps);
  return BreathEstimate{project(signal, alpha), signal.antenna, alpha, std::max(0.0, scan.bnr[best])};
}

}  // namespace mimo_breath
