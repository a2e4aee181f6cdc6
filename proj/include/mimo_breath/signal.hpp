#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"

namespace mimo_breath {

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double mean_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

// True when the series has no variation left after removing its mean,
// judged relative to its own magnitude so the test is scale-free.
inline bool is_constant(std::span<const double> x) {
  if (x.empty()) return true;
  double mu = mean(x);
  double peak = 0.0, spread = 0.0;
  for (double v : x) {
    peak = std::max(peak, std::abs(v));
    spread = std::max(spread, std::abs(v - mu));
  }
  return peak == 0.0 || spread <= 1e-12 * peak;
}

// Zero mean, unit mean-square copy of `x`.
inline std::vector<double> normalize_unit_power(std::span<const double> x) {
  if (is_constant(x)) throw DegenerateSignal("cannot normalize a constant series");
  double mu = mean(x);
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [mu](double v) { return v - mu; });
  double scale = 1.0 / std::sqrt(mean_power(out));
  for (double& v : out) v *= scale;
  return out;
}

// Two-sided periodogram |X[n]|^2 of the mean-removed series, rectangular
// window, no scaling. Bin n sits at frequency bin_frequency(n, N, rate).
inline std::vector<double> periodogram(std::span<const double> x) {
  double mu = mean(x);
  std::vector<std::complex<double>> buf(x.size());
  std::transform(x.begin(), x.end(), buf.begin(), [mu](double v) { return std::complex<double>(v - mu, 0.0); });
  fft::transform(buf, buf, fft::Direction::forward);
  std::vector<double> power(x.size());
  std::transform(buf.begin(), buf.end(), power.begin(), [](std::complex<double> c) { return std::norm(c); });
  return power;
}

// Absolute frequency of two-sided DFT bin n.
inline double bin_frequency(std::size_t n, std::size_t size, double rate_hz) {
  return static_cast<double>(std::min(n, size - n)) * rate_hz / static_cast<double>(size);
}

// Linear-interpolation resampling onto a uniform grid at `to_rate`. The
// output covers the same duration N / from_rate; past the last input sample
// the final value is held.
inline std::vector<double> resample(std::span<const double> x, double from_rate, double to_rate) {
  if (x.empty()) throw InvalidArgument("cannot resample an empty series");
  if (!(from_rate > 0.0 && to_rate > 0.0 && std::isfinite(from_rate) && std::isfinite(to_rate)))
    throw InvalidArgument("resampling rates must be positive");
  if (from_rate == to_rate) return {x.begin(), x.end()};
  auto n_out = static_cast<std::size_t>(std::llround(static_cast<double>(x.size()) * to_rate / from_rate));
  n_out = std::max<std::size_t>(n_out, 1);
  std::vector<double> out(n_out);
  const std::size_t last = x.size() - 1;
  for (std::size_t j = 0; j < n_out; ++j) {
    double pos = static_cast<double>(j) * from_rate / to_rate;
    auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo >= last) {
      out[j] = x[last];
      continue;
    }
    double frac = pos - static_cast<double>(lo);
    out[j] = x[lo] + frac * (x[lo + 1] - x[lo]);
  }
  return out;
}

// Pearson correlation of a and b (equal lengths). Returns 0 when either
// side has no variance.
inline double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 2) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace mimo_breath
