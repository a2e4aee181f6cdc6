#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "signal.hpp"

namespace mimo_breath {

// Processing chains compared in the evaluation.
enum class Method { sass, sams_idft, sams_diversense, mams_wac };

inline constexpr std::array<Method, 4> kAllMethods{Method::sass, Method::sams_idft, Method::sams_diversense,
                                                   Method::mams_wac};

// Report label, e.g. "SAMS-IDFT".
inline std::string_view method_label(Method m) {
  switch (m) {
    case Method::sass: return "SASS";
    case Method::sams_idft: return "SAMS-IDFT";
    case Method::sams_diversense: return "SAMS-DiverSense";
    case Method::mams_wac: return "MAMS-WAC";
  }
  return "";
}

// CLI spelling, e.g. "sams-idft".
inline std::string_view method_cli_name(Method m) {
  switch (m) {
    case Method::sass: return "sass";
    case Method::sams_idft: return "sams-idft";
    case Method::sams_diversense: return "sams-diversense";
    case Method::mams_wac: return "mams-wac";
  }
  return "";
}

// Accepts either spelling.
inline Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (name == method_label(m) || name == method_cli_name(m)) return m;
  throw SchemaError("unknown method '" + std::string(name) + "'");
}

struct GroundTruth {
  std::vector<double> samples;  // chest displacement, meters
  double rate_hz = 0.0;

  double duration_s() const { return static_cast<double>(samples.size()) / rate_hz; }

  void validate() const {
    if (samples.empty()) throw InvalidArgument("ground truth is empty");
    if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) throw InvalidArgument("ground truth rate must be positive");
    for (double v : samples)
      if (!std::isfinite(v)) throw InvalidArgument("ground truth contains non-finite samples");
  }
};

struct ScoreRecord {
  Method method = Method::sass;
  double correlation = 0.0;
  std::optional<double> est_bpm;  // empty when no breathing was detected
  std::optional<double> gt_bpm;
  std::string run_id;
};

struct CdfPoint {
  double correlation;
  double cumulative_probability;
};

struct CdfCurve {
  std::vector<CdfPoint> points;

  // Fraction of scores <= x.
  double at(double x) const {
    double y = 0.0;
    for (const auto& p : points) {
      if (p.correlation > x) break;
      y = p.cumulative_probability;
    }
    return y;
  }
};

// --- correlation ------------------------------------------------------------

struct CorrelationOptions {
  double max_lag_s = 2.0;
};

// Both series are power-normalized, then the Pearson correlation of their
// overlap is evaluated at every lag within +-max_lag_s. The score is the
// largest |rho|, so the sign ambiguity of projected estimates and small
// trigger skew do not count against an estimate.
inline double correlation_score(std::span<const double> est, std::span<const double> gt, double rate_hz,
                                const CorrelationOptions& options = {}) {
  if (est.size() != gt.size())
    throw InvalidArgument("correlation needs equal lengths, got " + std::to_string(est.size()) + " and " +
                          std::to_string(gt.size()));
  if (!(rate_hz > 0.0)) throw InvalidArgument("correlation rate must be positive");
  const auto a = normalize_unit_power(est);
  const auto b = normalize_unit_power(gt);
  const auto n = static_cast<long>(a.size());
  long max_lag = std::lround(std::max(0.0, options.max_lag_s) * rate_hz);
  max_lag = std::min(max_lag, n - 2);

  double best = 0.0;
  for (long lag = -max_lag; lag <= max_lag; ++lag) {
    const std::size_t a0 = lag > 0 ? static_cast<std::size_t>(lag) : 0;
    const std::size_t b0 = lag < 0 ? static_cast<std::size_t>(-lag) : 0;
    const std::size_t len = static_cast<std::size_t>(n - std::abs(lag));
    const double rho = pearson(std::span(a).subspan(a0, len), std::span(b).subspan(b0, len));
    best = std::max(best, std::abs(rho));
  }
  return std::clamp(best, 0.0, 1.0);
}

// --- breathing rate ---------------------------------------------------------

struct BpmOptions {
  BreathBand band{};
  // The in-band peak must exceed this multiple of the median periodogram bin.
  // For white noise over a one-minute record at 200 Hz (30 in-band bins)
  // the false-detection rate at 15 is about 0.1 %.
  double detection_factor = 15.0;
};

// Breathing rate from the in-band periodogram peak, refined by fitting a
// parabola through the log-power of the peak and its two neighbors.
inline double estimate_bpm(std::span<const double> series, double rate_hz, const BpmOptions& options = {}) {
  options.band.validate(rate_hz);
  const std::size_t n = series.size();
  if (static_cast<double>(n) / rate_hz < 2.0 / options.band.low_hz)
    throw InvalidArgument("series must span at least two periods of the lowest breathing frequency");
  if (is_constant(series)) throw NoBreathDetected("constant series carries no breathing");

  const auto power = periodogram(series);
  const std::size_t half = n / 2;
  std::vector<double> one_sided(power.begin() + 1, power.begin() + static_cast<long>(half) + 1);
  auto mid = one_sided.begin() + static_cast<long>(one_sided.size() / 2);
  std::nth_element(one_sided.begin(), mid, one_sided.end());
  const double median = *mid;

  std::size_t peak = 0;
  for (std::size_t b = 1; b <= half; ++b) {
    const double f = bin_frequency(b, n, rate_hz);
    if (f < options.band.low_hz || f > options.band.high_hz) continue;
    if (peak == 0 || power[b] > power[peak]) peak = b;
  }
  if (peak == 0) throw InvalidArgument("no periodogram bin falls inside the breathing band");
  if (!(power[peak] >= options.detection_factor * median))
    throw NoBreathDetected("no in-band peak above " + std::to_string(options.detection_factor) +
                           "x the median periodogram level");

  double delta = 0.0;
  if (peak + 1 <= half) {
    const double lo = power[peak - 1], mid_p = power[peak], hi = power[peak + 1];
    // A neighbor with (numerically) no power means the tone sits on the bin.
    if (lo > 1e-10 * mid_p && hi > 1e-10 * mid_p) {
      const double l = std::log(lo), c = std::log(mid_p), h = std::log(hi);
      const double denom = l - 2.0 * c + h;
      if (denom < 0.0) delta = std::clamp(0.5 * (l - h) / denom, -0.5, 0.5);
    }
  }
  const double f_peak = (static_cast<double>(peak) + delta) * rate_hz / static_cast<double>(n);
  return 60.0 * f_peak;
}

inline std::optional<double> try_estimate_bpm(std::span<const double> series, double rate_hz,
                                              const BpmOptions& options = {}) {
  try {
    return estimate_bpm(series, rate_hz, options);
  } catch (const NoBreathDetected&) {
    return std::nullopt;
  }
}

// --- CDF and summaries ------------------------------------------------------

inline CdfCurve empirical_cdf(std::span<const double> scores) {
  if (scores.empty()) throw InvalidArgument("cannot build a CDF from no scores");
  std::vector<double> sorted(scores.begin(), scores.end());
  for (double v : sorted)
    if (!std::isfinite(v)) throw InvalidArgument("CDF scores must be finite");
  std::sort(sorted.begin(), sorted.end());
  CdfCurve curve;
  curve.points.reserve(sorted.size());
  const auto total = static_cast<double>(sorted.size());
  for (std::size_t r = 0; r < sorted.size(); ++r)
    curve.points.push_back({sorted[r], static_cast<double>(r + 1) / total});
  return curve;
}

inline double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct MethodSummary {
  Method method = Method::sass;
  std::size_t runs = 0;
  double mean_correlation = 0.0;
  double median_correlation = 0.0;
  std::size_t bpm_runs = 0;  // runs where both rates are available
  double mean_abs_bpm_error = 0.0;
  double max_abs_bpm_error = 0.0;
  double fraction_bpm_within_half = 0.0;  // |error| <= 0.5 bpm, over all runs
};

inline MethodSummary summarize(Method method, std::span<const ScoreRecord> records) {
  MethodSummary s{method};
  std::vector<double> corr;
  std::size_t within = 0;
  for (const auto& r : records) {
    if (r.method != method) continue;
    corr.push_back(r.correlation);
    if (r.est_bpm && r.gt_bpm) {
      const double err = std::abs(*r.est_bpm - *r.gt_bpm);
      ++s.bpm_runs;
      s.mean_abs_bpm_error += err;
      s.max_abs_bpm_error = std::max(s.max_abs_bpm_error, err);
      if (err <= 0.5) ++within;
    }
  }
  s.runs = corr.size();
  if (s.runs == 0) return s;
  s.mean_correlation = mean(corr);
  s.median_correlation = median(corr);
  if (s.bpm_runs > 0) s.mean_abs_bpm_error /= static_cast<double>(s.bpm_runs);
  s.fraction_bpm_within_half = static_cast<double>(within) / static_cast<double>(s.runs);
  return s;
}

}  // namespace mimo_breath
