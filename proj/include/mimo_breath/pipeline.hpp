#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "breathing.hpp"
#include "combining.hpp"
#include "config.hpp"
#include "csi_tensor.hpp"
#include "evaluation.hpp"
#include "parallel.hpp"
#include "projection.hpp"
#include "scene.hpp"
#include "simulator.hpp"
#include "subcarrier.hpp"

namespace mimo_breath {

struct EstimateOptions {
  std::size_t antenna = 0;     // SASS and SAMS chains
  std::size_t subcarrier = 0;  // SASS chain
  DiverSenseOptions diversense{};
  ProjectionOptions projection{};
};

// Per-antenna diagnostics of an estimate.
struct AntennaReport {
  std::size_t antenna = 0;
  double projection_angle_rad = 0.0;
  double bnr = 0.0;
  double weight = 0.0;
  bool included = false;
  bool flipped = false;
  std::optional<std::size_t> selected_bin;
};

struct EstimateResult {
  Method method = Method::sass;
  std::vector<double> samples;  // zero mean, unit power
  std::vector<AntennaReport> antennas;
  bool fallback_used = false;
  std::optional<std::size_t> reference_antenna;  // MAMS-WAC only
};

// IDFT range signal of one antenna followed by the BNR-optimal projection.
inline std::pair<BreathEstimate, std::size_t> idft_breath_estimate(const AntennaCfr& cfr, double frame_rate_hz,
                                                                   const ProjectionOptions& projection = {}) {
  const auto range = idft_range_signal(cfr);
  return {best_projection(range, frame_rate_hz, projection), *range.selected_bin};
}

// Single-antenna chains: SASS, SAMS-IDFT, SAMS-DiverSense.
inline EstimateResult estimate_single_antenna(const AntennaCfr& cfr, Method method, double frame_rate_hz,
                                              const EstimateOptions& options = {}) {
  RangeSignal range;
  switch (method) {
    case Method::sass: range = single_subcarrier(cfr, options.subcarrier); break;
    case Method::sams_idft: range = idft_range_signal(cfr); break;
    case Method::sams_diversense: range = diversense_align(cfr, options.diversense); break;
    case Method::mams_wac: throw InvalidArgument("MAMS-WAC needs every antenna");
  }
  const auto est = best_projection(range, frame_rate_hz, options.projection);
  EstimateResult out{method, normalize_unit_power(est.samples), {}, false, std::nullopt};
  out.antennas.push_back(AntennaReport{est.antenna, est.projection_angle_rad, est.bnr, 1.0, true, false,
                                       range.selected_bin});
  return out;
}

// WAC over per-antenna IDFT estimates.
inline EstimateResult combine_antennas(std::vector<BreathEstimate> estimates, std::vector<std::size_t> bins,
                                       double frame_rate_hz) {
  AntennaStack stack{std::move(estimates), frame_rate_hz};
  const auto combined = wac(stack);
  EstimateResult out{Method::mams_wac, combined.samples, {}, combined.fallback_used,
                     stack.estimates[combined.reference].antenna};
  for (std::size_t m = 0; m < stack.estimates.size(); ++m) {
    const auto& e = stack.estimates[m];
    out.antennas.push_back(AntennaReport{e.antenna, e.projection_angle_rad, e.bnr, combined.weights[m],
                                         combined.included[m], combined.flipped[m],
                                         m < bins.size() ? std::optional(bins[m]) : std::nullopt});
  }
  return out;
}

inline EstimateResult run_estimate(const CsiTensor& csi, Method method, const EstimateOptions& options = {}) {
  const double rate = csi.config().frame_rate_hz;
  if (method != Method::mams_wac) return estimate_single_antenna(csi.antenna(options.antenna), method, rate, options);

  const std::size_t count = csi.num_antennas();
  std::vector<BreathEstimate> estimates(count);
  std::vector<std::size_t> bins(count);
  parallel_for(count, [&](std::size_t m) {
    std::tie(estimates[m], bins[m]) = idft_breath_estimate(csi.antenna(m), rate, options.projection);
  });
  return combine_antennas(std::move(estimates), std::move(bins), rate);
}

// --- synthetic benchmark ----------------------------------------------------

struct BenchmarkOptions {
  std::size_t runs = 40;
  std::uint64_t seed = 2024;
  SystemConfig system{};
  double min_snr_db = 0.0, max_snr_db = 15.0;
  double min_rate_bpm = 10.0, max_rate_bpm = 25.0;
  // Each run's rate drifts linearly by at most this much over the record.
  double max_rate_drift_bpm = 1.0;
  double min_ue_distance_m = 0.5, max_ue_distance_m = 1.5;
  double min_amplitude_m = 0.004, max_amplitude_m = 0.006;
};

// What one benchmark run drew.
struct RunSetup {
  std::string run_id;
  std::uint64_t seed = 0;
  DistributedSceneParams scene{};
  BreathingSpec breathing{};
  NoiseSpec noise{};
  std::size_t antenna = 0;     // used by SASS and SAMS
  std::size_t subcarrier = 0;  // used by SASS
};

struct RunResult {
  RunSetup setup;
  double true_bpm = 0.0;
  std::vector<ScoreRecord> scores;  // one per method, in kAllMethods order
};

inline RunSetup draw_run(const BenchmarkOptions& opt, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  std::mt19937_64 rng((static_cast<std::uint64_t>(words[0]) << 32) | words[1]);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };

  RunSetup s;
  s.run_id = "run" + std::to_string(index);
  s.seed = rng();
  s.scene.seed = rng();
  s.scene.ue_distance_m = uniform(opt.min_ue_distance_m, opt.max_ue_distance_m);
  const double half_drift = 0.5 * opt.max_rate_drift_bpm;
  const double center = uniform(opt.min_rate_bpm + half_drift, opt.max_rate_bpm - half_drift);
  const double drift = uniform(-opt.max_rate_drift_bpm, opt.max_rate_drift_bpm);
  s.breathing.pattern = BreathPattern::varying_rate;
  s.breathing.rate_bpm = center - 0.5 * drift;
  s.breathing.end_rate_bpm = center + 0.5 * drift;
  s.breathing.amplitude_m = uniform(opt.min_amplitude_m, opt.max_amplitude_m);
  s.breathing.phase_rad = uniform(0.0, 2.0 * std::numbers::pi);
  s.noise.snr_db = uniform(opt.min_snr_db, opt.max_snr_db);
  s.antenna = static_cast<std::size_t>(rng() % opt.system.num_antennas);
  s.subcarrier = static_cast<std::size_t>(rng() % opt.system.num_subcarriers);
  return s;
}

inline ScoreRecord score_estimate(Method method, std::span<const double> estimate, const BreathingWaveform& truth,
                                  double true_bpm, const std::string& run_id) {
  ScoreRecord r;
  r.method = method;
  r.run_id = run_id;
  r.correlation = correlation_score(estimate, truth.samples, truth.rate_hz);
  r.est_bpm = try_estimate_bpm(estimate, truth.rate_hz);
  r.gt_bpm = true_bpm;
  return r;
}

// Simulates one benchmark run antenna by antenna and scores all four
// chains against the injected waveform.
inline RunResult run_benchmark_case(const BenchmarkOptions& opt, const RunSetup& setup) {
  const SystemConfig& config = opt.system;
  const Scene scene = distributed_scene(config, setup.scene);
  const BreathingWaveform truth = generate_breathing(setup.breathing, config);
  validate_simulation_inputs(config, scene, truth);
  const double rate = config.frame_rate_hz;

  const std::size_t count = config.num_antennas;
  std::vector<BreathEstimate> estimates(count);
  std::vector<std::size_t> bins(count);
  std::vector<double> sass, sams_idft, sams_diversense;
  parallel_for(count, [&](std::size_t m) {
    const AntennaCsi block = simulate_antenna(config, scene, truth, setup.noise, setup.seed, m);
    const AntennaCfr cfr = block.view();
    std::tie(estimates[m], bins[m]) = idft_breath_estimate(cfr, rate);
    if (m == setup.antenna) {
      EstimateOptions options;
      options.subcarrier = setup.subcarrier;
      sass = estimate_single_antenna(cfr, Method::sass, rate, options).samples;
      sams_diversense = estimate_single_antenna(cfr, Method::sams_diversense, rate, options).samples;
      sams_idft = normalize_unit_power(estimates[m].samples);
    }
  });
  const auto wac_result = combine_antennas(std::move(estimates), std::move(bins), rate);

  RunResult result{setup, nominal_rate_bpm(setup.breathing), {}};
  for (Method m : kAllMethods) {
    const std::vector<double>& est = m == Method::sass              ? sass
                                     : m == Method::sams_idft       ? sams_idft
                                     : m == Method::sams_diversense ? sams_diversense
                                                                    : wac_result.samples;
    result.scores.push_back(score_estimate(m, est, truth, result.true_bpm, setup.run_id));
  }
  return result;
}

inline std::vector<RunResult> run_benchmark(const BenchmarkOptions& opt) {
  opt.system.validate();
  std::vector<RunResult> results;
  results.reserve(opt.runs);
  for (std::size_t r = 0; r < opt.runs; ++r) results.push_back(run_benchmark_case(opt, draw_run(opt, r)));
  return results;
}

}  // namespace mimo_breath
