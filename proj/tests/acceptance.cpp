// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "test_support.hpp"

namespace mb = mimo_breath;
namespace fs = std::filesystem;
using namespace mimo_breath::testing;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<mb::cdouble> random_complex(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<mb::cdouble> out(n);
  for (auto& v : out) v = {g(rng), g(rng)};
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// --- 1 ---------------------------------------------------------------------

Check constants() {
  Check c;
  const auto d = mb::derived_constants(mb::SystemConfig{});
  c.require(d.range_resolution_m >= 16.65 && d.range_resolution_m <= 16.67, "range resolution out of range");
  c.require(d.max_unambiguous_range_m >= 1665.0 && d.max_unambiguous_range_m <= 1666.6, "max range out of range");
  c.detail = c.ok ? "range resolution " + fmt("%.4f", d.range_resolution_m) + " m, max range " +
                        fmt("%.2f", d.max_unambiguous_range_m) + " m"
                  : c.detail;
  return c;
}

// --- 2, 3 ------------------------------------------------------------------

struct BenchmarkOutcome {
  Check ordering;
  Check bpm;
};

BenchmarkOutcome benchmark() {
  const auto start = std::chrono::steady_clock::now();
  const mb::BenchmarkOptions opt;  // 40 runs, distributed scene, SNR 0-15 dB, 10-25 bpm
  const auto results = mb::run_benchmark(opt);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<mb::ScoreRecord> records;
  for (const auto& r : results) records.insert(records.end(), r.scores.begin(), r.scores.end());
  auto med = [&](mb::Method m) { return mb::summarize(m, records).median_correlation; };
  const double sass = med(mb::Method::sass), idft = med(mb::Method::sams_idft);
  const double diversense = med(mb::Method::sams_diversense), wac = med(mb::Method::mams_wac);

  BenchmarkOutcome out;
  out.ordering.require(results.size() == 40, "benchmark did not produce 40 runs");
  out.ordering.require(wac >= idft && idft >= sass, "median ordering violated");
  out.ordering.require(wac - sass >= 0.1, "MAMS-WAC does not beat SASS by 0.1");
  out.ordering.require(std::abs(diversense - idft) <= 0.1, "SAMS-DiverSense not within 0.1 of SAMS-IDFT");
  const std::string medians = "medians SASS " + fmt("%.3f", sass) + ", SAMS-IDFT " + fmt("%.3f", idft) +
                              ", SAMS-DiverSense " + fmt("%.3f", diversense) + ", MAMS-WAC " + fmt("%.3f", wac) +
                              " (40 runs, " + fmt("%.0f", seconds) + " s)";
  out.ordering.detail = out.ordering.ok ? medians : out.ordering.detail + "; " + medians;

  std::size_t good = 0;
  for (const auto& r : records)
    if (r.method == mb::Method::mams_wac && r.est_bpm && std::abs(*r.est_bpm - *r.gt_bpm) <= 0.5) ++good;
  const double fraction = static_cast<double>(good) / static_cast<double>(results.size());
  out.bpm.require(fraction >= 0.95, "too few runs within 0.5 bpm");
  out.bpm.detail = (out.bpm.ok ? "" : out.bpm.detail + "; ") + "MAMS-WAC within 0.5 bpm in " + std::to_string(good) +
                   "/" + std::to_string(results.size()) + " runs";
  return out;
}

// --- 4 ---------------------------------------------------------------------

Check oracle_equivalences() {
  Check c;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> pick_k(2, 24), pick_i(50, 600);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  const double step = 2.0 * kPi / 1024.0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto cfg = small_config(1, pick_k(rng), pick_i(rng), 100.0);
    // A common component with per-subcarrier rotations plus noise, so the
    // optimum is well defined but not trivial.
    const auto common = random_complex(cfg.num_frames, rng);
    std::vector<mb::cdouble> v;
    for (std::size_t k = 0; k < cfg.num_subcarriers; ++k) {
      const auto rot = std::polar(1.0, angle(rng));
      const auto noise = random_complex(cfg.num_frames, rng);
      for (std::size_t i = 0; i < cfg.num_frames; ++i) v.push_back(common[i] * rot + 0.7 * noise[i]);
    }
    const auto csi = tensor_from(cfg, v);
    const auto closed = mb::diversense_align(csi, 0);
    mb::DiverSenseOptions grid;
    grid.search = mb::SteeringSearch::grid;
    const auto searched = mb::diversense_align(csi, 0, grid);
    for (std::size_t k = 0; k < cfg.num_subcarriers; ++k)
      worst = std::max(worst, circular_distance((*closed.steering_angles)[k], (*searched.steering_angles)[k]));
  }
  c.require(worst <= step, "grid and closed-form steering angles differ by more than one grid step");

  mb::SystemConfig cfg;
  cfg.num_antennas = 1;
  cfg.num_frames = 4;
  const double cell = mb::derived_constants(cfg).range_resolution_m;
  const mb::BreathingWaveform still{std::vector<double>(4, 0.0), cfg.frame_rate_hz};
  std::size_t checked = 0, misses = 0;
  for (int j = 1; j <= 100; ++j) {
    const double cells = 0.1 * j;
    if (std::abs(cells - std::floor(cells) - 0.5) < 0.01) continue;  // half-bin ties have no unique answer
    const std::vector<mb::PathSpec> path{{{1.0, 0.0}, cells * cell, 0.0, 0.0, false}};
    const auto csi = mb::simulate_csi(cfg, path, still, std::nullopt, 1);
    const auto expected = static_cast<std::size_t>(std::lround(cells)) % cfg.num_subcarriers;
    if (*mb::idft_range_signal(csi, 0).selected_bin != expected) ++misses;
    ++checked;
  }
  c.require(misses == 0, std::to_string(misses) + " IDFT bin recovery misses");
  if (c.ok)
    c.detail = "steering angles agree within " + fmt("%.2e", worst) + " rad (step " + fmt("%.2e", step) +
               ") on 100 instances; " + std::to_string(checked) + "/" + std::to_string(checked) + " bins recovered";
  return c;
}

// --- 5 ---------------------------------------------------------------------

Check invariants() {
  Check c;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Subcarrier combining: a common phase rotation commutes with alignment,
  // IDFT bin extraction and the IDFT bin choice.
  for (int trial = 0; trial < 10; ++trial) {
    const auto cfg = small_config(1, 16, 300, 50.0);
    const auto base = random_complex(cfg.num_entries(), rng);
    const auto r = std::polar(1.0, 2.0 * kPi * u(rng));
    std::vector<mb::cdouble> rotated(base.size());
    for (std::size_t n = 0; n < base.size(); ++n) rotated[n] = mb::cdouble(mb::cfloat(base[n])) * r;
    const auto a = tensor_from(cfg, base), b = tensor_from(cfg, rotated);
    const auto da = mb::diversense_align(a, 0), db = mb::diversense_align(b, 0);
    const auto ia = mb::idft_range_signal(a, 0), ib = mb::idft_range_signal(b, 0);
    c.require(ia.selected_bin == ib.selected_bin, "IDFT bin changed under global phase");
    for (std::size_t i = 0; i < 300; ++i) {
      c.require(std::abs(da.samples[i] * r - db.samples[i]) < 1e-5, "DiverSense not phase equivariant");
      c.require(std::abs(ia.samples[i] * r - ib.samples[i]) < 1e-5, "IDFT not phase equivariant");
    }
  }

  // Projection: antipodal symmetry and grid optimality; BNR scale/mean.
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_complex(2000, rng);
    const auto breath = sine(2000, 50.0, 0.1 + 0.4 * u(rng), 2.0 * u(rng));
    const double theta = kPi * u(rng);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += std::polar(breath[i], theta);
    const mb::RangeSignal sig{s, 0, mb::RangeMethod::idft, std::nullopt, std::nullopt};
    const auto est = mb::best_projection(sig, 50.0);
    const auto profile = mb::projection_bnr_profile(s, 50.0);
    for (double g : profile) c.require(est.bnr >= g, "best projection is not grid optimal");
    const auto flipped = mb::project(s, est.projection_angle_rad + kPi);
    for (std::size_t i = 0; i < s.size(); ++i)
      c.require(std::abs(flipped[i] + est.samples[i]) < 1e-9, "antipodal projection not negated");
    const double g0 = mb::bnr(est.samples, 50.0);
    c.require(std::abs(mb::bnr(flipped, 50.0) - g0) <= 1e-9 * g0, "antipodal BNR differs");
    const double a = (u(rng) - 0.5) * 1e3, d = (u(rng) - 0.5) * 1e3;
    std::vector<double> t(est.samples.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = a * est.samples[i] + d;
    c.require(std::abs(mb::bnr(t, 50.0) - g0) <= 1e-9 * g0, "BNR not scale/mean invariant");
  }

  // WAC gate and weights.
  {
    mb::AntennaStack stack{{}, 20.0};
    for (std::size_t m = 0; m < 3; ++m) stack.estimates.push_back({sine(400, 20.0, 0.25 + 0.01 * m), m, 0.0, 0.0});
    stack.estimates[0].bnr = 4.0;
    stack.estimates[1].bnr = 0.5;
    stack.estimates[2].bnr = 9.0;
    const auto out = mb::wac(stack);
    c.require(out.weights == std::vector<double>{2.0, 0.0, 3.0}, "[4, 0.5, 9] did not give weights [2, 0, 3]");
  }
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t count = 1 + rng() % 12;
    mb::AntennaStack stack{{}, 20.0};
    for (std::size_t m = 0; m < count; ++m) {
      const double g = u(rng) < 0.1 ? 1.0 : std::exp(6.0 * u(rng) - 2.0);
      auto x = white_noise(500, rng());
      const auto b = sine(500, 20.0, 0.3);
      for (std::size_t i = 0; i < 500; ++i) x[i] += b[i];
      stack.estimates.push_back({std::move(x), m, 0.0, g});
    }
    const auto out = mb::wac(stack);
    for (std::size_t m = 0; m < count; ++m) {
      const double g = stack.estimates[m].bnr;
      c.require((out.weights[m] > 0.0) == (g > 1.0), "gate mismatch");
      if (g > 1.0) c.require(std::abs(out.weights[m] * out.weights[m] - g) <= 1e-12 * g, "weight^2 != BNR");
    }
  }

  // Correlation metric: scale/offset and lag.
  {
    mb::SystemConfig cfg;
    cfg.num_frames = 12400;
    const auto b = mb::generate_breathing(breath(mb::BreathPattern::varying_rate, 11.0, 19.0, 0.005), cfg);
    const std::vector<double> gt(b.samples.begin(), b.samples.begin() + 12000);
    auto est = gt;
    const auto e = white_noise(12000, 55, 0.003);
    for (std::size_t i = 0; i < est.size(); ++i) est[i] += e[i];
    const double base = mb::correlation_score(est, gt, 200.0);
    for (double scale : {-4.0, 0.5, 1e3}) {
      std::vector<double> t(est.size());
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = scale * est[i] + 2.0;
      c.require(std::abs(mb::correlation_score(t, gt, 200.0) - base) < 1e-9, "correlation not affine invariant");
    }
    c.require(std::abs(mb::correlation_score(gt, est, 200.0) - base) < 1e-12, "correlation not symmetric");
    for (std::size_t shift : {100u, 250u, 400u}) {
      std::vector<double> moved(b.samples.begin() + static_cast<long>(shift),
                                b.samples.begin() + static_cast<long>(shift) + 12000);
      const double clean = mb::correlation_score(gt, gt, 200.0);
      c.require(std::abs(mb::correlation_score(moved, gt, 200.0) - clean) < 0.01, "lag changed the score");
    }
  }

  // Simulator linearity and determinism.
  {
    const auto cfg = small_config(4, 12, 500, 50.0);
    const auto wave = mb::generate_breathing(breath(mb::BreathPattern::sinusoid, 18.0, 18.0, 0.005), cfg);
    const std::vector<mb::PathSpec> p{{{1.0, 0.0}, 4.0, 0.3, 0.0, false}};
    const std::vector<mb::PathSpec> q{{{0.3, -0.2}, 7.0, -0.5, 0.9, true}};
    std::vector<mb::PathSpec> pq = p;
    pq.push_back(q[0]);
    const auto sp = mb::simulate_csi(cfg, p, wave, std::nullopt, 1);
    const auto sq = mb::simulate_csi(cfg, q, wave, std::nullopt, 1);
    const auto spq = mb::simulate_csi(cfg, pq, wave, std::nullopt, 1);
    for (std::size_t n = 0; n < spq.values().size(); ++n)
      c.require(std::abs(spq.values()[n] - (sp.values()[n] + sq.values()[n])) < 1e-6, "simulator not linear");
    const auto scene = mb::distributed_scene(cfg, {0.9, 3});
    c.require(mb::simulate_csi(cfg, scene, wave, mb::NoiseSpec{4.0}, 8) ==
                  mb::simulate_csi(cfg, scene, wave, mb::NoiseSpec{4.0}, 8),
              "simulator not deterministic");
  }
  if (c.ok)
    c.detail = "phase equivariance, antipodal symmetry, grid optimality, BNR invariances, WAC gate, "
               "correlation invariances, simulator linearity and determinism";
  return c;
}

// --- 6 ---------------------------------------------------------------------

Check clean_channel() {
  Check c;
  mb::SystemConfig cfg;
  cfg.num_antennas = 8;
  const auto wave = mb::generate_breathing(breath(mb::BreathPattern::varying_rate, 13.0, 17.0, 0.005), cfg);
  const std::vector<mb::PathSpec> path{{{1.0, 0.0}, 3.0, 0.35, 0.5, true}};
  const auto csi = mb::simulate_csi(cfg, path, wave, std::nullopt, 1);
  std::string scores;
  for (auto m : mb::kAllMethods) {
    const auto est = mb::run_estimate(csi, m);
    const double corr = mb::correlation_score(est.samples, wave.samples, cfg.frame_rate_hz);
    c.require(corr >= 0.99, std::string(mb::method_label(m)) + " correlation " + fmt("%.4f", corr) + " < 0.99");
    scores += (scores.empty() ? "" : ", ") + std::string(mb::method_label(m)) + " " + fmt("%.4f", corr);
  }
  if (c.ok) c.detail = scores;
  return c;
}

// --- 7 ---------------------------------------------------------------------

Check file_round_trips() {
  Check c;
  const auto dir = fs::temp_directory_path() / "mimo_breath_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto produce = [&](const std::string& tag) {
    auto cfg = small_config(16, 32, 3000, 100.0);
    const auto scene = mb::distributed_scene(cfg, {1.1, 7});
    const auto wave = mb::generate_breathing(breath(mb::BreathPattern::varying_rate, 12.0, 16.0, 0.005), cfg);
    const auto csi = mb::simulate_csi(cfg, scene, wave, mb::NoiseSpec{6.0}, 31);
    const auto sub = dir / tag;
    fs::create_directories(sub);
    mb::io::write_csi(sub / "csi.bin", csi);
    mb::io::write_ground_truth(sub / "gt.csv", {wave.samples, wave.rate_hz});
    const auto back = mb::io::read_csi(sub / "csi.bin");
    c.require(back == csi && std::memcmp(back.values().data(), csi.values().data(), csi.values().size_bytes()) == 0,
              "CSI round trip not bit exact");
    c.require(mb::io::read_ground_truth(sub / "gt.csv").samples == wave.samples, "ground truth round trip not exact");
    std::vector<mb::ScoreRecord> records;
    for (auto m : mb::kAllMethods) {
      const auto est = mb::run_estimate(back, m);
      const auto csv = sub / ("est_" + std::string(mb::method_cli_name(m)) + ".csv");
      mb::io::write_series_csv(csv, "value", est.samples, 100.0);
      c.require(mb::io::read_series_csv(csv, "value").values == est.samples, "estimate CSV round trip not exact");
      records.push_back(mb::score_estimate(m, est.samples, wave, 14.0, "rerun"));
      const auto score = sub / ("score_" + std::string(mb::method_cli_name(m)) + ".json");
      mb::io::write_json(score, mb::io::to_json(records.back()));
      const auto again = mb::io::score_record_from_json(mb::io::read_json(score), score.string());
      c.require(again.correlation == records.back().correlation && again.est_bpm == records.back().est_bpm,
                "score record round trip not exact");
    }
    mb::io::write_cdf_csv(sub / "cdf.csv", mb::empirical_cdf(std::vector<double>{records[0].correlation,
                                                                               records[3].correlation}));
  };
  produce("a");
  produce("b");
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const auto twin = dir / "b" / entry.path().filename();
    c.require(fs::exists(twin) && slurp(entry.path()) == slurp(twin),
              entry.path().filename().string() + " differs between identical runs");
    ++compared;
  }
  fs::remove_all(dir);
  if (c.ok) c.detail = std::to_string(compared) + " files byte-identical across reruns; all round trips exact";
  return c;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Check()>& run) {
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %d %s: %s\n", c.ok ? "PASS" : "FAIL", id, name, c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  };

  report(1, "derived constants", constants);
  BenchmarkOutcome bench;
  bool bench_ran = false;
  auto run_bench = [&] {
    if (!bench_ran) bench = benchmark();
    bench_ran = true;
  };
  report(2, "method ordering on 40-run benchmark", [&] {
    run_bench();
    return bench.ordering;
  });
  report(3, "MAMS-WAC bpm accuracy", [&] {
    run_bench();
    return bench.bpm;
  });
  report(4, "oracle equivalences", oracle_equivalences);
  report(5, "invariant suites", invariants);
  report(6, "clean-channel end to end", clean_channel);
  report(7, "file round trips and determinism", file_round_trips);
  std::printf("%s: %d of 7 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
