// Batch front end: simulate -> estimate -> evaluate -> report.

#include <CLI11.hpp>
#include <json.hpp>

#include <mimo_breath/mimo_breath.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mimo_breath;

namespace {

// One machine-parsable line on stderr per failure.
void report_error(const std::string& kind, const std::string& message) {
  json line{{"error", kind}, {"message", message}};
  std::cerr << line.dump() << std::endl;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir.string() + "'");
}

json estimate_metadata(const EstimateResult& r, const CsiTensor& csi, const EstimateOptions& options) {
  json meta;
  meta["method"] = std::string(method_label(r.method));
  meta["frame_rate_hz"] = csi.config().frame_rate_hz;
  meta["num_frames"] = csi.num_frames();
  if (r.method != Method::mams_wac) meta["antenna"] = options.antenna;
  if (r.method == Method::sass) meta["subcarrier"] = options.subcarrier;
  meta["fallback_used"] = r.fallback_used;
  meta["reference_antenna"] = r.reference_antenna ? json(*r.reference_antenna) : json(nullptr);
  json table = json::array();
  for (const auto& a : r.antennas) {
    json row{{"antenna", a.antenna},     {"projection_angle_rad", a.projection_angle_rad},
             {"bnr", a.bnr},             {"weight", a.weight},
             {"included", a.included},   {"flipped", a.flipped}};
    row["selected_bin"] = a.selected_bin ? json(*a.selected_bin) : json(nullptr);
    table.push_back(std::move(row));
  }
  meta["antennas"] = std::move(table);
  return meta;
}

void cmd_simulate(const std::optional<fs::path>& config_path, const fs::path& out_dir) {
  const RunConfig rc = config_path ? load_run_config(*config_path) : RunConfig{};
  const Scene scene = build_scene(rc);
  const BreathingWaveform breathing = build_breathing(rc);
  const CsiTensor csi = simulate_csi(rc.system, scene, breathing, rc.noise, rc.seed);
  ensure_dir(out_dir);
  io::write_csi(out_dir / "csi.bin", csi);
  io::write_ground_truth(out_dir / "gt.csv", GroundTruth{breathing.samples, breathing.rate_hz});
  const auto constants = derived_constants(rc.system);
  json summary{{"range_resolution_m", constants.range_resolution_m},
               {"max_unambiguous_range_m", constants.max_unambiguous_range_m},
               {"M", rc.system.num_antennas},
               {"K", rc.system.num_subcarriers},
               {"I", rc.system.num_frames}};
  std::cout << summary.dump() << std::endl;
}

void cmd_estimate(const fs::path& csi_path, const std::string& method_name, const EstimateOptions& options,
                  const fs::path& out) {
  const Method method = parse_method(method_name);
  const CsiTensor csi = io::read_csi(csi_path);
  const EstimateResult result = run_estimate(csi, method, options);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  io::write_series_csv(out, "value", result.samples, csi.config().frame_rate_hz);
  io::write_json(io::sidecar_path(out), estimate_metadata(result, csi, options));
  if (result.fallback_used)
    std::cerr << json{{"warning", "fallback_used"},
                      {"message", "no antenna passed the BNR gate; best single antenna reported"}}
                     .dump()
              << std::endl;
}

void cmd_evaluate(const fs::path& est_path, const fs::path& gt_path, const fs::path& out,
                  const std::optional<std::string>& method_name, const std::optional<std::string>& run_id) {
  const auto est = io::read_series_csv(est_path, "value");
  const double rate = est.rate_hz();
  const GroundTruth gt = io::read_ground_truth(gt_path);
  const double est_duration = static_cast<double>(est.values.size()) / rate;
  if (std::abs(gt.duration_s() - est_duration) > 0.01 * est_duration)
    throw DurationMismatch("estimate spans " + io::format_double(est_duration) + " s but ground truth spans " +
                           io::format_double(gt.duration_s()) + " s");

  std::vector<double> truth = resample(gt.samples, gt.rate_hz, rate);
  std::vector<double> estimate = est.values;
  const std::size_t n = std::min(truth.size(), estimate.size());
  truth.resize(n);
  estimate.resize(n);

  ScoreRecord record;
  if (method_name) {
    record.method = parse_method(*method_name);
  } else {
    const auto meta_path = io::sidecar_path(est_path);
    if (!fs::exists(meta_path))
      throw SchemaError("no --method given and no estimate metadata at '" + meta_path.string() + "'");
    const auto meta = io::read_json(meta_path);
    if (!meta.contains("method") || !meta["method"].is_string())
      throw SchemaError("estimate metadata '" + meta_path.string() + "' lacks a method");
    record.method = parse_method(meta["method"].get<std::string>());
  }
  record.run_id = run_id.value_or(est_path.stem().string());
  record.correlation = correlation_score(estimate, truth, rate);
  record.est_bpm = try_estimate_bpm(estimate, rate);
  record.gt_bpm = try_estimate_bpm(truth, rate);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  io::write_json(out, io::to_json(record));
  std::cout << io::to_json(record).dump() << std::endl;
}

std::vector<ScoreRecord> load_records(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<ScoreRecord> records;
  for (const auto& f : files) {
    const auto doc = io::read_json(f);
    if (doc.is_array()) {
      for (const auto& item : doc) records.push_back(io::score_record_from_json(item, f.string()));
    } else {
      records.push_back(io::score_record_from_json(doc, f.string()));
    }
  }
  if (records.empty()) throw InvalidArgument("no score records found in '" + dir.string() + "'");
  return records;
}

void write_report(const std::vector<ScoreRecord>& records, const fs::path& out_dir) {
  ensure_dir(out_dir);
  json summary = json::object();
  for (Method m : kAllMethods) {
    std::vector<double> scores;
    for (const auto& r : records)
      if (r.method == m) scores.push_back(r.correlation);
    if (scores.empty()) continue;
    const std::string label(method_label(m));
    io::write_cdf_csv(out_dir / ("cdf_" + label + ".csv"), empirical_cdf(scores));
    const auto s = summarize(m, records);
    summary[label] = json{{"runs", s.runs},
                          {"mean_correlation", s.mean_correlation},
                          {"median_correlation", s.median_correlation},
                          {"bpm_runs", s.bpm_runs},
                          {"mean_abs_bpm_error", s.mean_abs_bpm_error},
                          {"max_abs_bpm_error", s.max_abs_bpm_error},
                          {"fraction_bpm_within_0_5", s.fraction_bpm_within_half}};
  }
  io::write_json(out_dir / "summary.json", summary);
  std::cout << summary.dump() << std::endl;
}

void cmd_benchmark(const BenchmarkOptions& options, const fs::path& out_dir, const std::optional<fs::path>& report_dir) {
  ensure_dir(out_dir);
  std::vector<ScoreRecord> all;
  for (std::size_t r = 0; r < options.runs; ++r) {
    const auto result = run_benchmark_case(options, draw_run(options, r));
    for (const auto& s : result.scores) {
      io::write_json(out_dir / (s.run_id + "_" + std::string(method_cli_name(s.method)) + ".json"), io::to_json(s));
      all.push_back(s);
    }
    std::cerr << "finished " << result.setup.run_id << std::endl;
  }
  if (report_dir) write_report(all, *report_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Respiration sensing from massive MIMO-OFDM uplink CSI"};
  app.require_subcommand(1);

  std::optional<fs::path> config_path;
  fs::path sim_out;
  auto* simulate = app.add_subcommand("simulate", "Simulate a CSI record and its ground-truth breathing trace");
  simulate->add_option("--config", config_path, "Run configuration JSON (defaults when omitted)");
  simulate->add_option("--out-dir", sim_out, "Output directory")->required();

  fs::path csi_path, est_out;
  std::string method_name;
  EstimateOptions est_options;
  auto* estimate = app.add_subcommand("estimate", "Estimate the breathing waveform from a CSI file");
  estimate->add_option("--csi", csi_path, "CSI binary (sidecar header next to it)")->required();
  estimate->add_option("--method", method_name, "sass | sams-idft | sams-diversense | mams-wac")->required();
  estimate->add_option("--antenna", est_options.antenna, "Antenna for single-antenna methods");
  estimate->add_option("--subcarrier", est_options.subcarrier, "Subcarrier for sass");
  estimate->add_option("--out", est_out, "Estimate CSV (metadata JSON written next to it)")->required();

  fs::path eval_est, eval_gt, eval_out;
  std::optional<std::string> eval_method, eval_run_id;
  auto* evaluate = app.add_subcommand("evaluate", "Score an estimate against ground truth");
  evaluate->add_option("--est", eval_est, "Estimate CSV")->required();
  evaluate->add_option("--gt", eval_gt, "Ground-truth CSV")->required();
  evaluate->add_option("--out", eval_out, "Score record JSON")->required();
  evaluate->add_option("--method", eval_method, "Method label (default: from estimate metadata)");
  evaluate->add_option("--run-id", eval_run_id, "Run identifier (default: estimate file stem)");

  fs::path report_in, report_out;
  auto* report = app.add_subcommand("report", "Aggregate score records into CDFs and a summary");
  report->add_option("--in", report_in, "Directory of score record JSON files")->required();
  report->add_option("--out-dir", report_out, "Output directory")->required();

  BenchmarkOptions bench;
  fs::path bench_out;
  std::optional<fs::path> bench_report;
  auto* benchmark = app.add_subcommand("benchmark", "Score all methods on randomized distributed-scene runs");
  benchmark->add_option("--runs", bench.runs, "Number of runs")->capture_default_str();
  benchmark->add_option("--seed", bench.seed, "Benchmark seed")->capture_default_str();
  benchmark->add_option("--frames", bench.system.num_frames, "Frames per run")->capture_default_str();
  benchmark->add_option("--antennas", bench.system.num_antennas, "Antennas")->capture_default_str();
  benchmark->add_option("--out-dir", bench_out, "Directory for score records")->required();
  benchmark->add_option("--report-dir", bench_report, "Also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    if (*simulate) cmd_simulate(config_path, sim_out);
    if (*estimate) cmd_estimate(csi_path, method_name, est_options, est_out);
    if (*evaluate) cmd_evaluate(eval_est, eval_gt, eval_out, eval_method, eval_run_id);
    if (*report) write_report(load_records(report_in), report_out);
    if (*benchmark) cmd_benchmark(bench, bench_out, bench_report);
  } catch (const Error& e) {
    report_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}
