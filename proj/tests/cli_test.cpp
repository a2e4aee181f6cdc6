#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

namespace mb = mimo_breath;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("mimo_breath_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  Outcome run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + MIMO_BREATH_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    return {WEXITSTATUS(raw), slurp(out), slurp(err)};
  }

  fs::path write_config(const std::string& name, const json& doc) const {
    const auto p = dir_ / name;
    std::ofstream(p) << doc.dump();
    return p;
  }

  // 16 antennas in the distributed layout, 30 s at 100 Hz.
  fs::path small_config(bool noisy = true) const {
    json doc = {{"system", {{"num_antennas", 16}, {"num_subcarriers", 16}, {"num_frames", 3000}, {"frame_rate_hz", 100}}},
                {"breathing", {{"pattern", "varying-rate"}, {"rate_bpm", 14}, {"end_rate_bpm", 16}}},
                {"seed", 5}};
    doc["noise"] = noisy ? json{{"snr_db", 10}} : json(nullptr);
    return write_config(noisy ? "noisy.json" : "clean.json", doc);
  }

  static void expect_error(const Outcome& o, int status, const std::string& kind) {
    EXPECT_EQ(o.status, status) << o.err;
    ASSERT_FALSE(o.err.empty());
    EXPECT_EQ(o.err.find('\n'), o.err.size() - 1) << "stderr must be one line: " << o.err;
    const auto j = json::parse(o.err);
    EXPECT_EQ(j.at("error"), kind) << o.err;
    EXPECT_TRUE(j.at("message").is_string());
  }

  std::string path(const std::string& name) const { return "\"" + (dir_ / name).string() + "\""; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateWritesFilesAndConstants) {
  const auto o = run("simulate --config \"" + small_config().string() + "\" --out-dir " + path("sim"));
  ASSERT_EQ(o.status, 0) << o.err;
  const auto summary = json::parse(o.out);
  EXPECT_NEAR(summary["range_resolution_m"].get<double>(), 299792458.0 / (16 * 180e3), 1e-9);
  EXPECT_NEAR(summary["max_unambiguous_range_m"].get<double>(), 1665.5, 0.1);
  EXPECT_EQ(fs::file_size(dir_ / "sim/csi.bin"), 16u * 16u * 3000u * 8u);
  const auto header = mb::io::read_json(dir_ / "sim/csi.json");
  EXPECT_EQ(header["M"], 16);
  EXPECT_EQ(header["K"], 16);
  EXPECT_EQ(header["I"], 3000);
  EXPECT_EQ(mb::io::read_ground_truth(dir_ / "sim/gt.csv").samples.size(), 3000u);
}

TEST_F(Cli, SimulateMatchesInMemoryTensor) {
  const auto cfg = small_config();
  ASSERT_EQ(run("simulate --config \"" + cfg.string() + "\" --out-dir " + path("sim")).status, 0);
  const auto rc = mb::load_run_config(cfg);
  const auto expected = mb::simulate_csi(rc.system, mb::build_scene(rc), mb::build_breathing(rc), rc.noise, rc.seed);
  EXPECT_TRUE(mb::io::read_csi(dir_ / "sim/csi.bin") == expected);
}

TEST_F(Cli, SameSeedGivesByteIdenticalOutputs) {
  const auto cfg = small_config();
  ASSERT_EQ(run("simulate --config \"" + cfg.string() + "\" --out-dir " + path("a")).status, 0);
  ASSERT_EQ(run("simulate --config \"" + cfg.string() + "\" --out-dir " + path("b")).status, 0);
  for (const char* f : {"csi.bin", "csi.json", "gt.csv"}) EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  for (const char* sub : {"a", "b"})
    ASSERT_EQ(run(std::string("estimate --csi ") + path(std::string(sub) + "/csi.bin") +
                  " --method mams-wac --out " + path(std::string(sub) + "/est.csv"))
                  .status,
              0);
  EXPECT_EQ(slurp(dir_ / "a/est.csv"), slurp(dir_ / "b/est.csv"));
  EXPECT_EQ(slurp(dir_ / "a/est.json"), slurp(dir_ / "b/est.json"));
}

TEST_F(Cli, SimulateRejectsZeroFrames) {
  const auto cfg = write_config("bad.json", {{"system", {{"num_frames", 0}}}});
  expect_error(run("simulate --config \"" + cfg.string() + "\" --out-dir " + path("sim")), 1, "config");
}

TEST_F(Cli, EstimateEveryMethod) {
  ASSERT_EQ(run("simulate --config \"" + small_config().string() + "\" --out-dir " + path("sim")).status, 0);
  for (const char* m : {"sass", "sams-idft", "sams-diversense", "mams-wac"}) {
    const auto o = run(std::string("estimate --csi ") + path("sim/csi.bin") + " --method " + m + " --antenna 3 --out " +
                       path(std::string("est_") + m + ".csv"));
    ASSERT_EQ(o.status, 0) << m << o.err;
    const auto series = mb::io::read_series_csv(dir_ / (std::string("est_") + m + ".csv"), "value");
    ASSERT_EQ(series.values.size(), 3000u);
    EXPECT_NEAR(series.rate_hz(), 100.0, 1e-6);
    EXPECT_NEAR(mb::mean(series.values), 0.0, 1e-9);
    EXPECT_NEAR(mb::mean_power(series.values), 1.0, 1e-9);
    const auto meta = mb::io::read_json(dir_ / (std::string("est_") + m + ".json"));
    EXPECT_EQ(meta["method"], std::string(mb::method_label(mb::parse_method(m))));
  }
}

TEST_F(Cli, WacMetadataListsRootBnrWeights) {
  ASSERT_EQ(run("simulate --config \"" + small_config(false).string() + "\" --out-dir " + path("sim")).status, 0);
  ASSERT_EQ(run("estimate --csi " + path("sim/csi.bin") + " --method mams-wac --out " + path("est.csv")).status, 0);
  const auto meta = mb::io::read_json(dir_ / "est.json");
  ASSERT_EQ(meta["antennas"].size(), 16u);
  std::size_t included = 0;
  for (const auto& a : meta["antennas"]) {
    const double g = a["bnr"], w = a["weight"];
    EXPECT_EQ(a["included"].get<bool>(), g > 1.0);
    if (g > 1.0) {
      EXPECT_NEAR(w * w, g, 1e-9 * g);
      ++included;
    } else {
      EXPECT_EQ(w, 0.0);
    }
  }
  EXPECT_GT(included, 0u);
  const auto o = run("evaluate --est " + path("est.csv") + " --gt " + path("sim/gt.csv") + " --out " + path("s.json"));
  ASSERT_EQ(o.status, 0) << o.err;
  const auto score = mb::io::read_json(dir_ / "s.json");
  EXPECT_GE(score["correlation"].get<double>(), 0.95);
  EXPECT_EQ(score["method"], "MAMS-WAC");
  ASSERT_TRUE(score["est_bpm"].is_number());
  EXPECT_NEAR(score["est_bpm"].get<double>(), score["gt_bpm"].get<double>(), 0.5);
}

TEST_F(Cli, SassSmallestCase) {
  ASSERT_EQ(run("simulate --config \"" + small_config().string() + "\" --out-dir " + path("sim")).status, 0);
  ASSERT_EQ(run("estimate --csi " + path("sim/csi.bin") +
                " --method sass --antenna 0 --subcarrier 0 --out " + path("est.csv"))
                .status,
            0);
  const auto meta = mb::io::read_json(dir_ / "est.json");
  EXPECT_EQ(meta["antenna"], 0);
  EXPECT_EQ(meta["subcarrier"], 0);
  expect_error(run("estimate --csi " + path("sim/csi.bin") + " --method sass --subcarrier 16 --out " + path("x.csv")),
               1, "index");
  expect_error(run("estimate --csi " + path("sim/csi.bin") + " --method mrc --out " + path("x.csv")), 1, "schema");
}

TEST_F(Cli, TruncatedCsiIsReported) {
  ASSERT_EQ(run("simulate --config \"" + small_config().string() + "\" --out-dir " + path("sim")).status, 0);
  fs::resize_file(dir_ / "sim/csi.bin", 1000);
  const auto o = run("estimate --csi " + path("sim/csi.bin") + " --method sass --out " + path("est.csv"));
  expect_error(o, 1, "corrupt_file");
  EXPECT_NE(o.err.find("1000 bytes"), std::string::npos);
  EXPECT_NE(o.err.find("expected 6144000"), std::string::npos);
}

TEST_F(Cli, EvaluateGroundTruthAgainstItself) {
  ASSERT_EQ(run("simulate --config \"" + small_config().string() + "\" --out-dir " + path("sim")).status, 0);
  auto gt = slurp(dir_ / "sim/gt.csv");
  gt.replace(0, gt.find('\n'), "time_s,value");
  std::ofstream(dir_ / "copy.csv") << gt;
  const auto o = run("evaluate --est " + path("copy.csv") + " --gt " + path("sim/gt.csv") + " --method sass --out " +
                     path("s.json"));
  ASSERT_EQ(o.status, 0) << o.err;
  const auto score = mb::io::read_json(dir_ / "s.json");
  EXPECT_NEAR(score["correlation"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(score["run_id"], "copy");
}

TEST_F(Cli, EvaluateRejectsDurationMismatch) {
  ASSERT_EQ(run("simulate --config \"" + small_config().string() + "\" --out-dir " + path("sim")).status, 0);
  const auto truth = mb::io::read_ground_truth(dir_ / "sim/gt.csv");
  const std::vector<double> half(truth.samples.begin(), truth.samples.begin() + 1500);
  mb::io::write_series_csv(dir_ / "short.csv", "value", half, 100.0);
  expect_error(run("evaluate --est " + path("short.csv") + " --gt " + path("sim/gt.csv") + " --method sass --out " +
                   path("s.json")),
               1, "duration_mismatch");
}

TEST_F(Cli, ReportBuildsOneCdfPerMethod) {
  fs::create_directories(dir_ / "scores");
  const char* methods[] = {"sass", "sams-idft", "sams-diversense", "mams-wac"};
  for (int r = 0; r < 5; ++r)
    for (int m = 0; m < 4; ++m)
      mb::io::write_json(dir_ / "scores" / ("r" + std::to_string(r) + "_" + methods[m] + ".json"),
                         mb::io::to_json({mb::parse_method(methods[m]), 0.1 * (r + 1) + 0.05 * m, 15.0, 15.2,
                                          "r" + std::to_string(r)}));
  const auto o = run("report --in " + path("scores") + " --out-dir " + path("rep"));
  ASSERT_EQ(o.status, 0) << o.err;
  for (const char* label : {"SASS", "SAMS-IDFT", "SAMS-DiverSense", "MAMS-WAC"}) {
    const auto csv = slurp(dir_ / "rep" / (std::string("cdf_") + label + ".csv"));
    EXPECT_EQ(csv.rfind("correlation,cumprob\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  }
  const auto summary = mb::io::read_json(dir_ / "rep/summary.json");
  EXPECT_EQ(summary["MAMS-WAC"]["runs"], 5);
  EXPECT_NEAR(summary["SASS"]["median_correlation"].get<double>(), 0.3, 1e-12);
  const auto again = run("report --in " + path("scores") + " --out-dir " + path("rep2"));
  EXPECT_EQ(slurp(dir_ / "rep/summary.json"), slurp(dir_ / "rep2/summary.json"));
}

TEST_F(Cli, ReportSingleRecord) {
  fs::create_directories(dir_ / "scores");
  mb::io::write_json(dir_ / "scores/one.json", mb::io::to_json({mb::Method::mams_wac, 0.9, 15.0, 15.0, "one"}));
  ASSERT_EQ(run("report --in " + path("scores") + " --out-dir " + path("rep")).status, 0);
  EXPECT_EQ(slurp(dir_ / "rep/cdf_MAMS-WAC.csv"), "correlation,cumprob\n0.9,1\n");
  EXPECT_FALSE(fs::exists(dir_ / "rep/cdf_SASS.csv"));
}

TEST_F(Cli, ReportErrors) {
  fs::create_directories(dir_ / "empty");
  expect_error(run("report --in " + path("empty") + " --out-dir " + path("rep")), 1, "invalid_argument");
  fs::create_directories(dir_ / "bad");
  std::ofstream(dir_ / "bad/x.json") << R"({"run_id": "x", "method": "MRC", "correlation": 0.5})";
  expect_error(run("report --in " + path("bad") + " --out-dir " + path("rep")), 1, "schema");
  expect_error(run("report --in " + path("missing") + " --out-dir " + path("rep")), 1, "io");
}

TEST_F(Cli, UsageErrorsExitTwo) {
  expect_error(run("estimate --method sass"), 2, "usage");
  expect_error(run("frobnicate"), 2, "usage");
}
