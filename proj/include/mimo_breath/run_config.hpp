#pragma once

// JSON run configuration for the CLI. Every field is optional; defaults are
// the testbed parameters with a sinusoidal 15 bpm breather in the
// "distributed" scene at 10 dB SNR.
//
// {
//   "system": {"carrier_freq_hz": 3.51e9, "num_subcarriers": 100,
//              "subcarrier_spacing_hz": 180e3, "num_antennas": 64,
//              "frame_rate_hz": 200, "num_frames": 12000,
//              "element_spacing_wavelengths": 0.5},
//   "scene": {"preset": "distributed", "ue_distance_m": 1.0, "seed": 1}
//          | {"preset": "minimal"}
//          | {"groups": [{"first_antenna": 0, "num_antennas": 8,
//                         "paths": [{"amplitude": [re, im], "base_length_m": 3,
//                                    "aoa_rad": 0, "bistatic_angle_rad": 0,
//                                    "breathing_modulated": false}]}]},
//   "breathing": {"pattern": "sinusoid", "rate_bpm": 15, "end_rate_bpm": 15,
//                 "amplitude_m": 0.005, "phase_rad": 0, "csv": "gt.csv"},
//   "noise": {"snr_db": 10} | null,
//   "methods": ["sass", "sams-idft", "sams-diversense", "mams-wac"],
//   "seed": 1
// }

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "breathing.hpp"
#include "config.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "io.hpp"
#include "scene.hpp"
#include "simulator.hpp"

namespace mimo_breath {

struct SceneSpec {
  std::string preset = "distributed";  // "distributed", "minimal" or "custom"
  DistributedSceneParams distributed{};
  Scene custom{};
};

struct RunConfig {
  SystemConfig system{};
  SceneSpec scene{};
  BreathingSpec breathing{};
  std::optional<std::filesystem::path> breathing_csv;
  std::optional<NoiseSpec> noise = NoiseSpec{10.0};
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::uint64_t seed = 1;
};

namespace detail {

using nlohmann::json;

template <typename T>
void read_field(const json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown field '" + key + "' in " + where);
  }
}

inline PathSpec parse_path(const json& j) {
  if (!j.is_object()) throw ConfigError("path entries must be objects");
  reject_unknown(j, {"amplitude", "base_length_m", "aoa_rad", "bistatic_angle_rad", "breathing_modulated"}, "path");
  PathSpec p;
  if (j.contains("amplitude")) {
    const auto& a = j.at("amplitude");
    if (a.is_number()) {
      p.amplitude = {a.get<double>(), 0.0};
    } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
      p.amplitude = {a[0].get<double>(), a[1].get<double>()};
    } else {
      throw ConfigError("path amplitude must be a number or [re, im]");
    }
  }
  read_field(j, "base_length_m", p.base_length_m);
  read_field(j, "aoa_rad", p.aoa_rad);
  read_field(j, "bistatic_angle_rad", p.bistatic_angle_rad);
  read_field(j, "breathing_modulated", p.breathing_modulated);
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
  using detail::read_field;
  using detail::reject_unknown;
  if (!doc.is_object()) throw ConfigError("run config must be a JSON object");
  reject_unknown(doc, {"system", "scene", "breathing", "noise", "methods", "seed"}, "run config");
  RunConfig rc;

  if (doc.contains("system")) {
    const auto& s = doc.at("system");
    reject_unknown(s,
                   {"carrier_freq_hz", "num_subcarriers", "subcarrier_spacing_hz", "num_antennas", "frame_rate_hz",
                    "num_frames", "element_spacing_wavelengths"},
                   "system");
    auto count = [&](const char* key, std::size_t& dst) {
      if (!s.contains(key)) return;
      const auto& v = s.at(key);
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(std::string("system.") + key + " must be a non-negative integer");
      dst = v.get<std::size_t>();
    };
    count("num_subcarriers", rc.system.num_subcarriers);
    count("num_antennas", rc.system.num_antennas);
    count("num_frames", rc.system.num_frames);
    read_field(s, "carrier_freq_hz", rc.system.carrier_freq_hz);
    read_field(s, "subcarrier_spacing_hz", rc.system.subcarrier_spacing_hz);
    read_field(s, "frame_rate_hz", rc.system.frame_rate_hz);
    read_field(s, "element_spacing_wavelengths", rc.system.element_spacing_wavelengths);
  }
  rc.system.validate();

  if (doc.contains("scene")) {
    const auto& s = doc.at("scene");
    reject_unknown(s, {"preset", "ue_distance_m", "seed", "chest_reflectivity", "groups"}, "scene");
    if (s.contains("groups")) {
      rc.scene.preset = "custom";
      for (const auto& g : s.at("groups")) {
        reject_unknown(g, {"first_antenna", "num_antennas", "paths"}, "scene group");
        AntennaGroup group;
        read_field(g, "first_antenna", group.first_antenna);
        read_field(g, "num_antennas", group.num_antennas);
        if (g.contains("paths"))
          for (const auto& p : g.at("paths")) group.paths.push_back(detail::parse_path(p));
        rc.scene.custom.groups.push_back(std::move(group));
      }
    } else {
      read_field(s, "preset", rc.scene.preset);
      if (rc.scene.preset != "distributed" && rc.scene.preset != "minimal")
        throw ConfigError("unknown scene preset '" + rc.scene.preset + "'");
      read_field(s, "ue_distance_m", rc.scene.distributed.ue_distance_m);
      read_field(s, "seed", rc.scene.distributed.seed);
      read_field(s, "chest_reflectivity", rc.scene.distributed.chest_reflectivity);
    }
  }

  if (doc.contains("breathing")) {
    const auto& b = doc.at("breathing");
    reject_unknown(b, {"pattern", "rate_bpm", "end_rate_bpm", "amplitude_m", "phase_rad", "csv"}, "breathing");
    std::string pattern(to_string(rc.breathing.pattern));
    read_field(b, "pattern", pattern);
    try {
      rc.breathing.pattern = parse_breath_pattern(pattern);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    read_field(b, "rate_bpm", rc.breathing.rate_bpm);
    rc.breathing.end_rate_bpm = rc.breathing.rate_bpm;
    read_field(b, "end_rate_bpm", rc.breathing.end_rate_bpm);
    read_field(b, "amplitude_m", rc.breathing.amplitude_m);
    read_field(b, "phase_rad", rc.breathing.phase_rad);
    if (b.contains("csv")) {
      std::string csv;
      read_field(b, "csv", csv);
      std::filesystem::path p(csv);
      rc.breathing_csv = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (rc.breathing.pattern == BreathPattern::recorded_csv && !rc.breathing_csv)
      throw ConfigError("recorded-csv breathing needs a 'csv' path");
  }

  if (doc.contains("noise")) {
    const auto& n = doc.at("noise");
    if (n.is_null()) {
      rc.noise.reset();
    } else {
      reject_unknown(n, {"snr_db"}, "noise");
      NoiseSpec spec;
      read_field(n, "snr_db", spec.snr_db);
      if (!std::isfinite(spec.snr_db)) throw ConfigError("noise.snr_db must be finite");
      rc.noise = spec;
    }
  }

  if (doc.contains("methods")) {
    rc.methods.clear();
    try {
      for (const auto& m : doc.at("methods")) rc.methods.push_back(parse_method(m.get<std::string>()));
    } catch (const SchemaError& e) {
      throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("methods: ") + e.what());
    }
    if (rc.methods.empty()) throw ConfigError("at least one method is required");
  }
  read_field(doc, "seed", rc.seed);
  return rc;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(io::read_json(path), path.parent_path());
}

inline Scene build_scene(const RunConfig& rc) {
  if (rc.scene.preset == "custom") return rc.scene.custom;
  if (rc.scene.preset == "minimal") return minimal_scene(rc.system);
  return distributed_scene(rc.system, rc.scene.distributed);
}

inline BreathingWaveform build_breathing(const RunConfig& rc) {
  BreathingSpec spec = rc.breathing;
  if (spec.pattern == BreathPattern::recorded_csv) {
    const auto gt = io::read_ground_truth(*rc.breathing_csv);
    spec.recorded = RecordedTrace{gt.samples, gt.rate_hz};
  }
  return generate_breathing(spec, rc.system);
}

}  // namespace mimo_breath
