#pragma once

// File formats.
//
// CSI: a JSON sidecar header
//   {"M":int,"K":int,"I":int,"carrier_freq_hz":float,
//    "subcarrier_spacing_hz":float,"frame_rate_hz":float}
// next to a raw little-endian binary of 2*M*K*I float32 values, interleaved
// (re, im), frame fastest, then subcarrier, then antenna. The sidecar of
// "x.bin" is "x.json".
//
// Ground truth CSV: header "time_s,displacement_m", one row per sample.
// Estimate CSV: header "time_s,value".
// Numbers are printed in shortest round-trip form.

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "csi_tensor.hpp"
#include "error.hpp"
#include "evaluation.hpp"

namespace mimo_breath::io {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw InvalidArgument("failed to format number");
  return std::string(buf, end);
}

inline fs::path sidecar_path(const fs::path& binary) {
  fs::path p = binary;
  p.replace_extension(".json");
  return p;
}

inline std::ofstream open_for_write(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline std::ifstream open_for_read(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

inline json read_json(const fs::path& path) {
  auto in = open_for_read(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw CorruptFile("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

inline void write_json(const fs::path& path, const json& doc) {
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// --- CSI --------------------------------------------------------------------

inline json csi_header(const SystemConfig& c) {
  json h;
  h["M"] = c.num_antennas;
  h["K"] = c.num_subcarriers;
  h["I"] = c.num_frames;
  h["carrier_freq_hz"] = c.carrier_freq_hz;
  h["subcarrier_spacing_hz"] = c.subcarrier_spacing_hz;
  h["frame_rate_hz"] = c.frame_rate_hz;
  return h;
}

inline SystemConfig parse_csi_header(const json& h, const std::string& origin) {
  SystemConfig c;
  try {
    auto count = [&](const char* key) {
      const auto& v = h.at(key);
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw CorruptFile("corrupt header '" + origin + "': '" + key + "' must be a non-negative integer");
      return v.get<std::size_t>();
    };
    auto real = [&](const char* key) {
      const auto& v = h.at(key);
      if (!v.is_number()) throw CorruptFile("corrupt header '" + origin + "': '" + key + "' must be a number");
      return v.get<double>();
    };
    c.num_antennas = count("M");
    c.num_subcarriers = count("K");
    c.num_frames = count("I");
    c.carrier_freq_hz = real("carrier_freq_hz");
    c.subcarrier_spacing_hz = real("subcarrier_spacing_hz");
    c.frame_rate_hz = real("frame_rate_hz");
  } catch (const json::exception& e) {
    throw CorruptFile("corrupt header '" + origin + "': " + e.what());
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw CorruptFile("corrupt header '" + origin + "': " + e.what());
  }
  return c;
}

namespace detail {

inline void store_le(float value, char* dst) {
  auto word = std::bit_cast<std::uint32_t>(value);
  if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap32(word);
  std::memcpy(dst, &word, sizeof(word));
}

inline float load_le(const char* src) {
  std::uint32_t word;
  std::memcpy(&word, src, sizeof(word));
  if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap32(word);
  return std::bit_cast<float>(word);
}

inline constexpr std::size_t kChunkEntries = 1 << 16;
inline constexpr std::size_t kEntryBytes = 2 * sizeof(float);

}  // namespace detail

inline void write_csi(const fs::path& binary, const CsiTensor& csi) {
  write_json(sidecar_path(binary), csi_header(csi.config()));
  auto out = open_for_write(binary, std::ios::binary);
  const auto values = csi.values();
  std::vector<char> bytes(detail::kChunkEntries * detail::kEntryBytes);
  for (std::size_t start = 0; start < values.size(); start += detail::kChunkEntries) {
    const std::size_t count = std::min(detail::kChunkEntries, values.size() - start);
    char* dst = bytes.data();
    for (std::size_t n = start; n < start + count; ++n, dst += detail::kEntryBytes) {
      detail::store_le(values[n].real(), dst);
      detail::store_le(values[n].imag(), dst + sizeof(float));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(count * detail::kEntryBytes));
  }
  if (!out) throw IoError("failed writing '" + binary.string() + "'");
}

inline CsiTensor read_csi(const fs::path& binary) {
  const auto header_path = sidecar_path(binary);
  const SystemConfig config = parse_csi_header(read_json(header_path), header_path.string());
  std::error_code ec;
  const auto actual = fs::file_size(binary, ec);
  if (ec) throw IoError("cannot stat '" + binary.string() + "': " + ec.message());
  const std::size_t expected = config.num_entries() * detail::kEntryBytes;
  if (actual != expected)
    throw CorruptFile("'" + binary.string() + "' holds " + std::to_string(actual) + " bytes, expected " +
                      std::to_string(expected) + " for M=" + std::to_string(config.num_antennas) +
                      " K=" + std::to_string(config.num_subcarriers) + " I=" + std::to_string(config.num_frames));
  auto in = open_for_read(binary, std::ios::binary);
  std::vector<cfloat> values(config.num_entries());
  std::vector<char> bytes(detail::kChunkEntries * detail::kEntryBytes);
  for (std::size_t start = 0; start < values.size(); start += detail::kChunkEntries) {
    const std::size_t count = std::min(detail::kChunkEntries, values.size() - start);
    if (!in.read(bytes.data(), static_cast<std::streamsize>(count * detail::kEntryBytes)))
      throw CorruptFile("'" + binary.string() + "' ended early");
    const char* src = bytes.data();
    for (std::size_t n = start; n < start + count; ++n, src += detail::kEntryBytes)
      values[n] = cfloat(detail::load_le(src), detail::load_le(src + sizeof(float)));
  }
  try {
    return CsiTensor(config, std::move(values));
  } catch (const InvalidArgument& e) {
    throw CorruptFile("'" + binary.string() + "': " + e.what());
  }
}

// --- two-column CSV -----------------------------------------------------------

struct Series {
  std::vector<double> times;
  std::vector<double> values;

  // Rate implied by the time column.
  double rate_hz() const {
    if (times.size() < 2) throw CorruptFile("a series needs at least two rows to define its rate");
    const double span = times.back() - times.front();
    if (!(span > 0.0)) throw CorruptFile("time column must be increasing");
    return static_cast<double>(times.size() - 1) / span;
  }
};

inline void write_series_csv(const fs::path& path, const std::string& value_column, std::span<const double> values,
                             double rate_hz) {
  auto out = open_for_write(path);
  out << "time_s," << value_column << '\n';
  for (std::size_t i = 0; i < values.size(); ++i)
    out << format_double(static_cast<double>(i) / rate_hz) << ',' << format_double(values[i]) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline Series read_series_csv(const fs::path& path, const std::string& value_column) {
  auto in = open_for_read(path);
  std::string line;
  const std::string header = "time_s," + value_column;
  if (!std::getline(in, line)) throw CorruptFile("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw CorruptFile("'" + path.string() + "' must start with header '" + header + "', found '" + line + "'");
  Series s;
  std::size_t row = 1;
  auto parse = [&](std::string_view field) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '+')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
      throw CorruptFile("'" + path.string() + "' row " + std::to_string(row) + ": bad number '" +
                        std::string(field) + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw CorruptFile("'" + path.string() + "' row " + std::to_string(row) + ": expected two columns");
    const std::string_view view(line);
    s.times.push_back(parse(view.substr(0, comma)));
    s.values.push_back(parse(view.substr(comma + 1)));
  }
  if (s.values.empty()) throw CorruptFile("'" + path.string() + "' has no data rows");
  return s;
}

inline void write_ground_truth(const fs::path& path, const GroundTruth& gt) {
  write_series_csv(path, "displacement_m", gt.samples, gt.rate_hz);
}

inline GroundTruth read_ground_truth(const fs::path& path) {
  auto s = read_series_csv(path, "displacement_m");
  GroundTruth gt{std::move(s.values), s.rate_hz()};
  gt.validate();
  return gt;
}

// --- score records ----------------------------------------------------------

inline json to_json(const ScoreRecord& r) {
  json j;
  j["run_id"] = r.run_id;
  j["method"] = std::string(method_label(r.method));
  j["correlation"] = r.correlation;
  j["est_bpm"] = r.est_bpm ? json(*r.est_bpm) : json(nullptr);
  j["gt_bpm"] = r.gt_bpm ? json(*r.gt_bpm) : json(nullptr);
  return j;
}

inline ScoreRecord score_record_from_json(const json& j, const std::string& origin) {
  try {
    ScoreRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.method = parse_method(j.at("method").get<std::string>());
    r.correlation = j.at("correlation").get<double>();
    if (!(r.correlation >= 0.0 && r.correlation <= 1.0))
      throw SchemaError("'" + origin + "': correlation must lie in [0, 1]");
    auto optional_number = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return j.at(key).get<double>();
    };
    r.est_bpm = optional_number("est_bpm");
    r.gt_bpm = optional_number("gt_bpm");
    return r;
  } catch (const json::exception& e) {
    throw SchemaError("'" + origin + "': " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(std::string(e.what()).find(origin) == std::string::npos ? "'" + origin + "': " + e.what()
                                                                               : e.what());
  }
}

inline void write_cdf_csv(const fs::path& path, const CdfCurve& curve) {
  auto out = open_for_write(path);
  out << "correlation,cumprob\n";
  for (const auto& p : curve.points)
    out << format_double(p.correlation) << ',' << format_double(p.cumulative_probability) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace mimo_breath::io
