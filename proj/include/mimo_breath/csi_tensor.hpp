#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "error.hpp"

namespace mimo_breath {

using cfloat = std::complex<float>;
using cdouble = std::complex<double>;

// Read-only view of one antenna's CFR block: K rows of I frames each.
struct AntennaCfr {
  std::span<const cfloat> values;  // row-major [subcarrier][frame]
  std::size_t num_subcarriers = 0;
  std::size_t num_frames = 0;
  std::size_t antenna = 0;

  std::span<const cfloat> row(std::size_t k) const {
    if (k >= num_subcarriers)
      throw IndexError("subcarrier " + std::to_string(k) + " out of range [0, " +
                       std::to_string(num_subcarriers) + ")");
    return values.subspan(k * num_frames, num_frames);
  }
  cfloat at(std::size_t k, std::size_t i) const { return values[k * num_frames + i]; }
};

// Owning storage for a single antenna block, produced by the streaming
// simulator so large scenes never materialize the full tensor.
struct AntennaCsi {
  std::vector<cfloat> values;
  std::size_t num_subcarriers = 0;
  std::size_t num_frames = 0;
  std::size_t antenna = 0;

  AntennaCfr view() const { return {values, num_subcarriers, num_frames, antenna}; }
};

// Complex channel estimates h_mk[i] for M antennas, K subcarriers and I
// frames. Storage order matches the binary file: frame fastest, then
// subcarrier, then antenna.
class CsiTensor {
 public:
  CsiTensor() = default;

  explicit CsiTensor(SystemConfig config)
      : config_(std::move(config)), values_((config_.validate(), config_.num_entries())) {}

  CsiTensor(SystemConfig config, std::vector<cfloat> values) : config_(std::move(config)) {
    config_.validate();
    if (values.size() != config_.num_entries())
      throw InvalidArgument("tensor has " + std::to_string(values.size()) + " entries, expected " +
                            std::to_string(config_.num_entries()));
    for (const auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw InvalidArgument("tensor contains non-finite entries");
    values_ = std::move(values);
  }

  const SystemConfig& config() const { return config_; }
  std::size_t num_antennas() const { return config_.num_antennas; }
  std::size_t num_subcarriers() const { return config_.num_subcarriers; }
  std::size_t num_frames() const { return config_.num_frames; }

  std::size_t index(std::size_t m, std::size_t k, std::size_t i) const {
    return (m * config_.num_subcarriers + k) * config_.num_frames + i;
  }

  cfloat operator()(std::size_t m, std::size_t k, std::size_t i) const { return values_[index(m, k, i)]; }
  cfloat& operator()(std::size_t m, std::size_t k, std::size_t i) { return values_[index(m, k, i)]; }

  AntennaCfr antenna(std::size_t m) const {
    check_antenna(m);
    std::size_t block = config_.num_subcarriers * config_.num_frames;
    return {std::span<const cfloat>(values_).subspan(m * block, block), config_.num_subcarriers,
            config_.num_frames, m};
  }

  std::span<cfloat> antenna_block(std::size_t m) {
    check_antenna(m);
    std::size_t block = config_.num_subcarriers * config_.num_frames;
    return std::span<cfloat>(values_).subspan(m * block, block);
  }

  std::span<const cfloat> values() const { return values_; }
  std::span<cfloat> values() { return values_; }

  void check_antenna(std::size_t m) const {
    if (m >= config_.num_antennas)
      throw IndexError("antenna " + std::to_string(m) + " out of range [0, " +
                       std::to_string(config_.num_antennas) + ")");
  }

  friend bool operator==(const CsiTensor& a, const CsiTensor& b) {
    return a.values_ == b.values_ && a.config_.num_antennas == b.config_.num_antennas &&
           a.config_.num_subcarriers == b.config_.num_subcarriers &&
           a.config_.num_frames == b.config_.num_frames;
  }

 private:
  SystemConfig config_;
  std::vector<cfloat> values_;
};

}  // namespace mimo_breath
