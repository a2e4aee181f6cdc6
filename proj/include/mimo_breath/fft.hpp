#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "error.hpp"

namespace mimo_breath::fft {

enum class Direction { forward, inverse };

namespace detail {

// FFTW planning is not thread-safe but executing an existing plan on new
// arrays is, so plans are created once per (size, direction, in-place)
// under a lock and reused. FFTW_UNALIGNED lets them run on any
// std::complex buffer; a plan's in-place-ness must match its arrays.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  // `batch` contiguous transforms of length n laid end to end.
  fftw_plan get(int n, Direction dir, bool in_place, int batch = 1) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(n, dir, in_place, batch);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const auto total = static_cast<std::size_t>(n) * static_cast<std::size_t>(batch);
    std::vector<std::complex<double>> scratch_in(total);
    std::vector<std::complex<double>> scratch_out(in_place ? 0 : total);
    fftw_plan plan = fftw_plan_many_dft(
        1, &n, batch, reinterpret_cast<fftw_complex*>(scratch_in.data()), nullptr, 1, n,
        reinterpret_cast<fftw_complex*>(in_place ? scratch_in.data() : scratch_out.data()), nullptr, 1, n,
        dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw InvalidArgument("fftw failed to plan a transform of size " + std::to_string(n));
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, Direction, bool, int>, fftw_plan> plans_;
};

}  // namespace detail

// Unnormalized transform. forward: X[n] = sum x[k] e^{-j2pi kn/N},
// inverse: x[n] = sum X[k] e^{+j2pi kn/N}. `out` may alias `in`.
inline void transform(std::span<const std::complex<double>> in, std::span<std::complex<double>> out,
                      Direction dir) {
  if (in.size() != out.size()) throw InvalidArgument("fft input/output size mismatch");
  if (in.empty()) return;
  const bool in_place = in.data() == out.data();
  fftw_plan plan = detail::PlanCache::instance().get(static_cast<int>(in.size()), dir, in_place);
  // fftw_execute_dft takes non-const input; out-of-place c2c plans leave it
  // untouched.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

// In-place transforms of consecutive length-n segments of `data`.
inline void transform_batch(std::span<std::complex<double>> data, std::size_t n, Direction dir) {
  if (n == 0 || data.size() % n != 0) throw InvalidArgument("batch length must be a multiple of the transform size");
  if (data.empty()) return;
  fftw_plan plan =
      detail::PlanCache::instance().get(static_cast<int>(n), dir, true, static_cast<int>(data.size() / n));
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

inline std::vector<std::complex<double>> forward(std::span<const std::complex<double>> in) {
  std::vector<std::complex<double>> out(in.size());
  transform(in, out, Direction::forward);
  return out;
}

inline std::vector<std::complex<double>> forward_real(std::span<const double> in) {
  std::vector<std::complex<double>> buf(in.begin(), in.end());
  transform(buf, buf, Direction::forward);
  return buf;
}

}  // namespace mimo_breath::fft
