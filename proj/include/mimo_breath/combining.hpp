#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "error.hpp"
#include "projection.hpp"
#include "signal.hpp"

namespace mimo_breath {

struct AntennaStack {
  std::vector<BreathEstimate> estimates;
  double frame_rate_hz = 0.0;

  void validate() const {
    if (estimates.empty()) throw InvalidArgument("antenna stack is empty");
    if (!(frame_rate_hz > 0.0)) throw InvalidArgument("antenna stack frame rate must be positive");
    std::set<std::size_t> seen;
    for (const auto& e : estimates) {
      if (e.samples.size() != estimates.front().samples.size())
        throw InvalidArgument("antenna estimates differ in length");
      if (!seen.insert(e.antenna).second)
        throw InvalidArgument("duplicate antenna index " + std::to_string(e.antenna) + " in stack");
    }
  }
};

struct CombinedEstimate {
  std::vector<double> samples;  // zero mean, unit power
  std::vector<double> weights;  // one per stack entry
  std::vector<bool> included;
  std::vector<bool> flipped;    // sign flipped to agree with the reference
  std::size_t reference = 0;    // stack position of the highest-BNR estimate
  bool fallback_used = false;   // no estimate passed the gate
};

// Zero mean, unit power copy of the estimate; angle and BNR carried over.
inline BreathEstimate normalize_estimate(const BreathEstimate& est) {
  BreathEstimate out = est;
  out.samples = normalize_unit_power(est.samples);
  return out;
}

// Weighted antenna combining. Estimates with BNR > 1 enter with weight
// sqrt(BNR), the rest with 0. Each included estimate is normalized, then
// flipped when its zero-lag correlation with the highest-BNR estimate is
// negative, because the projection angle only fixes the sign up to pi.
// When nothing passes the gate the best single estimate is returned with
// fallback_used set.
inline CombinedEstimate wac(const AntennaStack& stack) {
  stack.validate();
  const std::size_t count = stack.estimates.size();
  const std::size_t length = stack.estimates.front().samples.size();

  // Highest BNR wins, lowest antenna index breaks ties.
  std::size_t reference = 0;
  for (std::size_t m = 1; m < count; ++m) {
    const auto& cand = stack.estimates[m];
    const auto& best = stack.estimates[reference];
    if (cand.bnr > best.bnr || (cand.bnr == best.bnr && cand.antenna < best.antenna)) reference = m;
  }

  CombinedEstimate out;
  out.weights.assign(count, 0.0);
  out.included.assign(count, false);
  out.flipped.assign(count, false);
  out.reference = reference;

  const auto ref_norm = normalize_unit_power(stack.estimates[reference].samples);
  std::vector<double> sum(length, 0.0);
  bool any = false;
  for (std::size_t m = 0; m < count; ++m) {
    const auto& est = stack.estimates[m];
    if (!(est.bnr > 1.0)) continue;
    auto normalized = normalize_unit_power(est.samples);
    double dot = 0.0;
    for (std::size_t i = 0; i < length; ++i) dot += normalized[i] * ref_norm[i];
    const double w = std::sqrt(est.bnr);
    const double sign = dot < 0.0 ? -1.0 : 1.0;
    out.flipped[m] = dot < 0.0;
    out.included[m] = true;
    out.weights[m] = w;
    for (std::size_t i = 0; i < length; ++i) sum[i] += sign * w * normalized[i];
    any = true;
  }

  if (!any) {
    out.fallback_used = true;
    out.samples = ref_norm;
    return out;
  }
  out.samples = normalize_unit_power(sum);
  return out;
}

}  // namespace mimo_breath
