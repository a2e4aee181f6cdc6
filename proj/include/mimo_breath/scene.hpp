#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "simulator.hpp"

namespace mimo_breath {

// Geometry of the "distributed" scene preset: eight wall-mounted
// arrays around a 8 m x 6 m room, a seated subject, a UE close to the
// subject and two static scatterers. Everything is planar.
struct DistributedSceneParams {
  double ue_distance_m = 1.0;  // UE to subject
  std::uint64_t seed = 1;      // draws subject pose, UE bearing and clutter
  double chest_reflectivity = 0.5;
};

struct Vec2 {
  double x = 0.0, y = 0.0;
};

namespace detail {

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit(Vec2 a) { return (1.0 / norm(a)) * a; }
inline Vec2 heading(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Signed angle of `incoming` (direction from array to source) off broadside.
inline double arrival_angle(Vec2 broadside, Vec2 incoming) {
  return std::atan2(cross(broadside, incoming), dot(broadside, incoming));
}

// Unsigned angle at `vertex` between the rays to a and b.
inline double vertex_angle(Vec2 vertex, Vec2 a, Vec2 b) {
  const Vec2 u = unit(a - vertex), v = unit(b - vertex);
  return std::acos(std::clamp(dot(u, v), -1.0, 1.0));
}

inline constexpr std::array<Vec2, 8> kArrayPositions{
    Vec2{-4.0, -1.5}, Vec2{-4.0, 1.5}, Vec2{-1.5, 3.0}, Vec2{1.5, 3.0},
    Vec2{4.0, 1.5},   Vec2{4.0, -1.5}, Vec2{1.5, -3.0}, Vec2{-1.5, -3.0}};

}  // namespace detail

// Splits M antennas into at most eight contiguous groups of near-equal size.
inline std::vector<std::pair<std::size_t, std::size_t>> split_antennas(std::size_t num_antennas, std::size_t groups) {
  groups = std::min(groups, num_antennas);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t first = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t size = num_antennas / groups + (g < num_antennas % groups ? 1 : 0);
    out.emplace_back(first, size);
    first += size;
  }
  return out;
}

inline Scene distributed_scene(const SystemConfig& config, const DistributedSceneParams& params) {
  using namespace detail;
  if (!(params.ue_distance_m > 0.0)) throw ConfigError("ue_distance_m must be positive");
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit_draw(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit_draw(rng); };
  const double pi = std::numbers::pi;

  const Vec2 subject{uniform(-1.5, 1.5), uniform(-1.0, 1.0)};
  const double facing = uniform(-pi, pi);
  // UE held somewhere in front of the subject.
  const Vec2 ue = subject + params.ue_distance_m * heading(facing + uniform(-pi / 2.0, pi / 2.0));
  struct Scatterer {
    Vec2 position;
    std::complex<double> coefficient;
  };
  std::array<Scatterer, 2> clutter{};
  for (auto& c : clutter) {
    c.position = {uniform(-3.5, 3.5), uniform(-2.5, 2.5)};
    c.coefficient = std::polar(uniform(0.3, 0.6), uniform(0.0, 2.0 * pi));
  }

  Scene scene;
  const auto layout = split_antennas(config.num_antennas, kArrayPositions.size());
  for (std::size_t g = 0; g < layout.size(); ++g) {
    const Vec2 array = kArrayPositions[g];
    const Vec2 broadside = unit(Vec2{} - array);
    AntennaGroup group{layout[g].first, layout[g].second, {}};

    const double los = norm(ue - array);
    group.paths.push_back(PathSpec{{1.0 / los, 0.0}, los, arrival_angle(broadside, unit(ue - array)), 0.0, false});

    const double d_tx = norm(subject - ue), d_rx = norm(array - subject);
    // The chest reflects mostly toward the half-space it faces.
    const double visibility = 0.1 + 0.9 * std::max(0.0, dot(heading(facing), unit(array - subject)));
    group.paths.push_back(PathSpec{{params.chest_reflectivity * visibility / (d_tx * d_rx), 0.0},
                                   d_tx + d_rx,
                                   arrival_angle(broadside, unit(subject - array)),
                                   vertex_angle(subject, ue, array),
                                   true});

    for (const auto& c : clutter) {
      const double a = norm(c.position - ue), b = norm(array - c.position);
      group.paths.push_back(PathSpec{c.coefficient / (a * b), a + b,
                                     arrival_angle(broadside, unit(c.position - array)),
                                     vertex_angle(c.position, ue, array), false});
    }
    scene.groups.push_back(std::move(group));
  }
  return scene;
}

// One array holding every antenna: a static line-of-sight path and a
// breathing-modulated chest reflection.
inline Scene minimal_scene(const SystemConfig& config) {
  return Scene::single_array(config.num_antennas,
                             {PathSpec{{1.0, 0.0}, 3.0, 0.2, 0.0, false}, PathSpec{{0.3, 0.0}, 4.0, -0.4, 0.6, true}});
}

}  // namespace mimo_breath
