#pragma once

// Fibonacci lattice sampling of the sphere, with a seeded global rotation so
// independent runs can decorrelate their sample sets deterministically.

#include <cstdint>
#include <vector>

#include "projective.hpp"

namespace zoll {

// splitmix64: tiny deterministic stream used only to derive lattice
// rotations and shuffles from integer seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double unit_double(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

// Rotation associated with a seed; seed 0 is the identity (canonical lattice).
inline Matrix2cd lattice_rotation(std::uint64_t seed) {
  if (seed == 0) return Matrix2cd::Identity();
  std::uint64_t st = seed;
  const double z = 2.0 * unit_double(st) - 1.0;
  const double az = 2.0 * kPi * unit_double(st);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const Vector3d axis(r * std::cos(az), r * std::sin(az), z);
  const double angle = 2.0 * kPi * unit_double(st);
  return su2_from_axis_angle(axis, angle);
}

inline std::vector<Vector3d> fibonacci_sphere(int n, std::uint64_t seed = 0) {
  if (n < 1) throw InvalidInput("fibonacci_sphere: n must be positive");
  static const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vector3d> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = 2.0 * kPi * (i / golden - std::floor(i / golden));
    pts.emplace_back(r * std::cos(th), r * std::sin(th), z);
  }
  if (seed != 0) {
    const Matrix2cd g = lattice_rotation(seed);
    for (auto& x : pts) x = sphere_from_p1(apply_su2(g, p1_from_sphere(x)));
  }
  return pts;
}

inline std::vector<P1Point> fibonacci_p1(int n, std::uint64_t seed = 0) {
  std::vector<P1Point> pts;
  pts.reserve(n);
  for (const auto& x : fibonacci_sphere(n, seed)) pts.push_back(p1_from_sphere(x));
  return pts;
}

}  // namespace zoll
