#pragma once

// Shared fixtures: the three reference surfaces used across the suites and a
// tiny deterministic point generator.

#include <zoll/zoll.hpp>

namespace zolltest {

using namespace zoll;

inline SurfaceSpec flat_spec() { return SurfaceSpec(SphereField(), 0.0, 32); }

// Generic degree-2 deformation, docile at every scale in [0,1] and not
// Lagrangian at scale 1.
inline SurfaceSpec generic_spec(double scale = 1.0) {
  std::vector<FieldTerm> terms;
  terms.push_back({{1, 1, 0}, Vector3d(0.1, 0.0, 0.0)});
  terms.push_back({{0, 0, 1}, Vector3d(0.0, 0.1, 0.0)});
  terms.push_back({{2, 0, 0}, Vector3d(0.0, 0.0, 0.1)});
  return SurfaceSpec(SphereField(terms), scale, 32);
}

// Strong constant-direction squeeze: fails the docility fixed-point gap.
inline SurfaceSpec degenerate_spec() {
  std::vector<FieldTerm> terms;
  terms.push_back({{0, 0, 0}, Vector3d(0.0, 0.0, 5.0)});
  return SurfaceSpec(SphereField(terms), 1.0, 32);
}

inline complexd random_complex(std::uint64_t& state) {
  const double re = 2.0 * unit_double(state) - 1.0;
  const double im = 2.0 * unit_double(state) - 1.0;
  return complexd(re, im);
}

inline P1Point random_p1(std::uint64_t& state) {
  for (;;) {
    const complexd a = random_complex(state);
    const complexd b = random_complex(state);
    if (std::abs(a) + std::abs(b) > 0.1) return P1Point(a, b);
  }
}

}  // namespace zolltest
