#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"

using namespace zolltest;

namespace {

// Shared across cases; solved once.
const DiskSolution& reference_disk() {
  static const DiskSolution d = solve_disk(generic_spec(), P1Point(1.0, 0.0), 64);
  return d;
}

}  // namespace

TEST_CASE("the round disk is exact") {
  std::uint64_t state = 11;
  const P1Point u0 = random_p1(state);
  const DiskSolution d = round_disk(u0, 32);
  REQUIRE(d.order() == 32);
  REQUIRE(d.coeffs[1] == complexd(1.0, 0.0));
  for (int k = 0; k <= d.order(); ++k)
    if (k != 1) REQUIRE(d.coeffs[k] == complexd(0.0, 0.0));
  REQUIRE(chordal(d.center_point(), u0) < 1e-14);
  REQUIRE(boundary_residual(d, flat_spec()) < 1e-13);
}

TEST_CASE("round disk input validation") {
  REQUIRE_THROWS_AS(round_disk(P1Point(1.0, 0.0), 0), InvalidInput);
}

TEST_CASE("flat solves reproduce the round disk after gauge alignment") {
  const SurfaceSpec spec = flat_spec();
  std::uint64_t state = 21;
  for (int i = 0; i < 10; ++i) {
    const P1Point u0 = random_p1(state);
    const DiskSolution d = solve_disk(spec, u0, 64);
    REQUIRE(d.residual < 1e-12);
    REQUIRE(gauge_coeff_distance(d, round_disk(u0, 64)) < 1e-10);
  }
}

TEST_CASE("an empty field short-circuits the homotopy at any scale") {
  const SurfaceSpec spec(SphereField(), 1.0, 32);
  const P1Point u0(complexd(0.3, -0.4), complexd(0.8, 0.1));
  const DiskSolution d = solve_disk(spec, u0, 64);
  REQUIRE(d.spec_scale == 1.0);
  REQUIRE(d.residual < 1e-12);
  REQUIRE(gauge_coeff_distance(d, round_disk(u0, 64)) < 1e-10);
}

TEST_CASE("solver guards reject bad requests") {
  const P1Point u0(1.0, 0.0);
  REQUIRE_THROWS_AS(solve_disk(generic_spec(), u0, 8), InvalidInput);
  REQUIRE_THROWS_AS(solve_disk(generic_spec(), u0, 1024), InvalidInput);
  REQUIRE_THROWS_AS(solve_disk(degenerate_spec(), u0, 64), DocilityRequired);
}

TEST_CASE("a deformed disk meets the boundary condition") {
  const SurfaceSpec spec = generic_spec();
  const P1Point u0(1.0, 0.0);
  const DiskSolution& d = reference_disk();
  REQUIRE(d.residual < 1e-9);
  REQUIRE(chordal(d.center_point(), u0) < 1e-10);

  // Canonical gauge: c_1 exactly real and nonnegative.
  REQUIRE(d.coeffs[1].imag() == 0.0);
  REQUIRE(d.coeffs[1].real() >= 0.0);

  // Spectral tail resolved.
  double cmax = 0.0;
  for (const auto& c : d.coeffs) cmax = std::max(cmax, std::abs(c));
  REQUIRE(std::abs(d.coeffs.back()) / cmax < 1e-8);

  // The boundary itself sits on the surface graph: h(-zeta) = phi(h(zeta)).
  for (int j = 0; j < 16; ++j) {
    const double tau = 2.0 * kPi * j / 16;
    const P1Point a = d.boundary_point(tau + kPi);
    const P1Point b = phi_apply(spec, d.boundary_point(tau));
    REQUIRE(chordal(a, b) < 1e-9);
  }
}

TEST_CASE("the homotopy answer does not depend on the step schedule") {
  const SurfaceSpec spec = generic_spec();
  std::uint64_t state = 33;
  for (int i = 0; i < 3; ++i) {
    const P1Point u0 = random_p1(state);
    SolveOptions coarse;
    coarse.initial_step = 1.0 / 16.0;
    SolveOptions fine;
    fine.initial_step = 1.0 / 32.0;
    const DiskSolution a = solve_disk(spec, u0, 64, coarse);
    const DiskSolution b = solve_disk(spec, u0, 64, fine);
    REQUIRE(gauge_coeff_distance(a, b) < 1e-8);
  }
}

TEST_CASE("rotation transport gives a warm start equal to the cold solve") {
  const SurfaceSpec spec = generic_spec();
  const DiskSolution& d = reference_disk();

  const P1Point u1(complexd(1.0, 0.0), complexd(0.02, -0.015));
  DiskSolution warm = rotate_disk(d, u1);
  REQUIRE(chordal(warm.center_point(), u1) < 1e-9);
  warm = newton_refine(warm, spec, spec.scale());

  const DiskSolution cold = solve_disk(spec, u1, 64);
  REQUIRE(gauge_coeff_distance(warm, cold) < 1e-8);
}

TEST_CASE("chart transfer preserves the disk") {
  const SurfaceSpec spec = generic_spec();
  const P1Point u0(complexd(0.6, 0.2), complexd(0.7, -0.3));
  const DiskSolution d = solve_disk(spec, u0, 64);

  // A pole tilted off the canonical one but still far from the footprint.
  const Vector3d xp = sphere_from_p1(d.chart.pole);
  const auto [t1, t2] = sphere_tangent_basis(xp);
  const Chart chart2(p1_from_sphere((xp + 0.4 * t1).normalized()));

  const DiskSolution moved = to_chart(d, chart2);
  REQUIRE(boundary_residual(moved, spec) < 1e-9);

  const DiskSolution back = to_chart(moved, d.chart);
  double dev = 0.0;
  for (int k = 0; k <= d.order(); ++k) dev = std::max(dev, std::abs(back.coeffs[k] - d.coeffs[k]));
  REQUIRE(dev < 1e-12);
}

TEST_CASE("chart transfer refuses to truncate an interior pole") {
  const DiskSolution& d = reference_disk();
  // The disk covers its own center, so a chart centered there is not
  // holomorphically representable.
  REQUIRE_THROWS_AS(to_chart(d, Chart(d.u0)), HolomorphyLoss);
}

TEST_CASE("gauge normalization undoes a parameter rotation") {
  const DiskSolution& d = reference_disk();

  DiskSolution rot = d;
  const double alpha = 0.7;
  for (int k = 0; k <= rot.order(); ++k) rot.coeffs[k] *= std::polar(1.0, k * alpha);

  // The rotated disk parameterizes the same boundary with shifted angle.
  REQUIRE(chordal(rot.boundary_point(0.0), d.boundary_point(alpha)) < 1e-12);

  const double theta = gauge_normalize(rot);
  REQUIRE(std::abs(std::remainder(theta + alpha, 2.0 * kPi)) < 1e-12);
  REQUIRE(rot.coeffs[1].imag() == 0.0);
  REQUIRE(rot.coeffs[1].real() >= 0.0);
  double dev = 0.0;
  for (int k = 0; k <= d.order(); ++k) dev = std::max(dev, std::abs(rot.coeffs[k] - d.coeffs[k]));
  REQUIRE(dev < 1e-12);
}

TEST_CASE("diagnostics of a deformed disk") {
  const SurfaceSpec spec = generic_spec();
  const DiskSolution& d = reference_disk();
  const DiskDiagnostics dd = disk_diagnostics(d, spec);

  REQUIRE(dd.lift_winding == 2);
  REQUIRE(dd.normal_maslov == 1);
  REQUIRE(dd.total_maslov == 3);
  REQUIRE(std::abs(dd.lift_area - 4.0 * kPi) < 1e-5 * 4.0 * kPi);
  REQUIRE(std::abs(dd.half_area - 2.0 * kPi) < 1e-5 * 2.0 * kPi);

  // Off-center the two factor maps stay separated; at the center they
  // coincide exactly.
  REQUIRE(dd.diagonal_gap > 1e-4);
  REQUIRE(diagonal_gap_at_center(d) == 0.0);

  // Embedded boundary, interior off the graph.
  REQUIRE(dd.boundary_injectivity_gap > 0.05);
  REQUIRE(interior_graph_gap(d, spec) > 1e-3);
}

TEST_CASE("area quadrature rejects odd angular node counts") {
  const DiskSolution d = round_disk(P1Point(1.0, 0.0), 16);
  DiskAreaOptions opts;
  opts.angular_nodes = 47;
  REQUIRE_THROWS_AS(disk_areas(d, flat_spec(), opts), InvalidInput);
}
