#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"

using namespace zolltest;

namespace {

// Constant field c*e3, tangentially projected, moves points along meridians:
// with colatitude theta from +e3, the time-t flow satisfies
// tan(theta_t / 2) = exp(-c t) tan(theta_0 / 2) at constant azimuth.
Vector3d meridian_flow(const Vector3d& x, double c, double t) {
  const double theta0 = std::acos(std::clamp(x[2], -1.0, 1.0));
  const double theta1 = 2.0 * std::atan(std::exp(-c * t) * std::tan(0.5 * theta0));
  const double r0 = std::hypot(x[0], x[1]);
  const double r1 = std::sin(theta1);
  if (r0 < 1e-14) return Vector3d(0, 0, x[2] > 0 ? 1 : -1);
  return Vector3d(x[0] / r0 * r1, x[1] / r0 * r1, std::cos(theta1));
}

}  // namespace

TEST_CASE("constant-field flow matches the closed-form meridian contraction") {
  const double c = 0.7;
  std::vector<FieldTerm> terms;
  terms.push_back({{0, 0, 0}, Vector3d(0, 0, c)});
  const SurfaceSpec spec(SphereField(terms), 1.0, 32);

  std::uint64_t rng = 21;
  for (int i = 0; i < 40; ++i) {
    const Vector3d x = sphere_from_p1(random_p1(rng));
    const Vector3d flowed = spec.psi_sphere(x);
    const Vector3d exact = meridian_flow(x, c, 1.0);
    REQUIRE((flowed - exact).norm() < 1e-8);
    REQUIRE((spec.psi_sphere(flowed, false) - x).norm() < 1e-10);
  }

  // Halving the scale flows half as far.
  const SurfaceSpec half = spec.with_scale(0.5);
  const Vector3d x = sphere_from_p1(random_p1(rng));
  REQUIRE((half.psi_sphere(x) - meridian_flow(x, c, 0.5)).norm() < 1e-8);
}

TEST_CASE("zero field gives the exact antipodal involution") {
  const SurfaceSpec spec = flat_spec();
  std::uint64_t rng = 22;
  for (int i = 0; i < 50; ++i) {
    const P1Point u = random_p1(rng);
    REQUIRE(chordal(psi_apply(spec, u), u) == 0.0);
    REQUIRE(chordal(phi_apply(spec, u), antipodal(u)) == 0.0);
  }
  const DocilityReport rep = check_docility(spec, 400);
  REQUIRE(rep.passed);
  REQUIRE(std::abs(rep.min_fixed_point_gap - 1.0) < 1e-12);
  REQUIRE(rep.min_orientation_det < -0.9);
  REQUIRE(rep.max_involution_defect < 1e-14);
}

TEST_CASE("the surface involution is involutive and fixed-point free") {
  const SurfaceSpec spec = generic_spec();
  std::uint64_t rng = 23;
  for (int i = 0; i < 30; ++i) {
    const P1Point u = random_p1(rng);
    const P1Point v = phi_apply(spec, u);
    REQUIRE(chordal(phi_apply(spec, v), u) < 1e-9);
    REQUIRE(chordal(u, v) > 0.9);
  }
}

TEST_CASE("docility report for the documented deformation is stable") {
  const DocilityReport rep = check_docility_sampled(generic_spec(), 400);
  REQUIRE(rep.passed);
  REQUIRE(rep.min_fixed_point_gap == Catch::Approx(0.9949).margin(1e-3));
  REQUIRE(rep.min_orientation_det == Catch::Approx(-0.6976).margin(1e-3));
  REQUIRE(rep.max_involution_defect < 1e-12);
  REQUIRE(rep.min_totally_real_det.has_value());
  REQUIRE(*rep.min_totally_real_det == Catch::Approx(0.7929).margin(1e-3));
  REQUIRE(rep.min_conic_gap.has_value());
  REQUIRE(*rep.min_conic_gap == Catch::Approx(0.9806).margin(1e-3));
  REQUIRE(rep.min_transversality_det.has_value());
  REQUIRE(*rep.min_transversality_det == Catch::Approx(0.3592).margin(1e-3));
}

TEST_CASE("the degenerate squeeze fails on the fixed-point gap") {
  const SurfaceSpec spec = degenerate_spec();
  const DocilityReport rep = check_docility(spec, 400);
  REQUIRE_FALSE(rep.passed);
  REQUIRE(rep.min_fixed_point_gap < spec.thresholds().fixed_point_gap);
}

TEST_CASE("docility holds along the scale homotopy") {
  for (const double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const DocilityReport rep = check_docility(generic_spec(t), 200);
    INFO("scale " << t);
    REQUIRE(rep.passed);
  }
}

TEST_CASE("embedded surface points stay away from the conic") {
  const SurfaceSpec spec = generic_spec();
  std::uint64_t rng = 24;
  for (int i = 0; i < 50; ++i) {
    const P2Point p = embed_N(spec, random_p1(rng));
    REQUIRE(std::abs(conic_value(p)) > 0.9);
  }
}

TEST_CASE("spec hashes separate different surfaces") {
  const std::uint64_t base = spec_hash(generic_spec());
  REQUIRE(base == spec_hash(generic_spec()));
  REQUIRE(base != spec_hash(generic_spec(0.5)));
  REQUIRE(base != spec_hash(flat_spec()));

  std::vector<FieldTerm> terms;
  terms.push_back({{1, 1, 0}, Vector3d(0.1 + 1e-15, 0.0, 0.0)});
  terms.push_back({{0, 0, 1}, Vector3d(0.0, 0.1, 0.0)});
  terms.push_back({{2, 0, 0}, Vector3d(0.0, 0.0, 0.1)});
  REQUIRE(base != spec_hash(SurfaceSpec(SphereField(terms), 1.0, 32)));

  const SurfaceSpec more_steps(generic_spec().field(), 1.0, 64);
  REQUIRE(base != spec_hash(more_steps));

  // Signed zero coefficients hash like plain zero.
  std::vector<FieldTerm> zneg;
  zneg.push_back({{1, 1, 0}, Vector3d(0.1, -0.0, 0.0)});
  zneg.push_back({{0, 0, 1}, Vector3d(0.0, 0.1, 0.0)});
  zneg.push_back({{2, 0, 0}, Vector3d(0.0, 0.0, 0.1)});
  REQUIRE(base == spec_hash(SurfaceSpec(SphereField(zneg), 1.0, 32)));
}

TEST_CASE("tangent projection keeps the field tangent") {
  const SphereField field = generic_spec().field();
  std::uint64_t rng = 25;
  for (int i = 0; i < 50; ++i) {
    const Vector3d x = sphere_from_p1(random_p1(rng));
    REQUIRE(std::abs(field.tangent_value(x).dot(x)) < 1e-14);
  }
}
