#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"

using namespace zolltest;

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  std::vector<double> x, w;
  zoll::detail::gauss_legendre(5, x, w);
  REQUIRE(x.size() == 5);

  double sum = 0.0;
  for (double wi : w) sum += wi;
  REQUIRE(sum == Catch::Approx(2.0).epsilon(1e-14));

  // Exact for degree <= 2n-1 = 9 on [-1, 1].
  for (int k = 2; k <= 9; k += 2) {
    double integral = 0.0;
    for (size_t i = 0; i < x.size(); ++i) integral += w[i] * std::pow(x[i], k);
    REQUIRE(integral == Catch::Approx(2.0 / (k + 1)).epsilon(1e-13));
  }
  double odd = 0.0;
  for (size_t i = 0; i < x.size(); ++i) odd += w[i] * std::pow(x[i], 3);
  REQUIRE(std::abs(odd) < 1e-14);
}

TEST_CASE("the round form integrates to the sphere area") {
  const double total = omega_check_total(flat_spec());
  REQUIRE(std::abs(total - 4.0 * kPi) < 1e-5);
}

TEST_CASE("the deformed total area is unchanged") {
  const double total = omega_check_total(generic_spec());
  REQUIRE(std::abs(total - 4.0 * kPi) < 1e-6 * 4.0 * kPi);
}

TEST_CASE("the graph patch carries no flux") {
  const SurfaceSpec spec = generic_spec();
  const KahlerData kd{spec};
  const double flux = omega_pullback_area(kd, graph_patch(spec));
  REQUIRE(std::abs(flux) < 1e-6);
}

TEST_CASE("the flat diagonal carries twice the sphere area") {
  const KahlerData kd{flat_spec()};
  const double area = omega_pullback_area(kd, diagonal_patch());
  REQUIRE(std::abs(area - 8.0 * kPi) < 2e-5);
}

TEST_CASE("factor patches are insensitive to the parked factor") {
  const KahlerData kd{generic_spec()};
  const double a = omega_pullback_area(kd, factor_patch(Vector3d(0, 0, 1)));
  const double b = omega_pullback_area(kd, factor_patch(Vector3d(1, 0, 0)));
  REQUIRE(std::abs(a - b) < 1e-12);
}

TEST_CASE("patch quadrature rejects an unresolvable tolerance") {
  const KahlerData kd{generic_spec()};
  // At 2x2 base nodes the refinement disagreement is far above 1e-12.
  REQUIRE_THROWS_AS(omega_pullback_area(kd, graph_patch(kd.spec), 2, 4, 1e-12),
                    QuadratureUnresolved);
}
