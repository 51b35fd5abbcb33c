#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"

using namespace zolltest;

TEST_CASE("stored representatives are unit norm and phase canonical") {
  std::uint64_t rng = 1;
  for (int i = 0; i < 50; ++i) {
    const P1Point u = random_p1(rng);
    REQUIRE(std::abs(u.rep().norm() - 1.0) < 1e-12);
    const P1Point c = u.canonicalized();
    REQUIRE((c.canonicalized().rep() - c.rep()).norm() < 1e-15);
    REQUIRE(chordal(u, c) < 1e-14);
  }
  REQUIRE_THROWS_AS(P1Point(complexd(0, 0), complexd(0, 0)), InvalidInput);
}

TEST_CASE("chordal distance complements the Hermitian overlap") {
  std::uint64_t rng = 2;
  for (int i = 0; i < 200; ++i) {
    const P1Point u = random_p1(rng);
    const P1Point w = random_p1(rng);
    const double c = chordal(u, w);
    const double o = std::abs(herm(u.rep(), w.rep()));
    REQUIRE(std::abs(c * c + o * o - 1.0) < 1e-13);
    REQUIRE(std::abs(c - chordal(w, u)) < 1e-15);
  }
  const P1Point u = random_p1(rng);
  REQUIRE(chordal(u, u) < 1e-15);
  // Phase-invariance: a rotated representative is the same point.
  const P1Point v(u.rep() * std::polar(1.0, 0.73));
  REQUIRE(chordal(u, v) < 1e-15);
}

TEST_CASE("antipodal map is a fixed-point-free involution") {
  std::uint64_t rng = 3;
  for (int i = 0; i < 100; ++i) {
    const P1Point u = random_p1(rng);
    const P1Point a = antipodal(u);
    REQUIRE(chordal(antipodal(a), u) < 1e-15);
    REQUIRE(std::abs(chordal(u, a) - 1.0) < 1e-14);
    REQUIRE((sphere_from_p1(a) + sphere_from_p1(u)).norm() < 1e-13);
  }
}

TEST_CASE("componentwise conjugation is an involution fixing real points") {
  std::uint64_t rng = 4;
  for (int i = 0; i < 100; ++i) {
    const P2Point z(random_complex(rng), random_complex(rng), random_complex(rng));
    REQUIRE(chordal(conj_c(conj_c(z)), z) < 1e-14);
  }
  const P2Point real(complexd(0.3, 0), complexd(-1.2, 0), complexd(0.5, 0));
  REQUIRE(chordal(conj_c(real), real) < 1e-15);
}

TEST_CASE("the covering map is symmetric and hits the conic on the diagonal") {
  std::uint64_t rng = 5;
  for (int i = 0; i < 200; ++i) {
    const P1Point u = random_p1(rng);
    const P1Point v = random_p1(rng);
    REQUIRE((pi_map_raw(u, v) - pi_map_raw(v, u)).norm() == 0.0);
    REQUIRE(std::abs(conic_value(pi_map(u, u))) < 1e-14);
  }
}

TEST_CASE("the conic form of a cover image is the squared wedge") {
  std::uint64_t rng = 6;
  for (int i = 0; i < 200; ++i) {
    const P1Point u = random_p1(rng);
    const P1Point v = random_p1(rng);
    const complexd w = u[0] * v[1] - u[1] * v[0];
    const complexd q = conic_form(pi_map_raw(u, v));
    REQUIRE(std::abs(q - w * w) < 1e-14);
  }
}

TEST_CASE("antipodal pairs map to conjugation-fixed points") {
  std::uint64_t rng = 7;
  for (int i = 0; i < 200; ++i) {
    const P1Point u = random_p1(rng);
    const P2Point p = pi_map(u, antipodal(u));
    REQUIRE(chordal(conj_c(p), p) < 1e-12);
  }
}

TEST_CASE("tangent lines through an outside point touch the conic") {
  std::uint64_t rng = 8;
  int tested = 0;
  while (tested < 50) {
    const P2Point p(random_complex(rng), random_complex(rng), random_complex(rng));
    if (std::abs(conic_value(p)) < 1e-2) continue;
    const auto lines = tangent_lines_through(p);
    for (const auto& line : lines) {
      REQUIRE(std::abs(line.incidence(p)) < 1e-12);
      REQUIRE(std::abs(conic_value(line.tangency)) < 1e-10);
      REQUIRE(std::abs(line.incidence(line.tangency)) < 1e-10);
    }
    REQUIRE(chordal(lines[0].tangency, lines[1].tangency) > 1e-4);
    ++tested;
  }
  // On the conic itself the two lines coincide; that is rejected.
  const P1Point u = random_p1(rng);
  REQUIRE_THROWS_AS(tangent_lines_through(pi_map(u, u)), DegenerateTangency);
}

TEST_CASE("charts are inverse pairs away from the pole") {
  std::uint64_t rng = 9;
  for (int i = 0; i < 100; ++i) {
    const Chart chart(random_p1(rng));
    const P1Point w = random_p1(rng);
    if (chordal(w, chart.pole) < 0.05) continue;
    REQUIRE(chordal(chart.from_coord(chart.to_coord(w)), w) < 1e-13);
  }
  const Chart chart(P1Point(complexd(1, 0), complexd(0, 0)));
  REQUIRE(std::abs(chart.to_coord(chart.center())) < 1e-15);
  REQUIRE_THROWS_AS(chart.from_coord(complexd(std::numeric_limits<double>::infinity(), 0)),
                    InvalidInput);
}

TEST_CASE("chart transfer is the induced fractional-linear map") {
  std::uint64_t rng = 10;
  for (int i = 0; i < 100; ++i) {
    const Chart a(random_p1(rng));
    const Chart b(random_p1(rng));
    const P1Point w = random_p1(rng);
    if (chordal(w, a.pole) < 0.05 || chordal(w, b.pole) < 0.05) continue;
    const Mobius m = chart_transfer(a, b);
    REQUIRE(std::abs(m(a.to_coord(w)) - b.to_coord(w)) < 1e-11);
  }
}

TEST_CASE("rotations carry points as claimed and stay special unitary") {
  std::uint64_t rng = 11;
  for (int i = 0; i < 100; ++i) {
    const P1Point a = random_p1(rng);
    const P1Point b = random_p1(rng);
    const Matrix2cd g = rotation_carrying(a, b);
    REQUIRE(chordal(apply_su2(g, a), b) < 1e-13);
    REQUIRE(std::abs(g.determinant() - 1.0) < 1e-13);
    REQUIRE((g * g.adjoint() - Matrix2cd::Identity()).norm() < 1e-13);
  }
}

TEST_CASE("sphere coordinates round trip and preserve distances") {
  std::uint64_t rng = 12;
  for (int i = 0; i < 100; ++i) {
    const P1Point u = random_p1(rng);
    const P1Point w = random_p1(rng);
    const Vector3d x = sphere_from_p1(u);
    REQUIRE(std::abs(x.norm() - 1.0) < 1e-13);
    REQUIRE(chordal(p1_from_sphere(x), u) < 1e-13);
    REQUIRE(std::abs(sphere_chordal(x, sphere_from_p1(w)) - chordal(u, w)) < 1e-12);
  }
}

TEST_CASE("the sign-ambiguous form vanishes on conjugation-fixed frames") {
  const P2Point base(complexd(1, 0), complexd(0.4, 0), complexd(-0.2, 0));
  const auto frame = TangentFrame2::make(base, Vector3cd(0, 1, 0), Vector3cd(0, 0, 1));
  REQUIRE(upsilon_im_abs(frame.orthonormalized()) < 1e-14);

  // Near the conic the form blows up and is rejected.
  std::uint64_t rng = 13;
  const P1Point u = random_p1(rng);
  const auto on_conic =
      TangentFrame2::make(pi_map(u, u), Vector3cd(0, 1, 0), Vector3cd(0, 0, 1));
  REQUIRE_THROWS_AS(upsilon_im_abs(on_conic), NearConic);
}

TEST_CASE("the form's magnitude does not depend on the representative phase") {
  // Rotating the representative rotates the horizontal lift of the tangent
  // plane with it; the magnitude is invariant under the joint rotation.
  std::uint64_t rng = 14;
  for (int i = 0; i < 50; ++i) {
    const P2Point z(random_complex(rng), random_complex(rng), random_complex(rng));
    if (std::abs(conic_value(z)) < 1e-2) continue;
    const Vector3cd e1(random_complex(rng), random_complex(rng), random_complex(rng));
    const Vector3cd e2(random_complex(rng), random_complex(rng), random_complex(rng));
    TangentFrame2 fr;
    try {
      fr = TangentFrame2::make(z, e1, e2).orthonormalized();
    } catch (const InvalidInput&) {
      continue;
    }
    const double v1 = upsilon_im_abs(fr);
    const complexd phase = std::polar(1.0, 1.1);
    const P2Point z2(z.rep() * phase);
    const auto fr2 = TangentFrame2::make(z2, phase * fr.e1, phase * fr.e2);
    const double v2 = upsilon_im_abs(fr2);
    REQUIRE(std::abs(v1 - v2) < 1e-10 * std::max(1.0, v1));
  }
}
