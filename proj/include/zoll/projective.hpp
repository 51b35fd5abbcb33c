#pragma once

// Projective geometry of the plane conic z1^2+z2^2+z3^2 = 0 and of the
// branched double cover CP^1 x CP^1 -> CP^2, plus the sign-ambiguous
// holomorphic 2-form defined away from the conic.  Everything downstream
// (surfaces, the boundary-value disk solver, moduli sweeps) sits on top of
// the primitives in this header.
//
// Conventions: projective points are stored as unit-norm representatives;
// equality and all distances use the chordal metric, which is blind to the
// representative's phase.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "errors.hpp"

namespace zoll {

using complexd = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Vector2cd;
using Eigen::Vector3cd;
using Eigen::Vector3d;

inline constexpr double kEqualityTol = 1e-10;  // projective equality
inline constexpr double kConicEps = 1e-6;      // "too close to the conic"
inline constexpr double kPi = std::numbers::pi;

// Hermitian pairing <x,y> = sum_i x_i conj(y_i).  (Eigen's dot() conjugates
// its *first* argument, hence the argument swap.)
template <typename V>
complexd herm(const V& x, const V& y) {
  return y.dot(x);
}

// Bilinear pairing x.y = sum_i x_i y_i, no conjugation.  This is the pairing
// between points and lines; the dual conic lives on this side.
template <typename V>
complexd bilin(const V& x, const V& y) {
  complexd s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

namespace detail {

template <typename V>
V normalized_rep(const V& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidInput(std::string(what) + ": representative is zero or non-finite");
  return v / n;
}

// Rotate the representative's phase so its largest-magnitude component is
// real and positive.  Gives every projective point one canonical vector,
// which keeps emitted files and warm-start bookkeeping reproducible.
template <typename V>
V canonical_phase(const V& v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) { best = a; imax = i; }
  }
  const complexd z = v[imax];
  return v * (std::conj(z) / std::abs(z));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

class P1Point {
 public:
  P1Point() : v_(1.0, 0.0) {}
  explicit P1Point(const Vector2cd& v) : v_(detail::normalized_rep(v, "P1Point")) {}
  P1Point(complexd a, complexd b) : P1Point(Vector2cd(a, b)) {}

  const Vector2cd& rep() const { return v_; }
  complexd operator[](int i) const { return v_[i]; }

  P1Point canonicalized() const {
    P1Point p;
    p.v_ = detail::canonical_phase(v_);
    return p;
  }

 private:
  Vector2cd v_;
};

class P2Point {
 public:
  P2Point() : v_(1.0, 0.0, 0.0) {}
  explicit P2Point(const Vector3cd& v) : v_(detail::normalized_rep(v, "P2Point")) {}
  P2Point(complexd a, complexd b, complexd c) : P2Point(Vector3cd(a, b, c)) {}

  const Vector3cd& rep() const { return v_; }
  complexd operator[](int i) const { return v_[i]; }

  P2Point canonicalized() const {
    P2Point p;
    p.v_ = detail::canonical_phase(v_);
    return p;
  }

 private:
  Vector3cd v_;
};

// Chordal distance sqrt(1 - |<u,w>|^2) on unit representatives; range [0,1],
// phase-invariant, 1 exactly at antipodes.
// sin of the Fubini-Study angle, computed from 2x2 minors so that nearly
// coincident points come out at machine scale instead of the sqrt(eps) floor
// of 1 - |<u,w>|^2.
inline double chordal(const P1Point& u, const P1Point& w) {
  const Vector2cd& a = u.rep();
  const Vector2cd& b = w.rep();
  return std::abs(a(0) * b(1) - a(1) * b(0));
}

inline double chordal(const P2Point& z, const P2Point& w) {
  const Vector3cd& a = z.rep();
  const Vector3cd& b = w.rep();
  const complexd m01 = a(0) * b(1) - a(1) * b(0);
  const complexd m02 = a(0) * b(2) - a(2) * b(0);
  const complexd m12 = a(1) * b(2) - a(2) * b(1);
  return std::sqrt(std::norm(m01) + std::norm(m02) + std::norm(m12));
}

inline bool operator==(const P1Point& u, const P1Point& w) { return chordal(u, w) < kEqualityTol; }
inline bool operator!=(const P1Point& u, const P1Point& w) { return !(u == w); }
inline bool operator==(const P2Point& z, const P2Point& w) { return chordal(z, w) < kEqualityTol; }
inline bool operator!=(const P2Point& z, const P2Point& w) { return !(z == w); }

// ---------------------------------------------------------------------------
// The two involutions and the branched cover
// ---------------------------------------------------------------------------

// Antipodal (fixed-point-free, antiholomorphic) involution of CP^1.
inline P1Point antipodal(const P1Point& u) {
  return P1Point(-std::conj(u[1]), std::conj(u[0]));
}

// Componentwise conjugation of CP^2; its fixed locus is the standard real
// projective plane, which misses the conic.
inline P2Point conj_c(const P2Point& z) {
  return P2Point(std::conj(z[0]), std::conj(z[1]), std::conj(z[2]));
}

// Unnormalized image of the 2:1 cover ([u],[v]) -> [i(u1v1+u2v2) : u1v1-u2v2 : u1v2+u2v1].
// Kept public so identity checks can evaluate the quadratic form on the raw
// image, where q(raw) = (u1 v2 - u2 v1)^2 holds as a polynomial identity.
inline Vector3cd pi_map_raw(const P1Point& u, const P1Point& v) {
  const complexd i(0.0, 1.0);
  const complexd a = u[0] * v[0], b = u[1] * v[1];
  const complexd c = u[0] * v[1] + u[1] * v[0];
  return Vector3cd(i * (a + b), a - b, c);
}

inline P2Point pi_map(const P1Point& u, const P1Point& v) {
  return P2Point(pi_map_raw(u, v));
}

// Quadratic form z1^2 + z2^2 + z3^2 on an arbitrary representative.
inline complexd conic_form(const Vector3cd& z) {
  return z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
}

// Value of the form on the stored unit representative.  |conic_value| is
// phase-invariant and vanishes exactly on the conic.
inline complexd conic_value(const P2Point& z) { return conic_form(z.rep()); }

// ---------------------------------------------------------------------------
// Tangent lines of the conic
// ---------------------------------------------------------------------------

// A line {z : a.z = 0} tangent to the conic; a lies on the dual conic
// a1^2+a2^2+a3^2 = 0 and the point of tangency is [a1:a2:a3] itself.
struct TangentLine {
  Vector3cd a;       // unit-norm, canonical-phase dual coordinates
  P2Point tangency;  // the single conic point on the line

  complexd incidence(const P2Point& z) const { return bilin(a, z.rep()); }
};

namespace detail {

inline Vector3cd cross_bilin(const Vector3cd& x, const Vector3cd& y) {
  return Vector3cd(x[1] * y[2] - x[2] * y[1],
                   x[2] * y[0] - x[0] * y[2],
                   x[0] * y[1] - x[1] * y[0]);
}

}  // namespace detail

// The two tangent lines of the conic through a point off the conic.  The
// pencil of lines through p is a projective line in the dual plane; the dual
// conic cuts it in two points, found as roots of a scalar quadratic.
inline std::array<TangentLine, 2> tangent_lines_through(const P2Point& p) {
  if (std::abs(conic_value(p)) <= kConicEps)
    throw DegenerateTangency("point lies on (or too near) the conic; tangent lines coincide");

  const Vector3cd z = p.rep();
  int m = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(z[i]) > std::abs(z[m])) m = i;
  Vector3cd e1 = Vector3cd::Zero(), e2 = Vector3cd::Zero();
  e1[(m + 1) % 3] = 1.0;
  e2[(m + 2) % 3] = 1.0;
  // Basis of {a : a.p = 0} in the dual plane.
  const Vector3cd b1 = detail::cross_bilin(z, e1);
  const Vector3cd b2 = detail::cross_bilin(z, e2);

  // Restrict the dual conic to a = s b1 + t b2.
  const complexd A = conic_form(b1);
  const complexd B = bilin(b1, b2);
  const complexd C = conic_form(b2);
  const complexd disc = std::sqrt(B * B - A * C);

  std::array<Vector3cd, 2> duals;
  if (std::abs(A) >= std::abs(C)) {
    // s/t = (-B +- disc)/A
    duals = {(-B + disc) * b1 + A * b2, (-B - disc) * b1 + A * b2};
  } else {
    // t/s = (-B +- disc)/C
    duals = {C * b1 + (-B + disc) * b2, C * b1 + (-B - disc) * b2};
  }

  std::array<TangentLine, 2> lines;
  for (int k = 0; k < 2; ++k) {
    Vector3cd a = detail::canonical_phase(detail::normalized_rep(duals[k], "tangent line"));
    lines[k] = TangentLine{a, P2Point(a)};
  }
  return lines;
}

// ---------------------------------------------------------------------------
// The sign-ambiguous form away from the conic
// ---------------------------------------------------------------------------

// A 2-frame at a point: two ambient tangent representatives, each Hermitian-
// orthogonal to the base representative.  make() projects and checks; callers
// that feed frames into threshold tests should orthonormalize (see
// orthonormalized()) so determinant/imaginary-part magnitudes carry a
// well-defined scale.
struct TangentFrame2 {
  P2Point base;
  Vector3cd e1, e2;

  static TangentFrame2 make(const P2Point& base, Vector3cd f1, Vector3cd f2) {
    f1 -= herm(f1, base.rep()) * base.rep();
    f2 -= herm(f2, base.rep()) * base.rep();
    if (!f1.allFinite() || !f2.allFinite())
      throw InvalidInput("TangentFrame2: non-finite tangent vector");
    TangentFrame2 fr{base, f1, f2};
    if (!fr.real_independent())
      throw InvalidInput("TangentFrame2: tangent vectors are real-linearly dependent");
    return fr;
  }

  bool real_independent(double tol = 1e-14) const {
    // e1, e2 span a real 2-plane iff they are not real-proportional.
    const complexd h = herm(e2, e1);
    const double n1 = e1.squaredNorm(), n2 = e2.squaredNorm();
    if (n1 <= 0.0 || n2 <= 0.0) return false;
    const double par = std::abs(h.real()) / std::sqrt(n1 * n2);
    return 1.0 - par * par > tol || std::abs(h.imag()) / std::sqrt(n1 * n2) > tol;
  }

  // Real Gram-Schmidt in the ambient Hermitian metric's real part.
  TangentFrame2 orthonormalized() const {
    TangentFrame2 fr = *this;
    fr.e1 /= fr.e1.norm();
    const double proj = herm(fr.e2, fr.e1).real();
    fr.e2 -= proj * fr.e1;
    fr.e2 /= fr.e2.norm();
    return fr;
  }
};

// |Im Y(e1,e2)| where Y = det(z, ., .)/sqrt(q(z)^3) on the unit-norm
// representative, principal square root.  The two branches differ by a global
// sign, so the imaginary part's magnitude is branch-independent.  The surface
// is Lagrangian for Im Y precisely where this vanishes on its frames.
inline double upsilon_im_abs(const TangentFrame2& fr, double eps_conic = kConicEps) {
  const complexd q = conic_value(fr.base);
  if (std::abs(q) <= eps_conic)
    throw NearConic("upsilon evaluated too close to the conic");
  Eigen::Matrix3cd m;
  m.col(0) = fr.base.rep();
  m.col(1) = fr.e1;
  m.col(2) = fr.e2;
  const complexd num = m.determinant();
  const complexd denom = std::sqrt(q * q * q);
  return std::abs(std::imag(num / denom));
}

// ---------------------------------------------------------------------------
// Stereographic charts on CP^1
// ---------------------------------------------------------------------------

// Affine coordinate xi on CP^1 minus a pole: with q the pole's unit
// representative and q" = antipodal(q), the point q" + xi q has coordinate
// xi; the chart center (xi = 0) is the pole's antipode.  The coordinate of
// any point at chordal distance >= 0.05 from the pole is finite (|xi| < 20).
struct Chart {
  P1Point pole;

  Chart() = default;
  explicit Chart(const P1Point& p) : pole(p.canonicalized()) {}

  P1Point center() const { return antipodal(pole); }

  complexd to_coord(const P1Point& w) const {
    const Vector2cd q = pole.rep();
    const Vector2cd qp = antipodal(pole).rep();
    return herm(w.rep(), q) / herm(w.rep(), qp);
  }

  P1Point from_coord(complexd xi) const {
    const Vector2cd q = pole.rep();
    const Vector2cd qp = antipodal(pole).rep();
    if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag()))
      throw InvalidInput("Chart::from_coord: non-finite coordinate");
    if (std::abs(xi) > 1.0) {
      // Form the representative from the pole side to stay well-scaled.
      const complexd inv = 1.0 / xi;
      return P1Point(inv * qp + q);
    }
    return P1Point(qp + xi * q);
  }

  // Chordal distance expressed through coordinates of two charted points.
  static double coord_chordal(complexd a, complexd b) {
    const double n = std::abs(a - b);
    return n / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
  }
};

// Fractional-linear map xi -> (a xi + b)/(c xi + d).
struct Mobius {
  complexd a{1.0}, b{0.0}, c{0.0}, d{1.0};
  complexd operator()(complexd xi) const { return (a * xi + b) / (c * xi + d); }
};

// Exact coordinate change between two pole charts.
inline Mobius chart_transfer(const Chart& from, const Chart& to) {
  const Vector2cd qo = from.pole.rep(), qop = antipodal(from.pole).rep();
  const Vector2cd qn = to.pole.rep(), qnp = antipodal(to.pole).rep();
  Mobius m;
  m.a = herm(qo, qn);
  m.b = herm(qop, qn);
  m.c = herm(qo, qnp);
  m.d = herm(qop, qnp);
  return m;
}

// ---------------------------------------------------------------------------
// The round-sphere model of CP^1
// ---------------------------------------------------------------------------

// u -> (2 Re(u1 conj u2), 2 Im(u1 conj u2), |u1|^2 - |u2|^2).  Under this
// identification the antipodal involution is exactly x -> -x, and SU(2)
// phase freedom disappears.
inline Vector3d sphere_from_p1(const P1Point& u) {
  const complexd w = u[0] * std::conj(u[1]);
  return Vector3d(2.0 * w.real(), 2.0 * w.imag(),
                  std::norm(u[0]) - std::norm(u[1]));
}

inline P1Point p1_from_sphere(const Vector3d& x) {
  const double n = x.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("p1_from_sphere: bad point");
  const Vector3d y = x / n;
  const complexd xy(y[0], y[1]);
  if (y[2] >= 0.0) {
    const double u1 = std::sqrt(0.5 * (1.0 + y[2]));
    return P1Point(u1, std::conj(xy) / (2.0 * u1));
  }
  const double u2 = std::sqrt(0.5 * (1.0 - y[2]));
  return P1Point(xy / (2.0 * u2), u2);
}

// Chordal distance between sphere images equals half the Euclidean chord.
inline double sphere_chordal(const Vector3d& x, const Vector3d& y) {
  return 0.5 * (x - y).norm();
}

// Unit tangent pair (E1, E2 = x x E1) at a sphere point.
inline std::pair<Vector3d, Vector3d> sphere_tangent_basis(const Vector3d& x) {
  Vector3d h = std::abs(x[0]) < 0.7 ? Vector3d(1, 0, 0) : Vector3d(0, 1, 0);
  Vector3d e1 = (h - h.dot(x) * x).normalized();
  return {e1, x.cross(e1)};
}

// SU(2) element (unique up to sign) rotating the sphere by angle theta about
// the unit axis n, expressed so that sphere_from_p1(g u) = R(n,theta) sphere_from_p1(u).
inline Matrix2cd su2_from_axis_angle(const Vector3d& n, double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const complexd i(0.0, 1.0);
  Matrix2cd g;
  // exp(+i theta m.sigma/2) with m = (n1, -n2, n3); the flipped middle
  // component and the overall sign compensate the y-reflection built into
  // sphere_from_p1, so the rotation follows the right-hand rule on the
  // sphere model.
  g(0, 0) = c + i * s * n[2];
  g(0, 1) = i * s * (n[0] + i * n[1]);
  g(1, 0) = i * s * (n[0] - i * n[1]);
  g(1, 1) = c - i * s * n[2];
  return g;
}

inline P1Point apply_su2(const Matrix2cd& g, const P1Point& u) {
  return P1Point(g * u.rep());
}

// Minimal rotation carrying a to b on the sphere (identity if a == b,
// half-turn about any perpendicular axis if antipodal).
inline Matrix2cd rotation_carrying(const P1Point& a, const P1Point& b) {
  const Vector3d xa = sphere_from_p1(a), xb = sphere_from_p1(b);
  const Vector3d cr = xa.cross(xb);
  const double s = cr.norm(), c = xa.dot(xb);
  if (s < 1e-15) {
    if (c > 0.0) return Matrix2cd::Identity();
    return su2_from_axis_angle(sphere_tangent_basis(xa).first, kPi);
  }
  return su2_from_axis_angle(cr / s, std::atan2(s, c));
}

}  // namespace zoll
