#pragma once

// Totally real surfaces presented through an involution of the sphere.
//
// A surface spec holds a polynomial vector field V on R^3.  Its tangential
// part W = V - <V,x>x flows the unit sphere; psi is the time-(scale) flow and
// the surface involution is phi = psi . antipodal . psi^{-1}.  The surface
// itself is the image of u -> pi_map(u, phi(u)), a graph over the sphere
// that degenerates to the standard real projective plane at scale 0.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "lattice.hpp"
#include "projective.hpp"

namespace zoll {

struct FieldTerm {
  std::array<int, 3> exponents;  // monomial x^i y^j z^k, i+j+k <= 4
  Vector3d coeff;                // contribution (coeff) * x^i y^j z^k
};

class SphereField {
 public:
  static constexpr int kMaxDegree = 4;

  SphereField() = default;
  explicit SphereField(std::vector<FieldTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      int deg = 0;
      for (int e : t.exponents) {
        if (e < 0) throw InvalidInput("SphereField: negative exponent");
        deg += e;
      }
      if (deg > kMaxDegree) throw InvalidInput("SphereField: degree exceeds 4");
      if (!t.coeff.allFinite()) throw InvalidInput("SphereField: non-finite coefficient");
      degree_ = std::max(degree_, deg);
    }
  }

  const std::vector<FieldTerm>& terms() const { return terms_; }
  int degree() const { return degree_; }
  bool empty() const { return terms_.empty(); }

  Vector3d value(const Vector3d& x) const {
    Vector3d v = Vector3d::Zero();
    for (const auto& t : terms_) {
      double m = 1.0;
      for (int k = 0; k < t.exponents[0]; ++k) m *= x[0];
      for (int k = 0; k < t.exponents[1]; ++k) m *= x[1];
      for (int k = 0; k < t.exponents[2]; ++k) m *= x[2];
      v += m * t.coeff;
    }
    return v;
  }

  // Tangential part along the sphere.
  Vector3d tangent_value(const Vector3d& x) const {
    const Vector3d v = value(x);
    return v - v.dot(x) * x;
  }

 private:
  std::vector<FieldTerm> terms_;
  int degree_ = 0;
};

struct DocilityThresholds {
  double fixed_point_gap = 0.05;      // min chordal(u, phi u)
  double orientation_margin = 1e-6;   // all dets < -margin
  double involution_defect = 1e-7;    // max chordal(phi phi u, u)
  double totally_real_det = 1e-6;     // sampled mode
  double conic_gap = 1e-6;            // sampled mode
  double transversality_det = 1e-6;   // sampled mode
};

// Immutable description of one surface.  scale in [0,1]; scale 0 short-
// circuits psi to the identity so the base surface is exactly the standard
// real projective plane.
class SurfaceSpec {
 public:
  SurfaceSpec() = default;
  SurfaceSpec(SphereField field, double scale, int flow_steps = 64,
              DocilityThresholds thresholds = {})
      : field_(std::move(field)), scale_(scale), flow_steps_(flow_steps),
        thresholds_(thresholds) {
    if (!(scale_ >= 0.0 && scale_ <= 1.0))
      throw InvalidInput("SurfaceSpec: scale must lie in [0,1]");
    if (flow_steps_ < 1) throw InvalidInput("SurfaceSpec: flow_steps must be positive");
  }

  const SphereField& field() const { return field_; }
  double scale() const { return scale_; }
  int flow_steps() const { return flow_steps_; }
  const DocilityThresholds& thresholds() const { return thresholds_; }

  SurfaceSpec with_scale(double t) const {
    return SurfaceSpec(field_, t, flow_steps_, thresholds_);
  }

  bool trivial_flow() const { return scale_ == 0.0 || field_.empty(); }

  // Fixed-step RK4 on the sphere for the tangential field, renormalizing
  // after every step; sign < 0 integrates the reversed field (psi^{-1}).
  Vector3d flow_sphere(Vector3d x, double sign) const {
    if (trivial_flow()) return x;
    const double h = sign * scale_ / flow_steps_;
    for (int s = 0; s < flow_steps_; ++s) {
      const Vector3d k1 = field_.tangent_value(x);
      const Vector3d k2 = field_.tangent_value(x + 0.5 * h * k1);
      const Vector3d k3 = field_.tangent_value(x + 0.5 * h * k2);
      const Vector3d k4 = field_.tangent_value(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      x.normalize();
    }
    return x;
  }

  Vector3d psi_sphere(const Vector3d& x, bool forward = true) const {
    return flow_sphere(x, forward ? 1.0 : -1.0);
  }

  // phi = psi . antipodal . psi^{-1}; fixed-point free and orientation-
  // reversing whenever psi is resolved by the integrator.
  Vector3d phi_sphere(const Vector3d& x) const {
    if (trivial_flow()) return -x;
    return flow_sphere(-flow_sphere(x, -1.0), 1.0);
  }

 private:
  SphereField field_;
  double scale_ = 0.0;
  int flow_steps_ = 64;
  DocilityThresholds thresholds_;
};

enum class FlowDirection { forward, inverse };

inline P1Point psi_apply(const SurfaceSpec& spec, const P1Point& u,
                         FlowDirection dir = FlowDirection::forward) {
  if (spec.trivial_flow()) return u;
  return p1_from_sphere(spec.psi_sphere(sphere_from_p1(u), dir == FlowDirection::forward));
}

inline P1Point phi_apply(const SurfaceSpec& spec, const P1Point& u) {
  if (spec.trivial_flow()) return antipodal(u);
  return p1_from_sphere(spec.phi_sphere(sphere_from_p1(u)));
}

// Embedding of the surface point labeled by u.
inline P2Point embed_N(const SurfaceSpec& spec, const P1Point& u) {
  return pi_map(u, phi_apply(spec, u));
}

// ---------------------------------------------------------------------------
// Docility checks
// ---------------------------------------------------------------------------

struct DocilityReport {
  bool passed = false;
  double min_fixed_point_gap = 0.0;
  double min_orientation_det = 0.0;  // largest phi-Jacobian det over samples;
                                     // must stay below -orientation_margin
  double max_involution_defect = 0.0;
  // Sampled mode only:
  std::optional<double> min_totally_real_det;
  std::optional<double> min_conic_gap;
  std::optional<double> min_transversality_det;
};

namespace detail {

// 2x2 real Jacobian of phi between stereographic charts centered at x and
// phi(x), by central differences.  Both charts come from the complex
// structure, so the determinant's sign is chart-independent.
inline Eigen::Matrix2d phi_chart_jacobian(const SurfaceSpec& spec, const Vector3d& x,
                                          double h = 1e-5) {
  const Vector3d y = spec.phi_sphere(x);
  const Chart cin(antipodal(p1_from_sphere(x)));
  const Chart cout(antipodal(p1_from_sphere(y)));
  auto f = [&](complexd xi) {
    const P1Point p = cin.from_coord(xi);
    return cout.to_coord(p1_from_sphere(spec.phi_sphere(sphere_from_p1(p))));
  };
  const complexd fx = (f(complexd(h, 0)) - f(complexd(-h, 0))) / (2.0 * h);
  const complexd fy = (f(complexd(0, h)) - f(complexd(0, -h))) / (2.0 * h);
  Eigen::Matrix2d j;
  j << fx.real(), fy.real(), fx.imag(), fy.imag();
  return j;
}

}  // namespace detail

// Involution-level docility: phi must be an exact fixed-point-free
// orientation-reversing involution at lattice resolution.
inline DocilityReport check_docility(const SurfaceSpec& spec, int n_samples = 400) {
  const auto& th = spec.thresholds();
  DocilityReport rep;
  rep.min_fixed_point_gap = 1.0;
  rep.min_orientation_det = -std::numeric_limits<double>::infinity();
  rep.max_involution_defect = 0.0;
  for (const auto& x : fibonacci_sphere(n_samples)) {
    const Vector3d y = spec.phi_sphere(x);
    rep.min_fixed_point_gap = std::min(rep.min_fixed_point_gap, sphere_chordal(x, y));
    rep.max_involution_defect =
        std::max(rep.max_involution_defect, sphere_chordal(spec.phi_sphere(y), x));
    const double det = detail::phi_chart_jacobian(spec, x).determinant();
    rep.min_orientation_det = std::max(rep.min_orientation_det, det);
  }
  rep.passed = rep.min_fixed_point_gap > th.fixed_point_gap &&
               rep.min_orientation_det < -th.orientation_margin &&
               rep.max_involution_defect < th.involution_defect;
  return rep;
}

// Tangent frame of the embedded surface at the point labeled by u, built
// from central differences of the embedding along two chart directions and
// orthonormalized.  Representative phases of nearby embedded points are
// aligned with the base before differencing.
inline TangentFrame2 embed_frame(const SurfaceSpec& spec, const P1Point& u, double h = 1e-5) {
  const Chart chart(antipodal(u));
  const P2Point base = embed_N(spec, u);
  auto aligned = [&](complexd xi) {
    Vector3cd v = embed_N(spec, chart.from_coord(xi)).rep();
    const complexd ip = herm(v, base.rep());
    if (std::abs(ip) < 1e-12)
      throw InvalidInput("embed_frame: embedding step too large for phase alignment");
    return Vector3cd(v * (std::conj(ip) / std::abs(ip)));
  };
  const complexd xi0 = chart.to_coord(u);
  const Vector3cd d1 = (aligned(xi0 + h) - aligned(xi0 - h)) / (2.0 * h);
  const Vector3cd d2 = (aligned(xi0 + complexd(0, h)) - aligned(xi0 - complexd(0, h))) / (2.0 * h);
  return TangentFrame2::make(base, d1, d2).orthonormalized();
}

namespace detail {

// Push an ambient tangent representative into the affine chart of CP^2 at
// the base's largest coordinate.
inline Vector2cd chart2_tangent(const Vector3cd& z, const Vector3cd& e) {
  int m = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(z[i]) > std::abs(z[m])) m = i;
  const int a = (m + 1) % 3, b = (m + 2) % 3;
  const complexd zm2 = z[m] * z[m];
  return Vector2cd((e[a] * z[m] - z[a] * e[m]) / zm2,
                   (e[b] * z[m] - z[b] * e[m]) / zm2);
}

inline Eigen::Vector4d real4(const Vector2cd& w) {
  return Eigen::Vector4d(w[0].real(), w[0].imag(), w[1].real(), w[1].imag());
}

// |det| of four chart tangents viewed as real 4-vectors, after normalizing
// each so the value measures angles rather than magnitudes.
inline double real_span_det(const Vector2cd& a, const Vector2cd& b,
                            const Vector2cd& c, const Vector2cd& d) {
  Eigen::Matrix4d m;
  m.col(0) = real4(a).normalized();
  m.col(1) = real4(b).normalized();
  m.col(2) = real4(c).normalized();
  m.col(3) = real4(d).normalized();
  return std::abs(m.determinant());
}

}  // namespace detail

// Surface-level docility: the involution checks plus, at each sampled
// surface point, (a) the tangent plane is totally real, (b) the point stays
// off the conic, (c) the surface is transverse to both tangent lines of the
// conic through it.
inline DocilityReport check_docility_sampled(const SurfaceSpec& spec, int n_samples = 400) {
  DocilityReport rep = check_docility(spec, n_samples);
  const auto& th = spec.thresholds();
  double min_tr = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  double min_tv = std::numeric_limits<double>::infinity();
  for (const auto& x : fibonacci_sphere(n_samples)) {
    const TangentFrame2 fr = embed_frame(spec, p1_from_sphere(x));
    const Vector3cd z = fr.base.rep();
    const Vector2cd w1 = detail::chart2_tangent(z, fr.e1);
    const Vector2cd w2 = detail::chart2_tangent(z, fr.e2);
    const complexd i(0.0, 1.0);
    min_tr = std::min(min_tr, detail::real_span_det(w1, w2, i * w1, i * w2));
    const double gap = std::abs(conic_value(fr.base));
    min_gap = std::min(min_gap, gap);
    if (gap > th.conic_gap) {
      for (const TangentLine& line : tangent_lines_through(fr.base)) {
        // Tangent direction of the line at the base: a x z lies in the
        // incidence kernel and is never proportional to z off the conic.
        Vector3cd k = detail::cross_bilin(line.a, z);
        k -= herm(k, z) * z;
        const Vector2cd kw = detail::chart2_tangent(z, k);
        min_tv = std::min(min_tv, detail::real_span_det(w1, w2, kw, i * kw));
      }
    }
  }
  rep.min_totally_real_det = min_tr;
  rep.min_conic_gap = min_gap;
  rep.min_transversality_det = std::isfinite(min_tv) ? min_tv : 0.0;
  rep.passed = rep.passed && min_tr > th.totally_real_det &&
               min_gap > th.conic_gap &&
               rep.min_transversality_det.value() > th.transversality_det;
  return rep;
}

// FNV-1a fingerprint of the spec as written: term exponents and coefficient
// bits, scale, and flow step count.  Grid and disk files carry it so stale
// artifacts are rejected instead of silently mixed.
inline std::uint64_t spec_hash(const SurfaceSpec& spec) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix_bytes = [&h](const void* p, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_double = [&](double x) {
    if (x == 0.0) x = 0.0;  // collapse -0
    mix_bytes(&x, sizeof(x));
  };
  for (const auto& term : spec.field().terms()) {
    for (int e : term.exponents) {
      const std::int64_t v = e;
      mix_bytes(&v, sizeof(v));
    }
    for (int i = 0; i < 3; ++i) mix_double(term.coeff[i]);
  }
  mix_double(spec.scale());
  const std::int64_t steps = spec.flow_steps();
  mix_bytes(&steps, sizeof(steps));
  return h;
}

}  // namespace zoll
