#pragma once

// The symplectic side: the involution-antiinvariant 2-form on the sphere and
// pullback areas of parameterized patches in the product of two spheres.
//
// omega_check = (alpha - phi^* alpha)/2, where alpha is the round area form
// oriented by the complex structure of the sphere model (the pinned
// identification makes that orientation opposite the outward normal, hence
// the sign in round_area_form).  On the product, omega is the sum of the two
// factor pullbacks of omega_check; the graph of phi is Lagrangian for it and
// either factor integrates to 4 pi.

#include <functional>
#include <utility>

#include "surface.hpp"

namespace zoll {

// alpha(x; X, Y), positive on complex-oriented tangent frames.
inline double round_area_form(const Vector3d& x, const Vector3d& X, const Vector3d& Y) {
  Eigen::Matrix3d m;
  m.col(0) = x;
  m.col(1) = X;
  m.col(2) = Y;
  return -m.determinant();
}

// Differential of phi at x applied to a tangent vector, by central
// differences along the sphere.
inline Vector3d phi_pushforward(const SurfaceSpec& spec, const Vector3d& x,
                                const Vector3d& X, double h = 1e-5) {
  const Vector3d a = spec.phi_sphere((x + h * X).normalized());
  const Vector3d b = spec.phi_sphere((x - h * X).normalized());
  return (a - b) / (2.0 * h);
}

// omega_check at x evaluated on a tangent pair.
inline double omega_check_form(const SurfaceSpec& spec, const Vector3d& x,
                               const Vector3d& X, const Vector3d& Y) {
  const double a = round_area_form(x, X, Y);
  const Vector3d y = spec.phi_sphere(x);
  const Vector3d dX = phi_pushforward(spec, x, X);
  const Vector3d dY = phi_pushforward(spec, x, Y);
  return 0.5 * (a - round_area_form(y, dX, dY));
}

struct KahlerData {
  SurfaceSpec spec;
};

// A parameterized patch in the product of two spheres: (s,t) in [0,1]^2,
// periodic in t.  Derivatives are taken by finite differences of the
// callable, so any smooth parameterization works.
struct SurfacePatch {
  std::function<std::pair<Vector3d, Vector3d>(double s, double t)> eval;
};

namespace detail {

inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  // Newton on Legendre polynomials; standard and plenty accurate for the
  // orders used here.
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

// Pullback integral of omega (sum of factor omega_check's) over [0,1]^2 with
// Gauss nodes in s and trapezoid nodes in the periodic t direction.
inline double patch_omega_level(const KahlerData& kd, const SurfacePatch& patch,
                                int ns, int nt, double fd_step) {
  std::vector<double> gx, gw;
  gauss_legendre(ns, gx, gw);
  const double h = fd_step;
  double total = 0.0;
  for (int i = 0; i < ns; ++i) {
    const double s = 0.5 * (gx[i] + 1.0);
    const double ws = 0.5 * gw[i];
    for (int j = 0; j < nt; ++j) {
      const double t = (j + 0.5) / nt;
      const auto ps = [&](double a, double b) { return patch.eval(a, b - std::floor(b)); };
      const auto [u0, v0] = ps(s, t);
      const auto [us1, vs1] = ps(s + h, t);
      const auto [us0, vs0] = ps(s - h, t);
      const auto [ut1, vt1] = ps(s, t + h);
      const auto [ut0, vt0] = ps(s, t - h);
      const Vector3d dus = (us1 - us0) / (2.0 * h), dut = (ut1 - ut0) / (2.0 * h);
      const Vector3d dvs = (vs1 - vs0) / (2.0 * h), dvt = (vt1 - vt0) / (2.0 * h);
      double f = 0.0;
      if (dus.norm() + dut.norm() > 1e-14)
        f += omega_check_form(kd.spec, u0.normalized(), dus, dut);
      if (dvs.norm() + dvt.norm() > 1e-14)
        f += omega_check_form(kd.spec, v0.normalized(), dvs, dvt);
      total += ws * f / nt;
    }
  }
  return total;
}

}  // namespace detail

// Integral of the pulled-back product form over a patch, with one refinement
// doubling as a resolution check.
inline double omega_pullback_area(const KahlerData& kd, const SurfacePatch& patch,
                                  int base_s = 24, int base_t = 48,
                                  double rel_tol = 1e-5, double fd_step = 1e-5) {
  const double coarse = detail::patch_omega_level(kd, patch, base_s, base_t, fd_step);
  const double fine = detail::patch_omega_level(kd, patch, 2 * base_s, 2 * base_t, fd_step);
  const double scale = std::max({std::abs(coarse), std::abs(fine), 1.0});
  if (std::abs(fine - coarse) > rel_tol * scale)
    throw QuadratureUnresolved("patch quadrature refinements disagree");
  return fine;
}

// Full-sphere parameterization used by the standard patches: s -> polar
// height, t -> azimuth.  The (s,t) frame is positively oriented for the
// complex orientation, so the plain area form integrates to +4 pi.
inline Vector3d sphere_param(double s, double t) {
  const double c = 2.0 * s - 1.0;
  const double r = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double az = 2.0 * kPi * t;
  return Vector3d(r * std::cos(az), r * std::sin(az), c);
}

// The second factor carried along the graph of phi: the surface itself.
inline SurfacePatch graph_patch(const SurfaceSpec& spec) {
  return SurfacePatch{[spec](double s, double t) {
    const Vector3d x = sphere_param(s, t).normalized();
    return std::make_pair(x, spec.phi_sphere(x));
  }};
}

// One factor swept, the other held fixed.
inline SurfacePatch factor_patch(const Vector3d& fixed_v) {
  return SurfacePatch{[fixed_v](double s, double t) {
    return std::make_pair(sphere_param(s, t), fixed_v);
  }};
}

// The diagonal, which at scale 0 carries twice the sphere area.
inline SurfacePatch diagonal_patch() {
  return SurfacePatch{[](double s, double t) {
    const Vector3d x = sphere_param(s, t);
    return std::make_pair(x, x);
  }};
}

// Integral of omega_check over the sphere itself (expected 4 pi).
inline double omega_check_total(const SurfaceSpec& spec, int base_s = 24, int base_t = 48,
                                double rel_tol = 1e-5) {
  KahlerData kd{spec};
  // A factor patch integrates omega_check over the moving factor alone.
  return omega_pullback_area(kd, factor_patch(Vector3d(0, 0, 1)), base_s, base_t, rel_tol);
}

}  // namespace zoll
