#pragma once

// Invariant checks on a converged disk: the boundary winding that carries
// the Maslov data, the pulled-back area of the lift, and embeddedness gaps.

#include <utility>

#include "disk.hpp"
#include "kahler.hpp"

namespace zoll {

struct DiskDiagnostics {
  double residual = 0.0;
  int lift_winding = 0;
  int normal_maslov = 0;
  int total_maslov = 0;
  double lift_area = 0.0;
  double half_area = 0.0;
  double diagonal_gap = 0.0;
  double boundary_injectivity_gap = 0.0;
};

// Winding number of (i gamma')^2 around the boundary, gamma = the disk map
// restricted to |zeta| = 1 in its chart.  Phase increments are summed over
// equispaced nodes, refining the sampling until every step is comfortably
// below pi.
inline int maslov_lift_winding(const DiskSolution& d) {
  const int K = std::max(d.order(), 1);
  const int M_cap = 16 * K;
  for (int M = std::max(4 * K, 64);; M *= 2) {
    double min_deriv = std::numeric_limits<double>::infinity();
    double total = 0.0;
    bool resolved = true;
    complexd w_first, w_prev;
    for (int j = 0; j < M && resolved; ++j) {
      const complexd zeta = std::polar(1.0, 2.0 * kPi * j / M);
      const complexd gp = d.eval_coord_derivative(zeta) * complexd(0.0, 1.0) * zeta;
      min_deriv = std::min(min_deriv, std::abs(gp));
      complexd w = complexd(0.0, 1.0) * gp;
      w *= w;
      if (j == 0) {
        w_first = w;
      } else {
        const double step = std::arg(w / w_prev);
        if (std::abs(step) >= kPi / 2) resolved = false;
        total += step;
      }
      w_prev = w;
    }
    if (min_deriv <= 1e-6)
      throw DerivativeVanishes("boundary derivative too small for the winding");
    if (resolved) {
      const double closing = std::arg(w_first / w_prev);
      if (std::abs(closing) < kPi / 2) {
        total += closing;
        return static_cast<int>(std::lround(total / (2.0 * kPi)));
      }
    }
    if (2 * M > M_cap)
      throw PhaseStepTooLarge("winding phase steps unresolved at the node cap");
  }
}

struct DiskAreaOptions {
  int radial_nodes = 12;
  int angular_nodes = 48;
  double rel_tol = 1e-5;
  double fd_step = 1e-5;
};

namespace detail {

// One tensor-product quadrature pass of the disk's omega-check pullback:
// returns (lift, half) where half integrates over the map itself and lift
// adds the antipodal-parameter companion (the other factor of the lift).
inline std::pair<double, double> disk_area_level(const DiskSolution& d,
                                                 const SurfaceSpec& spec, int nr, int na,
                                                 double fd) {
  std::vector<double> rs, ws;
  gauss_legendre(nr, rs, ws);
  for (int i = 0; i < nr; ++i) {
    rs[i] = 0.5 * (rs[i] + 1.0);
    ws[i] *= 0.5;
  }
  std::vector<std::vector<double>> f(nr, std::vector<double>(na, 0.0));
  for (int i = 0; i < nr; ++i) {
    const double r = rs[i];
    for (int j = 0; j < na; ++j) {
      const double th = 2.0 * kPi * j / na;
      const complexd zeta = std::polar(r, th);
      const complexd xi = d.eval_coord(zeta);
      const complexd hp = d.eval_coord_derivative(zeta);
      // Sphere differential of the chart at xi along 1 and i.
      const Vector3d x = sphere_from_p1(d.chart.from_coord(xi));
      const Vector3d t1 = (sphere_from_p1(d.chart.from_coord(xi + fd)) -
                           sphere_from_p1(d.chart.from_coord(xi - fd))) /
                          (2.0 * fd);
      const Vector3d ti = (sphere_from_p1(d.chart.from_coord(xi + complexd(0.0, fd))) -
                           sphere_from_p1(d.chart.from_coord(xi - complexd(0.0, fd)))) /
                          (2.0 * fd);
      const complexd dr = hp * std::polar(1.0, th);       // d(xi)/dr
      const complexd dth = hp * complexd(0.0, 1.0) * zeta;  // d(xi)/dtheta
      const Vector3d Xr = dr.real() * t1 + dr.imag() * ti;
      const Vector3d Xth = dth.real() * t1 + dth.imag() * ti;
      f[i][j] = omega_check_form(spec, x, Xr, Xth);
    }
  }
  const double dth = 2.0 * kPi / na;
  double half = 0.0, lift = 0.0;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < na; ++j) {
      half += ws[i] * dth * f[i][j];
      lift += ws[i] * dth * (f[i][j] + f[i][(j + na / 2) % na]);
    }
  return {lift, half};
}

}  // namespace detail

// (lift_area, half_area) with one refinement pass as an accuracy check.
inline std::pair<double, double> disk_areas(const DiskSolution& d, const SurfaceSpec& spec,
                                            const DiskAreaOptions& opts = {}) {
  if (opts.angular_nodes % 2 != 0)
    throw InvalidInput("disk_areas: angular node count must be even");
  const auto coarse =
      detail::disk_area_level(d, spec, opts.radial_nodes, opts.angular_nodes, opts.fd_step);
  const auto fine = detail::disk_area_level(d, spec, opts.radial_nodes + 8,
                                            2 * opts.angular_nodes, opts.fd_step);
  const double scale = std::max(std::abs(fine.first), 1e-12);
  if (std::abs(fine.first - coarse.first) > opts.rel_tol * scale ||
      std::abs(fine.second - coarse.second) > opts.rel_tol * scale)
    throw QuadratureUnresolved("disk area quadrature did not settle under refinement");
  return fine;
}

// Minimum chordal distance between the lift's two factor maps away from the
// center, where they are forced to cross.
inline double diagonal_gap(const DiskSolution& d) {
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 20; ++i) {
    const double r = 0.05 * i;
    for (int j = 0; j < 64; ++j) {
      const complexd zeta = std::polar(r, 2.0 * kPi * j / 64);
      const P1Point a = d.chart.from_coord(d.eval_coord(zeta));
      const P1Point b = d.chart.from_coord(d.eval_coord(-zeta));
      gap = std::min(gap, chordal(a, b));
    }
  }
  return gap;
}

// The factor maps meet exactly at the center; this reports their distance
// there, with bitwise-equal representatives counted as exact coincidence.
inline double diagonal_gap_at_center(const DiskSolution& d) {
  const complexd a = d.eval_coord(complexd(0.0));
  const complexd b = d.eval_coord(-complexd(0.0));
  if (a == b) return 0.0;
  return chordal(d.chart.from_coord(a), d.chart.from_coord(b));
}

// Minimum chordal distance between boundary points at least pi/8 apart in
// parameter angle.
inline double boundary_injectivity_gap(const DiskSolution& d) {
  const int M = std::max(4 * d.order(), 128);
  const int sep = M / 16;
  std::vector<Vector3d> x(M);
  for (int j = 0; j < M; ++j)
    x[j] = sphere_from_p1(d.chart.from_coord(d.eval_coord(std::polar(1.0, 2.0 * kPi * j / M))));
  double gap2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < M; ++i)
    for (int j = i + sep; j <= i + M - sep && j < M + i; ++j) {
      if (j >= M) break;
      gap2 = std::min(gap2, (x[i] - x[j]).squaredNorm());
    }
  return 0.5 * std::sqrt(gap2);
}

// Minimum over interior samples of chordal(h(-zeta), phi(h(zeta))): the
// interior must stay off the surface graph, touching it only along the
// boundary circle.
inline double interior_graph_gap(const DiskSolution& d, const SurfaceSpec& spec,
                                 double max_radius = 1.0 - 1e-3) {
  double gap = std::numeric_limits<double>::infinity();
  static const double radii[] = {0.05, 0.15, 0.3, 0.45, 0.6, 0.72, 0.82,
                                 0.9,  0.95, 0.975, 0.99, 0.995};
  for (double r : radii) {
    if (r > max_radius) break;
    for (int j = 0; j < 48; ++j) {
      const complexd zeta = std::polar(r, 2.0 * kPi * j / 48);
      const P1Point a = d.chart.from_coord(d.eval_coord(-zeta));
      const P1Point b = phi_apply(spec, d.chart.from_coord(d.eval_coord(zeta)));
      gap = std::min(gap, chordal(a, b));
    }
  }
  return gap;
}

struct DiagnosticsOptions {
  DiskAreaOptions area{};
};

inline DiskDiagnostics disk_diagnostics(const DiskSolution& d, const SurfaceSpec& spec,
                                        const DiagnosticsOptions& opts = {}) {
  DiskDiagnostics out;
  out.residual = boundary_residual(d, spec);
  out.lift_winding = maslov_lift_winding(d);
  if (out.lift_winding % 2 != 0)
    throw PhaseStepTooLarge("lift winding must be even");
  out.normal_maslov = out.lift_winding / 2;
  out.total_maslov = out.normal_maslov + 2;
  const auto areas = disk_areas(d, spec, opts.area);
  out.lift_area = areas.first;
  out.half_area = areas.second;
  out.diagonal_gap = diagonal_gap(d);
  out.boundary_injectivity_gap = boundary_injectivity_gap(d);
  return out;
}

}  // namespace zoll
