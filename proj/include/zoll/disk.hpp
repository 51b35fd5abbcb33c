#pragma once

// Boundary-value solver for holomorphic disks attached to a surface.
//
// The unknown is a holomorphic map of the unit disk into CP^1 written in a
// stereographic chart as a polynomial sum c_k zeta^k.  The boundary circle
// must satisfy h(-zeta) = phi(h(zeta)), the center is pinned to a prescribed
// point, and the residual rotation freedom is fixed by making c_1 real and
// positive.  Solutions are continued from the closed-form scale-0 disk by a
// homotopy in the surface scale.

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <vector>

#include "lattice.hpp"
#include "surface.hpp"

namespace zoll {

struct DiskSolution {
  double spec_scale = 0.0;
  P1Point u0;
  P2Point p;     // conic point pi_map(u0, u0): the disk's center image
  Chart chart;
  std::vector<complexd> coeffs;  // c_0 .. c_K in the chart
  double residual = 0.0;         // max chordal boundary mismatch

  int order() const { return static_cast<int>(coeffs.size()) - 1; }

  complexd eval_coord(complexd zeta) const {
    complexd s = 0.0;
    for (int k = order(); k >= 0; --k) s = s * zeta + coeffs[k];
    return s;
  }

  complexd eval_coord_derivative(complexd zeta) const {
    complexd s = 0.0;
    for (int k = order(); k >= 1; --k) s = s * zeta + double(k) * coeffs[k];
    return s;
  }

  P1Point boundary_point(double tau) const {
    return chart.from_coord(eval_coord(std::polar(1.0, tau)));
  }

  P1Point center_point() const { return chart.from_coord(coeffs[0]); }
};

struct RefineOptions {
  double tol = 1e-9;             // convergence: max chordal mismatch + pin
  int max_iterations = 50;
  double fd_step = 1e-5;         // chart-coordinate step for phi Jacobians
  double rechart_pole_gap = 0.2; // re-center when samples crowd the pole
  double overflow_gap = 0.05;    // hard chart-overflow distance
  double early_reject = 0.45;    // give up immediately beyond this residual
  bool canonicalize = true;      // deterministic pole + gauge on return
  bool relative_gauge = false;   // pin the gauge at the guess's c_1 phase so the
                                 // boundary parameterization moves continuously
                                 // under warm continuation (implies no
                                 // canonicalization)
};

struct SolveOptions {
  int K = 64;
  double initial_step = 1.0 / 16.0;
  double min_step = 1e-4;
  int max_K = 512;
  double tail_tol = 1e-8;        // |c_K| / max|c_k|
  int docility_samples = 400;
  RefineOptions refine{};
};

// ---------------------------------------------------------------------------
// Closed-form base disk
// ---------------------------------------------------------------------------

// At scale 0 the surface involution is the antipodal map and the disk
// through pi_map(u0,u0) is a hemisphere centered at u0: in the chart whose
// pole is the antipode of u0 the map is exactly zeta -> zeta.
inline DiskSolution round_disk(const P1Point& u0, int K = 64) {
  if (K < 1) throw InvalidInput("round_disk: K must be positive");
  DiskSolution d;
  d.spec_scale = 0.0;
  d.u0 = u0.canonicalized();
  d.p = pi_map(d.u0, d.u0).canonicalized();
  d.chart = Chart(antipodal(d.u0));
  d.coeffs.assign(K + 1, complexd(0.0, 0.0));
  d.coeffs[1] = 1.0;
  d.residual = 0.0;
  return d;
}

// ---------------------------------------------------------------------------
// Boundary evaluation
// ---------------------------------------------------------------------------

namespace detail {

struct BoundaryEval {
  std::vector<complexd> s;       // series values at the 4K nodes
  std::vector<P1Point> pts;      // charted boundary points
  std::vector<P1Point> phi_pts;  // involution images
  double max_mismatch = 0.0;     // max chordal(h(-zeta), phi(h(zeta)))
  double pin_defect = 0.0;       // chordal(h(0), u0)
  double min_pole_gap = 1.0;     // boundary distance to the chart pole
  double min_pole_gap_phi = 1.0;
};

inline std::vector<complexd> unit_nodes(int M) {
  std::vector<complexd> z(M);
  for (int j = 0; j < M; ++j) z[j] = std::polar(1.0, 2.0 * kPi * j / M);
  return z;
}

inline BoundaryEval evaluate_boundary(const SurfaceSpec& spec, const DiskSolution& d) {
  const int M = 4 * d.order();
  const auto nodes = unit_nodes(M);
  BoundaryEval ev;
  ev.s.resize(M);
  ev.pts.reserve(M);
  ev.phi_pts.reserve(M);
  const P1Point pole = d.chart.pole;
  for (int j = 0; j < M; ++j) {
    ev.s[j] = d.eval_coord(nodes[j]);
    ev.pts.push_back(d.chart.from_coord(ev.s[j]));
    ev.min_pole_gap = std::min(ev.min_pole_gap, chordal(ev.pts.back(), pole));
  }
  for (int j = 0; j < M; ++j) {
    ev.phi_pts.push_back(phi_apply(spec, ev.pts[j]));
    ev.min_pole_gap_phi = std::min(ev.min_pole_gap_phi, chordal(ev.phi_pts.back(), pole));
    const double mis = chordal(ev.pts[(j + M / 2) % M], ev.phi_pts.back());
    ev.max_mismatch = std::max(ev.max_mismatch, mis);
  }
  ev.pin_defect = chordal(d.center_point(), d.u0);
  return ev;
}

// Interior + boundary sphere samples describing the disk's footprint; used
// to place chart poles away from everything the disk touches.
inline std::vector<Vector3d> disk_footprint(const DiskSolution& d) {
  std::vector<Vector3d> out;
  const int M = std::min(4 * d.order(), 128);
  const auto nodes = unit_nodes(M);
  static const double radii[] = {1.0, 0.85, 0.6, 0.35};
  out.reserve(sizeof(radii) / sizeof(double) * M + 1);
  for (double r : radii)
    for (int j = 0; j < M; ++j)
      out.push_back(sphere_from_p1(d.chart.from_coord(d.eval_coord(r * nodes[j]))));
  out.push_back(sphere_from_p1(d.center_point()));
  return out;
}

inline P1Point choose_pole(const std::vector<Vector3d>& footprint) {
  static const int kCandidates = 317;
  const auto cands = fibonacci_sphere(kCandidates);
  int best = 0;
  double best_score = -1.0;
  for (int i = 0; i < kCandidates; ++i) {
    double score = std::numeric_limits<double>::infinity();
    for (const auto& s : footprint) score = std::min(score, (cands[i] - s).squaredNorm());
    if (score > best_score + 1e-15) {
      best_score = score;
      best = i;
    }
  }
  return p1_from_sphere(cands[best]).canonicalized();
}

}  // namespace detail

// Maximum boundary mismatch chordal(h(-e^{i tau}), phi(h(e^{i tau}))) over
// the 4K collocation nodes.  Fails if the boundary itself crowds the pole;
// the involution images are compared intrinsically and need no chart.
inline double boundary_residual(const DiskSolution& d, const SurfaceSpec& spec,
                                double overflow_gap = 0.05) {
  const auto ev = detail::evaluate_boundary(spec, d);
  if (ev.min_pole_gap < overflow_gap)
    throw ChartOverflow("boundary sample too close to the chart pole");
  return ev.max_mismatch;
}

// ---------------------------------------------------------------------------
// Chart transfer and gauge
// ---------------------------------------------------------------------------

// Re-express the disk in another pole chart.  The map in the new chart is a
// fractional-linear composition, re-expanded from boundary samples; genuine
// holomorphy shows up as an empty negative-frequency spectrum, so any real
// energy there is an error.
inline DiskSolution to_chart(const DiskSolution& d, const Chart& chart,
                             double holomorphy_tol = 1e-8) {
  if (chordal(chart.pole, d.chart.pole) < 1e-15 &&
      herm(chart.pole.rep(), d.chart.pole.rep()).real() > 0.999999)
    return d;
  const int K = d.order();
  const int M = 4 * (K + 1);
  const Mobius mob = chart_transfer(d.chart, chart);
  const auto nodes = detail::unit_nodes(M);
  std::vector<complexd> f(M);
  for (int j = 0; j < M; ++j) f[j] = mob(d.eval_coord(nodes[j]));

  // Full DFT: frequencies -M/2 .. M/2-1.
  std::vector<complexd> hat(M);
  double total = 0.0, negative = 0.0;
  for (int k = 0; k < M; ++k) {
    complexd acc = 0.0;
    for (int j = 0; j < M; ++j) acc += f[j] * std::conj(nodes[(j * k) % M]);
    hat[k] = acc / double(M);
    const int freq = k < M / 2 ? k : k - M;
    total += std::norm(hat[k]);
    if (freq < 0) negative += std::norm(hat[k]);
  }
  if (total > 0.0 && std::sqrt(negative / total) > holomorphy_tol)
    throw HolomorphyLoss("negative-frequency energy discarded by chart transfer");

  DiskSolution out = d;
  out.chart = chart;
  out.coeffs.assign(K + 1, complexd(0.0));
  for (int k = 0; k <= K; ++k) out.coeffs[k] = hat[k];
  return out;
}

// Rotate the disk parameter so c_1 is real and positive; returns the applied
// rotation angle (h_new(zeta) = h_old(zeta e^{i theta})).
inline double gauge_normalize(DiskSolution& d) {
  if (d.coeffs.size() < 2) return 0.0;
  const complexd c1 = d.coeffs[1];
  if (std::abs(c1) < 1e-13) return 0.0;
  const double theta = -std::arg(c1);
  for (int k = 0; k < static_cast<int>(d.coeffs.size()); ++k)
    d.coeffs[k] *= std::polar(1.0, k * theta);
  d.coeffs[1] = std::abs(c1);  // exact by construction
  return theta;
}

// ---------------------------------------------------------------------------
// Damped Gauss-Newton refinement
// ---------------------------------------------------------------------------

namespace detail {

inline void pack(const std::vector<complexd>& c, Eigen::VectorXd& x) {
  x.resize(2 * c.size());
  for (size_t k = 0; k < c.size(); ++k) {
    x[2 * k] = c[k].real();
    x[2 * k + 1] = c[k].imag();
  }
}

inline void unpack(const Eigen::VectorXd& x, std::vector<complexd>& c) {
  c.resize(x.size() / 2);
  for (size_t k = 0; k < c.size(); ++k) c[k] = complexd(x[2 * k], x[2 * k + 1]);
}

// Residual vector over R: boundary match (2 per node), center pin (2), and
// the gauge row Im(c_1 e^{-i phase}).  Phase 0 is the canonical gauge; warm
// continuation passes the current phase of c_1 so refinement never rotates
// the boundary parameterization.
inline Eigen::VectorXd residual_vector(const DiskSolution& d, const BoundaryEval& ev,
                                       const std::vector<complexd>& b,
                                       double gauge_phase = 0.0) {
  const int M = static_cast<int>(ev.s.size());
  Eigen::VectorXd r(2 * M + 3);
  for (int j = 0; j < M; ++j) {
    const complexd diff = ev.s[(j + M / 2) % M] - b[j];
    r[2 * j] = diff.real();
    r[2 * j + 1] = diff.imag();
  }
  const complexd pin = d.coeffs[0] - d.chart.to_coord(d.u0);
  r[2 * M] = pin.real();
  r[2 * M + 1] = pin.imag();
  r[2 * M + 2] =
      d.coeffs.size() > 1 ? (d.coeffs[1] * std::polar(1.0, -gauge_phase)).imag() : 0.0;
  return r;
}

inline std::vector<complexd> phi_coords(const Chart& chart, const BoundaryEval& ev) {
  std::vector<complexd> b(ev.phi_pts.size());
  for (size_t j = 0; j < b.size(); ++j) b[j] = chart.to_coord(ev.phi_pts[j]);
  return b;
}

// 2x2 real blocks of the boundary map's Jacobian: the linear part from the
// antipodal node minus the chained phi Jacobian at each node.
inline Eigen::MatrixXd jacobian(const SurfaceSpec& spec, const DiskSolution& d,
                                const BoundaryEval& ev, double h,
                                double gauge_phase = 0.0) {
  const int M = static_cast<int>(ev.s.size());
  const int n = static_cast<int>(d.coeffs.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * M + 3, 2 * n);
  const auto nodes = unit_nodes(M);
  auto g = [&](complexd s) {
    return d.chart.to_coord(phi_apply(spec, d.chart.from_coord(s)));
  };
  for (int j = 0; j < M; ++j) {
    // Jacobian of g = chart . phi . chart^{-1} at the node value.
    const complexd gx = (g(ev.s[j] + h) - g(ev.s[j] - h)) / (2.0 * h);
    const complexd gy = (g(ev.s[j] + complexd(0, h)) - g(ev.s[j] - complexd(0, h))) / (2.0 * h);
    Eigen::Matrix2d G;
    G << gx.real(), gy.real(), gx.imag(), gy.imag();
    complexd w = 1.0;  // nodes[j]^k
    for (int k = 0; k < n; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;  // (-zeta)^k factor
      Eigen::Matrix2d A;
      A << w.real(), -w.imag(), w.imag(), w.real();
      Eigen::Matrix2d blk = sign * A - G * A;
      J.block<2, 2>(2 * j, 2 * k) = blk;
      w *= nodes[j];
    }
  }
  J(2 * M, 0) = 1.0;
  J(2 * M + 1, 1) = 1.0;
  if (n > 1) {
    J(2 * M + 2, 2) = -std::sin(gauge_phase);
    J(2 * M + 2, 3) = std::cos(gauge_phase);
  }
  return J;
}

}  // namespace detail

// Deterministic normal form: pole chosen by footprint policy, gauge fixed,
// residual recomputed.  Returns the gauge rotation applied (for callers that
// track boundary angles).
inline double canonicalize_disk(const SurfaceSpec& spec, DiskSolution& d,
                                const RefineOptions& opts = {}) {
  const P1Point pole = detail::choose_pole(detail::disk_footprint(d));
  if (chordal(pole, d.chart.pole) > 1e-12) d = to_chart(d, Chart(pole));
  const double theta = gauge_normalize(d);
  d.residual = boundary_residual(d, spec, opts.overflow_gap);
  return theta;
}

// Gauss-Newton with Levenberg damping on the collocated boundary condition,
// against the surface at homotopy scale t.  The chart is re-centered
// whenever the disk or its involution image crowds the current pole.
// Throws NoConvergence if the iteration cap passes without meeting the
// tolerance.
inline DiskSolution newton_refine(const DiskSolution& guess, const SurfaceSpec& base_spec,
                                  double t, const RefineOptions& opts = {}) {
  const SurfaceSpec spec = base_spec.scale() == t ? base_spec : base_spec.with_scale(t);
  DiskSolution d = guess;
  d.spec_scale = spec.scale();
  d.u0 = guess.u0;
  d.p = pi_map(d.u0, d.u0).canonicalized();
  if (d.coeffs.size() < 2) throw InvalidInput("newton_refine: need at least c_0, c_1");

  auto ev = detail::evaluate_boundary(spec, d);
  double lambda = 1e-4;
  double gphase = 0.0;

  // Chart transfers leave the parameterization alone, so re-referencing the
  // relative gauge to the post-transfer c_1 keeps the row consistent.
  auto set_gphase = [&]() {
    if (opts.relative_gauge && d.coeffs.size() > 1 && std::abs(d.coeffs[1]) > 1e-13)
      gphase = std::arg(d.coeffs[1]);
  };

  auto rechart = [&](bool include_phi) {
    auto fp = detail::disk_footprint(d);
    if (include_phi)
      for (const auto& q : ev.phi_pts) fp.push_back(sphere_from_p1(q));
    d = to_chart(d, Chart(detail::choose_pole(fp)));
    ev = detail::evaluate_boundary(spec, d);
    set_gphase();
  };

  if (ev.min_pole_gap < opts.rechart_pole_gap || ev.min_pole_gap_phi < opts.rechart_pole_gap / 2)
    rechart(true);
  if (std::max(ev.max_mismatch, ev.pin_defect) > opts.early_reject)
    throw NoConvergence("initial residual outside the refinement basin");

  set_gphase();
  std::vector<complexd> b = detail::phi_coords(d.chart, ev);
  Eigen::VectorXd r = detail::residual_vector(d, ev, b, gphase);
  double r2 = r.squaredNorm();
  bool canonical = !opts.canonicalize;

  auto refresh = [&]() {
    ev = detail::evaluate_boundary(spec, d);
    b = detail::phi_coords(d.chart, ev);
    r = detail::residual_vector(d, ev, b, gphase);
    r2 = r.squaredNorm();
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (ev.max_mismatch < opts.tol && ev.pin_defect < opts.tol) {
      if (!canonical) {
        // Deterministic pole and gauge; the chart transfer truncates a tiny
        // spectral tail, so convergence is re-checked and polished if needed.
        const P1Point pole = detail::choose_pole(detail::disk_footprint(d));
        if (chordal(pole, d.chart.pole) > 1e-12) d = to_chart(d, Chart(pole));
        gauge_normalize(d);
        canonical = true;
        refresh();
        continue;
      }
      if (!opts.relative_gauge) gauge_normalize(d);
      d.residual = detail::evaluate_boundary(spec, d).max_mismatch;
      return d;
    }
    const Eigen::MatrixXd J = detail::jacobian(spec, d, ev, opts.fd_step, gphase);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd Jtr = J.transpose() * r;
    Eigen::VectorXd x;
    detail::pack(d.coeffs, x);

    bool accepted = false;
    for (int tries = 0; tries < 9; ++tries) {
      Eigen::MatrixXd A = JtJ;
      for (int i = 0; i < A.rows(); ++i)
        A(i, i) += lambda * std::max(JtJ(i, i), 1e-12);
      const Eigen::VectorXd delta = A.ldlt().solve(-Jtr);
      DiskSolution trial = d;
      detail::unpack(x + delta, trial.coeffs);
      auto trial_ev = detail::evaluate_boundary(spec, trial);
      auto trial_b = detail::phi_coords(trial.chart, trial_ev);
      const Eigen::VectorXd trial_r = detail::residual_vector(trial, trial_ev, trial_b, gphase);
      const double trial_r2 = trial_r.squaredNorm();
      if (trial_r2 < r2) {
        d = trial;
        ev = std::move(trial_ev);
        b = std::move(trial_b);
        r = trial_r;
        r2 = trial_r2;
        lambda = std::max(lambda * 0.35, 1e-14);
        accepted = true;
        break;
      }
      lambda *= 8.0;
    }
    if (!accepted) throw NoConvergence("damping exhausted without residual decrease");

    if (ev.min_pole_gap < opts.rechart_pole_gap ||
        ev.min_pole_gap_phi < opts.rechart_pole_gap / 2) {
      rechart(true);
      b = detail::phi_coords(d.chart, ev);
      r = detail::residual_vector(d, ev, b, gphase);
      r2 = r.squaredNorm();
      canonical = !opts.canonicalize;
    }
  }
  throw NoConvergence("iteration cap reached");
}

// Refinement that also enforces the spectral-tail invariant by doubling the
// series order (zero padding) until the last coefficient is negligible.
inline DiskSolution refine_resolved(DiskSolution guess, const SurfaceSpec& spec, double t,
                                    const SolveOptions& sopts) {
  for (;;) {
    DiskSolution d = newton_refine(guess, spec, t, sopts.refine);
    double cmax = 0.0;
    for (const auto& c : d.coeffs) cmax = std::max(cmax, std::abs(c));
    const double tail = std::abs(d.coeffs.back()) / std::max(cmax, 1e-300);
    if (tail < sopts.tail_tol) return d;
    const int K = d.order();
    if (2 * K > sopts.max_K)
      throw ContinuationStuck("spectral tail unresolved at the maximum series order");
    d.coeffs.resize(2 * K + 1, complexd(0.0));
    guess = std::move(d);
  }
}

// ---------------------------------------------------------------------------
// Homotopy continuation in the surface scale
// ---------------------------------------------------------------------------

inline DiskSolution solve_disk(const SurfaceSpec& spec, const P1Point& u0, int K = 64,
                               const SolveOptions& base_opts = {}) {
  SolveOptions opts = base_opts;
  opts.K = K;
  if (opts.K < 16 || opts.K > opts.max_K)
    throw InvalidInput("solve_disk: K out of range");
  if (!check_docility(spec, opts.docility_samples).passed)
    throw DocilityRequired("surface failed the docility check");

  DiskSolution d = round_disk(u0, opts.K);
  if (spec.scale() == 0.0 || spec.field().empty()) {
    d.spec_scale = spec.scale();
    canonicalize_disk(spec, d, opts.refine);
    return d;
  }

  double t = 0.0;
  double h = opts.initial_step;
  std::optional<DiskSolution> prev;
  double t_prev = 0.0;
  while (t < spec.scale()) {
    const double t_next = std::min(t + h, spec.scale());
    DiskSolution guess = d;
    if (prev && prev->chart.pole == d.chart.pole &&
        prev->coeffs.size() == d.coeffs.size() && t_next > t && t > t_prev) {
      const double w = (t_next - t) / (t - t_prev);
      for (size_t k = 0; k < guess.coeffs.size(); ++k)
        guess.coeffs[k] = d.coeffs[k] + w * (d.coeffs[k] - prev->coeffs[k]);
    }
    try {
      DiskSolution next = refine_resolved(std::move(guess), spec, t_next, opts);
      prev = std::move(d);
      t_prev = t;
      d = std::move(next);
      t = t_next;
    } catch (const NoConvergence&) {
      h *= 0.5;
      if (h < opts.min_step)
        throw ContinuationStuck("homotopy step fell below the minimum");
    } catch (const ChartOverflow&) {
      h *= 0.5;
      if (h < opts.min_step)
        throw ContinuationStuck("homotopy step fell below the minimum");
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Comparison helpers
// ---------------------------------------------------------------------------

// Re-express b in a's chart, re-fix the gauge, and report the maximum
// coefficient deviation.  This is the distance "after gauge alignment":
// genuinely equal disks produced through different homotopy paths or charts
// come out identical to roundoff.
inline double gauge_coeff_distance(const DiskSolution& a, const DiskSolution& b) {
  DiskSolution a2 = a, b2 = to_chart(b, a.chart);
  gauge_normalize(a2);
  gauge_normalize(b2);
  const size_t n = std::max(a2.coeffs.size(), b2.coeffs.size());
  double dev = 0.0;
  for (size_t k = 0; k < n; ++k) {
    const complexd ca = k < a2.coeffs.size() ? a2.coeffs[k] : complexd(0.0);
    const complexd cb = k < b2.coeffs.size() ? b2.coeffs[k] : complexd(0.0);
    dev = std::max(dev, std::abs(ca - cb));
  }
  return dev;
}

// Transport a disk to a new center by the minimal sphere rotation; the chart
// construction commutes with rotations, so up to one overall phase the
// coefficients carry over and only the chart pole moves.  Excellent warm
// start for nearby centers.
inline DiskSolution rotate_disk(const DiskSolution& d, const P1Point& new_u0) {
  const Matrix2cd g = rotation_carrying(d.u0, new_u0);
  DiskSolution out = d;
  out.u0 = new_u0.canonicalized();
  out.p = pi_map(out.u0, out.u0).canonicalized();
  const Vector2cd rotated_pole = g * d.chart.pole.rep();
  out.chart = Chart(P1Point(rotated_pole));
  // The stored pole representative differs from the rotated one by a phase
  // e^{i psi}; the chart coordinate picks up e^{-2i psi}.
  complexd corr = herm(rotated_pole, out.chart.pole.rep());
  corr *= corr;
  corr /= std::abs(corr);
  for (auto& c : out.coeffs) c *= corr;
  return out;
}

}  // namespace zoll
