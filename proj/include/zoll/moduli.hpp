#pragma once

// Moduli-level operations: sweeping the disk family over a lattice of
// centers, reconstructing geodesics as point-membership fibers, and the
// Lagrangian verdict for the surface.

#include <cmath>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "disk.hpp"
#include "parallel.hpp"

namespace zoll {

struct GridEntry {
  P1Point u0;
  DiskSolution disk;
};

struct ModuliGrid {
  std::uint64_t spec_hash = 0;
  double scale = 0.0;
  int K = 0;
  std::uint64_t seed = 0;
  std::vector<GridEntry> entries;
};

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
  std::uint64_t seed = 0;
  int workers = 0;  // 0: default_workers()
  SolveOptions solve{};
};

// Solve the disk family over n lattice points.  The first point runs the
// full homotopy; every other point warm-starts from its nearest
// already-solved neighbor by the rotation transport, falling back to the
// full homotopy if the warm refinement fails.  The warm-start tree is fixed
// by geometry alone, so results do not depend on worker count.
inline ModuliGrid sweep(const SurfaceSpec& spec, int n, int K, const SweepOptions& opts = {}) {
  if (n < 16) throw InvalidInput("sweep: need at least 16 lattice points");
  SolveOptions sopts = opts.solve;
  sopts.K = K;
  if (K < 16 || K > sopts.max_K) throw InvalidInput("sweep: K out of range");
  if (!check_docility(spec, sopts.docility_samples).passed)
    throw DocilityRequired("surface failed the docility check");

  const auto points = fibonacci_p1(n, opts.seed);
  std::vector<Vector3d> xyz(n);
  for (int i = 0; i < n; ++i) xyz[i] = sphere_from_p1(points[i]);

  // Processing order: outward from the seed point; parent = nearest earlier
  // point.  Children of one level depend only on completed levels.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = (xyz[a] - xyz[0]).squaredNorm();
    const double db = (xyz[b] - xyz[0]).squaredNorm();
    return da != db ? da < db : a < b;
  });
  std::vector<int> parent(n, -1), level(n, 0);
  for (int oi = 1; oi < n; ++oi) {
    const int i = order[oi];
    double best = std::numeric_limits<double>::infinity();
    for (int oj = 0; oj < oi; ++oj) {
      const int j = order[oj];
      const double dist = (xyz[i] - xyz[j]).squaredNorm();
      if (dist < best) {
        best = dist;
        parent[i] = j;
      }
    }
    level[i] = level[parent[i]] + 1;
  }
  int max_level = 0;
  for (int i = 0; i < n; ++i) max_level = std::max(max_level, level[i]);

  ModuliGrid grid;
  grid.spec_hash = spec_hash(spec);
  grid.scale = spec.scale();
  grid.K = K;
  grid.seed = opts.seed;
  grid.entries.resize(n);
  for (int i = 0; i < n; ++i) grid.entries[i].u0 = points[i].canonicalized();

  auto solve_entry = [&](int i) {
    try {
      if (parent[i] < 0) {
        grid.entries[i].disk = solve_disk(spec, points[i], K, sopts);
        return;
      }
      try {
        DiskSolution guess = rotate_disk(grid.entries[parent[i]].disk, points[i]);
        grid.entries[i].disk = refine_resolved(std::move(guess), spec, spec.scale(), sopts);
      } catch (const NoConvergence&) {
        grid.entries[i].disk = solve_disk(spec, points[i], K, sopts);
      } catch (const ChartOverflow&) {
        grid.entries[i].disk = solve_disk(spec, points[i], K, sopts);
      }
    } catch (const ContinuationStuck& e) {
      throw ContinuationStuck(std::string(e.what()) + " (lattice point " + std::to_string(i) +
                              ")");
    }
  };

  const int workers = opts.workers > 0 ? opts.workers : default_workers();
  std::vector<int> bucket;
  for (int lv = 0; lv <= max_level; ++lv) {
    bucket.clear();
    for (int i = 0; i < n; ++i)
      if (level[i] == lv) bucket.push_back(i);
    parallel_for(bucket.size(), workers, [&](size_t bi) { solve_entry(bucket[bi]); });
  }

  for (const auto& e : grid.entries) {
    const P1Point c = e.disk.center_point();
    if (chordal(pi_map(c, c), e.disk.p) > 1e-8)
      throw NoConvergence("sweep: disk center drifted off its conic point");
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Conic parameterization checks
// ---------------------------------------------------------------------------

struct KappaReport {
  double max_center_dist = 0.0;  // worst chordal(pi(h(0),h(0)), p)
  double min_pairwise_p = 0.0;   // injectivity margin at lattice scale
  bool injective = true;
};

inline KappaReport kappa_report(const ModuliGrid& grid) {
  KappaReport rep;
  rep.min_pairwise_p = std::numeric_limits<double>::infinity();
  std::vector<P2Point> ps;
  ps.reserve(grid.entries.size());
  for (const auto& e : grid.entries) {
    const P1Point c = e.disk.center_point();
    rep.max_center_dist = std::max(rep.max_center_dist, chordal(pi_map(c, c), e.disk.p));
    ps.push_back(e.disk.p);
  }
  for (size_t i = 0; i < ps.size(); ++i)
    for (size_t j = i + 1; j < ps.size(); ++j)
      rep.min_pairwise_p = std::min(rep.min_pairwise_p, chordal(ps[i], ps[j]));
  rep.injective = rep.min_pairwise_p > 1e-6;
  return rep;
}

inline double kappa_check(const ModuliGrid& grid) { return kappa_report(grid).max_center_dist; }

// ---------------------------------------------------------------------------
// Lagrangian verdict
// ---------------------------------------------------------------------------

enum class LagrangianVerdict { lagrangian, not_lagrangian, inconclusive };

struct LagrangianReport {
  double max_im = 0.0;
  double mean_im = 0.0;
  int sample_count = 0;
  LagrangianVerdict verdict = LagrangianVerdict::inconclusive;
};

inline const char* to_string(LagrangianVerdict v) {
  switch (v) {
    case LagrangianVerdict::lagrangian: return "lagrangian";
    case LagrangianVerdict::not_lagrangian: return "not_lagrangian";
    default: return "inconclusive";
  }
}

inline LagrangianReport lagrangian_report(const SurfaceSpec& spec, int m) {
  if (m < 16) throw InvalidInput("lagrangian_report: need at least 16 samples");
  LagrangianReport rep;
  rep.sample_count = m;
  const auto points = fibonacci_p1(m, 0);
  double sum = 0.0;
  for (const auto& u : points) {
    const double v = upsilon_im_abs(embed_frame(spec, u));
    rep.max_im = std::max(rep.max_im, v);
    sum += v;
  }
  rep.mean_im = sum / m;
  rep.verdict = rep.max_im < 1e-7
                    ? LagrangianVerdict::lagrangian
                    : (rep.max_im > 1e-4 ? LagrangianVerdict::not_lagrangian
                                         : LagrangianVerdict::inconclusive);
  return rep;
}

// ---------------------------------------------------------------------------
// Geodesic tracing
// ---------------------------------------------------------------------------

struct GeodesicNode {
  P1Point u0;
  double tau = 0.0;
};

struct Geodesic {
  P1Point z_label;
  std::vector<GeodesicNode> nodes;
  bool closed = false;
  double arclength = 0.0;
};

enum class TraceMode { exact, interpolated };

struct TraceOptions {
  double step = 0.02;
  int max_steps = 10000;
  double closure_tol = 1e-4;
  double min_arclength = 0.1;
  double membership_tol = 1e-8;
  bool reverse = false;
  TraceMode mode = TraceMode::exact;
};

// Inverse-distance coefficient blend of the nearest grid disks, re-expressed
// in a common chart and gauge.  Preview quality only: nothing is re-solved.
inline DiskSolution interpolate_disk(const ModuliGrid& grid, const SurfaceSpec& spec,
                                     const P1Point& u0) {
  if (grid.entries.empty()) throw InvalidInput("interpolate_disk: empty grid");
  const Vector3d x = sphere_from_p1(u0);
  std::vector<std::pair<double, int>> nearest;
  nearest.reserve(grid.entries.size());
  for (size_t i = 0; i < grid.entries.size(); ++i)
    nearest.push_back({(sphere_from_p1(grid.entries[i].u0) - x).squaredNorm(), int(i)});
  std::partial_sort(nearest.begin(), nearest.begin() + std::min<size_t>(4, nearest.size()),
                    nearest.end());
  const int use = int(std::min<size_t>(4, nearest.size()));

  const Chart chart = grid.entries[nearest[0].second].disk.chart;
  DiskSolution out = grid.entries[nearest[0].second].disk;
  out.u0 = u0.canonicalized();
  out.p = pi_map(out.u0, out.u0).canonicalized();
  std::fill(out.coeffs.begin(), out.coeffs.end(), complexd(0.0));
  double wsum = 0.0;
  for (int a = 0; a < use; ++a) {
    const auto& e = grid.entries[nearest[a].second];
    DiskSolution d = to_chart(e.disk, chart);
    gauge_normalize(d);
    const double w = 1.0 / (std::sqrt(nearest[a].first) + 1e-9);
    wsum += w;
    const size_t K = std::min(out.coeffs.size(), d.coeffs.size());
    for (size_t k = 0; k < K; ++k) out.coeffs[k] += w * d.coeffs[k];
  }
  for (auto& c : out.coeffs) c /= wsum;
  // Re-pin the center to the query point; the blend only approximates it.
  out.coeffs[0] = chart.to_coord(out.u0);
  out.residual = boundary_residual(out, spec);
  return out;
}

namespace detail {

// Warm re-solver for membership evaluations along a trace.  Keeps the last
// solution and a frozen Gauss-Newton factorization; small moves converge in
// a couple of cheap residual-only iterations, and the full refiner is the
// fallback whenever the frozen model stops contracting.
class WarmDiskSolver {
 public:
  WarmDiskSolver(const SurfaceSpec& spec, DiskSolution d, double tol)
      : spec_(spec), d_(std::move(d)) {
    opts_.tol = tol;
    opts_.canonicalize = false;
    opts_.relative_gauge = true;
  }

  const DiskSolution& current() const { return d_; }
  const SurfaceSpec& spec() const { return spec_; }

  void move_to(const P1Point& u0) {
    if (chordal(u0, d_.u0) < 1e-15) return;
    // Keep the last converged state if anything below throws: callers retry
    // failed evaluations with smaller steps, and those retries need a clean
    // warm start rather than a half-updated one.
    const DiskSolution saved = d_;
    try {
      d_ = rotate_disk(d_, u0);
      if (frozen_refine()) return;
      d_ = newton_refine(d_, spec_, spec_.scale(), opts_);
      rebuild();
    } catch (...) {
      d_ = saved;
      throw;
    }
  }

 private:
  bool frozen_refine() {
    if (!have_factorization_) {
      auto ev = evaluate_boundary(spec_, d_);
      if (converged(ev)) return true;
      rebuild_from(ev);
    }
    // The gauge row is referenced at the transported phase every call, not at
    // the last rebuild: chart canonicalization has seams where arg(c_1) jumps
    // by a finite angle while the map itself stays continuous, and against a
    // stale reference that jump reads as a huge spurious gauge step (trust
    // region trips, the pinned phase flaps between branches, and membership
    // values pick up enough noise to stall the trace corrector).
    const double g = d_.coeffs.size() > 1 && std::abs(d_.coeffs[1]) > 1e-13
                         ? std::arg(d_.coeffs[1])
                         : gauge_phase_;
    double prev2 = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 8; ++iter) {
      auto ev = evaluate_boundary(spec_, d_);
      if (ev.min_pole_gap < 0.15 || ev.min_pole_gap_phi < 0.1) return false;
      if (converged(ev)) return true;
      const auto b = phi_coords(d_.chart, ev);
      const Eigen::VectorXd r = residual_vector(d_, ev, b, g);
      const double r2 = r.squaredNorm();
      if (r2 > 0.5 * prev2 && iter >= 2) return false;  // stopped contracting
      prev2 = r2;
      const Eigen::VectorXd delta = fact_.solve(-(J_.transpose() * r));
      // Trust region: a step far larger than any warm correction means the
      // frozen model is invalid here (it can jump to a different solution
      // branch); let the damped refiner handle it.
      if (delta.norm() > 0.1) return false;
      Eigen::VectorXd x;
      pack(d_.coeffs, x);
      unpack(x + delta, d_.coeffs);
    }
    return false;
  }

  bool converged(const BoundaryEval& ev) const {
    return ev.max_mismatch < opts_.tol && ev.pin_defect < opts_.tol;
  }

  void rebuild() {
    auto ev = evaluate_boundary(spec_, d_);
    rebuild_from(ev);
  }

  void rebuild_from(const BoundaryEval& ev) {
    gauge_phase_ = d_.coeffs.size() > 1 && std::abs(d_.coeffs[1]) > 1e-13
                       ? std::arg(d_.coeffs[1])
                       : 0.0;
    J_ = jacobian(spec_, d_, ev, opts_.fd_step, gauge_phase_);
    Eigen::MatrixXd A = J_.transpose() * J_;
    for (int i = 0; i < A.rows(); ++i) A(i, i) += 1e-12 * std::max(A(i, i), 1.0);
    fact_ = A.ldlt();
    have_factorization_ = true;
  }

  const SurfaceSpec& spec_;
  DiskSolution d_;
  RefineOptions opts_{};
  Eigen::MatrixXd J_;
  Eigen::LDLT<Eigen::MatrixXd> fact_;
  double gauge_phase_ = 0.0;
  bool have_factorization_ = false;
};

// Membership residual: coordinate of the boundary point at angle tau in the
// chart centered on the label point (so the residual vanishes exactly at
// membership and no chart ever overflows near it).
struct MembershipContext {
  Chart ref;
  P1Point label;

  explicit MembershipContext(const P1Point& u) : ref(antipodal(u)), label(u) {}

  complexd eval(const DiskSolution& d, double tau) const {
    return ref.to_coord(d.boundary_point(tau));
  }
};

// Emit a node with tau re-expressed in the disk's canonical gauge, so saved
// nodes can be checked against independently re-solved disks.
inline GeodesicNode canonical_node(const SurfaceSpec& spec, const DiskSolution& d, double tau) {
  DiskSolution c = d;
  const P1Point pole = choose_pole(disk_footprint(c));
  if (chordal(pole, c.chart.pole) > 1e-12) c = to_chart(c, Chart(pole));
  const double theta = gauge_normalize(c);
  (void)spec;
  double t = tau - theta;
  t = std::remainder(t, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  return GeodesicNode{d.u0, t};
}

}  // namespace detail

// Trace the fiber of disks whose boundary passes through the label point u:
// a curve in (center, boundary angle) space followed by pseudo-arclength
// continuation, each membership evaluation re-solving the disk at the moved
// center from a warm start.
inline Geodesic trace_geodesic(const SurfaceSpec& spec, const ModuliGrid& grid,
                               const P1Point& u, const TraceOptions& opts = {}) {
  if (grid.entries.empty()) throw InvalidInput("trace_geodesic: empty grid");
  if (grid.spec_hash != 0 && grid.spec_hash != spec_hash(spec))
    throw InvalidInput("trace_geodesic: grid was built from a different spec");
  for (const auto& e : grid.entries)
    if (chordal(u, e.disk.chart.pole) <= 1e-3)
      throw InvalidInput("trace_geodesic: label point too close to a grid chart pole");

  const detail::MembershipContext ctx(u);

  // --- seed scan over grid boundaries ---
  struct Seed {
    double dist;
    int entry;
    double tau;
  };
  std::vector<Seed> seeds;
  for (size_t i = 0; i < grid.entries.size(); ++i) {
    const auto& d = grid.entries[i].disk;
    double best = std::numeric_limits<double>::infinity();
    double best_tau = 0.0;
    for (int j = 0; j < 64; ++j) {
      const double tau = 2.0 * kPi * j / 64;
      const double dist = chordal(d.boundary_point(tau), u);
      if (dist < best) {
        best = dist;
        best_tau = tau;
      }
    }
    seeds.push_back({best, int(i), best_tau});
  }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.entry < b.entry;
  });
  if (seeds.empty() || seeds.front().dist > 0.1)
    throw SeedNotFound("no grid boundary passes near the label point");

  const bool interpolated = opts.mode == TraceMode::interpolated;

  // State: sphere point of the center, boundary angle, and the live solver.
  Vector3d x;
  double tau = 0.0;
  std::unique_ptr<detail::WarmDiskSolver> solver;
  auto current_disk = [&]() -> const DiskSolution& { return solver->current(); };
  DiskSolution interp_disk;  // interpolated mode only

  auto evaluate = [&](const Vector3d& xe, double taue) -> complexd {
    const P1Point u0 = p1_from_sphere(xe);
    if (interpolated) {
      if (interp_disk.coeffs.empty() || chordal(u0, interp_disk.u0) > 1e-15)
        interp_disk = interpolate_disk(grid, spec, u0);
      return ctx.eval(interp_disk, taue);
    }
    solver->move_to(u0);
    return ctx.eval(current_disk(), taue);
  };

  // 2x3 Jacobian of the membership residual in (two tangent directions of
  // the center, tau); tau by cheap central differences, center by forward
  // differences with warm re-solves.
  auto jacobian_at = [&](const Vector3d& xe, double taue, const complexd& base,
                         const Vector3d& e1, const Vector3d& e2) {
    Eigen::Matrix<double, 2, 3> J;
    const double h = 1e-5;
    const complexd m1 = evaluate((xe + h * e1).normalized(), taue);
    const complexd m2 = evaluate((xe + h * e2).normalized(), taue);
    // tau derivative: same disk, shifted angle.
    const DiskSolution& dref = interpolated ? interp_disk : current_disk();
    const double ht = 1e-6;
    const complexd mt = (ctx.eval(dref, taue + ht) - ctx.eval(dref, taue - ht)) / (2.0 * ht);
    J(0, 0) = (m1 - base).real() / h;
    J(1, 0) = (m1 - base).imag() / h;
    J(0, 1) = (m2 - base).real() / h;
    J(1, 1) = (m2 - base).imag() / h;
    J(0, 2) = mt.real();
    J(1, 2) = mt.imag();
    return J;
  };

  // --- refine the seed to membership ---
  bool seeded = false;
  for (size_t si = 0; si < std::min<size_t>(3, seeds.size()) && !seeded; ++si) {
    const auto& s = seeds[si];
    x = sphere_from_p1(grid.entries[s.entry].u0);
    tau = s.tau;
    if (!interpolated)
      solver = std::make_unique<detail::WarmDiskSolver>(spec, grid.entries[s.entry].disk,
                                                        opts.membership_tol * 0.1);
    try {
      for (int it = 0; it < 15; ++it) {
        const complexd m = evaluate(x, tau);
        if (std::abs(m) < opts.membership_tol) {
          seeded = true;
          break;
        }
        const auto [e1, e2] = sphere_tangent_basis(x);
        const auto J = jacobian_at(x, tau, m, e1, e2);
        // Minimum-norm Newton step for the underdetermined system.
        const Eigen::Matrix2d JJt = J * J.transpose();
        const Eigen::Vector2d rhs(-m.real(), -m.imag());
        const Eigen::Vector3d delta = J.transpose() * JJt.ldlt().solve(rhs);
        x = (x + delta[0] * e1 + delta[1] * e2).normalized();
        tau += delta[2];
      }
    } catch (const Error&) {
      seeded = false;
    }
  }
  if (!seeded) throw SeedNotFound("seed refinement did not reach membership");

  Geodesic geo;
  geo.z_label = u.canonicalized();

  const Vector3d x_start = x;
  Vector3d prev_dx(0, 0, 0);
  double prev_dtau = 0.0;
  bool have_dir = false;
  double h = opts.step;

  auto push_node = [&](const DiskSolution& d, double taue) {
    geo.nodes.push_back(detail::canonical_node(spec, d, taue));
  };
  evaluate(x, tau);
  push_node(interpolated ? interp_disk : current_disk(), tau);

  for (int step_count = 0; step_count < opts.max_steps; ++step_count) {
    const auto [e1, e2] = sphere_tangent_basis(x);
    const complexd base = evaluate(x, tau);
    const auto J = jacobian_at(x, tau, base, e1, e2);

    // Tangent of the solution curve: null direction of J.
    Eigen::Vector3d r0(J(0, 0), J(0, 1), J(0, 2));
    Eigen::Vector3d r1(J(1, 0), J(1, 1), J(1, 2));
    Eigen::Vector3d t = r0.cross(r1);
    const double tn = t.norm();
    if (tn < 1e-12) throw TraceDiverged("degenerate tangent along the trace");
    t /= tn;
    const Vector3d t_dx = t[0] * e1 + t[1] * e2;
    if (have_dir) {
      if (t_dx.dot(prev_dx) + t[2] * prev_dtau < 0) t = -t;
    } else if (opts.reverse) {
      t = -t;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 3 && !accepted; ++attempt) {
      // Predictor.
      Vector3d xp = (x + h * (t[0] * e1 + t[1] * e2)).normalized();
      double taup = tau + h * t[2];
      // Corrector: membership plus the pseudo-arclength plane through the
      // predictor, solved by chord Newton with the base Jacobian.
      Eigen::Matrix3d A;
      A << J(0, 0), J(0, 1), J(0, 2), J(1, 0), J(1, 1), J(1, 2), t[0], t[1], t[2];
      const Eigen::PartialPivLU<Eigen::Matrix3d> lu(A);
      Vector3d xc = xp;
      double tauc = taup;
      bool ok = false;
      try {
        for (int it = 0; it < 10; ++it) {
          const complexd m = evaluate(xc, tauc);
          if (std::abs(m) < opts.membership_tol) {
            ok = true;
            break;
          }
          // Displacement from the predictor in the base frame.
          const Vector3d dxv = xc - xp;
          const Eigen::Vector3d disp(dxv.dot(e1), dxv.dot(e2), tauc - taup);
          const Eigen::Vector3d rhs(-m.real(), -m.imag(), -t.dot(disp));
          const Eigen::Vector3d delta = lu.solve(rhs);
          xc = (xc + delta[0] * e1 + delta[1] * e2).normalized();
          tauc += delta[2];
        }
      } catch (const Error&) {
        ok = false;
      }
      if (ok) {
        const Vector3d dx = xc - x;
        prev_dx = dx;
        prev_dtau = tauc - tau;
        have_dir = true;
        geo.arclength += 0.5 * dx.norm();  // chordal = half Euclidean chord
        x = xc;
        tau = tauc;
        accepted = true;
      } else {
        h *= 0.5;
      }
    }
    if (!accepted) throw TraceDiverged("corrector failed after step halving");
    h = std::min(opts.step, h * 2.0);

    const DiskSolution& dcur = interpolated ? interp_disk : current_disk();
    push_node(dcur, tau);

    // Closure: near the start after substantial arclength, correct back onto
    // the transverse plane of the start center and compare the result against
    // the first node in the canonical gauge. The internal tau carries whatever
    // phase history warm continuation accumulated, so it cannot enter the
    // closure test; only the center and the canonical angle can.
    const double dist_start = 0.5 * (x - x_start).norm();
    const double txn = std::hypot(t[0], t[1]);
    if (geo.arclength > opts.min_arclength && dist_start < 1.5 * h && step_count >= 5 &&
        txn > 0.1) {
      Eigen::Matrix3d A;
      A << J(0, 0), J(0, 1), J(0, 2), J(1, 0), J(1, 1), J(1, 2), t[0], t[1], 0.0;
      const Eigen::PartialPivLU<Eigen::Matrix3d> lu(A);
      Vector3d xc = x;
      double tauc = tau;
      bool ok = false;
      try {
        for (int it = 0; it < 10; ++it) {
          const complexd m = evaluate(xc, tauc);
          const Vector3d dxv = xc - x_start;
          const double plane = t[0] * dxv.dot(e1) + t[1] * dxv.dot(e2);
          if (std::abs(m) < opts.membership_tol && std::abs(plane) < 1e-10) {
            ok = true;
            break;
          }
          const Eigen::Vector3d rhs(-m.real(), -m.imag(), -plane);
          const Eigen::Vector3d delta = lu.solve(rhs);
          xc = (xc + delta[0] * e1 + delta[1] * e2).normalized();
          tauc += delta[2];
        }
      } catch (const Error&) {
        ok = false;
      }
      if (ok) {
        const double gap = 0.5 * (xc - x_start).norm();
        if (gap < opts.closure_tol) {
          // Refresh the solver at the corrected point, then check the angle
          // in the canonical frame of that disk.
          evaluate(xc, tauc);
          const DiskSolution& dend = interpolated ? interp_disk : current_disk();
          const GeodesicNode end_node = detail::canonical_node(spec, dend, tauc);
          const double tau_gap =
              std::abs(std::remainder(end_node.tau - geo.nodes.front().tau, 2.0 * kPi));
          if (tau_gap < 100.0 * opts.closure_tol) {
            geo.arclength += 0.5 * (xc - x).norm();
            x = xc;
            tau = tauc;
            geo.nodes.push_back(end_node);
            geo.closed = true;
            return geo;
          }
        }
      }
    }
  }
  throw NotClosed("step budget exhausted before closure");
}

}  // namespace zoll
