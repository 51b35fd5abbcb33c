// Command-line front end: spec parsing, command dispatch, persistence, and
// plot-data emission.  Exit codes: 0 success, 2 docility failure, 3 solver
// failure, 4 invalid input.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <zoll/io.hpp>
#include <zoll/zoll.hpp>

namespace fs = std::filesystem;
using namespace zoll;

namespace {

struct RunConfig {
  std::string command;
  std::string spec_path;
  std::string grid_path;
  std::string output_dir = ".";
  std::string u0_text;
  std::string z_text;
  int K = 64;
  int n = 400;
  int m = 1000;
  int samples = 400;
  std::uint64_t seed = 0;
  int workers = 1;
  int max_steps = 10000;
  double tol = 1e-9;
  double tail_tol = 1e-8;
  double step = 0.02;
  double closure_tol = 1e-4;
  double membership_tol = 1e-8;
  double min_arclength = 0.1;
  bool reverse = false;
  bool interpolated = false;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return 4;
    case ErrorKind::docility_required: return 2;
    default: return 3;
  }
}

P1Point parse_point(const std::string& text) {
  const auto semi = text.find(';');
  if (semi == std::string::npos)
    throw InvalidInput("point must be re,im;re,im: " + text);
  return P1Point(io::parse_complex(text.substr(0, semi)),
                 io::parse_complex(text.substr(semi + 1)));
}

void write_error_record(const RunConfig& cfg, const Error& e) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  std::ofstream f(fs::path(cfg.output_dir) / "error.txt");
  if (!f) return;
  f << "zoll-error v1\n";
  f << "command " << cfg.command << "\n";
  f << "kind " << to_string(e.kind()) << "\n";
  f << "message " << e.what() << "\n";
}

void save_boundary_polyline(const DiskSolution& d, const std::string& path, int n = 256) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot open for writing: " + path);
  f << "# zoll-polyline v1\n";
  f << "# columns: x y z\n";
  for (int j = 0; j <= n; ++j) {
    const Vector3d x = sphere_from_p1(d.boundary_point(2.0 * kPi * j / n));
    f << io::fmt_double(x[0]) << " " << io::fmt_double(x[1]) << " " << io::fmt_double(x[2])
      << "\n";
  }
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions opts;
  opts.K = cfg.K;
  opts.tail_tol = cfg.tail_tol;
  opts.docility_samples = cfg.samples;
  opts.refine.tol = cfg.tol;
  return opts;
}

int run_check_docility(const RunConfig& cfg, const SurfaceSpec& spec) {
  const DocilityReport rep = check_docility_sampled(spec, cfg.samples);
  io::save_docility(rep, (fs::path(cfg.output_dir) / "docility.txt").string());
  std::printf(
      "docility passed=%d fixed_point_gap=%.6g orientation_det=%.6g involution_defect=%.6g\n",
      int(rep.passed), rep.min_fixed_point_gap, rep.min_orientation_det,
      rep.max_involution_defect);
  return rep.passed ? 0 : 2;
}

int run_solve_disk(const RunConfig& cfg, const SurfaceSpec& spec) {
  const P1Point u0 = parse_point(cfg.u0_text);
  const DiskSolution d = solve_disk(spec, u0, cfg.K, solve_options(cfg));
  io::save_disk(d, spec_hash(spec), (fs::path(cfg.output_dir) / "disk.txt").string());
  save_boundary_polyline(d, (fs::path(cfg.output_dir) / "boundary.txt").string());
  std::printf("disk K=%d residual=%.6g chart_gap=%.6g\n", d.order(), d.residual,
              chordal(d.u0, d.chart.pole));
  return 0;
}

int run_sweep(const RunConfig& cfg, const SurfaceSpec& spec) {
  SweepOptions opts;
  opts.seed = cfg.seed;
  opts.workers = cfg.workers;
  opts.solve = solve_options(cfg);
  const ModuliGrid grid = sweep(spec, cfg.n, cfg.K, opts);
  io::save_grid(grid, (fs::path(cfg.output_dir) / "grid").string());
  double max_residual = 0.0;
  for (const auto& e : grid.entries) max_residual = std::max(max_residual, e.disk.residual);
  const KappaReport kr = kappa_report(grid);
  std::printf("sweep entries=%zu K=%d max_residual=%.6g kappa=%.6g injective=%d\n",
              grid.entries.size(), grid.K, max_residual, kr.max_center_dist,
              int(kr.injective));
  return 0;
}

int run_geodesic(const RunConfig& cfg, const SurfaceSpec& spec) {
  const P1Point z = parse_point(cfg.z_text);
  ModuliGrid grid;
  if (!cfg.grid_path.empty()) {
    grid = io::load_grid(cfg.grid_path);
  } else {
    SweepOptions opts;
    opts.seed = cfg.seed;
    opts.workers = cfg.workers;
    opts.solve = solve_options(cfg);
    grid = sweep(spec, cfg.n, cfg.K, opts);
  }
  TraceOptions topts;
  topts.step = cfg.step;
  topts.max_steps = cfg.max_steps;
  topts.closure_tol = cfg.closure_tol;
  topts.membership_tol = cfg.membership_tol;
  topts.min_arclength = cfg.min_arclength;
  topts.reverse = cfg.reverse;
  topts.mode = cfg.interpolated ? TraceMode::interpolated : TraceMode::exact;
  const Geodesic geo = trace_geodesic(spec, grid, z, topts);
  io::save_geodesic(geo, (fs::path(cfg.output_dir) / "geodesic.txt").string());
  std::printf("geodesic closed=%d nodes=%zu arclength=%.6g\n", int(geo.closed),
              geo.nodes.size(), geo.arclength);
  return 0;
}

int run_lagrangian(const RunConfig& cfg, const SurfaceSpec& spec) {
  const LagrangianReport rep = lagrangian_report(spec, cfg.m);
  io::save_lagrangian(rep, (fs::path(cfg.output_dir) / "lagrangian.txt").string());
  std::printf("lagrangian verdict=%s max_im=%.6g mean_im=%.6g samples=%d\n",
              to_string(rep.verdict), rep.max_im, rep.mean_im, rep.sample_count);
  return 0;
}

int run_diagnostics(const RunConfig& cfg, const SurfaceSpec& spec) {
  const P1Point u0 = parse_point(cfg.u0_text);
  const DiskSolution d = solve_disk(spec, u0, cfg.K, solve_options(cfg));
  const DiskDiagnostics dg = disk_diagnostics(d, spec);
  io::save_diagnostics(dg, (fs::path(cfg.output_dir) / "diagnostics.txt").string());
  save_boundary_polyline(d, (fs::path(cfg.output_dir) / "boundary.txt").string());
  std::printf(
      "diagnostics winding=%d normal=%d total=%d lift_area=%.9g half_area=%.9g "
      "diagonal_gap=%.6g residual=%.6g\n",
      dg.lift_winding, dg.normal_maslov, dg.total_maslov, dg.lift_area, dg.half_area,
      dg.diagonal_gap, dg.residual);
  return 0;
}

int dispatch(const RunConfig& cfg) {
  if (cfg.K < 16 || cfg.K > 512) throw InvalidInput("K must be in [16, 512]");
  if (cfg.n < 16) throw InvalidInput("n must be at least 16");
  if (cfg.m < 16) throw InvalidInput("m must be at least 16");
  if (cfg.workers < 1) throw InvalidInput("workers must be at least 1");
  fs::create_directories(cfg.output_dir);

  const SurfaceSpec spec = io::load_spec(cfg.spec_path);
  if (cfg.command == "check-docility") return run_check_docility(cfg, spec);
  if (cfg.command == "solve-disk") return run_solve_disk(cfg, spec);
  if (cfg.command == "sweep") return run_sweep(cfg, spec);
  if (cfg.command == "geodesic") return run_geodesic(cfg, spec);
  if (cfg.command == "lagrangian") return run_lagrangian(cfg, spec);
  if (cfg.command == "diagnostics") return run_diagnostics(cfg, spec);
  throw InvalidInput("unknown command: " + cfg.command);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Holomorphic disk families over docile surfaces: solver and moduli tools"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", cfg.spec_path, "surface spec file")->required();
    sub->add_option("--out", cfg.output_dir, "output directory");
    sub->add_option("--K", cfg.K, "boundary Fourier order, in [16, 512]");
    sub->add_option("--tol", cfg.tol, "boundary residual tolerance");
    sub->add_option("--tail-tol", cfg.tail_tol, "relative coefficient tail tolerance");
    sub->add_option("--samples", cfg.samples, "docility sample count");
    sub->add_option("--workers", cfg.workers, "worker threads (>= 1)");
    sub->add_option("--seed", cfg.seed, "lattice rotation seed");
  };

  add_common(app.add_subcommand("check-docility", "certify the surface"));
  auto* sd = app.add_subcommand("solve-disk", "solve one boundary disk");
  add_common(sd);
  sd->add_option("--u0", cfg.u0_text, "disk center as re,im;re,im")->required();
  auto* sw = app.add_subcommand("sweep", "solve the disk family over a lattice");
  add_common(sw);
  sw->add_option("--n", cfg.n, "lattice point count (>= 16)");
  auto* ge = app.add_subcommand("geodesic", "trace the fiber through a surface point");
  add_common(ge);
  ge->add_option("--z", cfg.z_text, "label point as re,im;re,im")->required();
  ge->add_option("--n", cfg.n, "lattice point count for the internal sweep");
  ge->add_option("--grid", cfg.grid_path, "reuse a saved sweep directory");
  ge->add_option("--step", cfg.step, "pseudo-arclength step");
  ge->add_option("--max-steps", cfg.max_steps, "step budget");
  ge->add_option("--closure-tol", cfg.closure_tol, "closure gap tolerance");
  ge->add_option("--membership-tol", cfg.membership_tol, "membership residual tolerance");
  ge->add_option("--min-arclength", cfg.min_arclength, "closure arming length");
  ge->add_flag("--reverse", cfg.reverse, "trace in the opposite direction");
  ge->add_flag("--interpolated", cfg.interpolated,
               "preview mode: interpolate the grid instead of re-solving");
  auto* la = app.add_subcommand("lagrangian", "sampled Lagrangian verdict");
  add_common(la);
  la->add_option("--m", cfg.m, "sample count (>= 16)");
  auto* dg = app.add_subcommand("diagnostics", "winding, areas, and gaps of one disk");
  add_common(dg);
  dg->add_option("--u0", cfg.u0_text, "disk center as re,im;re,im")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  if (const char* env = std::getenv("ZOLL_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) cfg.workers = w;
  }

  try {
    return dispatch(cfg);
  } catch (const Error& e) {
    write_error_record(cfg, e);
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  }
}
