#pragma once

// Text persistence: surface specs, disk solutions, moduli grids, geodesics,
// and small report records.  Formats are versioned, human-readable, and
// carry 17 significant digits so reloaded solutions reproduce residuals to
// roundoff.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "disk_diagnostics.hpp"
#include "moduli.hpp"

namespace zoll {
namespace io {

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string fmt_complex(complexd z) {
  return fmt_double(z.real()) + "," + fmt_double(z.imag());
}

inline double parse_double(const std::string& tok) {
  try {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw InvalidInput("trailing characters in number: " + tok);
    return v;
  } catch (const std::logic_error&) {
    throw InvalidInput("malformed number: " + tok);
  }
}

inline complexd parse_complex(const std::string& tok) {
  const auto comma = tok.find(',');
  if (comma == std::string::npos)
    throw InvalidInput("complex number must be re,im: " + tok);
  return complexd(parse_double(tok.substr(0, comma)), parse_double(tok.substr(comma + 1)));
}

namespace detail {

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open for reading: " + path);
  return f;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot open for writing: " + path);
  return f;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016" PRIx64, h);
  return buf;
}

inline std::uint64_t parse_hash(const std::string& tok) {
  try {
    return std::stoull(tok, nullptr, 0);
  } catch (const std::logic_error&) {
    throw InvalidInput("malformed hash: " + tok);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Surface spec files
// ---------------------------------------------------------------------------

inline void save_spec(const SurfaceSpec& spec, const std::string& path) {
  auto f = detail::open_out(path);
  f << "zoll-surface v1\n";
  f << "degree " << spec.field().degree() << "\n";
  f << "scale " << fmt_double(spec.scale()) << "\n";
  f << "flow_steps " << spec.flow_steps() << "\n";
  f << "terms " << spec.field().terms().size() << "\n";
  for (const auto& t : spec.field().terms()) {
    f << t.exponents[0] << " " << t.exponents[1] << " " << t.exponents[2];
    for (int i = 0; i < 3; ++i) f << " " << fmt_double(t.coeff[i]);
    f << "\n";
  }
  const auto& th = spec.thresholds();
  f << "thresholds " << fmt_double(th.fixed_point_gap) << " "
    << fmt_double(th.orientation_margin) << " " << fmt_double(th.involution_defect) << " "
    << fmt_double(th.totally_real_det) << " " << fmt_double(th.conic_gap) << " "
    << fmt_double(th.transversality_det) << "\n";
}

inline SurfaceSpec load_spec(const std::string& path) {
  auto f = detail::open_in(path);
  std::string line;
  if (!std::getline(f, line) || line != "zoll-surface v1")
    throw InvalidInput("not a zoll-surface v1 file: " + path);

  int degree = -1, flow_steps = 64, n_terms = -1;
  double scale = 0.0;
  std::vector<FieldTerm> terms;
  DocilityThresholds th;
  bool have_thresholds = false;

  while (std::getline(f, line)) {
    const auto tok = detail::tokens(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "degree" && tok.size() == 2) {
      degree = int(parse_double(tok[1]));
    } else if (tok[0] == "scale" && tok.size() == 2) {
      scale = parse_double(tok[1]);
    } else if (tok[0] == "flow_steps" && tok.size() == 2) {
      flow_steps = int(parse_double(tok[1]));
    } else if (tok[0] == "terms" && tok.size() == 2) {
      n_terms = int(parse_double(tok[1]));
      for (int i = 0; i < n_terms; ++i) {
        if (!std::getline(f, line)) throw InvalidInput("truncated term list in " + path);
        const auto tt = detail::tokens(line);
        if (tt.size() != 6) throw InvalidInput("term line needs 6 fields: " + line);
        FieldTerm term;
        for (int j = 0; j < 3; ++j) term.exponents[j] = int(parse_double(tt[j]));
        term.coeff = Vector3d(parse_double(tt[3]), parse_double(tt[4]), parse_double(tt[5]));
        terms.push_back(term);
      }
    } else if (tok[0] == "thresholds" && tok.size() == 7) {
      th.fixed_point_gap = parse_double(tok[1]);
      th.orientation_margin = parse_double(tok[2]);
      th.involution_defect = parse_double(tok[3]);
      th.totally_real_det = parse_double(tok[4]);
      th.conic_gap = parse_double(tok[5]);
      th.transversality_det = parse_double(tok[6]);
      have_thresholds = true;
    } else {
      throw InvalidInput("unrecognized spec line: " + line);
    }
  }
  if (n_terms < 0) throw InvalidInput("spec file missing terms: " + path);

  SphereField field(terms);
  if (degree >= 0 && field.degree() != degree && !(terms.empty() && degree == 0))
    throw InvalidInput("declared degree disagrees with the term list in " + path);
  return have_thresholds ? SurfaceSpec(field, scale, flow_steps, th)
                         : SurfaceSpec(field, scale, flow_steps);
}

// ---------------------------------------------------------------------------
// Disk files
// ---------------------------------------------------------------------------

inline void save_disk(const DiskSolution& d, std::uint64_t hash, const std::string& path) {
  auto f = detail::open_out(path);
  f << "zoll-disk v1\n";
  f << "spec_hash " << detail::hash_hex(hash) << "\n";
  f << "scale " << fmt_double(d.spec_scale) << "\n";
  f << "u0 " << fmt_complex(d.u0[0]) << " " << fmt_complex(d.u0[1]) << "\n";
  f << "p " << fmt_complex(d.p[0]) << " " << fmt_complex(d.p[1]) << " " << fmt_complex(d.p[2])
    << "\n";
  f << "chart_pole " << fmt_complex(d.chart.pole[0]) << " " << fmt_complex(d.chart.pole[1])
    << "\n";
  f << "K " << d.order() << "\n";
  f << "coeffs " << d.coeffs.size() << "\n";
  for (const auto& c : d.coeffs) f << fmt_complex(c) << "\n";
  f << "residual " << fmt_double(d.residual) << "\n";
}

struct LoadedDisk {
  DiskSolution disk;
  std::uint64_t spec_hash = 0;
};

inline LoadedDisk load_disk(const std::string& path) {
  auto f = detail::open_in(path);
  std::string line;
  if (!std::getline(f, line) || line != "zoll-disk v1")
    throw InvalidInput("not a zoll-disk v1 file: " + path);
  LoadedDisk out;
  DiskSolution& d = out.disk;
  int declared_K = -1;
  while (std::getline(f, line)) {
    const auto tok = detail::tokens(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "spec_hash" && tok.size() == 2) {
      out.spec_hash = detail::parse_hash(tok[1]);
    } else if (tok[0] == "scale" && tok.size() == 2) {
      d.spec_scale = parse_double(tok[1]);
    } else if (tok[0] == "u0" && tok.size() == 3) {
      d.u0 = P1Point(parse_complex(tok[1]), parse_complex(tok[2]));
    } else if (tok[0] == "p" && tok.size() == 4) {
      d.p = P2Point(parse_complex(tok[1]), parse_complex(tok[2]), parse_complex(tok[3]));
    } else if (tok[0] == "chart_pole" && tok.size() == 3) {
      d.chart = Chart(P1Point(parse_complex(tok[1]), parse_complex(tok[2])));
    } else if (tok[0] == "K" && tok.size() == 2) {
      declared_K = int(parse_double(tok[1]));
    } else if (tok[0] == "coeffs" && tok.size() == 2) {
      const int n = int(parse_double(tok[1]));
      d.coeffs.clear();
      for (int i = 0; i < n; ++i) {
        if (!std::getline(f, line)) throw InvalidInput("truncated coefficients in " + path);
        d.coeffs.push_back(parse_complex(line));
      }
    } else if (tok[0] == "residual" && tok.size() == 2) {
      d.residual = parse_double(tok[1]);
    } else {
      throw InvalidInput("unrecognized disk line: " + line);
    }
  }
  if (d.coeffs.empty()) throw InvalidInput("disk file has no coefficients: " + path);
  if (declared_K >= 0 && declared_K != d.order())
    throw InvalidInput("declared K disagrees with coefficient count in " + path);
  return out;
}

// ---------------------------------------------------------------------------
// Moduli grids: a directory of disk files plus an index
// ---------------------------------------------------------------------------

inline std::string grid_entry_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "disk_%05d.txt", i);
  return buf;
}

inline void save_grid(const ModuliGrid& grid, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto f = detail::open_out((fs::path(dir) / "index.txt").string());
  f << "zoll-grid v1\n";
  f << "spec_hash " << detail::hash_hex(grid.spec_hash) << "\n";
  f << "scale " << fmt_double(grid.scale) << "\n";
  f << "K " << grid.K << "\n";
  f << "seed " << grid.seed << "\n";
  f << "n " << grid.entries.size() << "\n";
  for (size_t i = 0; i < grid.entries.size(); ++i) {
    const std::string name = grid_entry_name(int(i));
    f << "entry " << i << " " << name << "\n";
    save_disk(grid.entries[i].disk, grid.spec_hash, (fs::path(dir) / name).string());
  }
}

inline ModuliGrid load_grid(const std::string& dir) {
  namespace fs = std::filesystem;
  auto f = detail::open_in((fs::path(dir) / "index.txt").string());
  std::string line;
  if (!std::getline(f, line) || line != "zoll-grid v1")
    throw InvalidInput("not a zoll-grid v1 index: " + dir);
  ModuliGrid grid;
  size_t n = 0;
  while (std::getline(f, line)) {
    const auto tok = detail::tokens(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "spec_hash" && tok.size() == 2) {
      grid.spec_hash = detail::parse_hash(tok[1]);
    } else if (tok[0] == "scale" && tok.size() == 2) {
      grid.scale = parse_double(tok[1]);
    } else if (tok[0] == "K" && tok.size() == 2) {
      grid.K = int(parse_double(tok[1]));
    } else if (tok[0] == "seed" && tok.size() == 2) {
      grid.seed = detail::parse_hash(tok[1]);
    } else if (tok[0] == "n" && tok.size() == 2) {
      n = size_t(parse_double(tok[1]));
    } else if (tok[0] == "entry" && tok.size() == 3) {
      const LoadedDisk ld = load_disk((fs::path(dir) / tok[2]).string());
      if (ld.spec_hash != grid.spec_hash)
        throw InvalidInput("grid entry hash mismatch: " + tok[2]);
      grid.entries.push_back(GridEntry{ld.disk.u0, ld.disk});
    } else {
      throw InvalidInput("unrecognized grid index line: " + line);
    }
  }
  if (grid.entries.size() != n)
    throw InvalidInput("grid index declared " + std::to_string(n) + " entries, found " +
                       std::to_string(grid.entries.size()));
  return grid;
}

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

inline void save_geodesic(const Geodesic& g, const std::string& path) {
  auto f = detail::open_out(path);
  f << "# zoll-geodesic v1\n";
  f << "# z_label " << fmt_complex(g.z_label[0]) << " " << fmt_complex(g.z_label[1]) << "\n";
  f << "# closed " << (g.closed ? 1 : 0) << "\n";
  f << "# arclength " << fmt_double(g.arclength) << "\n";
  f << "# columns: u0_c1 u0_c2 tau x y z\n";
  for (const auto& node : g.nodes) {
    const Vector3d x = sphere_from_p1(node.u0);
    f << fmt_complex(node.u0[0]) << " " << fmt_complex(node.u0[1]) << " "
      << fmt_double(node.tau) << " " << fmt_double(x[0]) << " " << fmt_double(x[1]) << " "
      << fmt_double(x[2]) << "\n";
  }
}

inline Geodesic load_geodesic(const std::string& path) {
  auto f = detail::open_in(path);
  std::string line;
  if (!std::getline(f, line) || line != "# zoll-geodesic v1")
    throw InvalidInput("not a zoll-geodesic v1 file: " + path);
  Geodesic g;
  while (std::getline(f, line)) {
    auto tok = detail::tokens(line);
    if (tok.empty()) continue;
    if (tok[0] == "#") {
      if (tok.size() >= 4 && tok[1] == "z_label")
        g.z_label = P1Point(parse_complex(tok[2]), parse_complex(tok[3]));
      else if (tok.size() >= 3 && tok[1] == "closed")
        g.closed = parse_double(tok[2]) != 0.0;
      else if (tok.size() >= 3 && tok[1] == "arclength")
        g.arclength = parse_double(tok[2]);
      continue;
    }
    if (tok.size() != 6) throw InvalidInput("geodesic node line needs 6 fields: " + line);
    GeodesicNode node;
    node.u0 = P1Point(parse_complex(tok[0]), parse_complex(tok[1]));
    node.tau = parse_double(tok[2]);
    g.nodes.push_back(node);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Report records
// ---------------------------------------------------------------------------

inline void save_docility(const DocilityReport& rep, const std::string& path) {
  auto f = detail::open_out(path);
  f << "zoll-docility v1\n";
  f << "passed " << (rep.passed ? 1 : 0) << "\n";
  f << "min_fixed_point_gap " << fmt_double(rep.min_fixed_point_gap) << "\n";
  f << "min_orientation_det " << fmt_double(rep.min_orientation_det) << "\n";
  f << "max_involution_defect " << fmt_double(rep.max_involution_defect) << "\n";
  if (rep.min_totally_real_det)
    f << "min_totally_real_det " << fmt_double(*rep.min_totally_real_det) << "\n";
  if (rep.min_conic_gap) f << "min_conic_gap " << fmt_double(*rep.min_conic_gap) << "\n";
  if (rep.min_transversality_det)
    f << "min_transversality_det " << fmt_double(*rep.min_transversality_det) << "\n";
}

inline void save_lagrangian(const LagrangianReport& rep, const std::string& path) {
  auto f = detail::open_out(path);
  f << "zoll-lagrangian v1\n";
  f << "verdict " << to_string(rep.verdict) << "\n";
  f << "max_im " << fmt_double(rep.max_im) << "\n";
  f << "mean_im " << fmt_double(rep.mean_im) << "\n";
  f << "sample_count " << rep.sample_count << "\n";
}

inline void save_diagnostics(const DiskDiagnostics& dg, const std::string& path) {
  auto f = detail::open_out(path);
  f << "zoll-diagnostics v1\n";
  f << "residual " << fmt_double(dg.residual) << "\n";
  f << "lift_winding " << dg.lift_winding << "\n";
  f << "normal_maslov " << dg.normal_maslov << "\n";
  f << "total_maslov " << dg.total_maslov << "\n";
  f << "lift_area " << fmt_double(dg.lift_area) << "\n";
  f << "half_area " << fmt_double(dg.half_area) << "\n";
  f << "diagonal_gap " << fmt_double(dg.diagonal_gap) << "\n";
  f << "boundary_injectivity_gap " << fmt_double(dg.boundary_injectivity_gap) << "\n";
}

}  // namespace io
}  // namespace zoll
