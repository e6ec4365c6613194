#pragma once

// Result files: result.json, field.csv ("r,z,u" or "r,u" when k = N,
// z-major then r), trace.csv ("iter,J,residual,dt"), and JSON/CSV views of
// the analysis reports. CSV reals use %.17g.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cylmin/analysis.hpp"
#include "cylmin/config.hpp"
#include "cylmin/errors.hpp"
#include "cylmin/grid.hpp"
#include "cylmin/model.hpp"
#include "cylmin/solver.hpp"

namespace cylmin {

using json = nlohmann::ordered_json;

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

/// NaN and infinities have no JSON literal; they become null.
inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace detail

inline json to_json(const EnergyBreakdown& e) {
  return {{"kinetic", detail::num(e.kinetic)},     {"potential", detail::num(e.potential)},
          {"nonlinear", detail::num(e.nonlinear)}, {"total", detail::num(e.total)},
          {"c_norm_sq", detail::num(e.c_norm_sq)}, {"vortex", detail::num(e.vortex)}};
}

inline json to_json(const SolveResult& r, double rho) {
  return {{"rho", detail::num(rho)},
          {"lambda", detail::num(r.lambda)},
          {"residual", detail::num(r.residual)},
          {"energy", to_json(r.breakdown)},
          {"iters", r.iters},
          {"converged", r.converged},
          {"status", r.status}};
}

inline std::string field_csv(const Field& u) {
  const Grid& g = u.grid();
  std::ostringstream out;
  out << (g.has_z() ? "r,z,u\n" : "r,u\n");
  for (int j = 0; j < g.n_z(); ++j)
    for (int i = 0; i < g.n_r(); ++i) {
      out << detail::fmt17(g.r(i)) << ',';
      if (g.has_z()) out << detail::fmt17(g.z(j)) << ',';
      out << detail::fmt17(u.at(i, j)) << '\n';
    }
  return out.str();
}

inline std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "iter,J,residual,dt\n";
  for (const auto& t : trace)
    out << t.iter << ',' << detail::fmt17(t.J) << ',' << detail::fmt17(t.residual) << ',' << detail::fmt17(t.dt)
        << '\n';
  return out.str();
}

struct Formats {
  bool json = true;
  bool csv = true;
};

/// Writes result.json (json) and field.csv + trace.csv (csv) into dir.
inline std::vector<std::filesystem::path> export_solution(const SolveResult& r, double rho,
                                                          const std::filesystem::path& dir, Formats formats) {
  detail::ensure_dir(dir);
  std::vector<std::filesystem::path> files;
  if (formats.json) {
    files.push_back(dir / "result.json");
    detail::write_text(files.back(), to_json(r, rho).dump(2) + "\n");
  }
  if (formats.csv) {
    files.push_back(dir / "field.csv");
    detail::write_text(files.back(), field_csv(r.field));
    files.push_back(dir / "trace.csv");
    detail::write_text(files.back(), trace_csv(r.trace));
  }
  return files;
}

/// Reads a field.csv written for the same grid.
inline Field load_field_csv(const GridPtr& grid, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::string line;
  const std::string expect = grid->has_z() ? "r,z,u" : "r,u";
  if (!std::getline(in, line) || line != expect)
    throw ParseError("'" + path.string() + "': expected header '" + expect + "'");
  std::vector<double> values;
  values.reserve(grid->size());
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto pos = line.rfind(',');
    double v = 0.0;
    if (pos == std::string::npos || !detail::to_double(line.substr(pos + 1), v))
      throw ParseError("'" + path.string() + "' row " + std::to_string(row) + ": malformed value");
    values.push_back(v);
  }
  if (values.size() != grid->size())
    throw ParseError("'" + path.string() + "': " + std::to_string(values.size()) + " values for a grid of " +
                     std::to_string(grid->size()) + " nodes");
  return Field(grid, std::move(values));
}

// ---------------------------------------------------------------------------
// Reports.

inline json to_json(const HypothesisReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json j = {{"name", c.name}, {"holds", c.holds}, {"detail", c.detail}};
    if (c.witness) j["witness"] = detail::num(*c.witness);
    checks.push_back(j);
  }
  return {{"all_hold", rep.all_hold()}, {"checks", checks}};
}

inline json to_json(const TrialSlopes& s) {
  return {{"mass", detail::num(s.mass)},
          {"kinetic", detail::num(s.kinetic)},
          {"kinetic_radial", detail::num(s.kinetic_radial)},
          {"kinetic_axial", detail::num(s.kinetic_axial)},
          {"potential", detail::num(s.potential)},
          {"nonlinear", detail::num(s.nonlinear)}};
}

inline json to_json(const CertifyReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"R", r.R},
                    {"mass", detail::num(r.mass)},
                    {"kinetic", detail::num(r.kinetic)},
                    {"kinetic_radial", detail::num(r.kinetic_radial)},
                    {"kinetic_axial", detail::num(r.kinetic_axial)},
                    {"potential", detail::num(r.potential)},
                    {"nonlinear", detail::num(r.nonlinear)},
                    {"J", detail::num(r.J)}});
  return {{"s0", rep.s0},
          {"found", rep.found},
          {"R_witness", detail::num(rep.R_witness)},
          {"rho0_estimate", detail::num(rep.rho0_estimate)},
          {"slopes", to_json(rep.slopes)},
          {"rows", rows}};
}

inline std::string certify_csv(const CertifyReport& rep) {
  std::ostringstream out;
  out << "R,mass,kinetic,kinetic_radial,kinetic_axial,potential,nonlinear,J\n";
  for (const auto& r : rep.rows)
    out << detail::fmt17(r.R) << ',' << detail::fmt17(r.mass) << ',' << detail::fmt17(r.kinetic) << ','
        << detail::fmt17(r.kinetic_radial) << ',' << detail::fmt17(r.kinetic_axial) << ','
        << detail::fmt17(r.potential) << ',' << detail::fmt17(r.nonlinear) << ',' << detail::fmt17(r.J) << '\n';
  return out.str();
}

inline json to_json(const SubadditivityReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"mu", r.mu},
                    {"mu_complement", r.mu_complement},
                    {"I_mu", detail::num(r.I_mu)},
                    {"I_sqrt", detail::num(r.I_sqrt)},
                    {"I_rho", detail::num(r.I_rho)},
                    {"margin", detail::num(r.margin)},
                    {"converged", r.converged},
                    {"strict", r.strict}});
  return {{"rho", rep.rho},
          {"I_rho", detail::num(rep.I_rho)},
          {"rho_converged", rep.rho_converged},
          {"margin_floor", detail::num(rep.margin_floor)},
          {"all_strict", rep.all_strict},
          {"any_unconverged", rep.any_unconverged},
          {"max_norm_sq_error", detail::num(rep.max_norm_sq_error)},
          {"max_step_dJ", detail::num(rep.max_step_dJ)},
          {"max_residual_rel", detail::num(rep.max_residual_rel)},
          {"rows", rows}};
}

inline std::string subadditivity_csv(const SubadditivityReport& rep) {
  std::ostringstream out;
  out << "mu,I_mu,I_sqrt,I_rho,margin,converged\n";
  for (const auto& r : rep.rows)
    out << detail::fmt17(r.mu) << ',' << detail::fmt17(r.I_mu) << ',' << detail::fmt17(r.I_sqrt) << ','
        << detail::fmt17(r.I_rho) << ',' << detail::fmt17(r.margin) << ',' << (r.converged ? 1 : 0) << '\n';
  return out.str();
}

inline json to_json(const std::vector<BrezisLiebRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"separation", r.separation}, {"shift_cells", r.shift_cells}, {"defect", detail::num(r.defect)}});
  return out;
}

inline std::string brezis_lieb_csv(const std::vector<BrezisLiebRow>& rows) {
  std::ostringstream out;
  out << "separation,shift_cells,defect\n";
  for (const auto& r : rows)
    out << detail::fmt17(r.separation) << ',' << r.shift_cells << ',' << detail::fmt17(r.defect) << '\n';
  return out.str();
}

}  // namespace cylmin
