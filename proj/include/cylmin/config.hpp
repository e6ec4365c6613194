#pragma once

// Run configuration read from a flat-section INI document:
//   [grid] [potential] [nonlinearity] [solve] [analysis] [output]
// Syntax problems raise ParseError; well-formed documents with invalid
// values raise ValidationError listing every violation as section.key.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cylmin/analysis.hpp"
#include "cylmin/errors.hpp"
#include "cylmin/grid.hpp"
#include "cylmin/model.hpp"
#include "cylmin/solver.hpp"

namespace cylmin {

struct AnalysisConfig {
  double s0 = 0.0;  // trial plateau height, 0 = unset
  std::vector<double> R_list;
  double trial_h_r = 0.125;
  double trial_h_z = 0.125;
  double trial_z_max = 2.5;
  double trial_r_margin = 1.0;
  std::vector<double> mu_fractions;  // mu / rho for the subadditivity scan
  double rho_factor = 0.0;           // rho = rho_factor * rho0_estimate when > 0, else solve.rho
  double margin_floor_rel = 1e-4;
  std::vector<double> separations;  // Brezis-Lieb probe, in z units
  double bump_rc = 1.0;
  double bump_width = 0.75;
  double bump_amplitude = 1.0;
  double decay_tol = 1e-3;
  double sample_r_min = 1.0;
  double sample_r_max = 1e4;
  int sample_count = 400;
  double s_max = 20.0;
  int s_count = 20000;
};

struct OutputConfig {
  std::string dir = "out";
  bool json = true;
  bool csv = true;
};

struct RunConfig {
  GridSpec grid;
  PotentialSpec potential;
  NonlinearitySpec nonlinearity;
  SolveConfig solve;
  AnalysisConfig analysis;
  OutputConfig output;
  std::set<std::string> sections;  // sections present in the document

  bool has(const std::string& section) const { return sections.count(section) != 0; }
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve", "certify", "scan-sub", "probe-bl", "check-hyp", "hydrogen"};
  return names;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline bool to_double(const std::string& text, double& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool to_int(const std::string& text, long long& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Reads one section, recording conversion problems and unknown keys.
class SectionReader {
 public:
  SectionReader(std::string name, const boost::property_tree::ptree& tree, std::vector<Violation>& out)
      : name_(std::move(name)), tree_(tree), out_(out) {}

  void number(const std::string& key, double& dst) {
    if (auto s = take(key)) {
      if (!to_double(*s, dst)) fail(key, "expected a finite number, got '" + *s + "'");
    }
  }
  void integer(const std::string& key, int& dst) {
    if (auto s = take(key)) {
      long long v = 0;
      if (!to_int(*s, v) || v < INT32_MIN || v > INT32_MAX) fail(key, "expected an integer, got '" + *s + "'");
      else dst = static_cast<int>(v);
    }
  }
  void unsigned_integer(const std::string& key, std::uint64_t& dst) {
    if (auto s = take(key)) {
      long long v = 0;
      if (!to_int(*s, v) || v < 0) fail(key, "expected a non-negative integer, got '" + *s + "'");
      else dst = static_cast<std::uint64_t>(v);
    }
  }
  void boolean(const std::string& key, bool& dst) {
    if (auto s = take(key)) {
      const std::string v = trim(*s);
      if (v == "true" || v == "1") dst = true;
      else if (v == "false" || v == "0") dst = false;
      else fail(key, "expected true or false, got '" + *s + "'");
    }
  }
  void text(const std::string& key, std::string& dst) {
    if (auto s = take(key)) dst = trim(*s);
  }
  void list(const std::string& key, std::vector<double>& dst) {
    if (auto s = take(key)) {
      dst.clear();
      std::stringstream ss(*s);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double v = 0.0;
        if (!to_double(item, v)) {
          fail(key, "expected a comma-separated list of numbers, got '" + *s + "'");
          dst.clear();
          return;
        }
        dst.push_back(v);
      }
    }
  }
  void fail(const std::string& key, std::string message) { out_.push_back({name_ + "." + key, std::move(message)}); }

  /// Reports keys that no reader consumed.
  void finish() {
    for (const auto& [key, child] : tree_)
      if (!seen_.count(key)) out_.push_back({name_ + "." + key, "unknown key"});
  }

 private:
  std::optional<std::string> take(const std::string& key) {
    seen_.insert(key);
    if (auto c = tree_.get_child_optional(key)) return c->data();
    return std::nullopt;
  }

  std::string name_;
  const boost::property_tree::ptree& tree_;
  std::vector<Violation>& out_;
  std::set<std::string> seen_;
};

inline bool ascending(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) return false;
  return true;
}

}  // namespace detail

inline std::vector<Violation> validate(const AnalysisConfig& a) {
  std::vector<Violation> out;
  if (!(a.s0 >= 0.0)) out.push_back({"analysis.s0", "plateau height must be positive"});
  if (!detail::ascending(a.R_list)) out.push_back({"analysis.R_list", "must be ascending"});
  for (double R : a.R_list)
    if (!(R >= 1.0)) {
      out.push_back({"analysis.R_list", "entries must be >= 1"});
      break;
    }
  if (!(a.trial_h_r > 0.0 && a.trial_h_r <= 0.25))
    out.push_back({"analysis.trial_h_r", "trial spacing must lie in (0, 0.25] to resolve the unit ramps"});
  if (!(a.trial_h_z > 0.0 && a.trial_h_z <= 0.25))
    out.push_back({"analysis.trial_h_z", "trial spacing must lie in (0, 0.25] to resolve the unit ramps"});
  if (!(a.trial_z_max > 2.0)) out.push_back({"analysis.trial_z_max", "must exceed the trial support |z| <= 2"});
  if (!(a.trial_r_margin > 0.0)) out.push_back({"analysis.trial_r_margin", "must be positive"});
  for (double f : a.mu_fractions)
    if (!(f > 0.0 && f < 1.0)) {
      out.push_back({"analysis.mu_fractions", "each mu / rho must lie in (0, 1)"});
      break;
    }
  if (!(a.rho_factor >= 0.0)) out.push_back({"analysis.rho_factor", "must be >= 0"});
  if (a.rho_factor > 0.0 && a.rho_factor <= 1.0)
    out.push_back({"analysis.rho_factor", "must exceed 1 so that rho lies above rho0_estimate"});
  if (!(a.margin_floor_rel >= 0.0)) out.push_back({"analysis.margin_floor_rel", "must be >= 0"});
  if (!detail::ascending(a.separations)) out.push_back({"analysis.separations", "must be ascending"});
  for (double s : a.separations)
    if (!(s >= 0.0)) {
      out.push_back({"analysis.separations", "entries must be >= 0"});
      break;
    }
  if (!(a.bump_rc > 0.0)) out.push_back({"analysis.bump_rc", "must be positive"});
  if (!(a.bump_width > 0.0)) out.push_back({"analysis.bump_width", "must be positive"});
  if (!(a.bump_amplitude > 0.0)) out.push_back({"analysis.bump_amplitude", "must be positive"});
  if (!(a.decay_tol > 0.0)) out.push_back({"analysis.decay_tol", "must be positive"});
  if (!(a.sample_r_min > 0.0)) out.push_back({"analysis.sample_r_min", "must be positive"});
  if (!(a.sample_r_max > a.sample_r_min)) out.push_back({"analysis.sample_r_max", "must exceed sample_r_min"});
  if (a.sample_count < 2) out.push_back({"analysis.sample_count", "must be >= 2"});
  if (!(a.s_max > 0.0)) out.push_back({"analysis.s_max", "must be positive"});
  if (a.s_count < 2) out.push_back({"analysis.s_count", "must be >= 2"});
  return out;
}

inline std::vector<Violation> validate(const RunConfig& c) {
  std::vector<Violation> out = validate(c.grid);
  auto append = [&](std::vector<Violation> v) { out.insert(out.end(), v.begin(), v.end()); };
  append(validate(c.potential));
  append(validate(c.nonlinearity, c.grid.N));
  append(validate(c.solve));
  append(validate(c.analysis));
  if (c.output.dir.empty()) out.push_back({"output.dir", "must not be empty"});
  return out;
}

/// Blocks a command needs beyond the common validation.
inline std::vector<Violation> validate_for_command(const RunConfig& c, const std::string& command) {
  std::vector<Violation> out;
  const AnalysisConfig& a = c.analysis;
  auto need_trials = [&] {
    if (!c.has("analysis")) out.push_back({"analysis", "section required by '" + command + "'"});
    if (!(a.s0 > 0.0)) out.push_back({"analysis.s0", "required by '" + command + "'"});
    if (a.R_list.empty()) out.push_back({"analysis.R_list", "required by '" + command + "'"});
  };
  if (command == "certify") {
    need_trials();
  } else if (command == "scan-sub") {
    if (a.mu_fractions.empty()) out.push_back({"analysis.mu_fractions", "required by 'scan-sub'"});
    if (a.rho_factor > 0.0) need_trials();
  } else if (command == "probe-bl") {
    if (a.separations.empty()) out.push_back({"analysis.separations", "required by 'probe-bl'"});
    if (!(c.grid.k < c.grid.N)) out.push_back({"grid.k", "'probe-bl' needs an axial direction (k < N)"});
  } else if (command == "hydrogen") {
    auto v = validate_hydrogen(c.potential.vortex_ell, c.potential.shift_Omega_V, c.nonlinearity.p, c.grid.N,
                               c.grid.k);
    out.insert(out.end(), v.begin(), v.end());
    if (!c.potential.coulomb) out.push_back({"potential.coulomb", "hydrogen model requires coulomb = true"});
    if (c.potential.power_coeff != 0.0)
      out.push_back({"potential.power_coeff", "hydrogen model has no power singularity"});
    if (c.nonlinearity.R_kind != RKind::power_attractive)
      out.push_back({"nonlinearity.R_kind", "hydrogen model requires power_attractive"});
    if (c.nonlinearity.Omega != 0.0)
      out.push_back({"nonlinearity.Omega", "hydrogen model carries Omega in potential.shift_Omega_V; set 0"});
    if (a.rho_factor > 0.0) need_trials();
  } else if (command != "solve" && command != "check-hyp") {
    out.push_back({"command", "unknown command '" + command + "'"});
  }
  return out;
}

/// Parses and validates; `command` adds the command's block requirements.
inline RunConfig parse_config(const std::string& text, const std::string& command = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig c;
  std::vector<Violation> v;
  static const std::set<std::string> known{"grid", "potential", "nonlinearity", "solve", "analysis", "output"};
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) {
      v.push_back({name, "key outside any section"});
      continue;
    }
    if (!known.count(name)) {
      v.push_back({name, "unknown section"});
      continue;
    }
    c.sections.insert(name);
  }
  const pt::ptree empty;
  auto section = [&](const std::string& name) -> const pt::ptree& {
    auto ch = tree.get_child_optional(name);
    return ch ? *ch : empty;
  };

  {
    detail::SectionReader r("grid", section("grid"), v);
    r.integer("N", c.grid.N);
    r.integer("k", c.grid.k);
    r.number("r_max", c.grid.r_max);
    r.number("z_max", c.grid.z_max);
    r.integer("n_r", c.grid.n_r);
    r.integer("n_z", c.grid.n_z);
    r.finish();
    if (c.grid.k == c.grid.N) c.grid.n_z = 1;
  }
  {
    detail::SectionReader r("potential", section("potential"), v);
    r.integer("vortex_ell", c.potential.vortex_ell);
    r.number("power_alpha", c.potential.power_alpha);
    r.number("power_coeff", c.potential.power_coeff);
    r.boolean("coulomb", c.potential.coulomb);
    r.number("shift_Omega_V", c.potential.shift_Omega_V);
    r.finish();
  }
  {
    detail::SectionReader r("nonlinearity", section("nonlinearity"), v);
    NonlinearitySpec& w = c.nonlinearity;
    r.number("Omega", w.Omega);
    std::string kind = "power_attractive";
    r.text("R_kind", kind);
    if (kind == "power_attractive") w.R_kind = RKind::power_attractive;
    else if (kind == "none") w.R_kind = RKind::none;
    else r.fail("R_kind", "expected power_attractive or none, got '" + kind + "'");
    r.number("p", w.p);
    r.number("b1", w.b1);
    r.number("b2", w.b2);
    r.number("gamma", w.gamma);
    r.number("c1", w.c1);
    r.number("c2", w.c2);
    r.number("q1", w.q1);
    r.number("q2", w.q2);
    r.finish();
  }
  {
    detail::SectionReader r("solve", section("solve"), v);
    SolveConfig& s = c.solve;
    r.number("rho", s.rho);
    r.number("dt_init", s.dt_init);
    r.number("dt_min", s.dt_min);
    r.number("armijo_c", s.armijo_c);
    r.number("tol_residual", s.tol_residual);
    r.integer("max_iters", s.max_iters);
    r.integer("recenter_every", s.recenter_every);
    r.unsigned_integer("seed", s.seed);
    std::string method = "cg";
    r.text("method", method);
    if (method == "cg") s.method = Method::conjugate_gradient;
    else if (method == "gradient_flow") s.method = Method::gradient_flow;
    else r.fail("method", "expected cg or gradient_flow, got '" + method + "'");
    r.finish();
  }
  {
    detail::SectionReader r("analysis", section("analysis"), v);
    AnalysisConfig& a = c.analysis;
    r.number("s0", a.s0);
    r.list("R_list", a.R_list);
    r.number("trial_h_r", a.trial_h_r);
    r.number("trial_h_z", a.trial_h_z);
    r.number("trial_z_max", a.trial_z_max);
    r.number("trial_r_margin", a.trial_r_margin);
    r.list("mu_fractions", a.mu_fractions);
    r.number("rho_factor", a.rho_factor);
    r.number("margin_floor_rel", a.margin_floor_rel);
    r.list("separations", a.separations);
    r.number("bump_rc", a.bump_rc);
    r.number("bump_width", a.bump_width);
    r.number("bump_amplitude", a.bump_amplitude);
    r.number("decay_tol", a.decay_tol);
    r.number("sample_r_min", a.sample_r_min);
    r.number("sample_r_max", a.sample_r_max);
    r.integer("sample_count", a.sample_count);
    r.number("s_max", a.s_max);
    r.integer("s_count", a.s_count);
    r.finish();
  }
  {
    detail::SectionReader r("output", section("output"), v);
    r.text("dir", c.output.dir);
    std::string list = "json,csv";
    r.text("formats", list);
    c.output.json = c.output.csv = false;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string f = detail::trim(item);
      if (f == "json") c.output.json = true;
      else if (f == "csv") c.output.csv = true;
      else r.fail("formats", "expected a subset of {json, csv}, got '" + f + "'");
    }
    r.finish();
  }

  auto append = [&](std::vector<Violation> more) { v.insert(v.end(), more.begin(), more.end()); };
  append(validate(c));
  if (!command.empty()) append(validate_for_command(c, command));
  if (!v.empty()) throw ValidationError(std::move(v));
  return c;
}

inline RunConfig load_config(const std::string& path, const std::string& command = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), command);
}

}  // namespace cylmin
