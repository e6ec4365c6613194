#pragma once

// Command-line front end:
//   cylmin <solve|certify|scan-sub|probe-bl|check-hyp|hydrogen> --config FILE [--seed S] [--out DIR]
// Exit codes: 0 ok, 1 non-convergence (or no witness), 2 validation
// error, 3 parse error. Diagnostics go to stderr, results to files and a
// one-line summary to stdout.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cylmin/analysis.hpp"
#include "cylmin/config.hpp"
#include "cylmin/energy.hpp"
#include "cylmin/errors.hpp"
#include "cylmin/io.hpp"
#include "cylmin/model.hpp"
#include "cylmin/solver.hpp"

namespace cylmin::cli {

enum ExitCode : int { ok = 0, not_converged = 1, validation_error = 2, parse_error = 3 };

namespace detail {

inline Formats formats_of(const RunConfig& c) { return {c.output.json, c.output.csv}; }

inline TrialGridRule trial_rule(const RunConfig& c) {
  const AnalysisConfig& a = c.analysis;
  return {c.grid.N, c.grid.k, a.trial_h_r, a.trial_h_z, a.trial_z_max, a.trial_r_margin};
}

inline void write_report(const RunConfig& c, const std::string& stem, const json& j, const std::string& csv) {
  const std::filesystem::path dir(c.output.dir);
  cylmin::detail::ensure_dir(dir);
  if (c.output.json) cylmin::detail::write_text(dir / (stem + ".json"), j.dump(2) + "\n");
  if (c.output.csv && !csv.empty()) cylmin::detail::write_text(dir / (stem + ".csv"), csv);
}

inline CertifyReport run_certify(const RunConfig& c) {
  return certify_negative_infimum(c.potential, c.nonlinearity, c.analysis.s0, c.analysis.R_list, trial_rule(c));
}

/// rho from rho_factor * rho0_estimate when requested, else solve.rho.
inline std::optional<double> target_rho(const RunConfig& c, std::ostream& err, json* certify_json = nullptr) {
  if (!(c.analysis.rho_factor > 0.0)) return c.solve.rho;
  const CertifyReport rep = run_certify(c);
  if (certify_json) *certify_json = to_json(rep);
  if (!rep.found) {
    err << "certify: no trial with J < 0 on R_list; extend analysis.R_list or raise analysis.s0\n";
    return std::nullopt;
  }
  return c.analysis.rho_factor * rep.rho0_estimate;
}

inline int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Functional J(build_grid(c.grid), c.potential, c.nonlinearity);
  const SolveResult r = solve(c.solve, J);
  export_solution(r, c.solve.rho, c.output.dir, formats_of(c));
  out << to_json(r, c.solve.rho).dump() << "\n";
  if (!r.converged) {
    err << "solve: " << r.status << " after " << r.iters << " iterations (residual " << r.residual << ")\n";
    return not_converged;
  }
  return ok;
}

inline int cmd_certify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const CertifyReport rep = run_certify(c);
  write_report(c, "certify", to_json(rep), certify_csv(rep));
  out << json{{"found", rep.found}, {"R_witness", cylmin::detail::num(rep.R_witness)},
              {"rho0_estimate", cylmin::detail::num(rep.rho0_estimate)}}
             .dump()
      << "\n";
  if (!rep.found) {
    err << "certify: no trial with J < 0 on R_list; extend analysis.R_list or raise analysis.s0\n";
    return not_converged;
  }
  return ok;
}

inline int cmd_scan(const RunConfig& c, std::ostream& out, std::ostream& err) {
  json cert;
  const auto rho = target_rho(c, err, &cert);
  if (!rho) return not_converged;
  std::vector<double> mus;
  for (double f : c.analysis.mu_fractions) mus.push_back(f * *rho);
  const Functional J(build_grid(c.grid), c.potential, c.nonlinearity);
  const SubadditivityReport rep = subadditivity_scan(J, c.solve, *rho, mus, {c.analysis.margin_floor_rel});
  json j = to_json(rep);
  if (!cert.is_null()) j["certify"] = cert;
  write_report(c, "subadditivity", j, subadditivity_csv(rep));
  out << json{{"rho", *rho}, {"all_strict", rep.all_strict}, {"any_unconverged", rep.any_unconverged}}.dump()
      << "\n";
  if (!rep.rho_converged || rep.any_unconverged) {
    err << "scan-sub: at least one sub-solve did not converge; see the report rows\n";
    return not_converged;
  }
  if (!rep.all_strict) err << "scan-sub: some margins are at or below the floor (inconclusive)\n";
  return ok;
}

inline int cmd_probe(const RunConfig& c, std::ostream& out, std::ostream&) {
  const GridPtr g = build_grid(c.grid);
  const AnalysisConfig& a = c.analysis;
  const double zc = -0.5 * a.separations.back();
  const Field bump = compact_bump(g, a.bump_rc, a.bump_width, zc, a.bump_amplitude);
  const auto rows = brezis_lieb_probe(bump, a.separations, c.nonlinearity);
  write_report(c, "brezis_lieb", json{{"rows", to_json(rows)}}, brezis_lieb_csv(rows));
  out << json{{"defect_min_sep", rows.front().defect}, {"defect_max_sep", rows.back().defect}}.dump() << "\n";
  return ok;
}

inline int cmd_check(const RunConfig& c, std::ostream& out, std::ostream&) {
  const AnalysisConfig& a = c.analysis;
  json j;
  if (c.potential.coulomb) {
    const double vmin = hydrogen_potential_sample_min(c.potential.vortex_ell, c.potential.shift_Omega_V,
                                                      c.grid.r_max, c.grid.z_max, c.grid.n_r,
                                                      c.grid.k < c.grid.N ? c.grid.n_z : 1);
    j["V"] = {{"regime", "shifted"}, {"sample_min", vmin}, {"nonnegative", vmin >= 0.0}};
    // The shift plays the role of Omega in W for the negativity argument.
    NonlinearitySpec folded = c.nonlinearity;
    folded.Omega += c.potential.shift_Omega_V;
    std::vector<double> s_grid(a.s_count);
    for (int i = 0; i < a.s_count; ++i) s_grid[i] = a.s_max * (i + 1) / a.s_count;
    const HypothesisReport fr = check_W_hypotheses(folded, s_grid, c.grid.N);
    if (const auto* w3 = fr.find("W3"))
      j["W3_with_shift"] = {{"holds", w3->holds}, {"s0", w3->witness ? json(*w3->witness) : json(nullptr)}};
  } else {
    std::vector<double> samples(a.sample_count);
    const double l0 = std::log(a.sample_r_min), l1 = std::log(a.sample_r_max);
    for (int i = 0; i < a.sample_count; ++i) samples[i] = std::exp(l0 + (l1 - l0) * i / (a.sample_count - 1));
    j["V"] = to_json(check_V_hypotheses(c.potential, samples, a.decay_tol));
  }
  std::vector<double> s_grid(a.s_count);
  for (int i = 0; i < a.s_count; ++i) s_grid[i] = a.s_max * (i + 1) / a.s_count;
  j["W"] = to_json(check_W_hypotheses(c.nonlinearity, s_grid, c.grid.N));
  write_report(c, "hypotheses", j, "");
  out << j.dump() << "\n";
  return ok;
}

inline int cmd_hydrogen(const RunConfig& c, std::ostream& out, std::ostream& err) {
  json cert;
  const auto rho = target_rho(c, err, &cert);
  if (!rho) return not_converged;
  SolveConfig sc = c.solve;
  sc.rho = *rho;
  const GridPtr g = build_grid(c.grid);
  const Functional J(g, c.potential, c.nonlinearity);
  const SolveResult r = solve(sc, J);
  export_solution(r, sc.rho, c.output.dir, formats_of(c));
  const double vmin = hydrogen_potential_sample_min(c.potential.vortex_ell, c.potential.shift_Omega_V, c.grid.r_max,
                                                    c.grid.z_max, c.grid.n_r, c.grid.n_z);
  json j = {{"rho", sc.rho},
            {"G", r.breakdown.total},
            {"G_negative", r.breakdown.total < 0.0},
            {"residual", r.residual},
            {"converged", r.converged},
            {"V_sample_min", vmin}};
  if (!cert.is_null()) j["certify"] = cert;
  write_report(c, "hydrogen", j, "");
  out << json{{"rho", sc.rho}, {"G", r.breakdown.total}, {"converged", r.converged}, {"V_sample_min", vmin}}.dump()
      << "\n";
  if (!r.converged) {
    err << "hydrogen: " << r.status << " after " << r.iters << " iterations (residual " << r.residual << ")\n";
    return not_converged;
  }
  return ok;
}

}  // namespace detail

/// Runs one command; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Constrained minimisers of cylindrically symmetric NLS energies"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<CLI::App*> subs;
  for (const auto& name : command_names()) {
    CLI::App* s = app.add_subcommand(name);
    s->add_option("--config", config_path, "INI configuration file")->required();
    s->add_option("--seed", seed, "override solve.seed");
    s->add_option("--out", out_dir, "override output.dir");
    subs.push_back(s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return parse_error;
  }
  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();

  try {
    RunConfig c = load_config(config_path, command);
    if (seed) c.solve.seed = *seed;
    if (out_dir) c.output.dir = *out_dir;
    if (command == "solve") return detail::cmd_solve(c, out, err);
    if (command == "certify") return detail::cmd_certify(c, out, err);
    if (command == "scan-sub") return detail::cmd_scan(c, out, err);
    if (command == "probe-bl") return detail::cmd_probe(c, out, err);
    if (command == "check-hyp") return detail::cmd_check(c, out, err);
    return detail::cmd_hydrogen(c, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return parse_error;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return validation_error;
  } catch (const SupportOverflow& e) {
    err << "validation error: " << e.what() << "\n";
    return validation_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return validation_error;
  }
}

}  // namespace cylmin::cli
