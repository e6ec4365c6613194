#pragma once

// Numerical certificates for the structural results behind the existence
// theory: plateau-ramp trial fields and their energy scalings, negativity
// of the infimum for large mass, strict subadditivity of the discrete
// infima, Brezis-Lieb splitting of the nonlinear term, coercivity below
// the mass-critical exponent and strict contraction of the c-norm under
// dilation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cylmin/energy.hpp"
#include "cylmin/errors.hpp"
#include "cylmin/grid.hpp"
#include "cylmin/model.hpp"
#include "cylmin/solver.hpp"

namespace cylmin {

/// Least-squares slope of log y against log x. Non-positive entries are skipped.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return NAN;
  const double n = double(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Plateau-ramp trial fields u(r, z) = f(|z|) v(r).

/// v = s0 on [R, 2R], linear ramps of unit width on both sides, zero
/// outside [R - 1, 2R + 1]; f = 1 on |z| <= 1, 2 - |z| on 1 <= |z| <= 2.
struct TrialSpec {
  double s0 = 1.0;
  double R = 2.0;
  GridSpec grid;
};

inline std::vector<Violation> validate(const TrialSpec& t) {
  std::vector<Violation> out = validate(t.grid);
  if (!(t.s0 > 0.0)) out.push_back({"analysis.s0", "plateau height must be positive"});
  if (!(t.R >= 1.0)) out.push_back({"analysis.R_list", "inner radius must be >= 1"});
  if (!(2.0 * t.R + 1.0 < t.grid.r_max))
    out.push_back({"grid.r_max", "trial support 2R + 1 must lie inside r_max"});
  if (t.grid.n_r > 0 && t.grid.r_max / t.grid.n_r > 0.25)
    out.push_back({"grid.n_r", "radial spacing must resolve the unit ramps (dr <= 0.25)"});
  if (t.grid.k < t.grid.N) {
    if (!(t.grid.z_max > 2.0)) out.push_back({"grid.z_max", "trial support |z| <= 2 must lie inside z_max"});
    if (t.grid.n_z > 0 && 2.0 * t.grid.z_max / t.grid.n_z > 0.25)
      out.push_back({"grid.n_z", "axial spacing must resolve the unit ramps (dz <= 0.25)"});
  }
  return out;
}

inline double trial_radial_profile(double s0, double R, double r) {
  if (r <= R - 1.0 || r >= 2.0 * R + 1.0) return 0.0;
  if (r < R) return s0 * (r - R + 1.0);
  if (r <= 2.0 * R) return s0;
  return s0 * (2.0 * R + 1.0 - r);
}

inline double trial_axial_profile(double z) {
  const double a = std::abs(z);
  if (a <= 1.0) return 1.0;
  if (a < 2.0) return 2.0 - a;
  return 0.0;
}

/// Trial field on an existing grid; the z factor is dropped when k = N.
inline Field min0_trial(const GridPtr& grid, double s0, double R) {
  const GridSpec& gs = grid->spec();
  if (!(2.0 * R + 1.0 < gs.r_max) || (gs.k < gs.N && !(gs.z_max > 2.0)))
    throw SupportOverflow("trial support exceeds the grid; enlarge r_max/z_max");
  const bool axial = grid->has_z();
  return sample(grid, [&](double r, double z) {
    return trial_radial_profile(s0, R, r) * (axial ? trial_axial_profile(z) : 1.0);
  });
}

inline Field min0_trial(const TrialSpec& t) {
  if (auto v = validate(t); !v.empty()) throw ValidationError(std::move(v));
  return min0_trial(build_grid(t.grid), t.s0, t.R);
}

/// Grid family for trial scans: fixed spacing h, r_max = 2R + 1 + margin.
struct TrialGridRule {
  int N = 3;
  int k = 3;
  double h_r = 0.125;
  double h_z = 0.125;
  double z_max = 2.5;
  double r_margin = 1.0;
};

inline GridSpec trial_grid(const TrialGridRule& rule, double R) {
  GridSpec s;
  s.N = rule.N;
  s.k = rule.k;
  s.r_max = 2.0 * R + 1.0 + rule.r_margin;
  s.n_r = static_cast<int>(std::ceil(s.r_max / rule.h_r));
  s.r_max = s.n_r * rule.h_r;
  if (rule.k < rule.N) {
    s.n_z = static_cast<int>(std::ceil(2.0 * rule.z_max / rule.h_z));
    s.z_max = 0.5 * s.n_z * rule.h_z;
  } else {
    s.n_z = 1;
  }
  return s;
}

struct TrialRow {
  double R = 0.0;
  double mass = 0.0;            // ||u||_2^2
  double kinetic = 0.0;         // 1/2 int |grad u|^2
  double kinetic_radial = 0.0;  // 1/2 int (d_r u)^2
  double kinetic_axial = 0.0;   // 1/2 int (d_z u)^2
  double potential = 0.0;
  double nonlinear = 0.0;
  double J = 0.0;
};

struct TrialSlopes {
  double mass = NAN;
  double kinetic = NAN;
  double kinetic_radial = NAN;
  double kinetic_axial = NAN;
  double potential = NAN;
  double nonlinear = NAN;  // slope of |int W(u)|
};

struct CertifyReport {
  double s0 = 0.0;
  std::vector<TrialRow> rows;
  TrialSlopes slopes;
  bool found = false;
  double R_witness = NAN;
  double rho0_estimate = NAN;  // ||u_R||_2 of the first trial with J < 0
  std::optional<Field> witness;
};

inline TrialRow trial_row(const Functional& J, const Field& u, double R) {
  const EnergyBreakdown e = J.energy(u);
  const KineticParts kp = kinetic_parts(u);
  return {R, l2_norm_sq(u), e.kinetic, kp.radial, kp.axial, e.potential, e.nonlinear, e.total};
}

inline TrialSlopes fit_trial_slopes(std::span<const TrialRow> rows) {
  std::vector<double> R, m, k, kr, ka, p, w;
  for (const auto& row : rows) {
    R.push_back(row.R);
    m.push_back(row.mass);
    k.push_back(row.kinetic);
    kr.push_back(row.kinetic_radial);
    ka.push_back(row.kinetic_axial);
    p.push_back(row.potential);
    w.push_back(std::abs(row.nonlinear));
  }
  return {loglog_slope(R, m), loglog_slope(R, k), loglog_slope(R, kr), loglog_slope(R, ka),
          loglog_slope(R, p), loglog_slope(R, w)};
}

/// Evaluates the trial energies over ascending R_list. The witness is the
/// smallest R with J(u_R) < 0; rho0_estimate is its L2 norm.
inline CertifyReport certify_negative_infimum(const PotentialSpec& v, const NonlinearitySpec& w, double s0,
                                              std::span<const double> R_list, const TrialGridRule& rule) {
  if (R_list.empty()) throw InvalidArgument("R_list is empty");
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (!(R_list[i] >= 1.0)) throw InvalidArgument("R_list entries must be >= 1");
    if (i > 0 && !(R_list[i] > R_list[i - 1])) throw InvalidArgument("R_list must be ascending");
  }
  if (!(s0 > 0.0)) throw InvalidArgument("plateau height s0 must be positive");
  CertifyReport rep;
  rep.s0 = s0;
  for (double R : R_list) {
    TrialSpec t{s0, R, trial_grid(rule, R)};
    if (auto viol = validate(t); !viol.empty()) throw ValidationError(std::move(viol));
    const GridPtr g = build_grid(t.grid);
    const Functional J(g, v, w);
    Field u = min0_trial(g, s0, R);
    const TrialRow row = trial_row(J, u, R);
    rep.rows.push_back(row);
    if (!rep.found && row.J < 0.0) {
      rep.found = true;
      rep.R_witness = R;
      rep.rho0_estimate = std::sqrt(row.mass);
      rep.witness = std::move(u);
    }
  }
  rep.slopes = fit_trial_slopes(rep.rows);
  return rep;
}

// ---------------------------------------------------------------------------
// Strict subadditivity I_rho < I_mu + I_sqrt(rho^2 - mu^2).

struct SubadditivityRow {
  double mu = 0.0;
  double mu_complement = 0.0;  // sqrt(rho^2 - mu^2)
  double I_mu = 0.0;
  double I_sqrt = 0.0;
  double I_rho = 0.0;
  double margin = 0.0;  // I_mu + I_sqrt - I_rho
  bool converged = false;
  bool strict = false;  // converged and margin > margin_floor
};

struct SubadditivityReport {
  double rho = 0.0;
  double I_rho = 0.0;
  bool rho_converged = false;
  double margin_floor = 0.0;
  std::vector<SubadditivityRow> rows;
  bool all_strict = false;
  bool any_unconverged = false;
  // Over every solve of the scan.
  double max_norm_sq_error = 0.0;
  double max_step_dJ = -INFINITY;
  double max_residual_rel = 0.0;  // residual / norm, converged solves only
};

struct SubadditivityOptions {
  double margin_floor_rel = 1e-4;  // floor = margin_floor_rel * |I_rho|
};

/// Solves at rho (from u0 or the seeded bump), then at every mu and its
/// complement warm-started from the rho minimiser. Rows with a
/// non-converged solve are flagged and left out of all_strict.
inline SubadditivityReport subadditivity_scan(const Functional& J, const SolveConfig& base, double rho,
                                              std::span<const double> mus, const SubadditivityOptions& opt = {},
                                              const Field* u0 = nullptr) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (mus.empty()) throw InvalidArgument("mus is empty");
  for (double mu : mus)
    if (!(mu > 0.0 && mu < rho)) throw InvalidArgument("each mu must lie in (0, rho)");

  SubadditivityReport rep;
  rep.rho = rho;
  SolveConfig cfg = base;
  cfg.rho = rho;
  auto absorb = [&](const SolveResult& r, double m) {
    for (const auto& t : r.trace) {
      rep.max_norm_sq_error = std::max(rep.max_norm_sq_error, t.norm_sq_error);
      rep.max_step_dJ = std::max(rep.max_step_dJ, t.dJ);
    }
    if (r.converged) rep.max_residual_rel = std::max(rep.max_residual_rel, r.residual / m);
  };
  const SolveResult big = solve(cfg, J, u0);
  absorb(big, rho);
  rep.I_rho = big.breakdown.total;
  rep.rho_converged = big.converged;
  rep.margin_floor = opt.margin_floor_rel * std::abs(rep.I_rho);

  auto solve_at = [&](double m) {
    SolveConfig c = base;
    c.rho = m;
    return solve(c, J, &big.field);
  };
  rep.all_strict = rep.rho_converged;
  for (double mu : mus) {
    SubadditivityRow row;
    row.mu = mu;
    row.mu_complement = std::sqrt((rho - mu) * (rho + mu));
    const SolveResult a = solve_at(row.mu);
    const SolveResult b = solve_at(row.mu_complement);
    absorb(a, row.mu);
    absorb(b, row.mu_complement);
    row.I_mu = a.breakdown.total;
    row.I_sqrt = b.breakdown.total;
    row.I_rho = rep.I_rho;
    row.margin = row.I_mu + row.I_sqrt - row.I_rho;
    row.converged = rep.rho_converged && a.converged && b.converged;
    row.strict = row.converged && row.margin > rep.margin_floor;
    if (!row.converged) rep.any_unconverged = true;
    else if (!row.strict) rep.all_strict = false;
    rep.rows.push_back(row);
  }
  if (std::none_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.converged; }))
    rep.all_strict = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Brezis-Lieb splitting of T~(u) = integral of R(u).

inline double R_integral(const Field& u, const NonlinearitySpec& w) {
  std::vector<double> r(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) r[n] = eval_R(w, u[n]);
  return integrate(u.grid(), r);
}

struct BrezisLiebRow {
  double separation = 0.0;  // requested z distance
  int shift_cells = 0;      // whole-cell shift actually applied
  double defect = 0.0;      // |T~(u_s) - T~(u_s - b) - T~(b)|
};

/// Compactly supported ring A cos^2(pi d / 2a), d = |(r, z) - (rc, zc)| < a,
/// multiplied by min(1, r / rc) so that it vanishes on the axis.
inline Field compact_bump(const GridPtr& grid, double rc, double a, double zc, double amplitude) {
  return sample(grid, [&](double r, double z) {
    const double d = std::hypot(r - rc, z - zc);
    if (d >= a) return 0.0;
    const double c = std::cos(0.5 * M_PI * d / a);
    return amplitude * std::min(1.0, r / rc) * c * c;
  });
}

/// u_s = b + translate_z(b, s) for each separation s (rounded to whole cells).
inline std::vector<BrezisLiebRow> brezis_lieb_probe(const Field& bump, std::span<const double> separations,
                                                    const NonlinearitySpec& w) {
  const Grid& g = bump.grid();
  if (!g.has_z()) throw InvalidArgument("Brezis-Lieb probe needs an axial direction (k < N)");
  for (std::size_t i = 0; i < separations.size(); ++i) {
    if (!(separations[i] >= 0.0)) throw InvalidArgument("separations must be >= 0");
    if (i > 0 && !(separations[i] > separations[i - 1])) throw InvalidArgument("separations must be ascending");
  }
  const double Tb = R_integral(bump, w);
  std::vector<BrezisLiebRow> out;
  for (double s : separations) {
    const int cells = static_cast<int>(std::lround(s / g.dz()));
    const Field moved = translate_z(bump, cells);
    std::vector<double> us(g.size()), rest(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
      us[n] = bump[n] + moved[n];
      rest[n] = us[n] - bump[n];
    }
    const double Tu = R_integral(Field(bump.grid_ptr(), std::move(us)), w);
    const double Tr = R_integral(Field(bump.grid_ptr(), std::move(rest)), w);
    out.push_back({s, cells, std::abs(Tu - Tr - Tb)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coercivity on B_rho:
//   J(u) >= 1/2 ||u||_c^2 - b2 C ||grad u||^beta + (Omega/2 - b1) rho^2,
// beta = gamma N / 2 - N, with C calibrated on the probed fields.

struct CoercivityRow {
  double J = 0.0;
  double kinetic = 0.0;
  double gn_ratio = 0.0;  // ||u||_gamma^gamma / ||grad u||^beta
  double bound = 0.0;
  double slack = 0.0;     // J - bound
};

struct CoercivityReport {
  double rho = 0.0;
  double beta = 0.0;
  double C = 0.0;
  std::vector<CoercivityRow> rows;
  double min_slack = 0.0;
  double min_J = 0.0;
};

inline CoercivityReport coercivity_probe(const Functional& J, double rho, std::span<const Field> fields) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (fields.empty()) throw InvalidArgument("no fields to probe");
  const NonlinearitySpec& w = J.nonlinearity();
  const int N = J.grid().spec().N;
  CoercivityReport rep;
  rep.rho = rho;
  rep.beta = w.gamma * N / 2.0 - N;

  std::vector<Field> scaled;
  for (const Field& f : fields) {
    const double m = l2_norm_sq(f);
    if (!(m > 0.0)) throw InvalidArgument("probed field is identically zero");
    scaled.push_back(f.scaled(rho / std::sqrt(m)));
  }
  for (const Field& u : scaled) {
    CoercivityRow row;
    const EnergyBreakdown e = J.energy(u);
    row.J = e.total;
    row.kinetic = e.kinetic;
    const double grad = std::sqrt(2.0 * e.kinetic);
    row.gn_ratio = lq_norm_q(u, w.gamma) / std::pow(grad, rep.beta);
    rep.C = std::max(rep.C, row.gn_ratio);
    rep.rows.push_back(row);
  }
  rep.min_slack = INFINITY;
  rep.min_J = INFINITY;
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    CoercivityRow& row = rep.rows[i];
    const EnergyBreakdown e = J.energy(scaled[i]);
    const double grad_beta = std::pow(2.0 * row.kinetic, rep.beta / 2.0);
    row.bound = 0.5 * e.c_norm_sq - w.b2 * rep.C * grad_beta + (0.5 * w.Omega - w.b1) * rho * rho;
    row.slack = row.J - row.bound;
    rep.min_slack = std::min(rep.min_slack, row.slack);
    rep.min_J = std::min(rep.min_J, row.J);
  }
  return rep;
}

/// Mass-preserving concentration family a^(N/2) phi(a r, a z) sampled
/// exactly on the grid, rescaled to L2 norm rho.
inline std::vector<Field> concentration_family(const GridPtr& grid,
                                               const std::function<double(double, double)>& phi,
                                               std::span<const double> scales, double rho) {
  const int N = grid->spec().N;
  std::vector<Field> out;
  for (double a : scales) {
    if (!(a > 0.0)) throw InvalidArgument("concentration scales must be positive");
    const double amp = std::pow(a, 0.5 * N);
    Field u = sample(grid, [&](double r, double z) { return amp * phi(a * r, a * z); });
    const double m = l2_norm_sq(u);
    if (!(m > 0.0)) throw InvalidArgument("concentrated field vanishes on the grid");
    out.push_back(u.scaled(rho / std::sqrt(m)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dilation contraction of the c-norm.

struct DilationReport {
  double theta = 1.0;
  double mass_rel_error = 0.0;       // | ||u_t||^2 - t^2 ||u||^2 | / t^2 ||u||^2
  double nonlinear_rel_error = 0.0;  // | T(u_t) - t^2 T(u) | / | t^2 T(u) |
  double c_norm_sq = 0.0;            // ||u_t||_c^2
  double c_norm_sq_bound = 0.0;      // t^2 ||u||_c^2
  double c_margin_rel = 0.0;         // (bound - c_norm_sq) / bound
};

inline DilationReport dilation_report(const Functional& J, const Field& u, double theta) {
  const Field ut = dilate(u, theta);
  const EnergyBreakdown e0 = J.energy(u);
  const EnergyBreakdown e1 = J.energy(ut);
  const double t2 = theta * theta;
  DilationReport rep;
  rep.theta = theta;
  const double m0 = l2_norm_sq(u);
  rep.mass_rel_error = std::abs(l2_norm_sq(ut) - t2 * m0) / (t2 * m0);
  rep.nonlinear_rel_error =
      e0.nonlinear != 0.0 ? std::abs(e1.nonlinear - t2 * e0.nonlinear) / std::abs(t2 * e0.nonlinear) : 0.0;
  rep.c_norm_sq = e1.c_norm_sq;
  rep.c_norm_sq_bound = t2 * e0.c_norm_sq;
  rep.c_margin_rel = (rep.c_norm_sq_bound - rep.c_norm_sq) / rep.c_norm_sq_bound;
  return rep;
}

}  // namespace cylmin
