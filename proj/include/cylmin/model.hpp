#pragma once

// Potential and nonlinearity families, with sample-based checks of the
// structural hypotheses the existence theory relies on.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cylmin/errors.hpp"

namespace cylmin {

namespace detail {

inline std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace detail

/// V(r, z) = ell^2 / r^2 + c_alpha r^-alpha + Omega_V - [coulomb] / sqrt(r^2 + z^2).
struct PotentialSpec {
  int vortex_ell = 0;
  double power_alpha = 0.0;
  double power_coeff = 0.0;
  bool coulomb = false;
  double shift_Omega_V = 0.0;

  bool is_zero() const {
    return vortex_ell == 0 && power_coeff == 0.0 && !coulomb && shift_Omega_V == 0.0;
  }
};

enum class RKind { none, power_attractive };

/// W(s) = (Omega / 2) s^2 + R(s), R(s) = -|s|^p / p for power_attractive.
/// b1, b2, gamma, c1, c2, q1, q2 are the declared growth constants used by
/// the hypothesis checks:
///   R(s) > -b1 s^2 - b2 |s|^gamma,   |R'(s)| <= c1 |s|^(q1-1) + c2 |s|^(q2-1).
struct NonlinearitySpec {
  double Omega = 0.0;
  RKind R_kind = RKind::none;
  double p = 3.0;
  double b1 = 0.0;
  double b2 = 1.0;
  double gamma = 3.0;
  double c1 = 0.0;
  double c2 = 1.0;
  double q1 = 2.0;
  double q2 = 3.0;
};

inline std::vector<Violation> validate(const PotentialSpec& v) {
  std::vector<Violation> out;
  if (!(v.power_alpha >= 0.0)) out.push_back({"potential.power_alpha", "exponent must be >= 0"});
  if (!(v.power_coeff >= 0.0)) out.push_back({"potential.power_coeff", "coefficient must be >= 0"});
  if (!(v.shift_Omega_V >= 0.0)) out.push_back({"potential.shift_Omega_V", "shift must be >= 0"});
  if (v.coulomb) {
    if (v.vortex_ell == 0)
      out.push_back({"potential.vortex_ell",
                     "coulomb potential requires a nonzero vortex charge (ell != 0) for V >= 0"});
    if (!(v.shift_Omega_V > 1.0))
      out.push_back({"potential.shift_Omega_V",
                     "coulomb potential requires Omega > 1 so that ell^2/|y|^2 + Omega - 1/|x| >= 0"});
  }
  return out;
}

/// Growth-constant invariants depend on the spatial dimension N.
inline std::vector<Violation> validate(const NonlinearitySpec& w, int N) {
  std::vector<Violation> out;
  if (!std::isfinite(w.Omega)) out.push_back({"nonlinearity.Omega", "must be finite"});
  if (w.R_kind == RKind::power_attractive && !(w.p > 1.0))
    out.push_back({"nonlinearity.p", "power exponent must be > 1"});
  if (!(w.b1 >= 0.0)) out.push_back({"nonlinearity.b1", "must be >= 0"});
  if (!(w.b2 >= 0.0)) out.push_back({"nonlinearity.b2", "must be >= 0"});
  if (!(w.c1 >= 0.0)) out.push_back({"nonlinearity.c1", "must be >= 0"});
  if (!(w.c2 >= 0.0)) out.push_back({"nonlinearity.c2", "must be >= 0"});
  const double gamma_max = 2.0 + 4.0 / N;
  if (!(w.gamma < gamma_max))
    out.push_back({"nonlinearity.gamma", "growth exponent must satisfy gamma < 2 + 4/N = " +
                                             detail::short_num(gamma_max)});
  const double q_crit = N > 2 ? 2.0 * N / (N - 2) : INFINITY;
  if (!(w.q1 >= 2.0)) out.push_back({"nonlinearity.q1", "must satisfy q1 >= 2"});
  if (!(w.q1 <= w.q2)) out.push_back({"nonlinearity.q2", "must satisfy q1 <= q2"});
  if (!(w.q2 < q_crit))
    out.push_back({"nonlinearity.q2", "must satisfy q2 < 2N/(N-2) = " + detail::short_num(q_crit)});
  return out;
}

/// Parameter range of the hydrogen model: ell != 0, Omega > 1, 2 < p < 2 + 4/N, k = 2.
inline std::vector<Violation> validate_hydrogen(int ell, double Omega, double p, int N, int k) {
  std::vector<Violation> out;
  if (ell == 0) out.push_back({"potential.vortex_ell", "hydrogen model requires ell != 0"});
  if (!(Omega > 1.0))
    out.push_back({"potential.shift_Omega_V",
                   "hydrogen model requires Omega > 1 so that ell^2/|y|^2 + Omega - 1/|x| >= 0"});
  if (!(p > 2.0 && p < 2.0 + 4.0 / N))
    out.push_back({"nonlinearity.p", "hydrogen model requires 2 < p < 2 + 4/N = " +
                                         detail::short_num(2.0 + 4.0 / N)});
  if (k != 2) out.push_back({"grid.k", "hydrogen model requires k = 2"});
  return out;
}

inline double eval_potential(const PotentialSpec& v, double r, double z = 0.0) {
  if (!(r > 0.0)) throw InvalidArgument("potential evaluated at r <= 0");
  double out = v.shift_Omega_V;
  if (v.vortex_ell != 0) out += double(v.vortex_ell) * v.vortex_ell / (r * r);
  if (v.power_coeff != 0.0) out += v.power_coeff * std::pow(r, -v.power_alpha);
  if (v.coulomb) out -= 1.0 / std::hypot(r, z);
  return out;
}

inline double eval_R(const NonlinearitySpec& w, double s) {
  if (w.R_kind == RKind::none) return 0.0;
  return -std::pow(std::abs(s), w.p) / w.p;
}

inline double eval_R_prime(const NonlinearitySpec& w, double s) {
  if (w.R_kind == RKind::none) return 0.0;
  const double a = std::abs(s);
  return -std::copysign(std::pow(a, w.p - 1.0), s);
}

inline double eval_W(const NonlinearitySpec& w, double s) { return 0.5 * w.Omega * s * s + eval_R(w, s); }

inline double eval_W_prime(const NonlinearitySpec& w, double s) { return w.Omega * s + eval_R_prime(w, s); }

/// W''(s); infinite at s = 0 when 1 < p < 2.
inline double eval_W_second(const NonlinearitySpec& w, double s) {
  if (w.R_kind == RKind::none) return w.Omega;
  return w.Omega - (w.p - 1.0) * std::pow(std::abs(s), w.p - 2.0);
}

/// R(s + d) - R(s) without cancellation when |d| << |s|.
inline double R_difference(const NonlinearitySpec& w, double s, double d) {
  if (w.R_kind == RKind::none || d == 0.0) return 0.0;
  if (s != 0.0 && std::abs(d) < 0.5 * std::abs(s)) {
    const double base = std::pow(std::abs(s), w.p) / w.p;
    return -base * std::expm1(w.p * std::log1p(d / s));
  }
  return eval_R(w, s + d) - eval_R(w, s);
}

/// W(s + d) - W(s) without cancellation.
inline double W_difference(const NonlinearitySpec& w, double s, double d) {
  return w.Omega * d * (s + 0.5 * d) + R_difference(w, s, d);
}

struct HypothesisCheck {
  std::string name;
  bool holds = false;
  std::string detail;
  std::optional<double> witness;  // e.g. s0 for W3, worst sample for V1
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  bool all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
  }
  const HypothesisCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Sample-wise (V1) V >= 0, (V2) V -> 0, (V3) V non-increasing.
///
/// V2 passes when V at the largest sample is at most
/// max(decay_tol * |V(smallest sample)|, 1e-6).
inline HypothesisReport check_V_hypotheses(const PotentialSpec& v, std::span<const double> samples,
                                           double decay_tol = 1e-3) {
  if (v.coulomb) throw InvalidArgument("V1-V3 checks apply to cylindrical potentials only (no coulomb term)");
  if (samples.size() < 2) throw InvalidArgument("need at least two radial samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i] > 0.0)) throw InvalidArgument("radial samples must be positive");
    if (i > 0 && !(samples[i] > samples[i - 1])) throw InvalidArgument("radial samples must be ascending");
  }
  std::vector<double> vals(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) vals[i] = eval_potential(v, samples[i]);

  HypothesisReport rep;
  const auto min_it = std::min_element(vals.begin(), vals.end());
  rep.checks.push_back({"V1", *min_it >= 0.0, "min sampled V = " + detail::short_num(*min_it),
                        samples[std::distance(vals.begin(), min_it)]});

  const double tail = vals.back();
  const double thresh = std::max(decay_tol * std::abs(vals.front()), 1e-6);
  rep.checks.push_back({"V2", std::abs(tail) <= thresh,
                        "V(r_max) = " + detail::short_num(tail) + ", threshold " + detail::short_num(thresh), tail});

  bool mono = true;
  std::optional<double> where;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    if (vals[i] > vals[i - 1] + 1e-12) {
      mono = false;
      where = samples[i];
      break;
    }
  }
  rep.checks.push_back({"V3", mono, mono ? "non-increasing on samples" : "increase detected", where});
  return rep;
}

/// Pointwise (W1), (W2) with the declared constants and exponent ranges,
/// and (W3): the first s in s_grid with W(s) < 0.
inline HypothesisReport check_W_hypotheses(const NonlinearitySpec& w, std::span<const double> s_grid, int N) {
  HypothesisReport rep;

  const bool gamma_ok = w.gamma < 2.0 + 4.0 / N;
  bool w1 = gamma_ok;
  std::optional<double> w1_bad;
  for (double s : s_grid) {
    const double a = std::abs(s);
    if (a == 0.0) continue;
    if (!(eval_R(w, s) > -w.b1 * a * a - w.b2 * std::pow(a, w.gamma))) {
      w1 = false;
      w1_bad = s;
      break;
    }
  }
  rep.checks.push_back({"W1", w1,
                        gamma_ok ? (w1 ? "lower bound holds on grid" : "lower bound violated")
                                 : "gamma >= 2 + 4/N",
                        w1_bad});

  const double q_crit = 2.0 * N / (N - 2.0);
  const bool q_ok = w.q1 >= 2.0 && w.q1 <= w.q2 && w.q2 < q_crit;
  bool w2 = q_ok;
  std::optional<double> w2_bad;
  for (double s : s_grid) {
    const double a = std::abs(s);
    if (a == 0.0) continue;
    const double bound = w.c1 * std::pow(a, w.q1 - 1.0) + w.c2 * std::pow(a, w.q2 - 1.0);
    if (std::abs(eval_R_prime(w, s)) > bound * (1.0 + 1e-12)) {
      w2 = false;
      w2_bad = s;
      break;
    }
  }
  rep.checks.push_back({"W2", w2,
                        q_ok ? (w2 ? "derivative bound holds on grid" : "derivative bound violated")
                             : "exponents outside 2 <= q1 <= q2 < 2N/(N-2)",
                        w2_bad});

  std::optional<double> s0;
  for (double s : s_grid) {
    if (s > 0.0 && eval_W(w, s) < 0.0) {
      s0 = s;
      break;
    }
  }
  rep.checks.push_back({"W3", s0.has_value(), s0 ? "W(s0) < 0 found" : "W >= 0 on grid", s0});
  return rep;
}

/// Sampled minimum of the hydrogen potential ell^2/r^2 + Omega - 1/|x| over
/// an (r, z) lattice; non-negative whenever ell != 0 and Omega > 1.
inline double hydrogen_potential_sample_min(int ell, double Omega, double r_max, double z_max, int n_r,
                                            int n_z) {
  const PotentialSpec v{ell, 0.0, 0.0, true, Omega};
  double m = INFINITY;
  for (int j = 0; j < n_z; ++j) {
    const double z = -z_max + (j + 0.5) * 2.0 * z_max / n_z;
    for (int i = 0; i < n_r; ++i) {
      const double r = (i + 0.5) * r_max / n_r;
      m = std::min(m, eval_potential(v, r, z));
    }
  }
  return m;
}

}  // namespace cylmin
