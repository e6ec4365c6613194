#pragma once

// Minimisation of J on the sphere B_rho = { ||u||_2 = rho } by a
// norm-preserving descent: move along a tangent direction, renormalise to
// rho, accept under an Armijo sufficient-decrease test. Two direction rules
// are available: plain projected gradient (normalised gradient flow) and
// Polak-Ribiere+ conjugate gradients on the sphere, the default, which
// needs about the square root of the gradient-flow iteration count on
// stiff grids.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cylmin/energy.hpp"
#include "cylmin/errors.hpp"
#include "cylmin/grid.hpp"

namespace cylmin {

enum class Method { conjugate_gradient, gradient_flow };

struct SolveConfig {
  double rho = 1.0;
  double dt_init = 1e-3;
  double dt_min = 1e-16;
  double armijo_c = 1e-4;
  double tol_residual = 1e-6;  // converged when residual <= tol_residual * rho
  int max_iters = 100000;
  int recenter_every = 0;  // 0 disables
  std::uint64_t seed = 0;
  Method method = Method::conjugate_gradient;
};

inline std::vector<Violation> validate(const SolveConfig& c) {
  std::vector<Violation> out;
  if (!(c.rho > 0.0) || !std::isfinite(c.rho)) out.push_back({"solve.rho", "target norm must be positive"});
  if (!(c.dt_init > 0.0)) out.push_back({"solve.dt_init", "must be positive"});
  if (!(c.dt_min > 0.0)) out.push_back({"solve.dt_min", "must be positive"});
  if (c.dt_min > c.dt_init) out.push_back({"solve.dt_min", "must not exceed dt_init"});
  if (!(c.armijo_c > 0.0 && c.armijo_c < 1.0)) out.push_back({"solve.armijo_c", "must lie in (0, 1)"});
  if (!(c.tol_residual > 0.0)) out.push_back({"solve.tol_residual", "must be positive"});
  if (c.max_iters <= 0) out.push_back({"solve.max_iters", "must be positive"});
  if (c.recenter_every < 0) out.push_back({"solve.recenter_every", "must be >= 0"});
  return out;
}

/// One accepted iterate. `dJ` is the step's energy change computed in
/// difference form; `recenter_dJ` is the (guarded) change caused by a
/// recentring shift applied after the step, zero when none happened.
struct TraceRow {
  int iter = 0;
  double J = 0.0;
  double residual = 0.0;
  double dt = 0.0;
  double dJ = 0.0;
  double recenter_dJ = 0.0;
  double norm_sq_error = 0.0;  // | ||u||^2 - rho^2 | / rho^2 after the step
};

struct SolveResult {
  Field field;
  EnergyBreakdown breakdown;
  double lambda = 0.0;
  double residual = 0.0;
  int iters = 0;
  std::vector<TraceRow> trace;
  bool converged = false;
  std::string status;
};

struct StepResult {
  Field field;
  bool accepted = false;
  double dJ = 0.0;
};

namespace detail {

inline void normalize_to(const Grid& g, std::vector<double>& u, double rho) {
  const double m = std::sqrt(inner(g, u, u));
  const double a = rho / m;
  for (double& x : u) x *= a;
}

/// Norm-preserving retraction u -> a (u + t d), a = ||u|| / ||u + t d||.
/// Writes the displacement delta = (a - 1) u + a t d directly, so that it
/// carries no rounding noise of order eps * ||u|| (differencing two
/// normalised vectors would, and that noise swamps the energy decrease
/// near convergence). The norm is kept to rounding per step.
inline void retract(std::span<const double> u, std::span<const double> d, double t, double u_sq,
                    double u_d, double d_sq, std::vector<double>& delta) {
  const double s = (2.0 * t * u_d + t * t * d_sq) / u_sq;
  const double am1 = std::expm1(-0.5 * std::log1p(s));
  const double a = 1.0 + am1;
  for (std::size_t i = 0; i < u.size(); ++i) delta[i] = am1 * u[i] + a * t * d[i];
}

}  // namespace detail

/// Normalised gradient step u+ = rho (u - dt P g) / ||u - dt P g|| with
/// P g the tangential part of J'(u). Accepted iff
/// J(u+) <= J(u) - armijo_c dt ||P g||^2; a rejected step returns u.
inline StepResult step(const Functional& J, const Field& u, double dt, const SolveConfig& cfg) {
  const Grid& g = u.grid();
  const std::size_t n = u.size();
  std::vector<double> grad(n);
  J.gradient(u.values(), grad);
  const double lam = inner(g, grad, u.values()) / inner(g, u.values(), u.values());
  std::vector<double> pg(n), cand(n), delta(n);
  for (std::size_t i = 0; i < n; ++i) pg[i] = grad[i] - lam * u[i];
  const double pg2 = inner(g, pg, pg);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
  detail::retract(u.values(), d, dt, inner(g, u.values(), u.values()), inner(g, u.values(), d), pg2, delta);
  for (std::size_t i = 0; i < n; ++i) cand[i] = u[i] + delta[i];
  const double dJ = J.energy_difference(u.values(), delta);
  if (dJ <= -cfg.armijo_c * dt * pg2) return {Field(u.grid_ptr(), std::move(cand)), true, dJ};
  return {u, false, dJ};
}

/// Default starting guess: r-weighted Gaussian ring at a seeded position,
/// vanishing on the axis.
inline Field random_bump(const GridPtr& grid, std::uint64_t seed, double rho) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const GridSpec& s = grid->spec();
  const double rc = s.r_max * (0.15 + 0.15 * unit(rng));
  const double sigma = s.r_max * (0.08 + 0.07 * unit(rng));
  const double zc = grid->has_z() ? s.z_max * 0.1 * (2.0 * unit(rng) - 1.0) : 0.0;
  Field u = sample(grid, [&](double r, double z) {
    const double d2 = (r - rc) * (r - rc) + (z - zc) * (z - zc);
    return (r / rc) * std::exp(-d2 / (2.0 * sigma * sigma));
  });
  return u.scaled(rho / std::sqrt(l2_norm_sq(u)));
}

/// Minimises J on B_rho starting from u0 (renormalised to rho) or from a
/// seeded bump. Non-convergence is reported through `converged`/`status`.
inline SolveResult solve(const SolveConfig& cfg, const Functional& J, const Field* u0 = nullptr) {
  if (auto v = validate(cfg); !v.empty()) throw ValidationError(std::move(v));
  const Grid& g = J.grid();
  const std::size_t n = g.size();
  const double rho = cfg.rho;
  const double rho2 = rho * rho;

  std::vector<double> u;
  if (u0 != nullptr) {
    if (u0->size() != n) throw InvalidArgument("initial field lives on a different grid");
    const double m = l2_norm_sq(*u0);
    if (!(m > 0.0)) throw InvalidArgument("initial field is identically zero");
    u.assign(u0->values().begin(), u0->values().end());
    detail::normalize_to(g, u, rho);
  } else {
    const Field b = random_bump(J.grid_ptr(), cfg.seed, rho);
    u.assign(b.values().begin(), b.values().end());
  }

  SolveResult res;
  double J_track = J.energy(u).total;
  std::vector<double> qu(n), grad(n), pg(n), pg_prev(n), d(n), hd(n), delta(n);
  bool have_prev = false;
  double pg2_prev = 0.0;
  double dt = cfg.dt_init;
  double last_dt = 0.0;
  double last_dJ = 0.0;
  double last_recenter_dJ = 0.0;
  int iter = 0;

  for (;;) {
    J.quadratic_apply(u, qu);
    for (std::size_t i = 0; i < n; ++i) grad[i] = qu[i] + eval_W_prime(J.nonlinearity(), u[i]);
    const double lam = inner(g, grad, u) / rho2;
    for (std::size_t i = 0; i < n; ++i) pg[i] = grad[i] - lam * u[i];
    const double pg2 = inner(g, pg, pg);
    const double resid = std::sqrt(pg2);

    if (iter > 0) {
      const double norm_err = std::abs(inner(g, u, u) - rho2) / rho2;
      res.trace.push_back({iter, J_track, resid, last_dt, last_dJ, last_recenter_dJ, norm_err});
    }
    if (resid <= cfg.tol_residual * rho) {
      res.converged = true;
      res.status = "converged";
      break;
    }
    if (iter >= cfg.max_iters) {
      res.status = "iteration limit reached";
      break;
    }

    bool steepest = cfg.method == Method::gradient_flow || !have_prev;
    if (!steepest) {
      // PR+ with the previous quantities transported by projection.
      const double u_pgp = inner(g, u, pg_prev) / rho2;
      const double u_d = inner(g, u, d) / rho2;
      double num = 0.0;
      {
        std::vector<double> diff(n);
        for (std::size_t i = 0; i < n; ++i) diff[i] = pg[i] - (pg_prev[i] - u_pgp * u[i]);
        num = inner(g, pg, diff);
      }
      const double beta = std::max(0.0, num / pg2_prev);
      for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i] + beta * (d[i] - u_d * u[i]);
      if (inner(g, pg, d) >= 0.0) steepest = true;
    }
    if (steepest)
      for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];

    bool accepted = false;
    double dJ = 0.0;
    double t = 0.0;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) {
        if (steepest) break;
        steepest = true;
        for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
      }
      const double slope = inner(g, pg, d);
      const double u_sq = inner(g, u, u);
      const double u_d = inner(g, u, d);
      const double d_sq = inner(g, d, d);
      if (cfg.method == Method::conjugate_gradient) {
        J.hessian_apply(u, d, hd);
        const double curv = inner(g, d, hd) - lam * inner(g, d, d);
        t = curv > 0.0 ? -slope / curv : 1.2 * (last_dt > 0.0 ? last_dt : dt);
      } else {
        t = dt;
      }
      while (t >= cfg.dt_min) {
        detail::retract(u, d, t, u_sq, u_d, d_sq, delta);
        dJ = J.energy_difference(u, qu, delta);
        if (dJ <= cfg.armijo_c * t * slope) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
    }
    if (!accepted) {
      res.status = "line search stalled";
      break;
    }

    for (std::size_t i = 0; i < n; ++i) u[i] += delta[i];
    J_track += dJ;
    ++iter;
    last_dt = t;
    last_dJ = dJ;
    last_recenter_dJ = 0.0;
    if (cfg.method == Method::gradient_flow) dt = 1.2 * t;
    pg_prev = pg;
    pg2_prev = pg2;
    have_prev = true;

    if (cfg.recenter_every > 0 && g.has_z() && iter % cfg.recenter_every == 0) {
      const Field cur(J.grid_ptr(), u);
      const Field shifted = recenter_z(cur);
      std::vector<double> sv(shifted.values().begin(), shifted.values().end());
      if (sv != u) {
        detail::normalize_to(g, sv, rho);
        const double dJr = J.energy(sv).total - J.energy(u).total;
        if (dJr <= 1e-8) {
          u.swap(sv);
          J_track += dJr;
          last_recenter_dJ = dJr;
          have_prev = false;
        }
      }
    }
  }

  res.field = Field(J.grid_ptr(), std::move(u));
  res.breakdown = J.energy(res.field);
  res.lambda = lambda_estimate(J, res.field);
  res.residual = el_residual(J, res.field, res.lambda);
  res.iters = iter;
  return res;
}

/// Warm-started scan over ascending rhos: each solve starts from the
/// previous minimiser rescaled to the next rho.
inline std::vector<SolveResult> continuation(const SolveConfig& base, std::span<const double> rhos,
                                             const Functional& J, const Field* u0 = nullptr) {
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    if (!(rhos[i] > 0.0)) throw InvalidArgument("continuation norms must be positive");
    if (i > 0 && !(rhos[i] > rhos[i - 1])) throw InvalidArgument("continuation norms must be ascending");
  }
  std::vector<SolveResult> out;
  out.reserve(rhos.size());
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    SolveConfig cfg = base;
    cfg.rho = rhos[i];
    if (i == 0) {
      out.push_back(solve(cfg, J, u0));
    } else {
      const Field& prev = out.back().field;
      const Field warm = prev.scaled(rhos[i] / std::sqrt(l2_norm_sq(prev)));
      out.push_back(solve(cfg, J, &warm));
    }
  }
  return out;
}

}  // namespace cylmin
