#pragma once

// The constrained functional
//   J(u) = integral of 1/2 |grad u|^2 + 1/2 V u^2 + W(u),
// its weighted-L2 gradient J'(u) = -Lap u + V u + W'(u), the Lagrange
// multiplier estimate, the Euler-Lagrange residual and the volume dilation
// u_theta(x) = u(x / theta^(2/N)).

#include <cmath>
#include <span>
#include <vector>

#include "cylmin/errors.hpp"
#include "cylmin/grid.hpp"
#include "cylmin/model.hpp"

namespace cylmin {

struct EnergyBreakdown {
  double kinetic = 0.0;    // 1/2 int |grad u|^2
  double potential = 0.0;  // 1/2 int V u^2
  double nonlinear = 0.0;  // int W(u)
  double total = 0.0;      // J(u)
  double c_norm_sq = 0.0;  // int |grad u|^2 + V u^2
  double vortex = 0.0;     // int ell^2 / r^2 u^2, part of 2 * potential
};

/// J bound to a grid: caches V at the nodes.
class Functional {
 public:
  Functional(GridPtr grid, PotentialSpec potential, NonlinearitySpec nonlinearity)
      : grid_(std::move(grid)), potential_(potential), nonlinearity_(nonlinearity) {
    const Grid& g = *grid_;
    v_.resize(g.size());
    centrifugal_.resize(g.size());
    const double ell2 = double(potential_.vortex_ell) * potential_.vortex_ell;
    for (int j = 0; j < g.n_z(); ++j)
      for (int i = 0; i < g.n_r(); ++i) {
        const std::size_t n = g.index(i, j);
        v_[n] = eval_potential(potential_, g.r(i), g.z(j));
        centrifugal_[n] = ell2 / (g.r(i) * g.r(i));
      }
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const PotentialSpec& potential() const { return potential_; }
  const NonlinearitySpec& nonlinearity() const { return nonlinearity_; }
  std::span<const double> potential_nodes() const { return v_; }

  EnergyBreakdown energy(std::span<const double> u) const {
    const Grid& g = *grid_;
    std::vector<double> radial, axial;
    detail::dirichlet_terms(g, u, radial, axial);
    EnergyBreakdown e;
    e.kinetic = 0.5 * (detail::pairwise_sum(radial) + detail::pairwise_sum(axial));
    std::vector<double> vu2(u.size()), wu(u.size()), cu2(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) {
      vu2[n] = v_[n] * u[n] * u[n];
      cu2[n] = centrifugal_[n] * u[n] * u[n];
      wu[n] = eval_W(nonlinearity_, u[n]);
    }
    e.potential = 0.5 * integrate(g, vu2);
    e.nonlinear = integrate(g, wu);
    e.vortex = integrate(g, cu2);
    e.total = e.kinetic + e.potential + e.nonlinear;
    e.c_norm_sq = 2.0 * (e.kinetic + e.potential);
    return e;
  }
  EnergyBreakdown energy(const Field& u) const { return energy(u.values()); }

  /// out = -Lap u + V u + W'(u).
  void gradient(std::span<const double> u, std::span<double> out) const {
    detail::apply_neg_laplacian(*grid_, u, out);
    for (std::size_t n = 0; n < u.size(); ++n) out[n] += v_[n] * u[n] + eval_W_prime(nonlinearity_, u[n]);
  }
  Field gradient(const Field& u) const {
    std::vector<double> g(u.size());
    gradient(u.values(), g);
    return Field(grid_, std::move(g));
  }

  /// out = (-Lap + V + W''(u)) d.
  void hessian_apply(std::span<const double> u, std::span<const double> d, std::span<double> out) const {
    detail::apply_neg_laplacian(*grid_, d, out);
    for (std::size_t n = 0; n < u.size(); ++n)
      out[n] += (v_[n] + eval_W_second(nonlinearity_, u[n])) * d[n];
  }

  /// (-Lap + V) d, the quadratic part of J.
  void quadratic_apply(std::span<const double> d, std::span<double> out) const {
    detail::apply_neg_laplacian(*grid_, d, out);
    for (std::size_t n = 0; n < d.size(); ++n) out[n] += v_[n] * d[n];
  }

  /// J(u + delta) - J(u), evaluated as a sum of small terms so that it stays
  /// accurate when |delta| is far below |u| (where J(u + delta) - J(u)
  /// would lose everything to cancellation).
  double energy_difference(std::span<const double> u, std::span<const double> delta) const {
    std::vector<double> qu(u.size());
    quadratic_apply(u, qu);
    return energy_difference(u, qu, delta);
  }

  /// Same, reusing qu = (-Lap + V) u.
  double energy_difference(std::span<const double> u, std::span<const double> qu,
                           std::span<const double> delta) const {
    const Grid& g = *grid_;
    const auto w = g.weights();
    std::vector<double> qd(u.size());
    quadratic_apply(delta, qd);
    std::vector<double> terms(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) {
      const double quad = delta[n] * (qu[n] + 0.5 * qd[n]);
      terms[n] = w[n] * (quad + W_difference(nonlinearity_, u[n], delta[n]));
    }
    return detail::pairwise_sum(terms);
  }

 private:
  GridPtr grid_;
  PotentialSpec potential_;
  NonlinearitySpec nonlinearity_;
  std::vector<double> v_;
  std::vector<double> centrifugal_;
};

inline EnergyBreakdown energy(const Field& u, const PotentialSpec& v, const NonlinearitySpec& w) {
  return Functional(u.grid_ptr(), v, w).energy(u);
}

inline Field gradient(const Field& u, const PotentialSpec& v, const NonlinearitySpec& w) {
  return Functional(u.grid_ptr(), v, w).gradient(u);
}

/// Rayleigh quotient <J'(u), u> / ||u||^2.
inline double lambda_estimate(const Functional& J, const Field& u) {
  const double m = l2_norm_sq(u);
  if (!(m > 0.0)) throw InvalidArgument("lambda estimate needs a nonzero field");
  return inner(J.gradient(u), u) / m;
}

inline double lambda_estimate(const Field& u, const PotentialSpec& v, const NonlinearitySpec& w) {
  return lambda_estimate(Functional(u.grid_ptr(), v, w), u);
}

/// Weighted L2 norm of J'(u) - lambda u.
inline double el_residual(const Functional& J, const Field& u, double lambda) {
  const Field g = J.gradient(u);
  std::vector<double> r(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) r[n] = g[n] - lambda * u[n];
  return std::sqrt(inner(u.grid(), r, r));
}

inline double el_residual(const Field& u, double lambda, const PotentialSpec& v, const NonlinearitySpec& w) {
  return el_residual(Functional(u.grid_ptr(), v, w), u, lambda);
}

/// G(u) for the nonlinear hydrogen model: V = ell^2/r^2 + Omega - 1/|x|,
/// W = -|u|^p / p.
inline PotentialSpec hydrogen_potential(int ell, double Omega) { return {ell, 0.0, 0.0, true, Omega}; }

inline NonlinearitySpec hydrogen_nonlinearity(double p) {
  NonlinearitySpec w;
  w.Omega = 0.0;
  w.R_kind = RKind::power_attractive;
  w.p = p;
  w.gamma = p;
  w.q2 = p;
  return w;
}

inline EnergyBreakdown hydrogen_energy(const Field& u, int ell, double Omega, double p) {
  const GridSpec& s = u.grid().spec();
  if (auto v = validate_hydrogen(ell, Omega, p, s.N, s.k); !v.empty()) throw ValidationError(std::move(v));
  return energy(u, hydrogen_potential(ell, Omega), hydrogen_nonlinearity(p));
}

namespace detail {

/// Linear interpolation weights on cell-centred nodes x_i = lo + (i + 1/2) h.
/// The left end reflects evenly (axis) or hits a zero wall; the right end
/// always hits a zero wall. `i1 < 0` marks the zero wall.
struct Lerp {
  int i0 = -1, i1 = -1;
  double t = 0.0;  // weight of i1
};

inline Lerp lerp_cell_centred(double x, double lo, double h, int n, bool even_left) {
  const double pos = (x - lo) / h - 0.5;
  if (pos <= 0.0) {
    if (even_left) return {0, 0, 0.0};
    // Between the wall at lo (pos = -1/2) and node 0.
    const double t = (pos + 0.5) / 0.5;
    if (t <= 0.0) return {-1, -1, 0.0};
    return {-1, 0, t};
  }
  if (pos >= n - 1) {
    const double t = (pos - (n - 1)) / 0.5;
    if (t >= 1.0) return {-1, -1, 0.0};
    return {n - 1, -1, t};
  }
  const int i = static_cast<int>(std::floor(pos));
  return {i, i + 1, pos - i};
}

}  // namespace detail

/// u_theta(x) = u(x / theta^(2/N)) by bilinear interpolation. The L2 mass
/// scales by theta^2 and int W(u) by theta^2.
inline Field dilate(const Field& u, double theta) {
  if (!(theta >= 1.0)) throw InvalidArgument("dilation factor theta must be >= 1");
  const Grid& g = u.grid();
  const int nr = g.n_r();
  const int nz = g.n_z();
  if (theta == 1.0) return u;
  const double s = std::pow(theta, 2.0 / g.spec().N);

  const double floor = 1e-12 * u.max_abs();
  const double r_last = g.r(nr - 1);
  const double z_last = g.has_z() ? std::abs(g.z(nz - 1)) : 0.0;
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      if (std::abs(u.at(i, j)) <= floor) continue;
      if (g.r(i) * s > r_last + 1e-12 || (g.has_z() && std::abs(g.z(j)) * s > z_last + 1e-12))
        throw SupportOverflow("dilated support exceeds the grid; enlarge r_max/z_max or reduce theta");
    }

  auto value = [&](int ir, int iz) { return (ir < 0 || iz < 0) ? 0.0 : u.at(ir, iz); };
  std::vector<double> out(g.size(), 0.0);
  for (int j = 0; j < nz; ++j) {
    detail::Lerp lz{0, 0, 0.0};
    if (g.has_z()) lz = detail::lerp_cell_centred(g.z(j) / s, -g.spec().z_max, g.dz(), nz, false);
    for (int i = 0; i < nr; ++i) {
      const auto lr = detail::lerp_cell_centred(g.r(i) / s, 0.0, g.dr(), nr, true);
      auto at_z = [&](int iz) { return (1.0 - lr.t) * value(lr.i0, iz) + lr.t * value(lr.i1, iz); };
      double v = 0.0;
      if (lz.i0 >= 0) v += (1.0 - lz.t) * at_z(lz.i0);
      if (lz.i1 >= 0) v += lz.t * at_z(lz.i1);
      out[g.index(i, j)] = v;
    }
  }
  return Field(u.grid_ptr(), std::move(out));
}

/// Scale-invariant Gagliardo-Nirenberg ratio
///   ||u||_q^q / (||u||_2^(q - beta) ||grad u||_2^beta),  beta = N (q - 2) / 2,
/// unchanged by the mass-preserving concentration u -> a^(N/2) u(a x).
inline double gagliardo_nirenberg_ratio(const Field& u, double q) {
  const int N = u.grid().spec().N;
  const double beta = N * (q - 2.0) / 2.0;
  const double l2 = std::sqrt(l2_norm_sq(u));
  const double grad = std::sqrt(2.0 * kinetic_energy(u));
  return lq_norm_q(u, q) / (std::pow(l2, q - beta) * std::pow(grad, beta));
}

}  // namespace cylmin
