#pragma once

// Test-only oracles, written independently of the library kernels.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>

#include "cylmin/energy.hpp"
#include "cylmin/grid.hpp"

namespace cylmin::testing {

/// C-infinity bump exp(1 - 1/(1 - (d/a)^2)) on the disc d < a around (rc, zc).
struct SmoothBump {
  double rc = 0.5, zc = 0.0, a = 0.3, amp = 1.0;

  double operator()(double r, double z) const {
    const double t = ((r - rc) * (r - rc) + (z - zc) * (z - zc)) / (a * a);
    return t < 1.0 ? amp * std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0;
  }
  /// |grad b|^2 in the (r, z) half-plane.
  double grad_sq(double r, double z) const {
    const double t = ((r - rc) * (r - rc) + (z - zc) * (z - zc)) / (a * a);
    if (t >= 1.0) return 0.0;
    const double b = amp * std::exp(1.0 - 1.0 / (1.0 - t));
    const double db_dt = -b / ((1.0 - t) * (1.0 - t));
    const double dr = db_dt * 2.0 * (r - rc) / (a * a);
    const double dz = db_dt * 2.0 * (z - zc) / (a * a);
    return dr * dr + dz * dz;
  }
};

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// omega_(k-1) * integral over r in [0, r_max], z in [-z_max, z_max] of
/// r^(k-1) g(r, z), by a tensor Simpson rule (radial-only when axial = false).
/// The axis node is evaluated at r = 1e-12 r_max so r^(k-1) g keeps its limit.
inline double simpson_cyl(const std::function<double(double, double)>& g, int k, double r_max, double z_max,
                          bool axial, int n) {
  const double omega = 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
  auto radial = [&](double z) {
    return simpson(
        [&](double r) {
          const double re = r > 0.0 ? r : 1e-12 * r_max;
          return std::pow(re, k - 1) * g(re, z);
        },
        0.0, r_max, n);
  };
  if (!axial) return omega * radial(0.0);
  return omega * simpson(radial, -z_max, z_max, n);
}

/// Dense matrix A with (A u)_n = (-Lap u + V u)_n on the grid, assembled
/// from the finite-volume definition node by node.
inline Eigen::MatrixXd dense_operator(const Grid& g, std::span<const double> v) {
  const int nr = g.n_r(), nz = g.n_z();
  const auto w = g.weights();
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      const auto p = static_cast<Eigen::Index>(g.index(i, j));
      auto link = [&](int i2, int j2, double c) {
        A(p, p) += c / w[p];
        if (i2 >= 0 && i2 < nr && j2 >= 0 && j2 < nz) A(p, static_cast<Eigen::Index>(g.index(i2, j2))) -= c / w[p];
      };
      link(i + 1, j, g.face_r(i));
      if (i > 0) link(i - 1, j, g.face_r(i - 1));
      if (g.has_z()) {
        link(i, j + 1, j + 1 < nz ? g.face_z(i) : g.face_z_wall(i));
        link(i, j - 1, j > 0 ? g.face_z(i) : g.face_z_wall(i));
      }
      A(p, p) += v[p];
    }
  return A;
}

/// Lowest eigenpair of the weighted-symmetric operator: W^(1/2) A W^(-1/2)
/// is symmetric; returns (lambda, u) with u in the original basis.
inline std::pair<double, std::vector<double>> lowest_mode(const Grid& g, const Eigen::MatrixXd& A) {
  const auto w = g.weights();
  const Eigen::Index n = A.rows();
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = std::sqrt(w[i]);
  Eigen::MatrixXd S = s.asDiagonal() * A * s.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  Eigen::VectorXd y = es.eigenvectors().col(0);
  std::vector<double> u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = y[i] / s[i];
  if (std::accumulate(u.begin(), u.end(), 0.0) < 0.0)
    for (double& x : u) x = -x;
  return {es.eigenvalues()[0], u};
}

/// Lowest eigenvalue of the radial (k = N) operator from its symmetrised
/// tridiagonal form W^(1/2) A W^(-1/2), assembled from the face areas.
inline double radial_lowest_eigenvalue(const Grid& g, std::span<const double> v) {
  const int nr = g.n_r();
  const auto w = g.weights();
  Eigen::VectorXd diag(nr), sub(nr - 1);
  for (int i = 0; i < nr; ++i) {
    double c = g.face_r(i);
    if (i > 0) c += g.face_r(i - 1);
    diag[i] = c / w[i] + v[i];
    if (i + 1 < nr) sub[i] = -g.face_r(i) / std::sqrt(w[i] * w[i + 1]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

/// Random smooth field: a sum of a few random smooth bumps.
inline Field random_smooth(const GridPtr& g, std::mt19937_64& rng, int bumps = 3) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const GridSpec& s = g->spec();
  std::vector<SmoothBump> bs;
  for (int b = 0; b < bumps; ++b) {
    SmoothBump sb;
    sb.a = s.r_max * (0.2 + 0.2 * U(rng));
    sb.rc = s.r_max * (0.25 + 0.3 * U(rng));
    sb.zc = g->has_z() ? s.z_max * (U(rng) - 0.5) * 0.6 : 0.0;
    sb.amp = 0.5 + U(rng);
    bs.push_back(sb);
  }
  return sample(g, [&](double r, double z) {
    double v = 0.0;
    for (const auto& b : bs) v += b(r, z);
    return v;
  });
}

}  // namespace cylmin::testing
