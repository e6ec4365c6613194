#pragma once

// Cell-centred discretisation of cylindrically symmetric functions
// u = u(|y|, z) on R^k x R^(N-k), with N - k in {0, 1}.
//
// Node (ir, iz) sits at r_i = (i + 1/2) dr and z_j = -z_max + (j + 1/2) dz,
// so no node lies on the axis {y = 0}. Values are stored z-major:
// index = iz * n_r + ir. Outside the truncated box the field is taken to be
// zero (homogeneous Dirichlet data), which the finite-volume stencil below
// imposes through half-cell boundary faces.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cylmin/errors.hpp"

namespace cylmin {

namespace detail {

/// Pairwise summation; fixed reduction tree, so results are reproducible.
inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kBlock = 64;
  if (xs.size() <= kBlock) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace detail

struct GridSpec {
  int N = 3;
  int k = 3;
  double r_max = 1.0;
  double z_max = 1.0;  // unused when k == N
  int n_r = 64;
  int n_z = 1;  // forced to 1 when k == N

  int z_dims() const { return N - k; }
};

inline std::vector<Violation> validate(const GridSpec& s) {
  std::vector<Violation> out;
  if (s.N < 3) out.push_back({"grid.N", "spatial dimension must be >= 3"});
  if (s.k < 2) out.push_back({"grid.k", "symmetry dimension must be >= 2"});
  if (s.k > s.N) out.push_back({"grid.k", "symmetry dimension must not exceed N"});
  if (s.k <= s.N && s.N - s.k > 1)
    out.push_back({"grid.k", "N - k must be 0 or 1 (at most one axial dimension)"});
  if (!(s.r_max > 0.0) || !std::isfinite(s.r_max))
    out.push_back({"grid.r_max", "radial extent must be positive"});
  if (s.n_r <= 0) out.push_back({"grid.n_r", "radial node count must be positive"});
  if (s.k < s.N) {
    if (!(s.z_max > 0.0) || !std::isfinite(s.z_max))
      out.push_back({"grid.z_max", "axial extent must be positive"});
    if (s.n_z <= 0) out.push_back({"grid.n_z", "axial node count must be positive"});
  }
  return out;
}

/// Surface measure of the unit (k-1)-sphere in R^k.
inline double unit_sphere_area(int k) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

class Grid {
 public:
  explicit Grid(GridSpec spec) : spec_(spec) {
    if (auto v = validate(spec_); !v.empty()) throw ValidationError(std::move(v));
    if (spec_.k == spec_.N) spec_.n_z = 1;

    const int nr = spec_.n_r;
    const int nz = spec_.n_z;
    const int km1 = spec_.k - 1;
    omega_ = unit_sphere_area(spec_.k);
    dr_ = spec_.r_max / nr;
    dz_ = has_z() ? 2.0 * spec_.z_max / nz : 1.0;

    r_.resize(nr);
    for (int i = 0; i < nr; ++i) r_[i] = (i + 0.5) * dr_;
    z_.assign(nz, 0.0);
    if (has_z())
      for (int j = 0; j < nz; ++j) z_[j] = -spec_.z_max + (j + 0.5) * dz_;

    // Radial measure of each cell column, omega r_i^(k-1) dr.
    cell_r_.resize(nr);
    for (int i = 0; i < nr; ++i) cell_r_[i] = omega_ * std::pow(r_[i], km1) * dr_;

    weights_.resize(static_cast<std::size_t>(nr) * nz);
    for (int j = 0; j < nz; ++j)
      for (int i = 0; i < nr; ++i) weights_[index(i, j)] = cell_r_[i] * dz_;

    // Radial face i sits at r = (i + 1) dr between node i and i + 1; the
    // last one is the Dirichlet wall at r_max, half a cell from its node.
    // The face at r = 0 has zero area for k >= 2.
    face_r_.resize(nr);
    for (int i = 0; i < nr; ++i) {
      const double rf = (i + 1) * dr_;
      const double gap = (i + 1 < nr) ? dr_ : 0.5 * dr_;
      face_r_[i] = omega_ * std::pow(rf, km1) * dz_ / gap;
    }
    // Axial faces between z-neighbours (interior) and towards the walls.
    face_z_.assign(nr, 0.0);
    face_z_wall_.assign(nr, 0.0);
    if (has_z()) {
      for (int i = 0; i < nr; ++i) {
        face_z_[i] = cell_r_[i] / dz_;
        face_z_wall_[i] = cell_r_[i] / (0.5 * dz_);
      }
    }
  }

  const GridSpec& spec() const noexcept { return spec_; }
  int n_r() const noexcept { return spec_.n_r; }
  int n_z() const noexcept { return spec_.n_z; }
  std::size_t size() const noexcept { return weights_.size(); }
  bool has_z() const noexcept { return spec_.k < spec_.N; }
  double dr() const noexcept { return dr_; }
  /// Axial spacing; 1 for radial grids so that weights stay uniform in form.
  double dz() const noexcept { return dz_; }
  double omega() const noexcept { return omega_; }

  std::size_t index(int ir, int iz) const noexcept {
    return static_cast<std::size_t>(iz) * spec_.n_r + ir;
  }
  double r(int ir) const noexcept { return r_[ir]; }
  double z(int iz) const noexcept { return z_[iz]; }
  std::span<const double> r_nodes() const noexcept { return r_; }
  std::span<const double> z_nodes() const noexcept { return z_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Closed-form measure of the truncated domain.
  double volume() const {
    const double ball = omega_ / spec_.k * std::pow(spec_.r_max, spec_.k);
    return has_z() ? ball * 2.0 * spec_.z_max : ball;
  }

  // Stencil coefficients (face area over node gap).
  double face_r(int ir) const noexcept { return face_r_[ir]; }
  double face_z(int ir) const noexcept { return face_z_[ir]; }
  double face_z_wall(int ir) const noexcept { return face_z_wall_[ir]; }

 private:
  GridSpec spec_;
  double omega_ = 0.0;
  double dr_ = 0.0;
  double dz_ = 1.0;
  std::vector<double> r_, z_, cell_r_, weights_;
  std::vector<double> face_r_, face_z_, face_z_wall_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

/// Real-valued nodal samples on a grid. Values are finite by construction.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}
  Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size())
      throw InvalidArgument("field size " + std::to_string(values_.size()) +
                            " does not match grid size " + std::to_string(grid_->size()));
    for (double v : values_)
      if (!std::isfinite(v)) throw InvalidArgument("field values must be finite");
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(int ir, int iz = 0) const { return values_[grid_->index(ir, iz)]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  Field scaled(double a) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= a;
    return Field(grid_, std::move(v));
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Samples f(r, z) at every node (z = 0 on radial grids).
inline Field sample(const GridPtr& grid, const std::function<double(double, double)>& f) {
  std::vector<double> v(grid->size());
  for (int j = 0; j < grid->n_z(); ++j)
    for (int i = 0; i < grid->n_r(); ++i) v[grid->index(i, j)] = f(grid->r(i), grid->z(j));
  return Field(grid, std::move(v));
}

/// Sum over nodes of integrand * weight.
inline double integrate(const Grid& grid, std::span<const double> f) {
  const auto w = grid.weights();
  std::vector<double> terms(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) terms[n] = f[n] * w[n];
  return detail::pairwise_sum(terms);
}

inline double integrate(const Field& f) { return integrate(f.grid(), f.values()); }

/// Weighted L2 inner product.
inline double inner(const Grid& grid, std::span<const double> a, std::span<const double> b) {
  const auto w = grid.weights();
  std::vector<double> terms(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) terms[n] = a[n] * b[n] * w[n];
  return detail::pairwise_sum(terms);
}

inline double inner(const Field& a, const Field& b) { return inner(a.grid(), a.values(), b.values()); }

inline double l2_norm_sq(const Field& u) { return inner(u, u); }

/// Integral of |u|^q.
inline double lq_norm_q(const Field& u, double q) {
  std::vector<double> t(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) t[n] = std::pow(std::abs(u[n]), q);
  return integrate(u.grid(), t);
}

namespace detail {

/// Applies the discrete -Laplacian: out_n = (1/w_n) * d/du_n of the
/// face-based Dirichlet form 1/2 sum_f c_f (u_a - u_b)^2.
inline void apply_neg_laplacian(const Grid& g, std::span<const double> u, std::span<double> out) {
  const int nr = g.n_r();
  const int nz = g.n_z();
  const auto w = g.weights();
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < nr; ++i) {
      const std::size_t n = g.index(i, j);
      const double un = u[n];
      double acc = g.face_r(i) * (un - (i + 1 < nr ? u[n + 1] : 0.0));
      if (i > 0) acc += g.face_r(i - 1) * (un - u[n - 1]);
      if (g.has_z()) {
        acc += (j + 1 < nz ? g.face_z(i) * (un - u[n + nr]) : g.face_z_wall(i) * un);
        acc += (j > 0 ? g.face_z(i) * (un - u[n - nr]) : g.face_z_wall(i) * un);
      }
      out[n] = acc / w[n];
    }
  }
}

/// Per-face contributions c_f (du)^2 of the Dirichlet form, split into the
/// radial and axial parts.
inline void dirichlet_terms(const Grid& g, std::span<const double> u, std::vector<double>& radial,
                            std::vector<double>& axial) {
  const int nr = g.n_r();
  const int nz = g.n_z();
  radial.assign(g.size(), 0.0);
  axial.assign(g.has_z() ? g.size() + nr : 0, 0.0);
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < nr; ++i) {
      const std::size_t n = g.index(i, j);
      const double d = u[n] - (i + 1 < nr ? u[n + 1] : 0.0);
      radial[n] = g.face_r(i) * d * d;
    }
  }
  if (!g.has_z()) return;
  // Face (i, j) lies below node (i, j); faces j = 0 and j = nz are walls.
  for (int j = 0; j <= nz; ++j) {
    for (int i = 0; i < nr; ++i) {
      const std::size_t f = static_cast<std::size_t>(j) * nr + i;
      if (j == 0) {
        const double d = u[g.index(i, 0)];
        axial[f] = g.face_z_wall(i) * d * d;
      } else if (j == nz) {
        const double d = u[g.index(i, nz - 1)];
        axial[f] = g.face_z_wall(i) * d * d;
      } else {
        const double d = u[g.index(i, j)] - u[g.index(i, j - 1)];
        axial[f] = g.face_z(i) * d * d;
      }
    }
  }
}

}  // namespace detail

/// 1/2 integral of (d_r u)^2 and of (d_z u)^2, returned separately.
struct KineticParts {
  double radial = 0.0;
  double axial = 0.0;
  double total() const { return radial + axial; }
};

inline KineticParts kinetic_parts(const Field& u) {
  std::vector<double> radial, axial;
  detail::dirichlet_terms(u.grid(), u.values(), radial, axial);
  return {0.5 * detail::pairwise_sum(radial), 0.5 * detail::pairwise_sum(axial)};
}

/// 1/2 integral of |grad u|^2.
inline double kinetic_energy(const Field& u) { return kinetic_parts(u).total(); }

/// Shifts u along z by `cells` nodes (positive moves mass towards +z),
/// filling with zeros. Throws SupportOverflow if non-negligible values
/// would leave the box.
inline Field translate_z(const Field& u, int cells) {
  const Grid& g = u.grid();
  if (!g.has_z() || cells == 0) return u;
  const int nr = g.n_r();
  const int nz = g.n_z();
  const double tiny = 1e-300;
  std::vector<double> out(g.size(), 0.0);
  for (int j = 0; j < nz; ++j) {
    const int jt = j + cells;
    for (int i = 0; i < nr; ++i) {
      const double v = u.at(i, j);
      if (jt < 0 || jt >= nz) {
        if (std::abs(v) > tiny) throw SupportOverflow("translation moves field support outside the z range");
        continue;
      }
      out[g.index(i, jt)] = v;
    }
  }
  return Field(u.grid_ptr(), std::move(out));
}

/// Mass centre along z, integral of z u^2 over integral of u^2.
inline double z_mass_center(const Field& u) {
  const Grid& g = u.grid();
  if (!g.has_z()) return 0.0;
  std::vector<double> zu2(g.size()), u2(g.size());
  for (int j = 0; j < g.n_z(); ++j)
    for (int i = 0; i < g.n_r(); ++i) {
      const std::size_t n = g.index(i, j);
      u2[n] = u[n] * u[n];
      zu2[n] = g.z(j) * u2[n];
    }
  const double m = integrate(g, u2);
  return m > 0.0 ? integrate(g, zu2) / m : 0.0;
}

/// Whole-cell shift along z that brings the mass centre within one cell of
/// z = 0. Identity on radial grids. Values pushed past the walls are
/// dropped (zero fill), so the L2 norm is kept only when the support stays
/// inside the box.
inline Field recenter_z(const Field& u) {
  const Grid& g = u.grid();
  if (!g.has_z()) return u;
  const int shift = -static_cast<int>(std::lround(z_mass_center(u) / g.dz()));
  if (shift == 0) return u;
  const int nr = g.n_r();
  const int nz = g.n_z();
  std::vector<double> out(g.size(), 0.0);
  for (int j = 0; j < nz; ++j) {
    const int jt = j + shift;
    if (jt < 0 || jt >= nz) continue;
    for (int i = 0; i < nr; ++i) out[g.index(i, jt)] = u.at(i, j);
  }
  return Field(u.grid_ptr(), std::move(out));
}

}  // namespace cylmin
