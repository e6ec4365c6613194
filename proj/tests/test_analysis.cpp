#include <gtest/gtest.h>

#include <cmath>

#include "cylmin/analysis.hpp"
#include "support.hpp"

using namespace cylmin;

namespace {

NonlinearitySpec power(double Omega, double p) {
  NonlinearitySpec w;
  w.Omega = Omega;
  w.R_kind = RKind::power_attractive;
  w.p = p;
  w.gamma = p;
  w.b2 = 1.0 / p;
  return w;
}

PotentialSpec inverse_r() {
  PotentialSpec v;
  v.power_alpha = 1.0;
  v.power_coeff = 1.0;
  return v;
}

const std::vector<double> kSlopeR{8, 16, 32, 64};

}  // namespace

TEST(LogLogSlope, ExactPowerLaw) {
  const std::vector<double> x{1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double xi : x) y.push_back(3.0 * std::pow(xi, 2.5));
  EXPECT_NEAR(loglog_slope(x, y), 2.5, 1e-12);
  const std::vector<double> one{1.0};
  EXPECT_TRUE(std::isnan(loglog_slope(one, one)));
}

TEST(Min0Trial, ProfileExamples) {
  EXPECT_EQ(trial_radial_profile(1.0, 2.0, 3.0) * trial_axial_profile(0.0), 1.0);
  EXPECT_EQ(trial_radial_profile(1.0, 2.0, 1.0), 0.0);
  EXPECT_EQ(trial_radial_profile(1.0, 2.0, 5.0), 0.0);
  EXPECT_DOUBLE_EQ(trial_radial_profile(2.0, 2.0, 1.5), 1.0);
  EXPECT_DOUBLE_EQ(trial_radial_profile(2.0, 2.0, 4.5), 1.0);
  EXPECT_DOUBLE_EQ(trial_axial_profile(1.5), 0.5);
  EXPECT_EQ(trial_axial_profile(-2.0), 0.0);
}

TEST(Min0Trial, SampledFieldRangeAndSupport) {
  const TrialSpec t{1.0, 2.0, {3, 2, 6.0, 3.0, 48, 48}};
  const Field u = min0_trial(t);
  const Grid& g = u.grid();
  for (int j = 0; j < g.n_z(); ++j)
    for (int i = 0; i < g.n_r(); ++i) {
      const double x = u.at(i, j);
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
      if (g.r(i) <= 1.0 || g.r(i) >= 5.0 || std::abs(g.z(j)) >= 2.0) { EXPECT_EQ(x, 0.0); }
      if (g.r(i) >= 2.0 && g.r(i) <= 4.0 && std::abs(g.z(j)) <= 1.0) { EXPECT_EQ(x, 1.0); }
    }
}

TEST(Min0Trial, RejectsOverflowAndBadSpec) {
  EXPECT_THROW(min0_trial(build_grid({3, 2, 5.0, 3.0, 40, 48}), 1.0, 2.0), SupportOverflow);
  EXPECT_THROW(min0_trial(build_grid({3, 2, 6.0, 2.0, 48, 32}), 1.0, 2.0), SupportOverflow);
  try {
    min0_trial(TrialSpec{-1.0, 0.5, {3, 2, 6.0, 3.0, 8, 48}});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    std::vector<std::string> paths;
    for (const auto& v : e.violations()) paths.push_back(v.path);
    EXPECT_NE(std::find(paths.begin(), paths.end(), "analysis.s0"), paths.end());
    EXPECT_NE(std::find(paths.begin(), paths.end(), "analysis.R_list"), paths.end());
    EXPECT_NE(std::find(paths.begin(), paths.end(), "grid.n_r"), paths.end());
  }
}

TEST(Min0Trial, RadialScalingSlopes) {
  const auto rep = certify_negative_infimum(PotentialSpec{}, power(1.0, 3.0), 1.0, kSlopeR, TrialGridRule{3, 3});
  EXPECT_NEAR(rep.slopes.mass, 3.0, 0.2);
  EXPECT_NEAR(rep.slopes.kinetic, 2.0, 0.2);
  EXPECT_NEAR(rep.slopes.nonlinear, 3.0, 0.2);
  EXPECT_EQ(rep.slopes.kinetic, rep.slopes.kinetic_radial);
}

TEST(Min0Trial, CylindricalScalingSlopes) {
  // The fixed z cutoff contributes an axial gradient of order R^k; the
  // radial part alone scales as R^(k-1).
  const auto rep = certify_negative_infimum(PotentialSpec{}, power(1.0, 3.0), 1.0, kSlopeR, TrialGridRule{3, 2});
  EXPECT_NEAR(rep.slopes.mass, 2.0, 0.2);
  EXPECT_NEAR(rep.slopes.kinetic_radial, 1.0, 0.2);
  EXPECT_NEAR(rep.slopes.kinetic_axial, 2.0, 0.2);
  EXPECT_NEAR(rep.slopes.nonlinear, 2.0, 0.2);
}

TEST(Min0Trial, PotentialSlopeTracksDecay) {
  const auto rep = certify_negative_infimum(inverse_r(), power(2.0, 3.0), 1.0, kSlopeR, TrialGridRule{3, 2});
  EXPECT_NEAR(rep.slopes.potential, 2.0 - 1.0, 0.2);
}

TEST(Certify, NoWitnessForNonnegativeW) {
  NonlinearitySpec w;
  w.Omega = 1.0;
  const std::vector<double> R{1, 2, 4, 8};
  const auto rep = certify_negative_infimum(inverse_r(), w, 3.0, R, TrialGridRule{3, 2});
  EXPECT_FALSE(rep.found);
  EXPECT_TRUE(std::isnan(rep.rho0_estimate));
  EXPECT_FALSE(rep.witness.has_value());
  for (const auto& row : rep.rows) EXPECT_GT(row.J, 0.0);
}

TEST(Certify, WitnessPastTheRoot) {
  const std::vector<double> R{1, 2, 4, 8, 16};
  const auto rep = certify_negative_infimum(inverse_r(), power(2.0, 3.0), 6.5, R, TrialGridRule{3, 2});
  ASSERT_TRUE(rep.found);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_NEAR(rep.rho0_estimate * rep.rho0_estimate, l2_norm_sq(*rep.witness), 1e-12 * l2_norm_sq(*rep.witness));
  bool earlier_negative = false;
  for (const auto& row : rep.rows) {
    if (row.R < rep.R_witness && row.J < 0.0) earlier_negative = true;
    if (row.R == rep.R_witness) { EXPECT_LT(row.J, 0.0); }
  }
  EXPECT_FALSE(earlier_negative);
}

TEST(Certify, RejectsBadLists) {
  const std::vector<double> desc{2, 1};
  const std::vector<double> small{0.5};
  EXPECT_THROW(certify_negative_infimum(inverse_r(), power(2.0, 3.0), 6.5, desc, TrialGridRule{3, 2}),
               InvalidArgument);
  EXPECT_THROW(certify_negative_infimum(inverse_r(), power(2.0, 3.0), 6.5, small, TrialGridRule{3, 2}),
               InvalidArgument);
  EXPECT_THROW(certify_negative_infimum(inverse_r(), power(2.0, 3.0), 6.5, {}, TrialGridRule{3, 2}),
               InvalidArgument);
}

class Subadditivity : public ::testing::Test {
 protected:
  GridPtr grid = build_grid({3, 3, 16.0, 1.0, 256, 1});
  NonlinearitySpec w = power(1.0, 3.0);
  Functional J{grid, PotentialSpec{}, w};
  double rho = 0.0;

  void SetUp() override {
    const std::vector<double> R{1, 1.5, 2, 3, 4};
    const auto c = certify_negative_infimum(PotentialSpec{}, w, 5.0, R, TrialGridRule{3, 3});
    ASSERT_TRUE(c.found);
    rho = 1.5 * c.rho0_estimate;
  }
};

TEST_F(Subadditivity, DomainCheck) {
  const std::vector<double> at_rho{rho};
  const std::vector<double> zero{0.0};
  EXPECT_THROW(subadditivity_scan(J, SolveConfig{}, rho, at_rho), InvalidArgument);
  EXPECT_THROW(subadditivity_scan(J, SolveConfig{}, rho, zero), InvalidArgument);
  EXPECT_THROW(subadditivity_scan(J, SolveConfig{}, rho, {}), InvalidArgument);
}

TEST_F(Subadditivity, StrictMarginsIncludingSymmetricRow) {
  const std::vector<double> mus{0.3 * rho, rho / std::sqrt(2.0), 0.7 * rho};
  const auto rep = subadditivity_scan(J, SolveConfig{}, rho, mus);
  ASSERT_TRUE(rep.rho_converged);
  EXPECT_LT(rep.I_rho, 0.0);
  EXPECT_DOUBLE_EQ(rep.margin_floor, 1e-4 * std::abs(rep.I_rho));
  ASSERT_EQ(rep.rows.size(), 3u);
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.converged);
    EXPECT_NEAR(row.mu * row.mu + row.mu_complement * row.mu_complement, rho * rho, 1e-12 * rho * rho);
    EXPECT_DOUBLE_EQ(row.margin, row.I_mu + row.I_sqrt - row.I_rho);
    EXPECT_TRUE(row.strict) << "mu = " << row.mu << " margin = " << row.margin;
  }
  EXPECT_NEAR(rep.rows[1].mu, rep.rows[1].mu_complement, 1e-12 * rho);
  EXPECT_TRUE(rep.all_strict);
  EXPECT_FALSE(rep.any_unconverged);
}

TEST_F(Subadditivity, NonConvergedRowsAreFlagged) {
  SolveConfig cfg;
  cfg.max_iters = 3;
  const std::vector<double> mus{0.5 * rho};
  const auto rep = subadditivity_scan(J, cfg, rho, mus);
  EXPECT_TRUE(rep.any_unconverged);
  EXPECT_FALSE(rep.rows[0].converged);
  EXPECT_FALSE(rep.rows[0].strict);
  EXPECT_FALSE(rep.all_strict);
}

TEST(BrezisLieb, DefectVanishesForDisjointSupports) {
  const auto g = build_grid({3, 2, 4.0, 8.0, 64, 256});
  const NonlinearitySpec w = power(1.0, 3.0);
  const Field b = compact_bump(g, 1.5, 1.0, -3.0, 1.0);
  const std::vector<double> seps{0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 6.0};
  const auto rows = brezis_lieb_probe(b, seps, w);
  ASSERT_EQ(rows.size(), seps.size());
  // At zero separation the identity fails by (2^p - 2) T~(b).
  EXPECT_NEAR(rows[0].defect, 6.0 * std::abs(R_integral(b, w)), 1e-12 * rows[0].defect);
  EXPECT_GT(rows[0].defect, 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].defect, rows[i - 1].defect + 1e-12);
  for (const auto& r : rows)
    if (r.separation >= 2.0) { EXPECT_LE(r.defect, 1e-8) << "separation " << r.separation; }
}

TEST(BrezisLieb, RejectsRadialGridAndOverflow) {
  const NonlinearitySpec w = power(1.0, 3.0);
  const auto radial = build_grid({3, 3, 4.0, 1.0, 64, 1});
  const std::vector<double> seps{0.0};
  EXPECT_THROW(brezis_lieb_probe(sample(radial, [](double r, double) { return std::exp(-r * r); }), seps, w),
               InvalidArgument);
  const auto g = build_grid({3, 2, 4.0, 4.0, 64, 128});
  const std::vector<double> far{0.0, 6.0};
  EXPECT_THROW(brezis_lieb_probe(compact_bump(g, 1.5, 1.0, 0.0, 1.0), far, w), SupportOverflow);
}

TEST(Coercivity, BoundedBelowForSubcriticalPower) {
  const auto g = build_grid({3, 3, 8.0, 1.0, 2048, 1});
  auto phi = [](double r, double) { return std::exp(-0.5 * r * r); };
  const std::vector<double> scales{1, 2, 4, 8, 16};
  const double rho = 8.0;
  const auto fields = concentration_family(g, phi, scales, rho);
  for (const Field& f : fields) EXPECT_NEAR(l2_norm_sq(f), rho * rho, 1e-12 * rho * rho);
  const Functional J3(g, PotentialSpec{}, power(1.0, 3.0));
  const auto r3 = coercivity_probe(J3, rho, fields);
  EXPECT_DOUBLE_EQ(r3.beta, 1.5);
  EXPECT_GE(r3.min_slack, 0.0);
  for (std::size_t i = 1; i < r3.rows.size(); ++i) EXPECT_GT(r3.rows[i].J, r3.rows[i - 1].J);
  const Functional J4(g, PotentialSpec{}, power(1.0, 4.0));
  const auto r4 = coercivity_probe(J4, rho, fields);
  for (std::size_t i = 1; i < r4.rows.size(); ++i) EXPECT_LT(r4.rows[i].J, r4.rows[i - 1].J);
  EXPECT_LT(r4.rows.back().J, r3.rows.back().J);
}

TEST(Coercivity, SmallNormSlackIsQuadratic) {
  const auto g = build_grid({3, 3, 8.0, 1.0, 512, 1});
  const Functional J(g, PotentialSpec{}, power(1.0, 3.0));
  const std::vector<Field> f{sample(g, [](double r, double) { return std::exp(-0.5 * r * r); })};
  const double rho = 1e-3;
  const auto rep = coercivity_probe(J, rho, f);
  const auto e = J.energy(f[0].scaled(rho / std::sqrt(l2_norm_sq(f[0]))));
  const double quad = 0.5 * e.c_norm_sq + 0.5 * rho * rho;
  EXPECT_NEAR(rep.rows[0].bound, quad, 1e-2 * quad);
  EXPECT_NEAR(rep.rows[0].J, quad, 1e-2 * quad);
  EXPECT_THROW(coercivity_probe(J, rho, std::vector<Field>{Field(g)}), InvalidArgument);
}

TEST(Dilation, ReportForInverseR) {
  const auto g = build_grid({3, 2, 12.0, 12.0, 384, 384});
  const Functional J(g, inverse_r(), power(1.0, 3.0));
  const Field u = sample(g, [](double r, double z) { return std::exp(-(r * r + z * z)); });
  for (double th : {1.2, 2.0}) {
    const auto rep = dilation_report(J, u, th);
    EXPECT_LE(rep.mass_rel_error, 1e-3);
    EXPECT_LE(rep.nonlinear_rel_error, 1e-3);
    EXPECT_GE(rep.c_margin_rel, 1e-3);
    EXPECT_LT(rep.c_norm_sq, rep.c_norm_sq_bound);
  }
}
