#include <gtest/gtest.h>

#include <cmath>

#include "magweyl/audit.hpp"

using namespace magweyl;

namespace {

const std::vector<double> kHbars{1.0, 0.5, 0.25, 0.125, 0.0625};

std::vector<double> power_law(double c, double p) {
  std::vector<double> v;
  for (double h : kHbars) v.push_back(c * std::pow(h, p));
  return v;
}

json trivial_config() {
  return json::parse(R"({
    "model": {"d": 2, "n": 2, "F": [[1, 0], [0, 1]]},
    "field": {"components": []},
    "symbols": {
      "phi": {"atoms": [{"hull": {"modes": [{"m": [0, 0], "re": 1, "im": 0}]}, "gamma": 0.5, "center": [0.3, -0.2], "momentum": [0.5, 0.0]}]},
      "psi": {"atoms": [{"hull": {"modes": [{"m": [0, 0], "re": 1, "im": 0}]}, "gamma": 0.7, "center": [-0.2, 0.1], "momentum": [0.0, -0.4]}]}
    },
    "omega_grid": 2,
    "hbar_list": [1, 0.5, 0.25],
    "seed": 5
  })");
}

}  // namespace

TEST(SlopeFit, ExactPowerLaws) {
  EXPECT_NEAR(slope_fit(power_law(3.0, 2.0), kHbars).slope, 2.0, 1e-12);
  EXPECT_NEAR(slope_fit(power_law(0.2, 1.0), kHbars).slope, 1.0, 1e-12);
  EXPECT_NEAR(slope_fit(power_law(5.0, 0.0), kHbars).slope, 0.0, 1e-12);
  EXPECT_LT(slope_fit(power_law(5.0, 1.5), kHbars).residual, 1e-12);
}

TEST(SlopeFit, DropsNonPositiveAndNeedsThree) {
  auto v = power_law(1.0, 2.0);
  v[1] = 0.0;
  SlopeFit f = slope_fit(v, kHbars);
  EXPECT_EQ(f.used, 4u);
  EXPECT_EQ(f.dropped, (std::vector<std::size_t>{1}));
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  v[2] = v[3] = -1.0;
  EXPECT_THROW(slope_fit(v, kHbars), InputError);
}

TEST(SlopeFit, ResidualSeesCurvature) {
  std::vector<double> v;
  for (double h : kHbars) v.push_back(h + h * h);
  SlopeFit f = slope_fit(v, kHbars);
  EXPECT_GT(f.slope, 1.0);
  EXPECT_LT(f.slope, 2.0);
  EXPECT_GT(f.residual, 1e-3);
}

TEST(Discontinuity, FlagsOnlyTheJump) {
  std::vector<double> smooth{1.0, 1.01, 1.02, 1.03, 1.04, 1.05};
  EXPECT_TRUE(discontinuity_flags(smooth).empty());
  std::vector<double> step{1.0, 1.01, 1.02, 1.5, 1.51, 1.52};
  EXPECT_EQ(discontinuity_flags(step), (std::vector<std::size_t>{3}));
}

TEST(Axioms, DiracVanishesOnTheDiagonalAndIsSymmetric) {
  HullModel model = HullModel::identity(2);
  MagneticField B(model, {{0, 1, HullFunction::cosine(2, 0, 0.7)}});
  Symbol Phi(AtomSum::gaussian(2, HullFunction::constant(2, 1.0) + HullFunction::cosine(2, 0, 0.3), 0.5, {0.3, -0.2},
                               {0.5, 0.0}));
  Symbol Psi(AtomSum::gaussian(2, HullFunction::constant(2, 1.0) + HullFunction::sine(2, 1, 0.4), 0.7, {-0.2, 0.1},
                               {0.0, -0.4}));
  GridSpec grid(8.0, 16, 2);
  OmegaGrid omega = OmegaGrid::uniform(2, 4);
  const double h = 0.5;
  double scale = l1_norm(compose_magnetic(B, h, Phi, Psi, grid, omega)).value;
  EXPECT_LE(dirac_defect(B, h, Phi, Phi, grid, omega), 1e-10 * scale);
  double a = dirac_defect(B, h, Phi, Psi, grid, omega), b = dirac_defect(B, h, Psi, Phi, grid, omega);
  EXPECT_GT(a, 1e-4);
  EXPECT_NEAR(a, b, 1e-10 * scale);
  EXPECT_NEAR(von_neumann_defect(B, h, Phi, Psi, grid, omega), von_neumann_defect(B, h, Psi, Phi, grid, omega),
              1e-10 * scale);
}

TEST(Report, TrivialFieldPassesAndIsDeterministic) {
  RunConfig c = config_from_json(trivial_config());
  AuditReport r = audit_report(c);
  for (const auto& chk : r.checks) EXPECT_TRUE(chk.pass) << chk.name << " at " << chk.hbar << ": " << chk.defect;
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.csv().rfind("name,hbar,defect,tolerance,pass\n", 0), 0u);
  EXPECT_EQ(audit_report(c).csv(), r.csv());
  EXPECT_EQ(r.document["config_hash"], hash_hex(config_hash(c)));
}
