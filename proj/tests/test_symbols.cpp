#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "magweyl/symbols.hpp"

using namespace magweyl;

namespace {

AtomSum sample_atoms() {
  HullFunction h = HullFunction::constant(2, 1.0) + HullFunction::cosine(2, 0, 0.6) + HullFunction::sine(2, 1, 0.3);
  AtomSum a = AtomSum::gaussian(2, h, 0.9, {0.3, -0.2}, {0.5, -0.25});
  Atom extra = a.atoms[0];
  extra.poly = Polynomial(2);
  extra.poly.add({1, 0}, {0.4, 0.1});
  extra.poly.add({0, 2}, 0.3);
  extra.gamma = 1.3;
  extra.center = {-0.4, 0.1};
  extra.hull = HullFunction::sine(2, 0);
  a.atoms.push_back(extra);
  return a;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Grid, ValidationAndDual) {
  EXPECT_THROW(GridSpec(8.0, 30, 2), InputError);
  EXPECT_THROW(GridSpec(-1.0, 32, 2), InputError);
  GridSpec g(8.0, 32, 2);
  EXPECT_DOUBLE_EQ(g.h(), 0.5);
  GridSpec d = g.dual();
  EXPECT_EQ(d.tag, Realization::XStar);
  EXPECT_NEAR(d.dual().L, 8.0, 1e-14);
  EXPECT_NEAR(g.point(33)[0], -7.5, 1e-15);
  EXPECT_NEAR(g.point(33)[1], -7.5, 1e-15);
}

TEST(Atoms, AlgebraMatchesPointwise) {
  HullModel model = HullModel::identity(2);
  AtomSum a = sample_atoms();
  AtomSum b = AtomSum::gaussian(2, HullFunction::cosine(2, 1), 0.4, {-0.7, 0.5}, {0.0, 1.0});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2), w(0, kTwoPi);
  for (int i = 0; i < 20; ++i) {
    Vec x{u(rng), u(rng)};
    HullPoint o{{w(rng), w(rng)}};
    EXPECT_LT(std::abs((a * b).evaluate(o, x) - a.evaluate(o, x) * b.evaluate(o, x)), 1e-13);
    EXPECT_LT(std::abs(a.times_coordinate(1).evaluate(o, x) - x[1] * a.evaluate(o, x)), 1e-13);
    const double h = 1e-5;
    Vec xp = x, xm = x;
    xp[0] += h;
    xm[0] -= h;
    cplx fd = (a.evaluate(o, xp) - a.evaluate(o, xm)) / (2 * h);
    EXPECT_LT(std::abs(a.derivative(0).evaluate(o, x) - fd), 1e-8);
    Symbol inv = involution(Symbol(a));
    EXPECT_LT(std::abs(inv.atoms().evaluate(o, x) - std::conj(a.evaluate(o, {-x[0], -x[1]}))), 1e-13);
    EXPECT_LT(std::abs(evaluate(model, involution(inv), o, x) - a.evaluate(o, x)), 1e-13);
  }
}

TEST(Fourier, GaussianAndModulation) {
  AtomSum g = AtomSum::gaussian(1, HullFunction::constant(1, 1.0), 0.5, {0.0}, {0.0});
  AtomSum fg = fourier_atoms(g, +1);
  for (double xi : {-2.0, 0.0, 0.7, 3.0})
    EXPECT_NEAR(std::abs(fg.evaluate({{0.0}}, {xi}) - std::sqrt(kTwoPi) * std::exp(-xi * xi / 2)), 0.0, 1e-13);
  AtomSum m = AtomSum::gaussian(1, HullFunction::constant(1, 1.0), 0.5, {0.0}, {0.8});
  AtomSum fm = fourier_atoms(m, +1);
  for (double xi : {-1.0, 0.2, 1.5})
    EXPECT_LT(std::abs(fm.evaluate({{0.0}}, {xi}) - fg.evaluate({{0.0}}, {xi + 0.8})), 1e-13);
}

TEST(Fourier, ExactRoundTripAndDiscreteAgreement) {
  HullModel model = HullModel::identity(2);
  AtomSum a = sample_atoms();
  AtomSum back = fourier_atoms(fourier_atoms(a, +1), -1);
  HullPoint o{{0.4, 1.9}};
  for (Vec x : {Vec{0.1, 0.2}, Vec{-1.0, 0.7}, Vec{1.5, -1.1}})
    EXPECT_LT(std::abs(back.evaluate(o, x) - a.evaluate(o, x)), 1e-12);

  GridSpec grid(8.0, 64, 2);
  OmegaGrid omega = OmegaGrid::uniform(2, 4);
  Sampled s = sample(model, Symbol(a), grid, omega);
  Sampled fs = partial_fourier(s);
  EXPECT_EQ(fs.grid.tag, Realization::XStar);
  Sampled exact = sample(model, Symbol(fourier_atoms(a, +1), Realization::XStar), fs.grid, omega);
  EXPECT_LT(max_abs_diff(fs.values, exact.values), 1e-10);
  Sampled rt = partial_fourier(fs);
  EXPECT_LT(max_abs_diff(rt.values, s.values), 1e-12);
  // Parseval
  double lhs = 0, rhs = 0;
  for (const auto& v : s.values) lhs += std::norm(v) * grid.weight();
  for (const auto& v : fs.values) rhs += std::norm(v) * fs.grid.weight();
  EXPECT_NEAR(rhs, std::pow(kTwoPi, 2) * lhs, 1e-10 * rhs);
}

TEST(Weights, FiniteDifferencesAreFourthOrder) {
  HullModel model = HullModel::identity(1);
  AtomSum g = AtomSum::gaussian(1, HullFunction::constant(1, 1.0), 0.5, {0.2}, {0.3});
  Symbol exact = apply_weights(model, Symbol(g), {0}, {1}, {0});
  double errs[2];
  int i = 0;
  for (int N : {64, 128}) {
    GridSpec grid(8.0, N, 1);
    OmegaGrid omega = OmegaGrid::uniform(1, 1);
    Symbol fd = apply_weights(model, Symbol(sample(model, Symbol(g), grid, omega)), {0}, {1}, {0});
    Sampled ex = sample(model, exact, grid, omega);
    errs[i++] = max_abs_diff(fd.sampled().values, ex.values);
  }
  EXPECT_GT(std::log2(errs[0] / errs[1]), 3.8);
}

TEST(Weights, HullDerivativeAndCoordinateWeights) {
  HullModel model(2, 2, (Eigen::MatrixXd(2, 2) << 1.0, 0.5, 0.0, 1.0).finished());
  AtomSum a = sample_atoms();
  GridSpec grid(6.0, 16, 2);
  OmegaGrid omega = OmegaGrid::uniform(2, 8);
  Symbol s(sample(model, Symbol(a), grid, omega));
  for (const MultiIndex& beta : {MultiIndex{1, 0}, MultiIndex{0, 1}, MultiIndex{1, 1}}) {
    Sampled got = apply_weights(model, s, {1, 0}, {0, 0}, beta).sampled();
    Sampled want = sample(model, apply_weights(model, Symbol(a), {1, 0}, {0, 0}, beta), grid, omega);
    EXPECT_LT(max_abs_diff(got.values, want.values), 1e-12);
  }
  double sn = seminorm(model, Symbol(a), {0, 0}, {0, 0}, {0, 0}, grid, omega);
  EXPECT_GT(sn, 0.0);
}

TEST(Sampled, EvaluationInterpolates) {
  HullModel model = HullModel::identity(2);
  AtomSum a = sample_atoms();
  GridSpec grid(8.0, 64, 2);
  OmegaGrid omega = OmegaGrid::uniform(2, 8);
  Symbol s(sample(model, Symbol(a), grid, omega));
  HullPoint o{{0.37, 2.2}};
  EXPECT_LT(std::abs(evaluate(model, s, o, grid.point(2080)) - a.evaluate(o, grid.point(2080))), 1e-12);
  EXPECT_LT(std::abs(evaluate(model, s, o, {0.13, -0.41}) - a.evaluate(o, {0.13, -0.41})), 5e-3);
  Sampled t = translate_sampled(model, s.sampled(), {0.5, 0.25});
  EXPECT_LT(std::abs(evaluate(model, Symbol(t), o, grid.point(100)) -
                     a.evaluate(act(model, o, {0.5, 0.25}), grid.point(100))),
            1e-12);
}
