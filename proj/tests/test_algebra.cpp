#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "magweyl/algebra.hpp"

using namespace magweyl;

namespace {

HullFunction hull(int d, std::initializer_list<std::pair<Mode, cplx>> terms) {
  HullFunction f(d);
  for (const auto& [m, c] : terms) f.add(m, c);
  return f;
}

double max_abs(const Sampled& s) {
  double m = 0;
  for (const auto& v : s.values) m = std::max(m, std::abs(v));
  return m;
}

double max_diff(const Sampled& a, const Sampled& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

// Gaussians whose hull dependence runs along omega_1 only, so a (k, 1) omega grid resolves them.
struct AxisFixture {
  HullModel model = HullModel::identity(2);
  MagneticField B{model, {{0, 1, HullFunction::cosine(2, 0)}}};
  Symbol Phi{AtomSum::gaussian(2, hull(2, {{{0, 0}, 1.0}, {{1, 0}, 0.2}}), 0.6, {0.3, -0.2}, {0.4, 0.0})};
  Symbol Psi{AtomSum::gaussian(2, hull(2, {{{0, 0}, 1.0}, {{-1, 0}, cplx(0, 0.3)}}), 0.8, {-0.2, 0.1}, {0.0, -0.3})};
  Symbol Xi{AtomSum::gaussian(2, hull(2, {{{0, 0}, 0.7}, {{1, 0}, 0.25}, {{-1, 0}, 0.25}}), 0.7, {0.1, 0.3}, {0.2, 0.2})};
  OmegaGrid omega{std::vector<int>{16, 1}};
  GridSpec grid() const { return default_grid(Phi.atoms() + Psi.atoms() + Xi.atoms()); }
};

// Magnetic Weyl product for a constant field b = B^{12}, written directly as a double integral.
cplx constant_field_product_oracle(const AtomSum& phi, const AtomSum& psi, double b, double hbar, const Vec& x) {
  using boost::math::quadrature::gauss_kronrod;
  HullPoint w{{0.0, 0.0}};
  auto integrand = [&](double y1, double y2) {
    Vec y{y1, y2}, xy{x[0] - y1, x[1] - y2};
    double area = 0.5 * (y1 * x[1] - y2 * x[0]);
    return phi.evaluate(w, y) * psi.evaluate(w, xy) * std::polar(1.0, -hbar * b * area);
  };
  const double R = 12.0;
  auto part = [&](bool imag) {
    auto inner = [&](double y1) {
      auto f = [&](double y2) {
        cplx v = integrand(y1, y2);
        return imag ? v.imag() : v.real();
      };
      return gauss_kronrod<double, 31>::integrate(f, -R, R, 12, 1e-13);
    };
    return gauss_kronrod<double, 31>::integrate(inner, -R, R, 12, 1e-12);
  };
  return cplx(part(false), part(true));
}

}  // namespace

TEST(ComposeZero, GaussianClosedForm) {
  HullModel model = HullModel::identity(1);
  AtomSum g = AtomSum::gaussian(1, HullFunction::constant(1, 1.0), 0.5, {0.0}, {0.0});
  GridSpec grid = default_grid(g);
  OmegaGrid omega = OmegaGrid::uniform(1, 1);
  Sampled c = compose_zero(model, Symbol(g), Symbol(g), grid, omega);
  for (std::size_t x = 0; x < grid.size(); ++x) {
    double xv = grid.point(x)[0];
    if (std::fabs(xv) > 4.0) continue;
    double exact = std::sqrt(M_PI) * std::exp(-xv * xv / 4.0);
    EXPECT_LT(std::abs(c.at(0, x) - exact), 1e-8 * exact) << xv;
  }
}

TEST(ComposeZero, SeparabilityAndCommutativity) {
  HullModel model = HullModel::identity(2);
  HullFunction phi = hull(2, {{{0, 0}, 1.0}, {{1, 0}, 0.3}});
  HullFunction psi = hull(2, {{{0, 0}, 0.5}, {{0, 1}, cplx(0, 0.4)}});
  AtomSum g = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.6, {0.2, 0.0}, {0.3, 0.0});
  AtomSum k = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.9, {0.0, -0.3}, {0.0, 0.5});
  GridSpec grid = default_grid(g + k);
  OmegaGrid omega = OmegaGrid::uniform(2, 4);
  Sampled full = compose_zero(model, Symbol(g.times_hull(phi)), Symbol(k.times_hull(psi)), grid, omega);
  Sampled flat = compose_zero(model, Symbol(g), Symbol(k), grid, omega);
  for (std::size_t w = 0; w < omega.size(); ++w) {
    cplx f = phi.evaluate(omega.point(w)) * psi.evaluate(omega.point(w));
    for (std::size_t x = 0; x < grid.size(); ++x) EXPECT_LT(std::abs(full.at(w, x) - f * flat.at(0, x)), 1e-12);
  }
  Sampled swapped = compose_zero(model, Symbol(k.times_hull(psi)), Symbol(g.times_hull(phi)), grid, omega);
  EXPECT_LE(l1_norm(full - swapped).value, 1e-10);
  EXPECT_THROW(compose_zero(model, Symbol(g, Realization::XStar), Symbol(k), grid, omega), InputError);
}

TEST(ComposeMagnetic, ZeroFieldReducesToConvolution) {
  HullModel model = HullModel::identity(2);
  MagneticField B = MagneticField::zero(model);
  AtomSum g = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.6, {0.2, 0.0}, {0.3, 0.0});
  AtomSum k = AtomSum::gaussian(2, HullFunction::constant(2, 2.0), 0.9, {0.0, -0.3}, {0.0, 0.5});
  GridSpec grid = default_grid(g + k);
  OmegaGrid omega = OmegaGrid::uniform(2, 2);
  Sampled zero = compose_zero(model, Symbol(g), Symbol(k), grid, omega);
  for (double hbar : {1.0, 0.3}) {
    Sampled prod = compose_magnetic(B, hbar, Symbol(g), Symbol(k), grid, omega);
    EXPECT_LT(max_diff(prod, zero), 1e-8 * max_abs(zero)) << hbar;
  }
  EXPECT_THROW(compose_magnetic(B, 0.0, Symbol(g), Symbol(k), grid, omega), InputError);
  EXPECT_THROW(compose_magnetic(B, 1.5, Symbol(g), Symbol(k), grid, omega), InputError);
}

TEST(ComposeMagnetic, ConstantFieldMatchesDirectQuadrature) {
  const double b = 0.8;
  HullModel model = HullModel::identity(2);
  MagneticField B = MagneticField::constant(model, 0, 1, b);
  AtomSum phi = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.5, {0.3, -0.1}, {0.5, 0.0});
  AtomSum psi = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.7, {-0.2, 0.2}, {0.0, -0.4});
  GridSpec grid = default_grid(phi + psi);
  grid.N = 64;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double hbar : {1.0, 0.5}) {
    MagneticProduct prod(B, hbar, Symbol(phi), Symbol(psi), grid);
    auto table = prod.table({HullPoint{{0.0, 0.0}}});
    for (int s = 0; s < 10; ++s) {
      Vec x{u(rng), u(rng)};
      cplx v;
      prod.evaluate(x, table, &v);
      cplx ref = constant_field_product_oracle(phi, psi, b, hbar, x);
      EXPECT_LT(std::abs(v - ref), 1e-6 * std::abs(ref)) << hbar << " " << x[0] << " " << x[1];
    }
  }
}

TEST(ComposeMagnetic, AssociativityAndInvolution) {
  AxisFixture f;
  GridSpec grid = f.grid();
  EXPECT_LE(associativity_defect(f.B, 1.0, f.Phi, f.Psi, f.Xi, grid, f.omega), 5e-3);
  Sampled pq = compose_magnetic(f.B, 1.0, f.Phi, f.Psi, grid, f.omega);
  Sampled qp = compose_magnetic(f.B, 1.0, involution(f.Psi), involution(f.Phi), grid, f.omega);
  Sampled lhs = involution(Symbol(pq)).sampled();
  EXPECT_LE(l1_norm(lhs - qp).value, 5e-3 * l1_norm(qp).value);
}

TEST(Moyal, ConsistencyAndClassicalLimit) {
  HullModel model = HullModel::identity(2);
  MagneticField B(model, {{0, 1, HullFunction::cosine(2, 0, 0.5)}});
  AtomSum f = AtomSum::gaussian(2, hull(2, {{{0, 0}, 1.0}, {{1, 0}, 0.2}}), 0.5, {0.2, 0.0}, {0.0, 0.3});
  AtomSum g = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.4, {-0.1, 0.3}, {0.2, 0.0});
  GridSpec xi = default_grid(f + g, Realization::XStar);
  OmegaGrid omega(std::vector<int>{8, 1});
  Sampled fg = moyal_magnetic(B, 0.5, Symbol(f, Realization::XStar), Symbol(g, Realization::XStar), xi, omega);
  GridSpec xgrid = xi.dual();
  xgrid.tag = Realization::X;
  Sampled direct = partial_fourier(compose_magnetic(B, 0.5, Symbol(fourier_atoms(f, -1)),
                                                    Symbol(fourier_atoms(g, -1)), xgrid, omega));
  EXPECT_LT(max_diff(fg, direct), 1e-10 * max_abs(direct));
  EXPECT_EQ(fg.grid.tag, Realization::XStar);

  Sampled ff = moyal_magnetic(B, 0.5, Symbol(f, Realization::XStar), Symbol(f, Realization::XStar), xi, omega);
  Sampled ff2 = moyal_magnetic(B, 0.5, Symbol(f, Realization::XStar), Symbol(f, Realization::XStar), xi, omega);
  EXPECT_LE(max_diff(ff, ff2), 1e-10);

  MagneticField zero = MagneticField::zero(model);
  Sampled pointwise = sample(model, Symbol(f * g, Realization::XStar), xi, omega);
  double prev = 0;
  for (double hbar : {0.2, 0.1, 0.05}) {
    Sampled s = moyal_magnetic(zero, hbar, Symbol(f, Realization::XStar), Symbol(g, Realization::XStar), xi, omega);
    double dev = max_diff(s, pointwise);
    if (prev > 0) {
      EXPECT_GT(prev / dev, 1.8);
      EXPECT_LT(prev / dev, 2.2);
    }
    prev = dev;
  }
}

TEST(PoissonX, AntisymmetryAndVanishing) {
  AxisFixture f;
  GridSpec grid = f.grid();
  grid.N = 16;
  EXPECT_LE(l1_norm(poisson_X(f.B, f.Phi, f.Phi, grid, f.omega)).value, 1e-10);
  Sampled pq = poisson_X(f.B, f.Phi, f.Psi, grid, f.omega);
  Sampled qp = poisson_X(f.B, f.Psi, f.Phi, grid, f.omega);
  EXPECT_LE(l1_norm(pq + qp).value, 1e-10 * l1_norm(pq).value);

  HullModel model = HullModel::identity(2);
  AtomSum g = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.6, {0.2, 0.0}, {0.3, 0.0});
  AtomSum k = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.9, {0.0, -0.3}, {0.0, 0.5});
  Sampled z = poisson_X(MagneticField::zero(model), Symbol(g), Symbol(k), grid, OmegaGrid::uniform(2, 2));
  EXPECT_LE(max_abs(z), 1e-14);
}

TEST(PoissonX, FourierTransportsToXiBracket) {
  HullModel model = HullModel::identity(2);
  MagneticField B(model, {{0, 1, HullFunction::cosine(2, 0)}});
  AtomSum phi = AtomSum::gaussian(2, hull(2, {{{0, 0}, 1.0}, {{1, 0}, 0.3}}), 1.0, {0.2, -0.1}, {0.3, 0.0});
  AtomSum psi = AtomSum::gaussian(2, hull(2, {{{0, 0}, 1.0}, {{-1, 0}, cplx(0, 0.4)}}), 1.0, {-0.1, 0.2}, {0.0, -0.2});
  GridSpec grid(8.0, 64, 2);
  OmegaGrid omega(std::vector<int>{8, 1});
  Sampled x_side = partial_fourier(poisson_X(B, Symbol(phi), Symbol(psi), grid, omega));
  GridSpec xi = grid.dual();
  AtomSum xi_bracket = poisson_Xi(B, fourier_atoms(phi, +1), fourier_atoms(psi, +1));
  Sampled xi_side = sample(model, Symbol(xi_bracket, Realization::XStar), xi, omega);
  EXPECT_LT(max_diff(x_side, xi_side), 1e-8 * max_abs(xi_side));
  // The convolution theorem for the leading term, same transport.
  Sampled conv = partial_fourier(compose_zero(model, Symbol(phi), Symbol(psi), grid, omega));
  Sampled prod = sample(model, Symbol(fourier_atoms(phi, +1) * fourier_atoms(psi, +1), Realization::XStar), xi, omega);
  EXPECT_LT(max_diff(conv, prod), 1e-8 * max_abs(prod));
}

TEST(PoissonXi, AlgebraicProperties) {
  HullModel model = HullModel::identity(2);
  MagneticField B(model, {{0, 1, HullFunction::cosine(2, 0)}});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto atom = [&]() {
    HullFunction h = hull(2, {{{0, 0}, 1.0}, {{1, 0}, cplx(u(rng), u(rng))}, {{0, 1}, cplx(u(rng), 0.0)}});
    return AtomSum::gaussian(2, h, 0.5 + 0.5 * std::fabs(u(rng)), {u(rng), u(rng)}, {u(rng), u(rng)});
  };
  AtomSum f = atom(), g = atom(), k = atom();
  std::vector<HullPoint> ws;
  std::vector<Vec> xis;
  for (int i = 0; i < 12; ++i) {
    ws.push_back(HullPoint{{3.0 * (u(rng) + 1), 3.0 * (u(rng) + 1)}});
    xis.push_back({1.5 * u(rng), 1.5 * u(rng)});
  }
  AtomSum fg = poisson_Xi(B, f, g), gf = poisson_Xi(B, g, f), ff = poisson_Xi(B, f, f);
  AtomSum lin = poisson_Xi(B, f, g * cplx(2.0) + k * cplx(-0.5));
  AtomSum leib_l = poisson_Xi(B, f, g * k);
  AtomSum fk = poisson_Xi(B, f, k);
  for (const auto& w : ws)
    for (const auto& xi : xis) {
      EXPECT_LT(std::abs(fg.evaluate(w, xi) + gf.evaluate(w, xi)), 1e-10);
      EXPECT_LT(std::abs(ff.evaluate(w, xi)), 1e-10);
      EXPECT_LT(std::abs(lin.evaluate(w, xi) - 2.0 * fg.evaluate(w, xi) + 0.5 * fk.evaluate(w, xi)), 1e-10);
      cplx rhs = fg.evaluate(w, xi) * k.evaluate(w, xi) + g.evaluate(w, xi) * fk.evaluate(w, xi);
      EXPECT_LT(std::abs(leib_l.evaluate(w, xi) - rhs), 1e-8);
    }
  // Functions of xi only: the bracket is the field term alone.
  AtomSum a = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.5, {0.3, 0.0}, {0.0, 0.0});
  AtomSum c = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.8, {0.0, -0.2}, {0.0, 0.0});
  AtomSum ac = poisson_Xi(B, a, c);
  for (const auto& w : ws)
    for (const auto& xi : xis) {
      double bw = std::cos(w.angles[0]);
      cplx expect = -bw * (a.derivative(0).evaluate(w, xi) * c.derivative(1).evaluate(w, xi) -
                           a.derivative(1).evaluate(w, xi) * c.derivative(0).evaluate(w, xi));
      EXPECT_LT(std::abs(ac.evaluate(w, xi) - expect), 1e-12);
    }
  EXPECT_LE(jacobi_defect(B, f, g, k, ws, xis), 1e-6);
}

TEST(PoissonXi, JacobiFailsForOpenField) {
  HullModel model = HullModel::identity(3);
  MagneticField B(model, {{0, 1, HullFunction::cosine(3, 2)}});
  Vec c0{0.2, -0.1, 0.3};
  AtomSum f = AtomSum::gaussian(3, HullFunction::constant(3, 1.0), 0.5, c0, {0.0, 0.0, 0.0});
  AtomSum g = AtomSum::gaussian(3, HullFunction::constant(3, 1.0), 0.5, {0.0, 0.3, -0.2}, {0.0, 0.0, 0.0});
  AtomSum k = AtomSum::gaussian(3, HullFunction::constant(3, 1.0), 0.5, {-0.3, 0.0, 0.1}, {0.0, 0.0, 0.0});
  std::vector<HullPoint> ws{{{0.0, 0.0, 1.2}}, {{0.5, 1.0, 2.0}}, {{2.0, 0.3, 0.7}}};
  std::vector<Vec> xis{{0.0, 0.0, 0.0}, {0.4, -0.3, 0.2}, {-0.5, 0.1, 0.6}};
  EXPECT_GT(jacobi_defect(B, f, g, k, ws, xis), 1e-2);
}

TEST(PoissonXi, SampledMatchesExact) {
  HullModel model = HullModel::identity(2);
  MagneticField B(model, {{0, 1, HullFunction::cosine(2, 0)}});
  AtomSum f = AtomSum::gaussian(2, hull(2, {{{0, 0}, 1.0}, {{1, 0}, 0.3}}), 0.5, {0.2, 0.0}, {0.0, 0.0});
  AtomSum g = AtomSum::gaussian(2, hull(2, {{{0, 0}, 1.0}, {{0, 1}, 0.2}}), 0.5, {0.0, 0.1}, {0.0, 0.0});
  OmegaGrid omega = OmegaGrid::uniform(2, 8);
  std::vector<double> err;
  for (int N : {32, 64}) {
    GridSpec xi(8.0, N, 2, Realization::XStar);
    Sampled fs = sample(model, Symbol(f, Realization::XStar), xi, omega);
    Sampled exact = poisson_Xi(B, Symbol(f, Realization::XStar), Symbol(g, Realization::XStar), xi, omega);
    Sampled mixed = poisson_Xi(B, Symbol(fs), Symbol(g, Realization::XStar), xi, omega);
    err.push_back(max_diff(exact, mixed) / max_abs(exact));
  }
  EXPECT_LT(err[1], 3e-3);
  EXPECT_GT(std::log2(err[0] / err[1]), 3.5);
}

TEST(PiOmega, MorphismProperties) {
  HullModel model = HullModel::identity(2);
  MagneticField B(model, {{0, 1, HullFunction::cosine(2, 0)}});
  AtomSum flat = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.5, {0.1, 0.0}, {0.0, 0.0});
  AtomSum f = AtomSum::gaussian(2, hull(2, {{{0, 0}, 1.0}, {{1, 0}, 0.4}, {{0, -1}, 0.3}}), 0.6, {0.2, 0.0}, {0.0, 0.0});
  AtomSum g = AtomSum::gaussian(2, hull(2, {{{0, 0}, 0.5}, {{1, 1}, cplx(0, 0.3)}}), 0.7, {0.0, -0.2}, {0.0, 0.0});
  std::vector<Vec> xs{{0.0, 0.0}, {0.7, -1.1}, {2.3, 0.4}, {-1.5, 1.9}};
  std::vector<Vec> xis{{0.0, 0.0}, {0.5, -0.4}, {-0.3, 0.8}};
  HullPoint w1{{0.3, 1.7}}, w2{{2.2, 4.0}};
  auto a = pi_omega(model, flat, w1, xs, xis), b = pi_omega(model, flat, w2, xs, xis);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_EQ(a.values[i], b.values[i]);
  auto pf = pi_omega(model, f, w1, xs, xis), pg = pi_omega(model, g, w1, xs, xis), pfg = pi_omega(model, f * g, w1, xs, xis);
  for (std::size_t i = 0; i < pf.values.size(); ++i)
    EXPECT_LT(std::abs(pfg.values[i] - pf.values[i] * pg.values[i]), 1e-12);
  double d1 = poisson_map_defect(B, f, g, w1, xs, xis, 0.02);
  double d2 = poisson_map_defect(B, f, g, w1, xs, xis, 0.01);
  EXPECT_GT(std::log2(d1 / d2), 1.9);
  EXPECT_LT(d2, 1e-3);
}

TEST(Expansion, ZeroFieldRemainderVanishes) {
  HullModel model = HullModel::identity(2);
  AtomSum g = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.6, {0.2, 0.0}, {0.3, 0.0});
  AtomSum k = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.9, {0.0, -0.3}, {0.0, 0.5});
  GridSpec grid = default_grid(g + k);
  grid.N = 16;
  auto r = expansion_remainder(MagneticField::zero(model), 0.5, Symbol(g), Symbol(k), grid, OmegaGrid::uniform(2, 2));
  EXPECT_LE(r.subleading_norm, 1e-14);
  EXPECT_LE(r.remainder_norm, r.tolerance);
  EXPECT_FALSE(r.reliable);
}

TEST(Expansion, OrdersAndUniformRemainder) {
  HullModel model = HullModel::identity(2);
  MagneticField B = MagneticField::constant(model, 0, 1, 0.7);
  AtomSum phi = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.5, {0.3, -0.2}, {0.5, 0.0});
  AtomSum psi = AtomSum::gaussian(2, HullFunction::constant(2, 1.0), 0.7, {-0.2, 0.1}, {0.0, -0.4});
  GridSpec grid = default_grid(phi + psi);
  grid.N = 16;
  OmegaGrid omega = OmegaGrid::uniform(2, 1);
  std::vector<double> lx, ly, rem;
  for (double hbar : {1.0, 0.5, 0.25, 0.125}) {
    auto r = expansion_remainder(B, hbar, Symbol(phi), Symbol(psi), grid, omega);
    EXPECT_LE(r.reconstruction_defect, 1e-12 * r.product_norm);
    EXPECT_TRUE(r.reliable);
    lx.push_back(std::log(hbar));
    ly.push_back(std::log(r.first_order_norm));
    rem.push_back(r.remainder_norm);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  EXPECT_NEAR(sxy / sxx, 1.0, 0.15);
  EXPECT_LE(*std::max_element(rem.begin(), rem.end()), 2.0 * *std::min_element(rem.begin(), rem.end()));
}

TEST(L1Norm, GaussianScalingTriangle) {
  HullModel model = HullModel::identity(1);
  AtomSum g = AtomSum::gaussian(1, HullFunction::constant(1, 1.0), 0.5, {0.0}, {0.0});
  GridSpec grid = default_grid(g);
  OmegaGrid omega = OmegaGrid::uniform(1, 4);
  L1Norm n = l1_norm(model, Symbol(g), grid, omega);
  EXPECT_LT(std::fabs(n.value - std::sqrt(kTwoPi)), 1e-8 * std::sqrt(kTwoPi));
  EXPECT_GE(n.upper, n.value - 1e-12);
  Sampled s = sample(model, Symbol(g.times_hull(HullFunction::cosine(1, 0))), grid, omega);
  Sampled t = sample(model, Symbol(AtomSum::gaussian(1, HullFunction::sine(1, 0), 0.3, {1.0}, {0.5})), grid, omega);
  EXPECT_NEAR(l1_norm(s * cplx(-2.5)).value, 2.5 * l1_norm(s).value, 1e-12);
  EXPECT_LE(l1_norm(s + t).value, l1_norm(s).value + l1_norm(t).value + 1e-12);
}
