#include "magweyl/flux.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "magweyl/expdd.hpp"

namespace magweyl {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr cplx I(0.0, 1.0);

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec scale(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

cplx bilinear(const Eigen::MatrixXcd& C, const Vec& u, const Vec& v) {
  cplx s = 0;
  const int n = static_cast<int>(u.size());
  for (int j = 0; j < n; ++j) {
    if (u[j] == 0.0) continue;
    for (int k = 0; k < n; ++k) s += u[j] * v[k] * C(j, k);
  }
  return s;
}

void check_dims(const MagneticField& B, std::initializer_list<const Vec*> vs) {
  for (const Vec* v : vs)
    if (static_cast<int>(v->size()) != B.n()) throw InputError("vector dimension does not match field");
}

template <class F>
double integrate_unit(F f, double tol) {
  double err = 0;
  return gauss_kronrod<double, 21>::integrate(f, 0.0, 1.0, 15, tol, &err);
}

}  // namespace

MagneticField::MagneticField(HullModel model, const std::vector<Component>& upper) : model_(std::move(model)) {
  const int n = model_.n;
  comp_.assign(n * n, HullFunction(model_.d));
  for (const auto& c : upper) {
    if (c.j < 0 || c.k < 0 || c.j >= n || c.k >= n) throw InputError("field component index out of range");
    if (c.j == c.k) throw InputError("field diagonal components must vanish");
    if (c.value.dim() != model_.d && !c.value.empty()) throw InputError("field component has wrong hull dimension");
    int j = std::min(c.j, c.k), k = std::max(c.j, c.k);
    HullFunction v = c.j < c.k ? c.value : c.value * cplx(-1);
    comp_[j * n + k] = comp_[j * n + k] + v;
    comp_[k * n + j] = comp_[k * n + j] - v;
  }
  std::map<Mode, Eigen::MatrixXcd> acc;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (const auto& [m, c] : comp_[j * n + k].modes()) {
        auto it = acc.find(m);
        if (it == acc.end()) it = acc.emplace(m, Eigen::MatrixXcd::Zero(n, n)).first;
        it->second(j, k) += c;
      }
  for (auto& [m, C] : acc) {
    if (C.cwiseAbs().maxCoeff() == 0.0) continue;
    terms_.push_back({m, model_.wavevector(m), C});
  }
}

MagneticField MagneticField::zero(const HullModel& model) { return MagneticField(model, {}); }

MagneticField MagneticField::constant(const HullModel& model, int j, int k, double b) {
  return MagneticField(model, {{j, k, HullFunction::constant(model.d, b)}});
}

Eigen::MatrixXd MagneticField::evaluate(const HullPoint& omega) const {
  const int n = model_.n;
  Eigen::MatrixXd M(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) M(j, k) = comp_[j * n + k].evaluate(omega).real();
  return M;
}

std::vector<MagneticField::Component> MagneticField::upper_components() const {
  std::vector<Component> out;
  const int n = model_.n;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (!comp_[j * n + k].empty()) out.push_back({j, k, comp_[j * n + k]});
  return out;
}

FieldValidation validate_field(const MagneticField& B) {
  FieldValidation v;
  const int n = B.n();
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const auto& f = B(j, k);
      for (const auto& [m, c] : f.modes()) {
        if (std::abs(c + B(k, j).coefficient(m)) > 1e-14 * (1 + std::abs(c))) v.antisymmetric = false;
        Mode neg(m.size());
        for (std::size_t a = 0; a < m.size(); ++a) neg[a] = -m[a];
        if (std::abs(std::conj(c) - f.coefficient(neg)) > 1e-12 * (1 + std::abs(c))) v.real = false;
      }
    }
  for (const auto& t : B.mode_terms())
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          cplx s = I * (t.k[j] * t.C(k, l) + t.k[k] * t.C(l, j) + t.k[l] * t.C(j, k));
          v.closedness_defect += std::abs(s);
        }
  v.closed = v.closedness_defect <= 1e-12;
  std::ostringstream os;
  if (!v.antisymmetric) os << "field is not antisymmetric; ";
  if (!v.real) os << "field is not real-valued; ";
  if (!v.closed) os << "field is not closed (defect " << v.closedness_defect << ")";
  if (v.antisymmetric && v.real && v.closed) os << "field is closed, real and antisymmetric";
  v.message = os.str();
  return v;
}

HullFunction triangle_flux(const MagneticField& B, const Vec& a, const Vec& b, const Vec& c) {
  check_dims(B, {&a, &b, &c});
  // Canonical vertex order makes orientation reversal exact in floating point.
  const Vec* v[3] = {&a, &b, &c};
  double sign = 1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2 - i; ++j)
      if (*v[j + 1] < *v[j]) {
        std::swap(v[j], v[j + 1]);
        sign = -sign;
      }
  const Vec x = sub(*v[1], *v[0]), y = sub(*v[2], *v[1]);
  HullFunction out(B.model().d);
  for (const auto& t : B.mode_terms()) {
    cplx g = bilinear(t.C, x, y);
    if (g == 0.0) continue;
    out.add(t.m, sign * g * expdd(I * dot(t.k, *v[0]), I * dot(t.k, *v[1]), I * dot(t.k, *v[2])));
  }
  return out;
}

HullFunction triangle_flux_translated(const MagneticField& B, const Vec& a, const Vec& b, const Vec& c) {
  check_dims(B, {&a, &b, &c});
  const Vec x = sub(b, a), y = sub(c, b), ca = sub(c, a);
  HullFunction base(B.model().d);
  for (const auto& t : B.mode_terms()) {
    cplx g = bilinear(t.C, x, y);
    if (g == 0.0) continue;
    base.add(t.m, g * expdd(0.0, I * dot(t.k, x), I * dot(t.k, ca)));
  }
  return translate(B.model(), base, a);
}

double triangle_flux_oracle(const MagneticField& B, const HullPoint& omega, const Vec& a, const Vec& b,
                            const Vec& c, double rel_tol) {
  check_dims(B, {&a, &b, &c});
  const Vec x = sub(b, a), y = sub(c, b);
  const int n = B.n();
  auto inner = [&](double s) {
    return integrate_unit(
        [&](double t) {
          Vec p(n);
          for (int j = 0; j < n; ++j) p[j] = a[j] + s * x[j] + s * t * y[j];
          Eigen::MatrixXd M = B.evaluate(act(B.model(), omega, p));
          double v = 0;
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) v += x[j] * y[k] * M(j, k);
          return s * v;
        },
        rel_tol);
  };
  return integrate_unit(inner, rel_tol);
}

HullFunction scaled_flux(const MagneticField& B, double hbar, const Vec& x, const Vec& y, int order) {
  check_dims(B, {&x, &y});
  if (order < 0 || order > 2) throw InputError("scaled_flux supports derivative orders 0, 1, 2");
  const Vec xy = sub(x, y);
  HullFunction out(B.model().d);
  for (const auto& t : B.mode_terms()) {
    cplx g = bilinear(t.C, y, xy);
    if (g == 0.0) continue;
    const double kx = dot(t.k, x), ky = dot(t.k, y);
    const cplx w[3] = {I * (-0.5 * kx), I * (ky - 0.5 * kx), I * (0.5 * kx)};
    const cplx z[3] = {hbar * w[0], hbar * w[1], hbar * w[2]};
    cplx v = 0;
    if (order == 0) {
      v = exp_divided_difference(z, 3);
    } else if (order == 1) {
      for (int i = 0; i < 3; ++i) {
        cplx zz[4] = {z[0], z[1], z[2], z[i]};
        v += w[i] * exp_divided_difference(zz, 4);
      }
    } else {
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          cplx zz[5] = {z[0], z[1], z[2], z[i], z[j]};
          cplx e = exp_divided_difference(zz, 5);
          v += 2.0 * w[i] * w[j] * e;
        }
    }
    out.add(t.m, g * v);
  }
  return out;
}

void flux_origin_coefficients(const MagneticField& B, const double* x, const double* y, cplx* out) {
  const int n = B.n();
  std::size_t idx = 0;
  for (const auto& t : B.mode_terms()) {
    cplx g = 0;
    double kx = 0, ky = 0;
    for (int j = 0; j < n; ++j) {
      kx += t.k[j] * x[j];
      ky += t.k[j] * y[j];
      if (x[j] == 0.0) continue;
      for (int k = 0; k < n; ++k) g += x[j] * (y[k] - x[k]) * t.C(j, k);
    }
    out[idx++] = g == 0.0 ? cplx(0) : g * expdd(0.0, I * kx, I * ky);
  }
}

void scaled_flux_coefficients(const MagneticField& B, double hbar, const double* x, const double* y, cplx* out) {
  const int n = B.n();
  std::size_t idx = 0;
  for (const auto& t : B.mode_terms()) {
    cplx g = 0;
    double kx = 0, ky = 0;
    for (int j = 0; j < n; ++j) {
      kx += t.k[j] * x[j];
      ky += t.k[j] * y[j];
      if (y[j] == 0.0) continue;
      for (int k = 0; k < n; ++k) g += y[j] * (x[k] - y[k]) * t.C(j, k);
    }
    out[idx++] = g == 0.0 ? cplx(0) : g * std::polar(1.0, -0.5 * hbar * kx) * expdd(0.0, I * (hbar * ky), I * (hbar * kx));
  }
}

HullFunction scaled_flux_via_triangle(const MagneticField& B, double hbar, const Vec& x, const Vec& y) {
  const Vec a = scale(x, -0.5 * hbar);
  const Vec b = sub(scale(y, hbar), scale(x, 0.5 * hbar));
  const Vec c = scale(x, 0.5 * hbar);
  return triangle_flux(B, a, b, c) * cplx(1.0 / (hbar * hbar));
}

double scaled_flux_oracle(const MagneticField& B, const HullPoint& omega, double hbar, const Vec& x,
                          const Vec& y, double rel_tol) {
  check_dims(B, {&x, &y});
  const int n = B.n();
  auto inner = [&](double t) {
    if (t == 0.0) return 0.0;
    return t * integrate_unit(
                   [&](double u) {
                     const double s = u * t;
                     Vec p(n);
                     for (int j = 0; j < n; ++j) p[j] = hbar * ((s - 0.5) * x[j] + (t - s) * y[j]);
                     Eigen::MatrixXd M = B.evaluate(act(B.model(), omega, p));
                     double v = 0;
                     for (int j = 0; j < n; ++j)
                       for (int k = 0; k < n; ++k) v += y[j] * (x[k] - y[k]) * M(j, k);
                     return v;
                   },
                   rel_tol);
  };
  return integrate_unit(inner, rel_tol);
}

cplx cocycle(const MagneticField& B, double hbar, const HullPoint& omega, const Vec& x, const Vec& y) {
  const Vec z(B.n(), 0.0);
  const Vec hx = scale(x, hbar), hxy = scale(add(x, y), hbar);
  double gamma = triangle_flux(B, z, hx, hxy).evaluate(omega).real();
  return std::polar(1.0, -gamma / hbar);
}

std::vector<cplx> cocycle_on_grid(const MagneticField& B, double hbar, const OmegaGrid& grid, const Vec& x,
                                  const Vec& y) {
  const Vec z(B.n(), 0.0);
  HullFunction gamma = triangle_flux(B, z, scale(x, hbar), scale(add(x, y), hbar));
  std::vector<cplx> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] = std::polar(1.0, -gamma.evaluate(grid.point(i)).real() / hbar);
  return out;
}

namespace {

std::string grid_label(const OmegaGrid& g) {
  std::ostringstream os;
  for (std::size_t a = 0; a < g.shape.size(); ++a) os << (a ? "x" : "") << g.shape[a];
  return os.str();
}

}  // namespace

DefectReport cocycle_identity_defect(const MagneticField& B, double hbar, const Vec& x, const Vec& y,
                                     const Vec& z, const OmegaGrid& grid, double tolerance) {
  check_dims(B, {&x, &y, &z});
  const Vec o(B.n(), 0.0);
  const Vec hx = scale(x, hbar), hy = scale(y, hbar), hz = scale(z, hbar);
  const Vec hxy = add(hx, hy), hyz = add(hy, hz), hxyz = add(hxy, hz);
  // kappa(x+y, z) kappa(x, y) versus theta_{hbar x}[kappa(y, z)] kappa(x, y+z)
  HullFunction g1 = triangle_flux(B, o, hxy, hxyz);
  HullFunction g2 = triangle_flux(B, o, hx, hxy);
  HullFunction g3 = translate(B.model(), triangle_flux(B, o, hy, hyz), hx);
  HullFunction g4 = triangle_flux(B, o, hx, hxyz);
  DefectReport rep;
  rep.tolerance = tolerance;
  rep.hbar = hbar;
  rep.grid = grid_label(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    HullPoint w = grid.point(i);
    double lhs = g1.evaluate(w).real() + g2.evaluate(w).real();
    double rhs = g3.evaluate(w).real() + g4.evaluate(w).real();
    double d = std::abs(std::polar(1.0, -lhs / hbar) - std::polar(1.0, -rhs / hbar));
    if (d > rep.defect || i == 0) {
      rep.defect = std::max(rep.defect, d);
      rep.omega = w;
    }
  }
  return rep;
}

DefectReport normalization_defect(const MagneticField& B, double hbar, const Vec& x, const OmegaGrid& grid,
                                  double tolerance) {
  const Vec o(B.n(), 0.0);
  DefectReport rep;
  rep.tolerance = tolerance;
  rep.hbar = hbar;
  rep.grid = grid_label(grid);
  const Vec negx = scale(x, -1.0);
  for (const auto& pair : {std::make_pair(x, o), std::make_pair(o, x), std::make_pair(x, negx)}) {
    auto vals = cocycle_on_grid(B, hbar, grid, pair.first, pair.second);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      double d = std::max(std::abs(vals[i] - 1.0), std::fabs(std::abs(vals[i]) - 1.0));
      if (d > rep.defect) {
        rep.defect = d;
        rep.omega = grid.point(i);
      }
    }
  }
  if (rep.omega.angles.empty()) rep.omega = grid.point(0);
  return rep;
}

double translation_identity_defect(const MagneticField& B, const Vec& x, const Vec& y, const Vec& z,
                                   const HullPoint& omega) {
  const Vec o(B.n(), 0.0);
  const Vec yz = add(y, z);
  cplx lhs = translate(B.model(), triangle_flux_translated(B, o, y, yz), x).evaluate(omega);
  cplx rhs = triangle_flux(B, x, add(x, y), add(x, yz)).evaluate(omega);
  return std::abs(lhs - rhs);
}

Vec vector_potential_transverse(const MagneticField& B, const HullPoint& omega, const Vec& x) {
  check_dims(B, {&x});
  const int n = B.n();
  Vec A(n, 0.0);
  for (const auto& t : B.mode_terms()) {
    double ph = 0;
    for (std::size_t a = 0; a < t.m.size(); ++a) ph += t.m[a] * omega.angles[a];
    const cplx kx = I * dot(t.k, x);
    const cplx s = std::polar(1.0, ph) * expdd(0.0, kx, kx);
    for (int k = 0; k < n; ++k) {
      cplx acc = 0;
      for (int j = 0; j < n; ++j) acc += x[j] * t.C(j, k);
      A[k] += (acc * s).real();
    }
  }
  return A;
}

double circulation(const MagneticField& B, const HullPoint& omega, const Vec& p, const Vec& q) {
  const Vec d = sub(q, p);
  const int n = B.n();
  return integrate_unit(
      [&](double t) {
        Vec r(n);
        for (int j = 0; j < n; ++j) r[j] = p[j] + t * d[j];
        return dot(vector_potential_transverse(B, omega, r), d);
      },
      1e-13);
}

double stokes_defect(const MagneticField& B, const HullPoint& omega, const Vec& a, const Vec& b, const Vec& c) {
  check_dims(B, {&a, &b, &c});
  double gamma = triangle_flux(B, a, b, c).evaluate(omega).real();
  double circ = circulation(B, omega, a, b) + circulation(B, omega, b, c) + circulation(B, omega, c, a);
  return std::fabs(gamma - circ);
}

namespace {

struct SupNorms {
  Eigen::MatrixXd b0;                // sup |B^{jk}|
  std::vector<Eigen::MatrixXd> b1;   // sup |delta_l B^{jk}|, indexed l
  std::vector<Eigen::MatrixXd> b2;   // sup |delta_l delta_m B^{jk}|, indexed l*n+m
};

SupNorms sup_norms(const MagneticField& B) {
  const int n = B.n(), d = B.model().d;
  const int per_axis = d <= 2 ? 64 : 24;
  OmegaGrid grid = OmegaGrid::uniform(d, per_axis);
  SupNorms s;
  s.b0 = Eigen::MatrixXd::Zero(n, n);
  s.b1.assign(n, Eigen::MatrixXd::Zero(n, n));
  s.b2.assign(n * n, Eigen::MatrixXd::Zero(n, n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const HullFunction& f = B(j, k);
      if (f.empty()) continue;
      s.b0(j, k) = seminorm_salpha(B.model(), f, std::vector<int>(n, 0), grid).lower;
      for (int l = 0; l < n; ++l) {
        std::vector<int> al(n, 0);
        al[l] = 1;
        s.b1[l](j, k) = seminorm_salpha(B.model(), f, al, grid).lower;
        for (int m = 0; m < n; ++m) {
          std::vector<int> alm = al;
          alm[m] += 1;
          s.b2[l * n + m](j, k) = seminorm_salpha(B.model(), f, alm, grid).lower;
        }
      }
    }
  return s;
}

double grid_sup(const HullFunction& f, int d, int per_axis) {
  OmegaGrid g = OmegaGrid::uniform(d, per_axis);
  double m = 0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(f.evaluate(g.point(i))));
  return m;
}

// Conservative left side: coefficient l1 norm, refined grid sup when the l1 bound is too loose.
double lhs_norm(const HullFunction& f, int d, double rhs) {
  double l1 = f.l1_coefficients();
  if (l1 <= rhs) return l1;
  double prev = -1, cur = 0;
  for (int per_axis = 32; per_axis <= (d <= 2 ? 512 : 64); per_axis *= 2) {
    cur = grid_sup(f, d, per_axis);
    if (prev >= 0 && std::fabs(cur - prev) <= 1e-6 * std::max(1.0, cur)) break;
    prev = cur;
  }
  return cur;
}

std::vector<std::vector<int>> multi_indices(int n, int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(n, 0);
  while (true) {
    int s = 0;
    for (int v : idx) s += v;
    if (s <= max_order) out.push_back(idx);
    int p = n - 1;
    while (p >= 0 && ++idx[p] > max_order) idx[p--] = 0;
    if (p < 0) break;
  }
  return out;
}

// Central-difference weights on the 3^n stencil for d^a/dx^a with |a| <= 2.
double stencil_weight(const std::vector<int>& a, const std::vector<int>& offset, double eta) {
  double w = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    int o = offset[j];
    if (a[j] == 0) w *= (o == 0 ? 1.0 : 0.0);
    else if (a[j] == 1) w *= (o == 0 ? 0.0 : 0.5 * o / eta);
    else w *= (o == 0 ? -2.0 : 1.0) / (eta * eta);
  }
  return w;
}

}  // namespace

Lemma3Report lemma3_check(const MagneticField& B, const std::vector<Lemma3Sample>& samples, bool check_existence,
                          unsigned seed) {
  const int n = B.n(), d = B.model().d;
  Lemma3Report rep;
  rep.samples = samples.size();
  SupNorms sn = sup_norms(B);
  const double slack = 1e-12;
  for (const auto& s : samples) {
    if (!(s.hbar > 0 && s.hbar <= 1 && s.tau > 0 && s.tau <= 1)) throw InputError("lemma3: hbar and tau must lie in (0,1]");
    const double eps = s.hbar * s.tau;
    Vec xy = sub(s.x, s.y);
    double r0 = 0, r1 = 0, r2 = 0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double base = std::fabs(s.y[j]) * std::fabs(xy[k]);
        r0 += sn.b0(j, k) * base;
        for (int l = 0; l < n; ++l) {
          r1 += sn.b1[l](j, k) * base * (std::fabs(xy[l]) + std::fabs(s.y[l]));
          for (int m = 0; m < n; ++m)
            r2 += sn.b2[l * n + m](j, k) * base *
                  (std::fabs(xy[l]) * std::fabs(xy[m]) + std::fabs(s.y[l]) * std::fabs(xy[m]) +
                   std::fabs(s.y[l]) * std::fabs(s.y[m]));
        }
      }
    const double rhs[3] = {r0, r1, r2};
    for (int order = 0; order < 3; ++order) {
      HullFunction lam = scaled_flux(B, eps, s.x, s.y, order);
      double lhs = lhs_norm(lam, d, rhs[order] * (1 + slack));
      ++rep.checks;
      if (lhs > rhs[order] * (1 + slack) + 1e-14) {
        static const char* names[3] = {"(iii) flux", "(iii) first derivative", "(iii) second derivative"};
        rep.violations.push_back({names[order], s, lhs, rhs[order]});
      }
    }
  }
  if (!check_existence) return rep;

  // (i)-(ii): fit a nonnegative dominating polynomial on training samples, validate on fresh ones.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0), hdist(0.05, 1.0);
  auto draw = [&](int count) {
    std::vector<Lemma3Sample> out(count);
    for (auto& s : out) {
      s.x.resize(n);
      s.y.resize(n);
      for (int j = 0; j < n; ++j) {
        s.x[j] = coord(rng);
        s.y[j] = coord(rng);
      }
      s.hbar = hdist(rng);
    }
    return out;
  };
  const auto train = draw(40), fresh = draw(40);
  const auto a_list = multi_indices(n, 2), alpha_list = multi_indices(n, 2);
  std::vector<std::vector<int>> stencil;
  {
    std::vector<int> o(n, -1);
    while (true) {
      stencil.push_back(o);
      int p = n - 1;
      while (p >= 0 && ++o[p] > 1) o[p--] = -1;
      if (p < 0) break;
    }
  }
  const double eta = 1e-3;
  OmegaGrid og = OmegaGrid::uniform(d, d <= 2 ? 16 : 8);

  // For each sample: per (a, alpha) the (i) and (ii) left-hand sides.
  auto evaluate_sample = [&](const Lemma3Sample& s) {
    std::vector<HullFunction> lam(stencil.size());
    for (std::size_t p = 0; p < stencil.size(); ++p) {
      Vec xp = s.x;
      for (int j = 0; j < n; ++j) xp[j] += eta * stencil[p][j];
      lam[p] = scaled_flux(B, s.hbar, xp, s.y, 0);
    }
    std::vector<std::array<double, 2>> res;
    for (const auto& a : a_list)
      for (const auto& al : alpha_list) {
        HullFunction acc(d);
        std::vector<double> sup_vals(og.size(), 0.0);
        std::vector<cplx> ii(og.size(), 0.0);
        for (std::size_t p = 0; p < stencil.size(); ++p) {
          double w = stencil_weight(a, stencil[p], eta);
          if (w == 0.0) continue;
          acc = acc + derive(B.model(), lam[p], al) * cplx(w);
          // delta^alpha exp(-i hbar Lambda) by the chain rule, |alpha| <= 2.
          std::vector<int> nz;
          for (int j = 0; j < n; ++j)
            for (int c = 0; c < al[j]; ++c) nz.push_back(j);
          HullFunction d1a, d1b, d2;
          if (nz.size() >= 1) {
            std::vector<int> e(n, 0);
            e[nz[0]] = 1;
            d1a = derive(B.model(), lam[p], e);
          }
          if (nz.size() == 2) {
            std::vector<int> e(n, 0);
            e[nz[1]] = 1;
            d1b = derive(B.model(), lam[p], e);
            d2 = derive(B.model(), lam[p], al);
          }
          for (std::size_t g = 0; g < og.size(); ++g) {
            HullPoint wpt = og.point(g);
            cplx e = std::exp(-I * s.hbar * lam[p].evaluate(wpt).real());
            cplx f = e;
            if (nz.size() == 1) f = -I * s.hbar * d1a.evaluate(wpt) * e;
            if (nz.size() == 2)
              f = (-I * s.hbar * d2.evaluate(wpt) - s.hbar * s.hbar * d1a.evaluate(wpt) * d1b.evaluate(wpt)) * e;
            ii[g] += w * f;
          }
        }
        double sup_ii = 0;
        for (const auto& v : ii) sup_ii = std::max(sup_ii, std::abs(v));
        res.push_back({acc.l1_coefficients(), sup_ii});
      }
    return res;
  };
  auto features = [&](const Lemma3Sample& s, int which, int total_order) {
    Vec ay(n), axy(n);
    for (int j = 0; j < n; ++j) {
      ay[j] = std::fabs(s.y[j]);
      axy[j] = std::fabs(s.x[j] - s.y[j]);
    }
    double f = 0;
    if (which == 0) {
      for (int j = 0; j < n; ++j) {
        f += ay[j];
        for (int k = 0; k < n; ++k) f += ay[j] * axy[k];
      }
      return f;
    }
    // all monomials |y^b||(x-y)^c| with |b|+|c| <= 2 * total_order
    Vec v(2 * n);
    for (int j = 0; j < n; ++j) {
      v[j] = ay[j];
      v[n + j] = axy[j];
    }
    for (const auto& e : multi_indices(2 * n, 2 * total_order)) {
      double mono = 1;
      for (int j = 0; j < 2 * n; ++j) mono *= std::pow(v[j], e[j]);
      f += mono;
    }
    return f;
  };
  std::vector<std::vector<std::array<double, 2>>> tr, fr;
  for (const auto& s : train) tr.push_back(evaluate_sample(s));
  for (const auto& s : fresh) fr.push_back(evaluate_sample(s));
  std::size_t idx = 0;
  for (const auto& a : a_list)
    for (const auto& al : alpha_list) {
      int order = 0;
      for (int v : a) order += v;
      for (int v : al) order += v;
      for (int which = 0; which < 2; ++which) {
        double K = 0;
        for (std::size_t i = 0; i < train.size(); ++i) {
          double f = features(train[i], which, order);
          if (f > 1e-12) K = std::max(K, tr[i][idx][which] / f);
        }
        K *= 2.0;
        std::ostringstream name;
        name << (which == 0 ? "(i)" : "(ii)") << " a=";
        for (int v : a) name << v;
        name << " alpha=";
        for (int v : al) name << v;
        rep.fitted.emplace_back(name.str(), K);
        for (std::size_t i = 0; i < fresh.size(); ++i) {
          ++rep.existence_checks;
          double lhs = fr[i][idx][which], rhs = K * features(fresh[i], which, order);
          if (lhs > rhs * (1 + 1e-9) + 1e-9) {
            ++rep.existence_violations;
            rep.violations.push_back({name.str(), fresh[i], lhs, rhs});
          }
        }
      }
      ++idx;
    }
  return rep;
}

}  // namespace magweyl
