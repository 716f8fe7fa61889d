#include "magweyl/symbols.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "magweyl/fft.hpp"

namespace magweyl {

namespace {

constexpr cplx I(0.0, 1.0);

bool power_of_two(int N) { return N >= 4 && (N & (N - 1)) == 0; }

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

GridSpec::GridSpec(double L_, int N_, int n_, Realization t) : L(L_), N(N_), n(n_), tag(t) {
  if (!(L > 0) || !std::isfinite(L)) throw InputError("grid half-width must be positive");
  if (!power_of_two(N)) throw InputError("grid size N must be a power of two (>= 4)");
  if (n < 1 || n > 3) throw InputError("grid dimension must be 1, 2 or 3");
}

double GridSpec::weight() const { return std::pow(h(), n); }

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int j = 0; j < n; ++j) s *= static_cast<std::size_t>(N);
  return s;
}

std::vector<int> GridSpec::multi_index(std::size_t flat) const {
  std::vector<int> mi(n);
  for (int j = n - 1; j >= 0; --j) {
    mi[j] = static_cast<int>(flat % N);
    flat /= N;
  }
  return mi;
}

Vec GridSpec::point(std::size_t flat) const {
  auto mi = multi_index(flat);
  Vec x(n);
  for (int j = 0; j < n; ++j) x[j] = coord(mi[j]);
  return x;
}

GridSpec GridSpec::dual() const {
  return GridSpec(M_PI / h(), N, n, tag == Realization::X ? Realization::XStar : Realization::X);
}

bool GridSpec::same_as(const GridSpec& o) const {
  return N == o.N && n == o.n && std::fabs(L - o.L) <= 1e-14 * L;
}

Polynomial Polynomial::one(int n, cplx c) {
  Polynomial p(n);
  p.add(MultiIndex(n, 0), c);
  return p;
}

void Polynomial::add(const MultiIndex& a, cplx c) {
  if (static_cast<int>(a.size()) != n_) throw InputError("polynomial multi-index has wrong length");
  for (int v : a)
    if (v < 0) throw InputError("polynomial exponents must be nonnegative");
  c_[a] += c;
}

cplx Polynomial::evaluate(const Vec& u) const {
  cplx s = 0;
  for (const auto& [a, c] : c_) {
    double m = 1;
    for (int j = 0; j < n_; ++j)
      for (int p = 0; p < a[j]; ++p) m *= u[j];
    s += c * m;
  }
  return s;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& kv : c_) d = std::max(d, std::accumulate(kv.first.begin(), kv.first.end(), 0));
  return d;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  if (r.n_ == 0) r.n_ = o.n_;
  for (const auto& [a, c] : o.c_) r.add(a, c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(std::max(n_, o.n_));
  for (const auto& [a, c] : c_)
    for (const auto& [b, e] : o.c_) {
      MultiIndex s(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) s[j] = a[j] + b[j];
      r.add(s, c * e);
    }
  return r;
}

Polynomial Polynomial::operator*(cplx s) const {
  Polynomial r = *this;
  for (auto& kv : r.c_) kv.second *= s;
  return r;
}

Polynomial Polynomial::derivative(int j) const {
  Polynomial r(n_);
  for (const auto& [a, c] : c_) {
    if (a[j] == 0) continue;
    MultiIndex b = a;
    b[j] -= 1;
    r.add(b, c * static_cast<double>(a[j]));
  }
  return r;
}

Polynomial Polynomial::times_coordinate(int j) const {
  Polynomial r(n_);
  for (const auto& [a, c] : c_) {
    MultiIndex b = a;
    b[j] += 1;
    r.add(b, c);
  }
  return r;
}

Polynomial Polynomial::shifted(const Vec& s) const {
  bool zero = std::all_of(s.begin(), s.end(), [](double v) { return v == 0.0; });
  if (zero) return *this;
  Polynomial r(n_);
  for (const auto& [a, c] : c_) {
    // prod_j (u_j + s_j)^{a_j}
    std::vector<MultiIndex> idx{MultiIndex(n_, 0)};
    std::vector<cplx> coef{c};
    for (int j = 0; j < n_; ++j) {
      std::vector<MultiIndex> ni;
      std::vector<cplx> nc;
      for (std::size_t t = 0; t < idx.size(); ++t)
        for (int b = 0; b <= a[j]; ++b) {
          MultiIndex m = idx[t];
          m[j] = b;
          ni.push_back(m);
          nc.push_back(coef[t] * binomial(a[j], b) * std::pow(s[j], a[j] - b));
        }
      idx.swap(ni);
      coef.swap(nc);
    }
    for (std::size_t t = 0; t < idx.size(); ++t) r.add(idx[t], coef[t]);
  }
  return r;
}

Polynomial Polynomial::reflected_conj() const {
  Polynomial r(n_);
  for (const auto& [a, c] : c_) {
    int deg = std::accumulate(a.begin(), a.end(), 0);
    r.add(a, std::conj(c) * (deg % 2 ? -1.0 : 1.0));
  }
  return r;
}

cplx Atom::envelope(const Vec& x) const {
  const std::size_t n = x.size();
  double r2 = 0, ph = 0;
  Vec u(n);
  for (std::size_t j = 0; j < n; ++j) {
    u[j] = x[j] - center[j];
    r2 += u[j] * u[j];
    ph += x[j] * momentum[j];
  }
  return poly.evaluate(u) * std::exp(-gamma * r2) * std::polar(1.0, ph);
}

double Atom::sigma() const { return 1.0 / std::sqrt(2.0 * gamma); }

AtomSum AtomSum::gaussian(int n, const HullFunction& hull, double gamma, const Vec& center, const Vec& momentum) {
  if (!(gamma > 0)) throw InputError("atom width gamma must be positive");
  if (static_cast<int>(center.size()) != n || static_cast<int>(momentum.size()) != n)
    throw InputError("atom center and momentum must have length n");
  AtomSum s(n, hull.dim());
  s.atoms.push_back({hull, Polynomial::one(n), gamma, center, momentum});
  return s;
}

cplx AtomSum::evaluate(const HullPoint& omega, const Vec& x) const {
  cplx s = 0;
  for (const auto& a : atoms) s += a.hull.evaluate(omega) * a.envelope(x);
  return s;
}

AtomSum AtomSum::operator+(const AtomSum& o) const {
  AtomSum r = *this;
  if (r.n == 0) {
    r.n = o.n;
    r.d = o.d;
  }
  r.atoms.insert(r.atoms.end(), o.atoms.begin(), o.atoms.end());
  return r;
}

AtomSum AtomSum::operator*(cplx s) const {
  AtomSum r = *this;
  for (auto& a : r.atoms) a.poly = a.poly * s;
  return r;
}

AtomSum AtomSum::operator*(const AtomSum& o) const {
  AtomSum r(n, d);
  for (const auto& a : atoms)
    for (const auto& b : o.atoms) {
      Atom c;
      c.gamma = a.gamma + b.gamma;
      c.center.resize(n);
      c.momentum.resize(n);
      Vec sa(n), sb(n);
      double dist2 = 0;
      for (int j = 0; j < n; ++j) {
        c.center[j] = (a.gamma * a.center[j] + b.gamma * b.center[j]) / c.gamma;
        c.momentum[j] = a.momentum[j] + b.momentum[j];
        sa[j] = c.center[j] - a.center[j];
        sb[j] = c.center[j] - b.center[j];
        dist2 += (a.center[j] - b.center[j]) * (a.center[j] - b.center[j]);
      }
      double k = std::exp(-a.gamma * b.gamma / c.gamma * dist2);
      c.poly = a.poly.shifted(sa) * b.poly.shifted(sb) * cplx(k);
      c.hull = a.hull * b.hull;
      r.atoms.push_back(std::move(c));
    }
  return r;
}

AtomSum AtomSum::times_hull(const HullFunction& f) const {
  AtomSum r = *this;
  for (auto& a : r.atoms) a.hull = a.hull * f;
  return r;
}

AtomSum AtomSum::derivative(int j) const {
  AtomSum r = *this;
  for (auto& a : r.atoms) {
    Polynomial p = a.poly.derivative(j) + a.poly.times_coordinate(j) * cplx(-2.0 * a.gamma) +
                   a.poly * cplx(0.0, a.momentum[j]);
    a.poly = p;
  }
  return r;
}

AtomSum AtomSum::times_coordinate(int j) const {
  AtomSum r = *this;
  for (auto& a : r.atoms) a.poly = a.poly.times_coordinate(j) + a.poly * cplx(a.center[j]);
  return r;
}

AtomSum AtomSum::hull_derivative(const HullModel& model, const std::vector<int>& beta) const {
  AtomSum r = *this;
  for (auto& a : r.atoms) a.hull = derive(model, a.hull, beta);
  return r;
}

double AtomSum::max_extent() const {
  double e = 0;
  for (const auto& a : atoms) {
    double c = 0;
    for (double v : a.center) c = std::max(c, std::fabs(v));
    e = std::max(e, c + 8.0 * a.sigma());
  }
  return e;
}

Sampled::Sampled(GridSpec g, OmegaGrid w) : grid(std::move(g)), omega(std::move(w)) {
  values.assign(grid.size() * omega.size(), 0.0);
}

std::vector<cplx> Sampled::mode_coefficients() const {
  std::vector<cplx> c = values;
  const int nx = static_cast<int>(grid.size());
  fft_many(c.data(), omega.shape, nx, nx, 1, -1);
  const double inv = 1.0 / static_cast<double>(omega.size());
  for (auto& v : c) v *= inv;
  return c;
}

Sampled Sampled::operator+(const Sampled& o) const {
  if (values.size() != o.values.size()) throw InputError("sampled symbols live on different grids");
  Sampled r = *this;
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] += o.values[i];
  r.prov.tolerance += o.prov.tolerance;
  r.prov.warnings.insert(r.prov.warnings.end(), o.prov.warnings.begin(), o.prov.warnings.end());
  return r;
}

Sampled Sampled::operator-(const Sampled& o) const { return *this + o * cplx(-1.0); }

Sampled Sampled::operator*(cplx s) const {
  Sampled r = *this;
  for (auto& v : r.values) v *= s;
  r.prov.tolerance *= std::abs(s);
  return r;
}

int Symbol::n() const { return is_atoms() ? atoms().n : sampled().grid.n; }
int Symbol::d() const { return is_atoms() ? atoms().d : sampled().omega.dim(); }

GridSpec default_grid(const AtomSum& a, Realization tag) {
  if (a.atoms.empty()) throw InputError("cannot choose a grid for an empty atom sum");
  int N = a.n == 1 ? 64 : (a.n == 2 ? 32 : 16);
  return GridSpec(a.max_extent(), N, a.n, tag);
}

namespace {

// Hull values of every atom on the omega grid.
std::vector<cplx> hull_on_grid(const HullFunction& f, const OmegaGrid& omega) {
  std::vector<cplx> out(omega.size(), 0.0);
  for (const auto& [m, c] : f.modes()) {
    for (std::size_t i = 0; i < omega.size(); ++i) {
      HullPoint p = omega.point(i);
      double ph = 0;
      for (std::size_t a = 0; a < m.size(); ++a) ph += m[a] * p.angles[a];
      out[i] += c * std::polar(1.0, ph);
    }
  }
  return out;
}

// Lagrange cubic weights for offsets -1..2 at fractional position f.
void cubic_weights(double f, double w[4]) {
  w[0] = -f * (f - 1) * (f - 2) / 6.0;
  w[1] = (f + 1) * (f - 1) * (f - 2) / 2.0;
  w[2] = -(f + 1) * f * (f - 2) / 2.0;
  w[3] = (f + 1) * f * (f - 1) / 6.0;
}

}  // namespace

cplx evaluate(const HullModel& model, const Symbol& s, const HullPoint& omega, const Vec& x) {
  (void)model;
  if (s.is_atoms()) return s.atoms().evaluate(omega, x);
  const Sampled& sm = s.sampled();
  auto coeff = sm.mode_coefficients();
  const GridSpec& g = sm.grid;
  const int n = g.n;
  std::vector<int> base(n);
  std::vector<std::array<double, 4>> w(n);
  for (int j = 0; j < n; ++j) {
    double t = (x[j] + g.L) / g.h();
    double fl = std::floor(t);
    base[j] = static_cast<int>(fl) - 1;
    double ww[4];
    cubic_weights(t - fl, ww);
    std::copy(ww, ww + 4, w[j].begin());
  }
  cplx total = 0;
  const int stencil = 1 << (2 * n);
  for (int sidx = 0; sidx < stencil; ++sidx) {
    double weight = 1;
    std::size_t flat = 0;
    bool inside = true;
    for (int j = 0; j < n; ++j) {
      int o = (sidx >> (2 * j)) & 3;
      int i = base[j] + o;
      if (i < 0 || i >= g.N) inside = false;
      weight *= w[j][o];
      flat = flat * g.N + static_cast<std::size_t>(std::clamp(i, 0, g.N - 1));
    }
    if (!inside || weight == 0.0) continue;
    cplx v = 0;
    for (std::size_t k = 0; k < sm.omega.size(); ++k) {
      Mode m = sm.omega.mode_of(k);
      double ph = 0;
      for (std::size_t a = 0; a < m.size(); ++a) ph += m[a] * omega.angles[a];
      v += coeff[k * g.size() + flat] * std::polar(1.0, ph);
    }
    total += weight * v;
  }
  return total;
}

Sampled sample(const HullModel& model, const Symbol& s, const GridSpec& grid, const OmegaGrid& omega) {
  if (s.n() != grid.n) throw InputError("symbol and grid dimensions differ");
  if (!s.is_atoms()) {
    const Sampled& sm = s.sampled();
    if (sm.grid.same_as(grid) && sm.omega.shape == omega.shape) return sm;
    Sampled out(grid, omega);
    out.grid.tag = s.realization();
    for (std::size_t w = 0; w < omega.size(); ++w)
      for (std::size_t x = 0; x < grid.size(); ++x) out.at(w, x) = evaluate(model, s, omega.point(w), grid.point(x));
    out.prov = sm.prov;
    return out;
  }
  Sampled out(grid, omega);
  out.grid.tag = s.realization();
  const std::size_t nx = grid.size();
  std::vector<Vec> pts(nx);
  for (std::size_t x = 0; x < nx; ++x) pts[x] = grid.point(x);
  for (const auto& a : s.atoms().atoms) {
    auto hv = hull_on_grid(a.hull, omega);
    std::vector<cplx> ev(nx);
    for (std::size_t x = 0; x < nx; ++x) ev[x] = a.envelope(pts[x]);
    for (std::size_t w = 0; w < omega.size(); ++w)
      for (std::size_t x = 0; x < nx; ++x) out.values[w * nx + x] += hv[w] * ev[x];
  }
  return out;
}

namespace {

// Coefficients of P_k with d^k/dv^k exp(-beta v^2) = P_k(v) exp(-beta v^2).
std::vector<std::vector<double>> gaussian_derivative_polys(int kmax, double beta) {
  std::vector<std::vector<double>> P(kmax + 1);
  P[0] = {1.0};
  for (int k = 0; k < kmax; ++k) {
    std::vector<double> next(P[k].size() + 1, 0.0);
    for (std::size_t i = 1; i < P[k].size(); ++i) next[i - 1] += i * P[k][i];
    for (std::size_t i = 0; i < P[k].size(); ++i) next[i + 1] += -2.0 * beta * P[k][i];
    P[k + 1] = next;
  }
  return P;
}

}  // namespace

AtomSum fourier_atoms(const AtomSum& a, int sign) {
  const int n = a.n;
  const double s = sign >= 0 ? 1.0 : -1.0;
  AtomSum out(n, a.d);
  for (const auto& at : a.atoms) {
    const double beta = 1.0 / (4.0 * at.gamma);
    const auto P = gaussian_derivative_polys(at.poly.degree(), beta);
    double x0xi0 = 0;
    for (int j = 0; j < n; ++j) x0xi0 += at.center[j] * at.momentum[j];
    cplx factor = std::polar(std::pow(M_PI / at.gamma, 0.5 * n), x0xi0);
    if (sign < 0) factor /= std::pow(kTwoPi, n);
    Polynomial q(n);
    for (const auto& [mi, c] : at.poly.terms()) {
      int deg = std::accumulate(mi.begin(), mi.end(), 0);
      cplx pre = c * std::pow(cplx(0, -1), deg);
      // product over axes of P_{a_j}(s w_j)
      Polynomial term = Polynomial::one(n, pre);
      for (int j = 0; j < n; ++j) {
        Polynomial axis(n);
        for (std::size_t k = 0; k < P[mi[j]].size(); ++k) {
          if (P[mi[j]][k] == 0.0) continue;
          MultiIndex e(n, 0);
          e[j] = static_cast<int>(k);
          axis.add(e, P[mi[j]][k] * std::pow(s, static_cast<double>(k)));
        }
        term = term * axis;
      }
      q = q + term;
    }
    Atom r;
    r.hull = at.hull;
    r.poly = q * factor;
    r.gamma = beta;
    r.center.resize(n);
    r.momentum.resize(n);
    for (int j = 0; j < n; ++j) {
      r.center[j] = -s * at.momentum[j];
      r.momentum[j] = s * at.center[j];
    }
    out.atoms.push_back(std::move(r));
  }
  return out;
}

Sampled partial_fourier(const Sampled& s) {
  const GridSpec& g = s.grid;
  const bool forward = g.tag == Realization::X;
  Sampled out(g.dual(), s.omega);
  out.values = s.values;
  const std::size_t nx = g.size();
  std::vector<double> parity(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    auto mi = g.multi_index(x);
    parity[x] = (std::accumulate(mi.begin(), mi.end(), 0) % 2) ? -1.0 : 1.0;
  }
  // e^{i N pi / 2} per axis
  cplx global = std::pow(std::polar(1.0, g.N * M_PI / 2.0 * (forward ? 1.0 : -1.0)), g.n);
  double scale = forward ? g.weight() : std::pow(g.h() / kTwoPi, g.n);
  for (std::size_t w = 0; w < s.omega.size(); ++w)
    for (std::size_t x = 0; x < nx; ++x) out.values[w * nx + x] *= parity[x];
  std::vector<int> shape(g.n, g.N);
  fft_many(out.values.data(), shape, static_cast<int>(s.omega.size()), 1, static_cast<int>(nx), forward ? +1 : -1);
  for (std::size_t w = 0; w < s.omega.size(); ++w)
    for (std::size_t x = 0; x < nx; ++x) out.values[w * nx + x] *= parity[x] * scale * global;
  out.prov = s.prov;
  out.prov.tolerance *= forward ? std::pow(2.0 * g.L, g.n) : std::pow(g.h() / kTwoPi, g.n) * nx;
  return out;
}

Symbol partial_fourier(const HullModel& model, const Symbol& s, const GridSpec& grid, const OmegaGrid& omega) {
  return Symbol(partial_fourier(sample(model, s, grid, omega)));
}

namespace {

Sampled hull_derivative_sampled(const HullModel& model, const Sampled& s, const MultiIndex& beta) {
  if (std::all_of(beta.begin(), beta.end(), [](int v) { return v == 0; })) return s;
  auto c = s.mode_coefficients();
  const std::size_t nx = s.grid.size();
  for (std::size_t k = 0; k < s.omega.size(); ++k) {
    auto mi = s.omega.multi_index(k);
    bool nyquist = false;
    for (std::size_t a = 0; a < mi.size(); ++a) nyquist = nyquist || (s.omega.shape[a] % 2 == 0 && 2 * mi[a] == s.omega.shape[a]);
    Vec kv = model.wavevector(s.omega.mode_of(k));
    cplx f = nyquist ? cplx(0) : cplx(1);
    for (std::size_t j = 0; j < beta.size(); ++j)
      for (int p = 0; p < beta[j]; ++p) f *= cplx(0, kv[j]);
    for (std::size_t x = 0; x < nx; ++x) c[k * nx + x] *= f;
  }
  fft_many(c.data(), s.omega.shape, static_cast<int>(nx), static_cast<int>(nx), 1, +1);
  Sampled out = s;
  out.values = c;
  return out;
}

Sampled space_derivative_sampled(const Sampled& s, int axis) {
  const GridSpec& g = s.grid;
  Sampled out = s;
  const std::size_t nx = g.size();
  std::size_t stride = 1;
  for (int j = g.n - 1; j > axis; --j) stride *= g.N;
  const double inv = 1.0 / (12.0 * g.h());
  for (std::size_t w = 0; w < s.omega.size(); ++w)
    for (std::size_t x = 0; x < nx; ++x) {
      int i = g.multi_index(x)[axis];
      auto val = [&](int off) {
        int k = i + off;
        if (k < 0 || k >= g.N) return cplx(0);
        return s.values[w * nx + x + static_cast<std::ptrdiff_t>(off) * static_cast<std::ptrdiff_t>(stride)];
      };
      out.values[w * nx + x] = (-val(2) + 8.0 * val(1) - 8.0 * val(-1) + val(-2)) * inv;
    }
  return out;
}

}  // namespace

Symbol apply_weights(const HullModel& model, const Symbol& s, const MultiIndex& a, const MultiIndex& alpha,
                     const MultiIndex& beta) {
  const int n = s.n();
  if (static_cast<int>(a.size()) != n || static_cast<int>(alpha.size()) != n || static_cast<int>(beta.size()) != n)
    throw InputError("weight multi-indices must have length n");
  if (s.is_atoms()) {
    AtomSum r = s.atoms().hull_derivative(model, beta);
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < alpha[j]; ++p) r = r.derivative(j);
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < a[j]; ++p) r = r.times_coordinate(j);
    return Symbol(r, s.realization());
  }
  Sampled r = hull_derivative_sampled(model, s.sampled(), beta);
  for (int j = 0; j < n; ++j)
    for (int p = 0; p < alpha[j]; ++p) r = space_derivative_sampled(r, j);
  const std::size_t nx = r.grid.size();
  for (std::size_t x = 0; x < nx; ++x) {
    Vec pt = r.grid.point(x);
    double m = 1;
    for (int j = 0; j < n; ++j) m *= std::pow(pt[j], a[j]);
    if (m == 1.0) continue;
    for (std::size_t w = 0; w < r.omega.size(); ++w) r.values[w * nx + x] *= m;
  }
  return Symbol(r);
}

double seminorm(const HullModel& model, const Symbol& s, const MultiIndex& a, const MultiIndex& alpha,
                const MultiIndex& beta, const GridSpec& grid, const OmegaGrid& omega) {
  Sampled v = sample(model, apply_weights(model, s, a, alpha, beta), grid, omega);
  double m = 0;
  for (const auto& z : v.values) m = std::max(m, std::abs(z));
  return m;
}

Symbol involution(const Symbol& s) {
  if (s.is_atoms()) {
    AtomSum r = s.atoms();
    for (auto& a : r.atoms) {
      a.hull = a.hull.conj();
      a.poly = a.poly.reflected_conj();
      for (auto& c : a.center) c = -c;
    }
    return Symbol(r, s.realization());
  }
  const Sampled& sm = s.sampled();
  Sampled out(sm.grid, sm.omega);
  out.prov = sm.prov;
  const std::size_t nx = sm.grid.size();
  for (std::size_t x = 0; x < nx; ++x) {
    auto mi = sm.grid.multi_index(x);
    bool inside = true;
    std::size_t flat = 0;
    for (int j = 0; j < sm.grid.n; ++j) {
      int r = sm.grid.N - mi[j];
      if (r >= sm.grid.N) inside = false;
      flat = flat * sm.grid.N + static_cast<std::size_t>(r % sm.grid.N);
    }
    if (!inside) continue;
    for (std::size_t w = 0; w < sm.omega.size(); ++w) out.values[w * nx + x] = std::conj(sm.values[w * nx + flat]);
  }
  return Symbol(out);
}

Sampled translate_sampled(const HullModel& model, const Sampled& s, const Vec& z) {
  auto c = s.mode_coefficients();
  const std::size_t nx = s.grid.size();
  for (std::size_t k = 0; k < s.omega.size(); ++k) {
    cplx f = std::polar(1.0, model.phase(s.omega.mode_of(k), z));
    for (std::size_t x = 0; x < nx; ++x) c[k * nx + x] *= f;
  }
  fft_many(c.data(), s.omega.shape, static_cast<int>(nx), static_cast<int>(nx), 1, +1);
  Sampled out = s;
  out.values = c;
  return out;
}

}  // namespace magweyl
