#include "magweyl/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace magweyl {

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double angular_distance(double a, double b) {
  double diff = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(diff, kTwoPi - diff);
}

HullModel::HullModel(int d_, int n_, Eigen::MatrixXd F_) : d(d_), n(n_), F(std::move(F_)) {
  if (d < 1 || n < 1) throw InputError("hull model needs d >= 1 and n >= 1");
  if (F.rows() != d || F.cols() != n) throw InputError("flow matrix F must be d x n");
  if (!F.allFinite()) throw InputError("flow matrix F has non-finite entries");
}

HullModel HullModel::identity(int dim) {
  return HullModel(dim, dim, Eigen::MatrixXd::Identity(dim, dim));
}

Vec HullModel::wavevector(const Mode& m) const {
  Vec k(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < d; ++a) k[j] += F(a, j) * m[a];
  return k;
}

double HullModel::phase(const Mode& m, const Vec& x) const {
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    if (m[a] == 0) continue;
    double fx = 0.0;
    for (int j = 0; j < n; ++j) fx += F(a, j) * x[j];
    s += m[a] * fx;
  }
  return s;
}

double HullPoint::distance(const HullPoint& other) const {
  double dmax = 0.0;
  for (std::size_t a = 0; a < angles.size(); ++a)
    dmax = std::max(dmax, angular_distance(angles[a], other.angles[a]));
  return dmax;
}

HullPoint act(const HullModel& model, const HullPoint& omega, const Vec& x) {
  if (static_cast<int>(omega.angles.size()) != model.d || static_cast<int>(x.size()) != model.n)
    throw InputError("act: dimension mismatch");
  HullPoint out;
  out.angles.resize(model.d);
  for (int a = 0; a < model.d; ++a) {
    double s = omega.angles[a];
    for (int j = 0; j < model.n; ++j) s += model.F(a, j) * x[j];
    out.angles[a] = wrap_angle(s);
  }
  return out;
}

HullFunction HullFunction::constant(int d, cplx c) {
  HullFunction f(d);
  f.add(Mode(d, 0), c);
  return f;
}

HullFunction HullFunction::cosine(int d, int axis, double amplitude) {
  HullFunction f(d);
  Mode m(d, 0);
  m[axis] = 1;
  f.add(m, 0.5 * amplitude);
  m[axis] = -1;
  f.add(m, 0.5 * amplitude);
  return f;
}

HullFunction HullFunction::sine(int d, int axis, double amplitude) {
  HullFunction f(d);
  Mode m(d, 0);
  m[axis] = 1;
  f.add(m, cplx(0, -0.5 * amplitude));
  m[axis] = -1;
  f.add(m, cplx(0, 0.5 * amplitude));
  return f;
}

void HullFunction::add(const Mode& m, cplx c) {
  if (static_cast<int>(m.size()) != d_) throw InputError("hull mode has wrong dimension");
  modes_[m] += c;
}

cplx HullFunction::coefficient(const Mode& m) const {
  auto it = modes_.find(m);
  return it == modes_.end() ? cplx(0) : it->second;
}

cplx HullFunction::evaluate(const HullPoint& omega) const {
  cplx s = 0;
  for (const auto& [m, c] : modes_) {
    double ph = 0;
    for (int a = 0; a < d_; ++a) ph += m[a] * omega.angles[a];
    s += c * std::polar(1.0, ph);
  }
  return s;
}

double HullFunction::l1_coefficients() const {
  double s = 0;
  for (const auto& kv : modes_) s += std::abs(kv.second);
  return s;
}

double HullFunction::max_mode() const {
  int mm = 0;
  for (const auto& kv : modes_)
    for (int v : kv.first) mm = std::max(mm, std::abs(v));
  return mm;
}

HullFunction HullFunction::operator+(const HullFunction& o) const {
  HullFunction r = *this;
  if (r.d_ == 0) r.d_ = o.d_;
  for (const auto& [m, c] : o.modes_) r.add(m, c);
  return r;
}

HullFunction HullFunction::operator-(const HullFunction& o) const { return *this + o * cplx(-1); }

HullFunction HullFunction::operator*(const HullFunction& o) const {
  HullFunction r(std::max(d_, o.d_));
  for (const auto& [m1, c1] : modes_)
    for (const auto& [m2, c2] : o.modes_) {
      Mode m(m1.size());
      for (std::size_t a = 0; a < m.size(); ++a) m[a] = m1[a] + m2[a];
      r.add(m, c1 * c2);
    }
  return r;
}

HullFunction HullFunction::operator*(cplx s) const {
  HullFunction r = *this;
  for (auto& kv : r.modes_) kv.second *= s;
  return r;
}

HullFunction HullFunction::conj() const {
  HullFunction r(d_);
  for (const auto& [m, c] : modes_) {
    Mode neg(m.size());
    for (std::size_t a = 0; a < m.size(); ++a) neg[a] = -m[a];
    r.add(neg, std::conj(c));
  }
  return r;
}

HullFunction HullFunction::truncate(int max_abs_mode) const {
  HullFunction r(d_);
  for (const auto& [m, c] : modes_) {
    bool keep = true;
    for (int v : m) keep = keep && std::abs(v) <= max_abs_mode;
    if (keep) r.add(m, c);
  }
  return r;
}

HullFunction HullFunction::pruned(double tol) const {
  HullFunction r(d_);
  for (const auto& [m, c] : modes_)
    if (std::abs(c) > tol) r.add(m, c);
  return r;
}

HullFunction translate(const HullModel& model, const HullFunction& phi, const Vec& x) {
  HullFunction r(phi.dim());
  for (const auto& [m, c] : phi.modes()) r.add(m, c * std::polar(1.0, model.phase(m, x)));
  return r;
}

HullFunction derive(const HullModel& model, const HullFunction& phi, const std::vector<int>& alpha) {
  if (static_cast<int>(alpha.size()) != model.n) throw InputError("derive: multi-index must have length n");
  HullFunction r(phi.dim());
  for (const auto& [m, c] : phi.modes()) {
    Vec k = model.wavevector(m);
    cplx f = c;
    for (int j = 0; j < model.n; ++j)
      for (int p = 0; p < alpha[j]; ++p) f *= cplx(0, k[j]);
    r.add(m, f);
  }
  return r;
}

std::vector<cplx> orbit_function(const HullModel& model, const HullFunction& phi,
                                 const HullPoint& omega, const std::vector<Vec>& xs) {
  std::vector<cplx> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(phi.evaluate(act(model, omega, x)));
  return out;
}

OmegaGrid OmegaGrid::uniform(int d, int per_axis) {
  if (per_axis < 1) throw InputError("omega grid needs at least one point per axis");
  return OmegaGrid(std::vector<int>(d, per_axis));
}

std::size_t OmegaGrid::size() const {
  std::size_t s = 1;
  for (int v : shape) s *= static_cast<std::size_t>(v);
  return s;
}

std::vector<int> OmegaGrid::multi_index(std::size_t index) const {
  std::vector<int> mi(shape.size());
  for (int a = dim() - 1; a >= 0; --a) {
    mi[a] = static_cast<int>(index % shape[a]);
    index /= shape[a];
  }
  return mi;
}

HullPoint OmegaGrid::point(std::size_t index) const {
  auto mi = multi_index(index);
  HullPoint p;
  p.angles.resize(mi.size());
  for (std::size_t a = 0; a < mi.size(); ++a) p.angles[a] = kTwoPi * mi[a] / shape[a];
  return p;
}

Mode OmegaGrid::mode_of(std::size_t index) const {
  auto mi = multi_index(index);
  Mode m(mi.size());
  for (std::size_t a = 0; a < mi.size(); ++a) m[a] = mi[a] < (shape[a] + 1) / 2 ? mi[a] : mi[a] - shape[a];
  return m;
}

SeminormBracket seminorm_salpha(const HullModel& model, const HullFunction& phi,
                                const std::vector<int>& alpha, const OmegaGrid& grid) {
  HullFunction dphi = derive(model, phi, alpha);
  SeminormBracket b;
  for (std::size_t i = 0; i < grid.size(); ++i) b.lower = std::max(b.lower, std::abs(dphi.evaluate(grid.point(i))));
  b.upper = dphi.l1_coefficients();
  return b;
}

namespace {

// Smallest q <= bound with |r - p/q| tiny, or 0 if none.
long rational_denominator(double r, long bound) {
  double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(r));
  double x = r;
  long h0 = 1, h1 = 0, k0 = 0, k1 = 1;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(x);
    long ai = static_cast<long>(a);
    long h2 = ai * h0 + h1, k2 = ai * k0 + k1;
    if (k2 > bound) return 0;
    if (std::fabs(r - static_cast<double>(h2) / static_cast<double>(k2)) <= tol) return k2;
    double frac = x - a;
    if (frac <= 0) return 0;
    x = 1.0 / frac;
    h1 = h0; h0 = h2; k1 = k0; k0 = k2;
  }
  return 0;
}

bool near_integer(double v, double scale) {
  return std::fabs(v - std::round(v)) <= 1e-9 * std::max(1.0, scale);
}

}  // namespace

StabilizerReport stabilizer_report(const HullModel& model, long denominator_bound) {
  StabilizerReport rep;
  rep.bound = denominator_bound;
  const int n = model.n, d = model.d;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(model.F, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * std::max(1.0, smax)) ++rank;
  if (rank < n) {
    rep.free = false;
    rep.continuous_dim = n - rank;
    for (int c = rank; c < n; ++c) {
      Eigen::VectorXd v = svd.matrixV().col(c);
      rep.generators.emplace_back(v.data(), v.data() + n);
    }
    std::ostringstream os;
    os << "not free: stabilizer contains a subspace of dimension " << rep.continuous_dim;
    rep.status = os.str();
    return rep;
  }

  // Pick n rows S with F_S invertible; the remaining rows impose G m_S integral.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(model.F.transpose());
  auto perm = qr.colsPermutation().indices();
  std::vector<int> rows_s(perm.data(), perm.data() + n), rows_r(perm.data() + n, perm.data() + d);
  Eigen::MatrixXd FS(n, n), FR(d - n, n);
  for (int i = 0; i < n; ++i) FS.row(i) = model.F.row(rows_s[i]);
  for (int i = 0; i < d - n; ++i) FR.row(i) = model.F.row(rows_r[i]);
  Eigen::MatrixXd FSinv = FS.inverse();
  Eigen::MatrixXd G = FR * FSinv;

  auto lattice_vector = [&](const Eigen::VectorXd& mS) {
    Eigen::VectorXd x = kTwoPi * FSinv * mS;
    return Vec(x.data(), x.data() + n);
  };

  if (d == n) {
    rep.free = false;
    for (int i = 0; i < n; ++i) rep.generators.push_back(lattice_vector(Eigen::VectorXd::Unit(n, i)));
    rep.status = "not free: discrete stabilizer 2 pi F^{-1} Z^n";
    return rep;
  }

  if (n == 1) {
    long l = 1;
    for (int r = 0; r < d - 1; ++r) {
      double g = G(r, 0);
      if (std::fabs(g) < 1e-300) continue;
      long q = rational_denominator(g, denominator_bound);
      if (q == 0) {
        std::ostringstream os;
        os << "free up to denominator bound " << denominator_bound;
        rep.status = os.str();
        return rep;
      }
      l = std::lcm(l, q);
      if (l > denominator_bound) {
        std::ostringstream os;
        os << "free up to denominator bound " << denominator_bound;
        rep.status = os.str();
        return rep;
      }
    }
    rep.free = false;
    rep.generators.push_back(lattice_vector(Eigen::VectorXd::Constant(1, static_cast<double>(l))));
    std::ostringstream os;
    os << "not free: discrete stabilizer generated by 2 pi * " << l << " / F";
    rep.status = os.str();
    return rep;
  }

  // n >= 2 and d > n: bounded box search over m_S.
  long radius = denominator_bound;
  double total = std::pow(2.0 * radius + 1.0, n);
  while (total > 2e6 && radius > 1) {
    radius /= 2;
    total = std::pow(2.0 * radius + 1.0, n);
  }
  std::vector<Eigen::VectorXd> hits;
  std::vector<long> idx(n, -radius);
  while (true) {
    Eigen::VectorXd m(n);
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      m(i) = static_cast<double>(idx[i]);
      zero = zero && idx[i] == 0;
    }
    if (!zero) {
      Eigen::VectorXd gm = G * m;
      bool ok = true;
      for (int r = 0; r < gm.size() && ok; ++r) ok = near_integer(gm(r), std::fabs(gm(r)));
      if (ok) hits.push_back(m);
    }
    int p = n - 1;
    while (p >= 0 && ++idx[p] > radius) idx[p--] = -radius;
    if (p < 0) break;
  }
  if (hits.empty()) {
    std::ostringstream os;
    os << "free up to search radius " << radius;
    rep.status = os.str();
    rep.bound = radius;
    return rep;
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.norm() < b.norm(); });
  Eigen::MatrixXd basis(n, 0);
  for (const auto& h : hits) {
    Eigen::MatrixXd trial(n, basis.cols() + 1);
    trial << basis, h;
    if (Eigen::FullPivLU<Eigen::MatrixXd>(trial).rank() == trial.cols()) {
      basis = trial;
      rep.generators.push_back(lattice_vector(h));
      if (basis.cols() == n) break;
    }
  }
  rep.free = false;
  rep.bound = radius;
  rep.status = "not free: lattice vectors found within search radius";
  return rep;
}

}  // namespace magweyl
