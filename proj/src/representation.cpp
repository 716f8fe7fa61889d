#include "magweyl/representation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "magweyl/parallel.hpp"

namespace magweyl {

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double mode_phase(const Mode& m, const HullPoint& w) {
  double s = 0;
  for (std::size_t a = 0; a < m.size(); ++a) s += m[a] * w.angles[a];
  return s;
}

void check_hbar(double hbar) {
  if (!(hbar > 0.0) || hbar > 1.0) throw InputError("hbar must lie in (0, 1]");
}

void cubic_weights(double f, double w[4]) {
  w[0] = -f * (f - 1) * (f - 2) / 6.0;
  w[1] = (f + 1) * (f - 1) * (f - 2) / 2.0;
  w[2] = -(f + 1) * f * (f - 2) / 2.0;
  w[3] = (f + 1) * f * (f - 1) / 6.0;
}

// Phi(omega; z) = sum_m c_m(z) e^{i m.omega}, with c_m exact for atoms and cubic-interpolated
// from the omega-Fourier coefficients for sampled data.
class ModalEvaluator {
 public:
  ModalEvaluator(const HullModel& model, const Symbol& s) : n_(s.n()), atoms_(s.is_atoms()) {
    if (atoms_) {
      sum_ = s.atoms();
      std::map<Mode, std::size_t> where;
      for (const auto& a : sum_.atoms) {
        std::vector<std::pair<std::size_t, cplx>> h;
        for (const auto& [m, c] : a.hull.modes()) {
          if (!where.count(m)) {
            where[m] = modes_.size();
            modes_.push_back(m);
          }
          h.emplace_back(where[m], c);
        }
        hull_.push_back(std::move(h));
      }
    } else {
      sampled_ = s.sampled();
      coeff_ = sampled_.mode_coefficients();
      for (std::size_t k = 0; k < sampled_.omega.size(); ++k) modes_.push_back(sampled_.omega.mode_of(k));
    }
    for (const auto& m : modes_) k_.push_back(model.wavevector(m));
  }

  const std::vector<Mode>& modes() const { return modes_; }
  const std::vector<Vec>& wavevectors() const { return k_; }

  // Returns false when every coefficient vanishes.
  bool coefficients(const Vec& z, cplx* out) const {
    std::fill(out, out + modes_.size(), cplx(0));
    bool any = false;
    if (atoms_) {
      for (std::size_t a = 0; a < sum_.atoms.size(); ++a) {
        cplx e = sum_.atoms[a].envelope(z);
        if (e == 0.0) continue;
        any = true;
        for (const auto& [k, c] : hull_[a]) out[k] += c * e;
      }
      return any;
    }
    const GridSpec& g = sampled_.grid;
    const std::size_t nx = g.size();
    int base[3];
    double w[3][4];
    for (int j = 0; j < n_; ++j) {
      double t = (z[j] + g.L) / g.h();
      if (t < -2.0 || t > g.N + 1.0) return false;
      double fl = std::floor(t);
      base[j] = static_cast<int>(fl) - 1;
      cubic_weights(t - fl, w[j]);
    }
    const int stencil = 1 << (2 * n_);
    for (int s = 0; s < stencil; ++s) {
      double weight = 1;
      std::size_t flat = 0;
      bool inside = true;
      for (int j = 0; j < n_; ++j) {
        int o = (s >> (2 * j)) & 3;
        int i = base[j] + o;
        if (i < 0 || i >= g.N) {
          inside = false;
          break;
        }
        weight *= w[j][o];
        flat = flat * g.N + i;
      }
      if (!inside || weight == 0.0) continue;
      any = true;
      for (std::size_t k = 0; k < modes_.size(); ++k) out[k] += weight * coeff_[k * nx + flat];
    }
    return any;
  }

 private:
  int n_;
  bool atoms_;
  AtomSum sum_;
  std::vector<std::vector<std::pair<std::size_t, cplx>>> hull_;
  Sampled sampled_;
  std::vector<cplx> coeff_;
  std::vector<Mode> modes_;
  std::vector<Vec> k_;
};

// Gamma^{B_omega}<0, x, y> for all grid pairs share the per-mode flux coefficients.
class FluxPhase {
 public:
  FluxPhase(const MagneticField& B, const HullPoint& omega) : B_(B) {
    for (const auto& t : B.mode_terms()) e_.push_back(std::polar(1.0, mode_phase(t.m, omega)));
  }
  double operator()(const Vec& x, const Vec& y) const {
    if (e_.empty()) return 0.0;
    thread_local std::vector<cplx> c;
    c.resize(e_.size());
    flux_origin_coefficients(B_, x.data(), y.data(), c.data());
    double s = 0;
    for (std::size_t k = 0; k < e_.size(); ++k) s += (c[k] * e_[k]).real();
    return s;
  }

 private:
  const MagneticField& B_;
  std::vector<cplx> e_;
};

std::vector<Vec> grid_points(const GridSpec& grid) {
  std::vector<Vec> p(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) p[i] = grid.point(i);
  return p;
}

// Per grid point and symbol mode, e^{i k_m . x / 2}; the hull factor at theta_{(x+y)/2}[omega] is
// e^{i m.omega} times the product of the two half phases.
std::vector<cplx> half_phases(const std::vector<Vec>& pts, const std::vector<Vec>& ks) {
  std::vector<cplx> out(pts.size() * ks.size());
  for (std::size_t x = 0; x < pts.size(); ++x)
    for (std::size_t k = 0; k < ks.size(); ++k) out[x * ks.size() + k] = std::polar(1.0, 0.5 * dot(ks[k], pts[x]));
  return out;
}

std::vector<int> lattice_steps(const Vec& v, double h, const char* what) {
  std::vector<int> s(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    double r = v[j] / h;
    s[j] = static_cast<int>(std::lround(r));
    if (std::fabs(r - s[j]) > 1e-9 * std::max(1.0, std::fabs(r)))
      throw InputError(std::string(what) + " must be a lattice vector of the grid");
  }
  return s;
}

// Flat index of grid point flat shifted by steps, or npos outside the grid.
std::size_t shifted(const GridSpec& grid, std::size_t flat, const std::vector<int>& steps) {
  auto mi = grid.multi_index(flat);
  std::size_t out = 0;
  for (int j = 0; j < grid.n; ++j) {
    int i = mi[j] + steps[j];
    if (i < 0 || i >= grid.N) return static_cast<std::size_t>(-1);
    out = out * grid.N + i;
  }
  return out;
}

int next_pow2(double v) {
  int N = 4;
  while (N < v) N *= 2;
  return N;
}

}  // namespace

KernelMatrix rep_matrix(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& Phi,
                        const GridSpec& grid) {
  check_hbar(hbar);
  if (Phi.realization() != Realization::X) throw InputError("rep_matrix expects an X-realization symbol");
  if (Phi.n() != grid.n || Phi.n() != B.n()) throw InputError("symbol, field and grid dimensions differ");
  const HullModel& model = B.model();
  ModalEvaluator ev(model, Phi);
  FluxPhase flux(B, omega);
  const auto pts = grid_points(grid);
  const std::size_t N = pts.size(), M = ev.modes().size();
  const auto half = half_phases(pts, ev.wavevectors());
  std::vector<cplx> eomega(M);
  for (std::size_t k = 0; k < M; ++k) eomega[k] = std::polar(1.0, mode_phase(ev.modes()[k], omega));
  const double pref = grid.weight() / std::pow(hbar, grid.n);

  KernelMatrix K{grid, Eigen::MatrixXcd::Zero(N, N), hbar, omega, 0.0, {}};
  parallel_for(N, [&](std::size_t x) {
    std::vector<cplx> c(M);
    Vec z(grid.n);
    for (std::size_t y = 0; y < N; ++y) {
      for (int j = 0; j < grid.n; ++j) z[j] = (pts[y][j] - pts[x][j]) / hbar;
      if (!ev.coefficients(z, c.data())) continue;
      cplx v = 0;
      for (std::size_t k = 0; k < M; ++k) v += c[k] * eomega[k] * half[x * M + k] * half[y * M + k];
      if (v == 0.0) continue;
      K.M(x, y) = pref * v * std::polar(1.0, -flux(pts[x], pts[y]) / hbar);
    }
  });
  if (!Phi.is_atoms()) {
    K.tolerance = Phi.sampled().prov.tolerance * pref;
    const double reach = 2.0 * grid.L / hbar;
    if (reach > Phi.sampled().grid.L) K.warnings.push_back("kernel arguments leave the sampled box; values there are zero");
  }
  return K;
}

KernelMatrix op_matrix(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& f,
                       const GridSpec& grid) {
  if (f.realization() != Realization::XStar) throw InputError("op_matrix expects an X*-realization symbol");
  if (f.is_atoms()) return rep_matrix(B, hbar, omega, Symbol(fourier_atoms(f.atoms(), -1), Realization::X), grid);
  Sampled x = partial_fourier(f.sampled());
  x.grid.tag = Realization::X;
  return rep_matrix(B, hbar, omega, Symbol(x), grid);
}

KernelMatrix op_matrix_direct(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& f,
                              const GridSpec& grid) {
  check_hbar(hbar);
  if (f.realization() != Realization::XStar) throw InputError("op_matrix expects an X*-realization symbol");
  if (f.n() != grid.n || f.n() != B.n()) throw InputError("symbol, field and grid dimensions differ");
  const HullModel& model = B.model();
  const int n = grid.n, Ng = grid.N;
  const double h = grid.h();
  const auto pts = grid_points(grid);
  const std::size_t N = pts.size();
  const int D = 2 * Ng - 1;  // index differences -(N-1)..(N-1)
  const std::size_t Dn = [&] {
    std::size_t s = 1;
    for (int j = 0; j < n; ++j) s *= D;
    return s;
  }();
  FluxPhase flux(B, omega);

  // table[m][d]: sum over the xi quadrature of e^{i t.xi} times mode m of f, t = d h / hbar.
  std::vector<Mode> modes;
  std::vector<std::vector<cplx>> table;
  if (f.is_atoms()) {
    std::map<Mode, std::size_t> where;
    double qmax = 2.0 * grid.L / hbar;
    for (const auto& a : f.atoms().atoms)
      for (double p : a.momentum) qmax = std::max(qmax, 2.0 * grid.L / hbar + std::fabs(p));
    for (const auto& a : f.atoms().atoms) {
      // One-dimensional trapezoid sums of s^p e^{-gamma s^2} e^{i s q}; aliasing below e^{-40}.
      const double R = std::sqrt(46.0 / a.gamma) + 2.0;
      const double step = kTwoPi / (qmax + std::sqrt(184.0 * a.gamma) + 1.0);
      const int K = static_cast<int>(std::ceil(R / step));
      int pmax = a.poly.degree();
      // axis_sum[j][p][d]
      std::vector<std::vector<std::vector<cplx>>> axis_sum(n, std::vector<std::vector<cplx>>(pmax + 1, std::vector<cplx>(D)));
      for (int j = 0; j < n; ++j)
        for (int d = 0; d < D; ++d) {
          const double t = (d - (Ng - 1)) * h / hbar;
          const double q = t + a.momentum[j];
          std::vector<cplx> acc(pmax + 1, 0.0);
          for (int i = -K; i <= K; ++i) {
            const double s = i * step;
            cplx base = std::exp(-a.gamma * s * s) * std::polar(1.0, s * q);
            double sp = 1;
            for (int p = 0; p <= pmax; ++p, sp *= s) acc[p] += base * sp;
          }
          const cplx shift = std::polar(step, a.center[j] * q);
          for (int p = 0; p <= pmax; ++p) axis_sum[j][p][d] = acc[p] * shift;
        }
      std::vector<cplx> spatial(Dn, 0.0);
      for (std::size_t dflat = 0; dflat < Dn; ++dflat) {
        std::vector<int> dj(n);
        std::size_t r = dflat;
        for (int j = n - 1; j >= 0; --j) {
          dj[j] = static_cast<int>(r % D);
          r /= D;
        }
        cplx v = 0;
        for (const auto& [mi, c] : a.poly.terms()) {
          cplx term = c;
          for (int j = 0; j < n; ++j) term *= axis_sum[j][mi[j]][dj[j]];
          v += term;
        }
        spatial[dflat] = v;
      }
      for (const auto& [m, c] : a.hull.modes()) {
        if (!where.count(m)) {
          where[m] = modes.size();
          modes.push_back(m);
          table.emplace_back(Dn, 0.0);
        }
        auto& row = table[where[m]];
        for (std::size_t dflat = 0; dflat < Dn; ++dflat) row[dflat] += c * spatial[dflat];
      }
    }
  } else {
    const Sampled& s = f.sampled();
    const auto coeff = s.mode_coefficients();
    const std::size_t nxi = s.grid.size();
    const double w = s.grid.weight();
    std::vector<Vec> xis(nxi);
    for (std::size_t k = 0; k < nxi; ++k) xis[k] = s.grid.point(k);
    for (std::size_t k = 0; k < s.omega.size(); ++k) {
      modes.push_back(s.omega.mode_of(k));
      table.emplace_back(Dn, 0.0);
    }
    parallel_for(Dn, [&](std::size_t dflat) {
      Vec t(n);
      std::size_t r = dflat;
      for (int j = n - 1; j >= 0; --j) {
        t[j] = (static_cast<int>(r % D) - (Ng - 1)) * h / hbar;
        r /= D;
      }
      std::vector<cplx> ph(nxi);
      for (std::size_t q = 0; q < nxi; ++q) ph[q] = std::polar(w, dot(t, xis[q]));
      for (std::size_t k = 0; k < modes.size(); ++k) {
        cplx v = 0;
        for (std::size_t q = 0; q < nxi; ++q) v += ph[q] * coeff[k * nxi + q];
        table[k][dflat] = v;
      }
    });
  }

  std::vector<Vec> ks;
  for (const auto& m : modes) ks.push_back(model.wavevector(m));
  const std::size_t M = modes.size();
  const auto half = half_phases(pts, ks);
  std::vector<cplx> eomega(M);
  for (std::size_t k = 0; k < M; ++k) eomega[k] = std::polar(1.0, mode_phase(modes[k], omega));
  const double pref = grid.weight() / std::pow(kTwoPi * hbar, n);
  KernelMatrix K{grid, Eigen::MatrixXcd::Zero(N, N), hbar, omega, 0.0, {}};
  parallel_for(N, [&](std::size_t x) {
    auto mx = grid.multi_index(x);
    for (std::size_t y = 0; y < N; ++y) {
      auto my = grid.multi_index(y);
      std::size_t dflat = 0;
      for (int j = 0; j < n; ++j) dflat = dflat * D + static_cast<std::size_t>(mx[j] - my[j] + Ng - 1);
      cplx v = 0;
      for (std::size_t k = 0; k < M; ++k) v += table[k][dflat] * eomega[k] * half[x * M + k] * half[y * M + k];
      if (v == 0.0) continue;
      K.M(x, y) = pref * v * std::polar(1.0, -flux(pts[x], pts[y]) / hbar);
    }
  });
  return K;
}

double spectral_norm(const Eigen::MatrixXcd& M, double rel_tol, int max_iter) {
  if (M.size() == 0 || M.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  // Lanczos on M^* M with full reorthogonalization; exact once the Krylov space is exhausted.
  const Eigen::Index n = M.cols();
  const Eigen::Index kmax = std::min<Eigen::Index>(n, max_iter);
  Eigen::MatrixXcd V(n, kmax);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.1 * std::sin(1.7 * i), 0.05 * std::cos(0.9 * i));
  v.normalize();
  std::vector<double> alpha, beta;
  double prev = 0, theta = 0;
  int stable = 0;
  for (Eigen::Index k = 0; k < kmax; ++k) {
    V.col(k) = v;
    Eigen::VectorXcd w = M.adjoint() * (M * v);
    alpha.push_back(v.dot(w).real());
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j <= k; ++j) w -= V.col(j) * V.col(j).dot(w);
    const int m = static_cast<int>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1)) : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    theta = es.eigenvalues().maxCoeff();
    const double b = w.norm();
    if (b <= 1e-14 * std::max(theta, 1e-300)) break;
    stable = std::fabs(theta - prev) <= rel_tol * theta ? stable + 1 : 0;
    if (stable >= 3) break;
    prev = theta;
    beta.push_back(b);
    v = w / b;
  }
  return std::sqrt(std::max(0.0, theta));
}

std::vector<std::size_t> interior_indices(const GridSpec& grid) {
  const int lo = grid.N / 8, hi = grid.N - grid.N / 8;
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    auto mi = grid.multi_index(f);
    if (std::all_of(mi.begin(), mi.end(), [&](int i) { return i >= lo && i < hi; })) out.push_back(f);
  }
  return out;
}

Eigen::MatrixXcd interior_block(const Eigen::MatrixXcd& M, const GridSpec& grid) {
  auto idx = interior_indices(grid);
  Eigen::MatrixXcd out(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = M(idx[a], idx[b]);
  return out;
}

Eigen::MatrixXcd translation_matrix(const MagneticField& B, double hbar, const HullPoint& omega, const Vec& y,
                                    const GridSpec& grid) {
  check_hbar(hbar);
  Vec hy(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) hy[j] = hbar * y[j];
  auto steps = lattice_steps(hy, grid.h(), "hbar y");
  FluxPhase flux(B, omega);
  const std::size_t N = grid.size();
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(N, N);
  for (std::size_t x = 0; x < N; ++x) {
    std::size_t src = shifted(grid, x, steps);
    if (src == static_cast<std::size_t>(-1)) continue;
    Vec p = grid.point(x), q = p;
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += hy[j];
    T(x, src) = std::polar(1.0, -flux(p, q) / hbar);
  }
  return T;
}

Eigen::MatrixXcd multiplication_matrix(const HullModel& model, const HullFunction& phi, const HullPoint& omega,
                                       const GridSpec& grid) {
  const std::size_t N = grid.size();
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(N, N);
  for (std::size_t x = 0; x < N; ++x) R(x, x) = phi.evaluate(act(model, omega, grid.point(x)));
  return R;
}

CovarianceReport covariance_check(const MagneticField& B, double hbar, const HullPoint& omega, const GridSpec& grid,
                                  std::size_t samples, unsigned seed) {
  check_hbar(hbar);
  const HullModel& model = B.model();
  const int n = grid.n, d = model.d;
  const int reach = std::max(1, grid.N / 16);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> step(-reach, reach);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  auto rows = interior_indices(grid);
  auto row_block = [&](const Eigen::MatrixXcd& M) {
    Eigen::MatrixXcd out(rows.size(), M.cols());
    for (std::size_t a = 0; a < rows.size(); ++a) out.row(a) = M.row(rows[a]);
    return out;
  };
  auto lattice_vec = [&]() {
    Vec v(n);
    for (auto& c : v) c = step(rng) * grid.h() / hbar;
    return v;
  };
  CovarianceReport rep;
  rep.samples = samples;
  const std::size_t N = grid.size();
  for (std::size_t s = 0; s < samples; ++s) {
    Vec x = lattice_vec(), y = lattice_vec(), xy(n);
    for (int j = 0; j < n; ++j) xy[j] = x[j] + y[j];
    Eigen::MatrixXcd Tx = translation_matrix(B, hbar, omega, x, grid);
    Eigen::MatrixXcd Ty = translation_matrix(B, hbar, omega, y, grid);
    Eigen::MatrixXcd Txy = translation_matrix(B, hbar, omega, xy, grid);
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(N, N);
    for (std::size_t p = 0; p < N; ++p) K(p, p) = cocycle(B, hbar, act(model, omega, grid.point(p)), x, y);
    rep.product_defect = std::max(rep.product_defect, spectral_norm(row_block(Tx * Ty - K * Txy)));

    HullFunction phi(d);
    for (int k = 0; k < 3; ++k) {
      Mode m(d);
      for (auto& v : m) v = step(rng) % 3;
      phi.add(m, cplx(coef(rng), coef(rng)));
    }
    Vec hx(n);
    for (int j = 0; j < n; ++j) hx[j] = hbar * x[j];
    Eigen::MatrixXcd lhs = Tx * multiplication_matrix(model, phi, omega, grid) * Tx.adjoint();
    Eigen::MatrixXcd rhs = multiplication_matrix(model, translate(model, phi, hx), omega, grid);
    rep.conjugation_defect = std::max(rep.conjugation_defect, spectral_norm(row_block(lhs - rhs)));
  }
  return rep;
}

double morphism_defect(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& Phi,
                       const Symbol& Psi, const GridSpec& grid) {
  check_hbar(hbar);
  const int n = grid.n;
  KernelMatrix A = rep_matrix(B, hbar, omega, Phi, grid);
  KernelMatrix C = rep_matrix(B, hbar, omega, Psi, grid);
  const double na = spectral_norm(A.M), nc = spectral_norm(C.M);
  if (na == 0.0 || nc == 0.0) return 0.0;

  // The product symbol on the rescaled lattice h/hbar, so that (y - x)/hbar is a lattice point.
  const double hu = grid.h() / hbar;
  double extent = 0;
  for (const Symbol* s : {&Phi, &Psi})
    extent = std::max(extent, s->is_atoms() ? s->atoms().max_extent() : s->sampled().grid.L);
  GridSpec ugrid(0.5 * next_pow2(2.0 * extent / hu) * hu, next_pow2(2.0 * extent / hu), n);
  MagneticProduct prod(B, hbar, Phi, Psi, ugrid);

  const auto idx = interior_indices(grid);
  Eigen::MatrixXcd Arows(idx.size(), A.M.cols()), Ccols(C.M.rows(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    Arows.row(a) = A.M.row(idx[a]);
    Ccols.col(a) = C.M.col(idx[a]);
  }
  const Eigen::MatrixXcd P = Arows * Ccols;
  std::map<std::vector<int>, std::vector<std::pair<std::size_t, std::size_t>>> groups;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    auto mx = grid.multi_index(idx[a]);
    for (std::size_t b = 0; b < idx.size(); ++b) {
      auto my = grid.multi_index(idx[b]);
      std::vector<int> dlt(n);
      for (int j = 0; j < n; ++j) dlt[j] = my[j] - mx[j];
      groups[dlt].emplace_back(a, b);
    }
  }
  std::vector<const std::pair<const std::vector<int>, std::vector<std::pair<std::size_t, std::size_t>>>*> list;
  for (const auto& g : groups) list.push_back(&g);

  const HullModel& model = B.model();
  FluxPhase flux(B, omega);
  const double pref = grid.weight() / std::pow(hbar, n);
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(idx.size(), idx.size());
  parallel_for(list.size(), [&](std::size_t g) {
    const auto& [dlt, pairs] = *list[g];
    Vec z(n);
    for (int j = 0; j < n; ++j) z[j] = dlt[j] * hu;
    std::vector<HullPoint> ws;
    ws.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
      Vec mid = grid.point(idx[a]), y = grid.point(idx[b]);
      for (int j = 0; j < n; ++j) mid[j] = 0.5 * (mid[j] + y[j]);
      ws.push_back(act(model, omega, mid));
    }
    auto table = prod.table(ws);
    std::vector<cplx> vals(pairs.size());
    prod.evaluate(z, table, vals.data());
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      if (vals[q] == 0.0) continue;
      const auto [a, b] = pairs[q];
      Q(a, b) = pref * vals[q] * std::polar(1.0, -flux(grid.point(idx[a]), grid.point(idx[b])) / hbar);
    }
  });
  return spectral_norm(Q - P) / (na * nc);
}

KernelMatrix intertwiner(const MagneticField& B, double hbar, const HullPoint& omega_prime, const Vec& x0,
                         const GridSpec& grid) {
  check_hbar(hbar);
  auto steps = lattice_steps(x0, grid.h(), "x0");
  FluxPhase flux(B, omega_prime);
  const std::size_t N = grid.size();
  KernelMatrix K{grid, Eigen::MatrixXcd::Zero(N, N), hbar, omega_prime, 0.0, {}};
  std::size_t leaked = 0;
  for (std::size_t x = 0; x < N; ++x) {
    std::size_t src = shifted(grid, x, steps);
    if (src == static_cast<std::size_t>(-1)) {
      ++leaked;
      continue;
    }
    Vec p = grid.point(x), q(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) q[j] = x0[j] + p[j];
    K.M(x, src) = std::polar(1.0, -flux(x0, q) / hbar);
  }
  K.tolerance = static_cast<double>(leaked) / static_cast<double>(N);
  if (leaked) K.warnings.push_back("rows shifted outside the grid are zero-filled");
  return K;
}

double equivariance_defect(const MagneticField& B, double hbar, const HullPoint& omega, const Vec& x,
                           const Symbol& f, const GridSpec& grid) {
  const HullPoint moved = act(B.model(), omega, x);
  Vec x0(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) x0[j] = -x[j];
  KernelMatrix U = intertwiner(B, hbar, moved, x0, grid);
  KernelMatrix H0 = op_matrix(B, hbar, omega, f, grid);
  KernelMatrix H1 = op_matrix(B, hbar, moved, f, grid);
  Eigen::MatrixXcd conj = U.M.adjoint() * H0.M * U.M;
  Eigen::MatrixXcd h1 = interior_block(H1.M, grid);
  double denom = spectral_norm(h1);
  if (denom == 0.0) return 0.0;
  return spectral_norm(h1 - interior_block(conj, grid)) / denom;
}

double gauge_covariance_defect(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& f,
                               const GridSpec& grid, const std::function<double(const Vec&)>& chi,
                               const std::function<Vec(const Vec&)>& grad_chi) {
  using boost::math::quadrature::gauss;
  KernelMatrix H = op_matrix(B, hbar, omega, f, grid);
  KernelMatrix bare = op_matrix(MagneticField::zero(B.model()), hbar, omega, f, grid);
  const auto pts = grid_points(grid);
  const std::size_t N = pts.size();
  const int n = grid.n;
  Eigen::MatrixXcd lhs(N, N), rhs(N, N);
  std::vector<cplx> d(N);
  for (std::size_t x = 0; x < N; ++x) d[x] = std::polar(1.0, chi(pts[x]) / hbar);
  parallel_for(N, [&](std::size_t x) {
    for (std::size_t y = 0; y < N; ++y) {
      lhs(x, y) = d[x] * H.M(x, y) * std::conj(d[y]);
      if (bare.M(x, y) == 0.0) {
        rhs(x, y) = 0.0;
        continue;
      }
      auto integrand = [&](double t) {
        Vec r(n), dr(n);
        for (int j = 0; j < n; ++j) {
          dr[j] = pts[y][j] - pts[x][j];
          r[j] = pts[x][j] + t * dr[j];
        }
        Vec a = vector_potential_transverse(B, omega, r), g = grad_chi(r);
        double s = 0;
        for (int j = 0; j < n; ++j) s += (a[j] + g[j]) * dr[j];
        return s;
      };
      double line = gauss<double, 20>::integrate(integrand, 0.0, 1.0);
      rhs(x, y) = bare.M(x, y) * std::polar(1.0, -line / hbar);
    }
  });
  double denom = spectral_norm(H.M);
  if (denom == 0.0) return 0.0;
  return spectral_norm(lhs - rhs) / denom;
}

NormEstimate norm_estimate(const MagneticField& B, double hbar, const Symbol& Phi,
                           const std::vector<HullPoint>& omegas, const GridSpec& grid) {
  check_hbar(hbar);
  if (omegas.empty()) throw InputError("norm_estimate needs at least one hull point");
  NormEstimate est;
  GridSpec scaled = grid.scaled(hbar);
  for (const auto& w : omegas) {
    double s = spectral_norm(rep_matrix(B, hbar, w, Phi, scaled).M);
    est.per_omega.push_back(s);
    est.lower = std::max(est.lower, s);
  }
  if (Phi.is_atoms()) {
    LatticeModes lm(B.model(), Phi, grid.h(), -grid.N / 2, grid.N);
    double total = 0;
    for (std::size_t f = 0; f < grid.size(); ++f) total += lm.bound(f);
    est.upper = total * grid.weight();
  } else {
    est.upper = l1_norm(Phi.sampled()).upper;
  }
  return est;
}

}  // namespace magweyl
