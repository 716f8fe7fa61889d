#include "magweyl/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "magweyl/fft.hpp"
#include "magweyl/parallel.hpp"

namespace magweyl {

namespace {

constexpr cplx I(0.0, 1.0);

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

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

void require_realization(const Symbol& s, Realization r, const char* what) {
  if (s.realization() != r)
    throw InputError(std::string(what) + (r == Realization::X ? " expects X-realization symbols"
                                                               : " expects X*-realization symbols"));
}

void require_compatible(const Symbol& a, const Symbol& b, const GridSpec& grid) {
  if (a.n() != b.n() || a.n() != grid.n) throw InputError("symbol dimensions do not match the grid");
  if (a.d() != b.d()) throw InputError("symbols live on different hulls");
}

}  // namespace

LatticeModes::LatticeModes(const HullModel& model, const Symbol& s, double h, int lo, int count)
    : n_(s.n()), h_(h), lo_(lo), count_(count) {
  const std::size_t total = ipow(count, n_);
  auto point = [&](std::size_t flat) {
    Vec p(n_);
    for (int j = n_ - 1; j >= 0; --j) {
      p[j] = (lo + static_cast<int>(flat % count)) * h;
      flat /= count;
    }
    return p;
  };
  if (s.is_atoms()) {
    std::map<Mode, std::size_t> where;
    for (const auto& a : s.atoms().atoms)
      for (const auto& [m, c] : a.hull.modes())
        if (!where.count(m)) {
          where[m] = modes_.size();
          modes_.push_back(m);
        }
    data_.assign(total * modes_.size(), 0.0);
    for (const auto& a : s.atoms().atoms) {
      std::vector<std::pair<std::size_t, cplx>> hull;
      for (const auto& [m, c] : a.hull.modes()) hull.emplace_back(where[m], c);
      for (std::size_t f = 0; f < total; ++f) {
        cplx e = a.envelope(point(f));
        if (e == 0.0) continue;
        for (const auto& [k, c] : hull) data_[f * modes_.size() + k] += c * e;
      }
    }
  } else {
    const Sampled& sm = s.sampled();
    if (std::fabs(sm.grid.h() - h) > 1e-12 * h) throw InputError("sampled symbol spacing differs from the lattice");
    (void)model;
    auto c = sm.mode_coefficients();
    const std::size_t nx = sm.grid.size();
    double cmax = 0;
    for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < sm.omega.size(); ++k) {
      double m = 0;
      for (std::size_t x = 0; x < nx; ++x) m = std::max(m, std::abs(c[k * nx + x]));
      if (m > 1e-16 * cmax) {
        keep.push_back(k);
        modes_.push_back(sm.omega.mode_of(k));
      }
    }
    data_.assign(total * modes_.size(), 0.0);
    const int half = sm.grid.N / 2;
    for (std::size_t x = 0; x < nx; ++x) {
      auto mi = sm.grid.multi_index(x);
      std::vector<int> p(n_);
      for (int j = 0; j < n_; ++j) p[j] = mi[j] - half;
      std::size_t f = index(p.data());
      if (f == npos) continue;
      for (std::size_t q = 0; q < keep.size(); ++q) data_[f * modes_.size() + q] = c[keep[q] * nx + x];
    }
  }
  bound_.assign(total, 0.0);
  for (std::size_t f = 0; f < total; ++f) {
    double b = 0;
    for (std::size_t k = 0; k < modes_.size(); ++k) b += std::abs(data_[f * modes_.size() + k]);
    bound_[f] = b;
    max_bound_ = std::max(max_bound_, b);
  }
}

std::size_t LatticeModes::index(const int* p) const {
  std::size_t flat = 0;
  for (int j = 0; j < n_; ++j) {
    int q = p[j] - lo_;
    if (q < 0 || q >= count_) return npos;
    flat = flat * count_ + q;
  }
  return flat;
}

MagneticProduct::MagneticProduct(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi,
                                 const GridSpec& grid)
    : B_(B), hbar_(hbar), grid_(grid), model_(B.model()), psi_symbol_(Psi) {
  if (!(hbar >= 0.0) || hbar > 1.0) throw InputError("hbar must lie in (0, 1]");
  require_compatible(Phi, Psi, grid);
  if (Phi.d() != model_.d) throw InputError("symbol hull dimension differs from the field");
  const int n = grid.n;
  const int N = grid.N;
  const double h = grid.h();
  phi_ = LatticeModes(model_, Phi, h, -N / 2, N);
  psi_ = LatticeModes(model_, Psi, h, -2 * N, 4 * N);

  const std::size_t nu = grid.size();
  u_.resize(nu);
  u_index_.resize(nu);
  for (std::size_t f = 0; f < nu; ++f) {
    u_[f] = grid.point(f);
    auto mi = grid.multi_index(f);
    for (auto& v : mi) v -= N / 2;
    u_index_[f] = mi;
  }
  for (const auto& m : phi_.modes()) phi_k_.push_back(model_.wavevector(m));
  for (const auto& m : psi_.modes()) psi_k_.push_back(model_.wavevector(m));
  const std::size_t mp = phi_.mode_count(), mq = psi_.mode_count();
  phi_pre_.resize(nu * mp);
  psi_phase_.resize(nu * mq);
  for (std::size_t f = 0; f < nu; ++f) {
    std::size_t lf = phi_.index(u_index_[f].data());
    const cplx* c = phi_.coefficients(lf);
    for (std::size_t k = 0; k < mp; ++k)
      phi_pre_[f * mp + k] = c[k] * std::polar(1.0, 0.5 * hbar * dot(phi_k_[k], u_[f]));
    for (std::size_t k = 0; k < mq; ++k) psi_phase_[f * mq + k] = std::polar(1.0, 0.5 * hbar * dot(psi_k_[k], u_[f]));
  }
  threshold_ = 1e-18 * phi_.max_bound() * psi_.max_bound();

  // Mass left outside the stored ranges, estimated from the outermost lattice layers.
  const double hn = grid.weight();
  auto edge_and_mass = [&](const LatticeModes& lm, int lo, int count) {
    double edge = 0, mass = 0;
    std::size_t total = ipow(count, n);
    std::vector<int> p(n);
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t r = f;
      bool on_edge = false;
      for (int j = n - 1; j >= 0; --j) {
        int q = static_cast<int>(r % count);
        r /= count;
        p[j] = lo + q;
        on_edge = on_edge || q == 0 || q == count - 1;
      }
      double b = lm.bound(lm.index(p.data())) * hn;
      mass += b;
      if (on_edge) edge += b;
    }
    return std::make_pair(edge, mass);
  };
  auto [phi_edge, phi_mass] = edge_and_mass(phi_, -N / 2, N);
  auto [psi_edge, psi_mass] = edge_and_mass(psi_, -2 * N, 4 * N);
  tolerance_ = (phi_edge + 1e-15 * std::sqrt(static_cast<double>(nu)) * phi_mass) * psi_mass + phi_mass * psi_edge;
}

MagneticProduct::Table MagneticProduct::table(const std::vector<HullPoint>& points) const {
  Table t;
  t.count = points.size();
  auto fill = [&](const std::vector<Mode>& modes, std::vector<cplx>& out) {
    out.resize(modes.size() * t.count);
    for (std::size_t k = 0; k < modes.size(); ++k)
      for (std::size_t w = 0; w < t.count; ++w) out[k * t.count + w] = std::polar(1.0, mode_phase(modes[k], points[w]));
  };
  fill(phi_.modes(), t.phi);
  fill(psi_.modes(), t.psi);
  std::vector<Mode> fm;
  for (const auto& term : B_.mode_terms()) fm.push_back(term.m);
  fill(fm, t.field);
  return t;
}

void MagneticProduct::evaluate(const Vec& z, const Table& t, cplx* out) const {
  const int n = grid_.n;
  const double h = grid_.h();
  const double hn = grid_.weight();
  const std::size_t W = t.count;
  const std::size_t mp = phi_.mode_count(), mq = psi_.mode_count();
  const std::size_t mb = B_.mode_terms().size();
  std::fill(out, out + W, cplx(0));

  std::vector<int> zi(n);
  bool aligned = true;
  for (int j = 0; j < n; ++j) {
    double r = z[j] / h;
    zi[j] = static_cast<int>(std::lround(r));
    aligned = aligned && std::fabs(r - zi[j]) <= 1e-9 * std::max(1.0, std::fabs(r));
  }
  if (!aligned && !psi_symbol_.is_atoms())
    throw InputError("sampled right factor needs output points on the quadrature lattice");

  std::vector<cplx> zphase(mp), a(mp), b(mq), lam(mb), psi_direct(mq);
  for (std::size_t k = 0; k < mp; ++k) zphase[k] = std::polar(1.0, -0.5 * hbar_ * dot(phi_k_[k], z));
  std::vector<cplx> A(W), Bv(W);
  std::vector<double> L(W);
  std::vector<int> p(n);
  Vec zu(n);
  std::map<Mode, std::size_t> psi_where;
  if (!aligned)
    for (std::size_t k = 0; k < mq; ++k) psi_where[psi_.modes()[k]] = k;

  for (std::size_t f = 0; f < u_.size(); ++f) {
    const double bu = phi_.bound(phi_.index(u_index_[f].data()));
    if (bu == 0.0) continue;
    const cplx* psi_c = nullptr;
    double bv = 0;
    std::size_t pf = LatticeModes::npos;
    if (aligned) {
      for (int j = 0; j < n; ++j) p[j] = zi[j] - u_index_[f][j];
      pf = psi_.index(p.data());
    }
    if (pf != LatticeModes::npos) {
      psi_c = psi_.coefficients(pf);
      bv = psi_.bound(pf);
    } else {
      if (!psi_symbol_.is_atoms()) continue;
      for (int j = 0; j < n; ++j) zu[j] = z[j] - u_[f][j];
      std::fill(psi_direct.begin(), psi_direct.end(), cplx(0));
      if (psi_where.empty())
        for (std::size_t k = 0; k < mq; ++k) psi_where[psi_.modes()[k]] = k;
      for (const auto& at : psi_symbol_.atoms().atoms) {
        cplx e = at.envelope(zu);
        for (const auto& [m, c] : at.hull.modes()) psi_direct[psi_where[m]] += c * e;
      }
      for (const auto& v : psi_direct) bv += std::abs(v);
      psi_c = psi_direct.data();
    }
    if (bu * bv <= threshold_) continue;

    const cplx* pre = phi_pre_.data() + f * mp;
    for (std::size_t k = 0; k < mp; ++k) a[k] = pre[k] * zphase[k];
    const cplx* ph = psi_phase_.data() + f * mq;
    for (std::size_t k = 0; k < mq; ++k) b[k] = psi_c[k] * ph[k];

    std::fill(A.begin(), A.end(), cplx(0));
    std::fill(Bv.begin(), Bv.end(), cplx(0));
    for (std::size_t k = 0; k < mp; ++k) {
      if (a[k] == 0.0) continue;
      const cplx* e = t.phi.data() + k * W;
      for (std::size_t w = 0; w < W; ++w) A[w] += a[k] * e[w];
    }
    for (std::size_t k = 0; k < mq; ++k) {
      if (b[k] == 0.0) continue;
      const cplx* e = t.psi.data() + k * W;
      for (std::size_t w = 0; w < W; ++w) Bv[w] += b[k] * e[w];
    }
    if (mb == 0) {
      for (std::size_t w = 0; w < W; ++w) out[w] += hn * A[w] * Bv[w];
      continue;
    }
    scaled_flux_coefficients(B_, hbar_, z.data(), u_[f].data(), lam.data());
    std::fill(L.begin(), L.end(), 0.0);
    for (std::size_t k = 0; k < mb; ++k) {
      if (lam[k] == 0.0) continue;
      const double lr = lam[k].real(), li = lam[k].imag();
      const cplx* e = t.field.data() + k * W;
      for (std::size_t w = 0; w < W; ++w) L[w] += lr * e[w].real() - li * e[w].imag();
    }
    for (std::size_t w = 0; w < W; ++w) out[w] += hn * A[w] * Bv[w] * std::polar(1.0, -hbar_ * L[w]);
  }
}

namespace {

std::vector<HullPoint> omega_points(const OmegaGrid& omega) {
  std::vector<HullPoint> pts(omega.size());
  for (std::size_t w = 0; w < omega.size(); ++w) pts[w] = omega.point(w);
  return pts;
}

Sampled on_box(const HullModel& model, const Symbol& s, const GridSpec& grid, const OmegaGrid& omega) {
  Sampled r = sample(model, s, grid, omega);
  r.grid.tag = Realization::X;
  return r;
}

// Values on the doubled lattice grid [-N h, N h), which holds every difference x - y of box points.
Sampled on_ext(const HullModel& model, const Symbol& s, const GridSpec& grid, const OmegaGrid& omega) {
  GridSpec ext(grid.N * grid.h(), 2 * grid.N, grid.n);
  if (s.is_atoms()) return sample(model, s, ext, omega);
  Sampled box = on_box(model, s, grid, omega);
  Sampled r(ext, omega);
  r.prov = box.prov;
  const std::size_t nb = grid.size(), ne = ext.size();
  for (std::size_t x = 0; x < nb; ++x) {
    auto mi = grid.multi_index(x);
    std::size_t flat = 0;
    for (int j = 0; j < grid.n; ++j) flat = flat * ext.N + static_cast<std::size_t>(mi[j] + grid.N / 2);
    for (std::size_t w = 0; w < omega.size(); ++w) r.values[w * ne + flat] = box.values[w * nb + x];
  }
  return r;
}

double l1_sup(const Sampled& s) {
  const std::size_t nx = s.grid.size();
  double total = 0;
  for (std::size_t x = 0; x < nx; ++x) {
    double m = 0;
    for (std::size_t w = 0; w < s.omega.size(); ++w) m = std::max(m, std::abs(s.values[w * nx + x]));
    total += m;
  }
  return total * s.grid.weight();
}

double l1_edge(const Sampled& s) {
  const std::size_t nx = s.grid.size();
  double total = 0;
  for (std::size_t x = 0; x < nx; ++x) {
    auto mi = s.grid.multi_index(x);
    if (std::none_of(mi.begin(), mi.end(), [&](int i) { return i == 0 || i == s.grid.N - 1; })) continue;
    double m = 0;
    for (std::size_t w = 0; w < s.omega.size(); ++w) m = std::max(m, std::abs(s.values[w * nx + x]));
    total += m;
  }
  return total * s.grid.weight();
}

struct ConvTerm {
  Sampled a;               // box grid
  Sampled b;               // doubled grid
  std::vector<cplx> coef;  // per omega point; empty means 1
  cplx scale = 1.0;
};

// sum over terms of scale coef(w) (a conv b)(w; x) on the box grid, by zero-padded FFTs of size (2N)^n.
Sampled convolve(const std::vector<ConvTerm>& terms, const GridSpec& grid, const OmegaGrid& omega) {
  const int n = grid.n, N = grid.N, M = 2 * N;
  const std::size_t nb = grid.size(), ne = ipow(M, n);
  std::vector<int> shape(n, M);
  Sampled out(grid, omega);
  out.grid.tag = Realization::X;
  const std::size_t W = omega.size();
  const std::size_t chunk = std::max<std::size_t>(1, std::min<std::size_t>(W, (1u << 21) / ne));
  std::vector<cplx> acc, fa, fb;
  for (std::size_t w0 = 0; w0 < W; w0 += chunk) {
    const std::size_t cw = std::min(chunk, W - w0);
    acc.assign(cw * ne, 0.0);
    for (const auto& t : terms) {
      fa.assign(cw * ne, 0.0);
      fb.assign(cw * ne, 0.0);
      for (std::size_t w = 0; w < cw; ++w) {
        for (std::size_t x = 0; x < nb; ++x) {
          auto mi = grid.multi_index(x);
          std::size_t flat = 0;
          for (int j = 0; j < n; ++j) flat = flat * M + mi[j];
          fa[w * ne + flat] = t.a.values[(w0 + w) * nb + x];
        }
        std::copy(t.b.values.begin() + (w0 + w) * ne, t.b.values.begin() + (w0 + w + 1) * ne, fb.begin() + w * ne);
      }
      fft_many(fa.data(), shape, static_cast<int>(cw), 1, static_cast<int>(ne), -1);
      fft_many(fb.data(), shape, static_cast<int>(cw), 1, static_cast<int>(ne), -1);
      for (std::size_t w = 0; w < cw; ++w) {
        cplx c = t.scale * (t.coef.empty() ? cplx(1) : t.coef[w0 + w]);
        if (c == 0.0) continue;
        for (std::size_t k = 0; k < ne; ++k) acc[w * ne + k] += c * fa[w * ne + k] * fb[w * ne + k];
      }
    }
    fft_many(acc.data(), shape, static_cast<int>(cw), 1, static_cast<int>(ne), +1);
    const double scale = grid.weight() / static_cast<double>(ne);
    for (std::size_t w = 0; w < cw; ++w)
      for (std::size_t x = 0; x < nb; ++x) {
        auto mi = grid.multi_index(x);
        std::size_t flat = 0;
        for (int j = 0; j < n; ++j) flat = flat * M + static_cast<std::size_t>(mi[j] + N);
        out.values[(w0 + w) * nb + x] = acc[w * ne + flat] * scale;
      }
  }
  double tol = 0;
  for (const auto& t : terms) {
    double la = l1_sup(t.a), lb = l1_sup(t.b);
    tol += std::abs(t.scale) * ((l1_edge(t.a) + 1e-15 * std::sqrt(static_cast<double>(ne)) * la) * lb + la * l1_edge(t.b));
    if (!t.coef.empty()) {
      double cm = 0;
      for (const auto& c : t.coef) cm = std::max(cm, std::abs(c));
      tol *= std::max(1.0, cm);
    }
  }
  out.prov.tolerance = tol;
  return out;
}

MultiIndex unit(int n, int j) {
  MultiIndex e(n, 0);
  e[j] = 1;
  return e;
}

}  // namespace

Sampled compose_zero(const HullModel& model, const Symbol& Phi, const Symbol& Psi, const GridSpec& grid,
                     const OmegaGrid& omega) {
  require_realization(Phi, Realization::X, "compose_zero");
  require_realization(Psi, Realization::X, "compose_zero");
  require_compatible(Phi, Psi, grid);
  std::vector<ConvTerm> terms(1);
  terms[0].a = on_box(model, Phi, grid, omega);
  terms[0].b = on_ext(model, Psi, grid, omega);
  return convolve(terms, grid, omega);
}

Sampled compose_magnetic(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi,
                         const GridSpec& grid, const OmegaGrid& omega) {
  require_realization(Phi, Realization::X, "compose_magnetic");
  require_realization(Psi, Realization::X, "compose_magnetic");
  if (!(hbar > 0.0) || hbar > 1.0) throw InputError("hbar must lie in (0, 1]");
  MagneticProduct prod(B, hbar, Phi, Psi, grid);
  auto table = prod.table(omega_points(omega));
  const std::size_t nx = grid.size(), W = omega.size();
  std::vector<cplx> rows(nx * W);
  parallel_for(nx, [&](std::size_t x) { prod.evaluate(grid.point(x), table, rows.data() + x * W); });
  Sampled out(grid, omega);
  out.grid.tag = Realization::X;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t w = 0; w < W; ++w) out.values[w * nx + x] = rows[x * W + w];
  out.prov.tolerance = prod.tolerance();
  double mass = l1_sup(out);
  if (prod.tolerance() > 1e-6 * std::max(mass, 1e-300))
    out.prov.warnings.push_back("box truncation exceeds 1e-6 of the product mass");
  return out;
}

Sampled moyal_magnetic(const MagneticField& B, double hbar, const Symbol& f, const Symbol& g, const GridSpec& grid,
                       const OmegaGrid& omega) {
  require_realization(f, Realization::XStar, "moyal_magnetic");
  require_realization(g, Realization::XStar, "moyal_magnetic");
  const HullModel& model = B.model();
  GridSpec xi = grid;
  xi.tag = Realization::XStar;
  GridSpec xgrid = xi.dual();
  xgrid.tag = Realization::X;
  auto to_x = [&](const Symbol& s) -> Symbol {
    if (s.is_atoms()) return Symbol(fourier_atoms(s.atoms(), -1), Realization::X);
    Sampled sm = sample(model, s, xi, omega);
    sm.grid.tag = Realization::XStar;
    Sampled r = partial_fourier(sm);
    r.grid.tag = Realization::X;
    return Symbol(r);
  };
  Sampled prod = compose_magnetic(B, hbar, to_x(f), to_x(g), xgrid, omega);
  Sampled out = partial_fourier(prod);
  out.grid.tag = Realization::XStar;
  return out;
}

Sampled poisson_X(const MagneticField& B, const Symbol& Phi, const Symbol& Psi, const GridSpec& grid,
                  const OmegaGrid& omega) {
  require_realization(Phi, Realization::X, "poisson_X");
  require_realization(Psi, Realization::X, "poisson_X");
  require_compatible(Phi, Psi, grid);
  const HullModel& model = B.model();
  const int n = grid.n;
  const MultiIndex zero(n, 0);
  auto box = [&](const Symbol& s, const MultiIndex& a, const MultiIndex& beta) {
    return on_box(model, apply_weights(model, s, a, zero, beta), grid, omega);
  };
  auto ext = [&](const Symbol& s, const MultiIndex& a, const MultiIndex& beta) {
    Symbol w = apply_weights(model, s, a, zero, beta);
    return on_ext(model, w, grid, omega);
  };
  std::vector<ConvTerm> terms;
  for (int j = 0; j < n; ++j) {
    terms.push_back({box(Phi, unit(n, j), zero), ext(Psi, zero, unit(n, j)), {}, I});
    terms.push_back({box(Phi, zero, unit(n, j)), ext(Psi, unit(n, j), zero), {}, -I});
  }
  auto pts = omega_points(omega);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const HullFunction& bjk = B(j, k);
      if (bjk.empty()) continue;
      std::vector<cplx> coef(pts.size());
      for (std::size_t w = 0; w < pts.size(); ++w) coef[w] = bjk.evaluate(pts[w]);
      terms.push_back({box(Phi, unit(n, j), zero), ext(Psi, unit(n, k), zero), coef, 1.0});
    }
  return convolve(terms, grid, omega);
}

AtomSum poisson_Xi(const MagneticField& B, const AtomSum& f, const AtomSum& g) {
  if (f.n != g.n || f.n != B.n()) throw InputError("bracket arguments must share the dimension of the field");
  const HullModel& model = B.model();
  const int n = f.n;
  AtomSum r(n, f.d);
  std::vector<AtomSum> df, dg, hf, hg;
  for (int j = 0; j < n; ++j) {
    df.push_back(f.derivative(j));
    dg.push_back(g.derivative(j));
    hf.push_back(f.hull_derivative(model, unit(model.n, j)));
    hg.push_back(g.hull_derivative(model, unit(model.n, j)));
  }
  for (int j = 0; j < n; ++j) {
    r = r + df[j] * hg[j];
    r = r + (hf[j] * dg[j]) * cplx(-1.0);
  }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const HullFunction& bjk = B(j, k);
      if (bjk.empty()) continue;
      r = r + (df[j] * dg[k]).times_hull(bjk * cplx(-1.0));
    }
  return r;
}

Sampled poisson_Xi(const MagneticField& B, const Symbol& f, const Symbol& g, const GridSpec& grid,
                   const OmegaGrid& omega) {
  require_realization(f, Realization::XStar, "poisson_Xi");
  require_realization(g, Realization::XStar, "poisson_Xi");
  require_compatible(f, g, grid);
  const HullModel& model = B.model();
  const int n = grid.n;
  GridSpec xi = grid;
  xi.tag = Realization::XStar;
  if (f.is_atoms() && g.is_atoms()) {
    Sampled r = sample(model, Symbol(poisson_Xi(B, f.atoms(), g.atoms()), Realization::XStar), xi, omega);
    r.grid.tag = Realization::XStar;
    return r;
  }
  const MultiIndex zero(n, 0);
  auto w = [&](const Symbol& s, const MultiIndex& alpha, const MultiIndex& beta) {
    Symbol base = s.is_atoms() ? s : Symbol(sample(model, s, xi, omega));
    Sampled r = sample(model, apply_weights(model, base, zero, alpha, beta), xi, omega);
    return r;
  };
  Sampled out(xi, omega);
  auto pts = omega_points(omega);
  const std::size_t nx = xi.size();
  auto accumulate = [&](const Sampled& a, const Sampled& b, const std::vector<cplx>* coef, cplx s) {
    for (std::size_t q = 0; q < pts.size(); ++q)
      for (std::size_t x = 0; x < nx; ++x)
        out.values[q * nx + x] += s * (coef ? (*coef)[q] : cplx(1)) * a.values[q * nx + x] * b.values[q * nx + x];
  };
  std::vector<Sampled> df, dg;
  for (int j = 0; j < n; ++j) {
    df.push_back(w(f, unit(n, j), zero));
    dg.push_back(w(g, unit(n, j), zero));
    accumulate(df[j], w(g, zero, unit(model.n, j)), nullptr, 1.0);
    accumulate(w(f, zero, unit(model.n, j)), dg[j], nullptr, -1.0);
  }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (B(j, k).empty()) continue;
      std::vector<cplx> coef(pts.size());
      for (std::size_t q = 0; q < pts.size(); ++q) coef[q] = B(j, k).evaluate(pts[q]);
      accumulate(df[j], dg[k], &coef, -1.0);
    }
  return out;
}

L1Norm l1_norm(const Sampled& s) {
  L1Norm r;
  r.value = l1_sup(s);
  auto c = s.mode_coefficients();
  const std::size_t nx = s.grid.size();
  double total = 0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t k = 0; k < s.omega.size(); ++k) total += std::abs(c[k * nx + x]);
  r.upper = total * s.grid.weight();
  return r;
}

L1Norm l1_norm(const HullModel& model, const Symbol& s, const GridSpec& grid, const OmegaGrid& omega) {
  return l1_norm(sample(model, s, grid, omega));
}

ExpansionReport expansion_remainder(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi,
                                    const GridSpec& grid, const OmegaGrid& omega) {
  ExpansionReport r;
  r.hbar = hbar;
  r.product = compose_magnetic(B, hbar, Phi, Psi, grid, omega);
  r.leading = compose_zero(B.model(), Phi, Psi, grid, omega);
  Sampled bracket = poisson_X(B, Phi, Psi, grid, omega);
  r.subleading = bracket * cplx(0, -0.5);
  Sampled first = r.product - r.leading;
  Sampled second = first - r.subleading * cplx(hbar);
  r.remainder = second * cplx(1.0 / (hbar * hbar));
  r.product_norm = l1_sup(r.product);
  r.first_order_norm = l1_sup(first);
  r.second_order_norm = l1_sup(second);
  r.leading_norm = l1_sup(r.leading);
  r.subleading_norm = l1_sup(r.subleading);
  r.remainder_norm = l1_sup(r.remainder);
  Sampled rebuilt = r.leading + r.subleading * cplx(hbar) + r.remainder * cplx(hbar * hbar);
  r.reconstruction_defect = l1_sup(rebuilt - r.product);
  // Truncation at the box edge is common to all three terms and cancels; what survives the
  // subtraction is rounding, which grows like the product mass times machine precision.
  const double eps = 1e-15 * std::sqrt(static_cast<double>(grid.size()));
  r.tolerance = eps * (r.product_norm + r.leading_norm + hbar * r.subleading_norm) / (hbar * hbar);
  r.reliable = r.tolerance <= 0.1 * r.remainder_norm;
  r.remainder.prov.tolerance = r.tolerance;
  return r;
}

double associativity_defect(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi,
                            const Symbol& Xi, const GridSpec& grid, const OmegaGrid& omega) {
  Symbol left(compose_magnetic(B, hbar, Phi, Psi, grid, omega));
  Symbol right(compose_magnetic(B, hbar, Psi, Xi, grid, omega));
  Sampled a = compose_magnetic(B, hbar, left, Xi, grid, omega);
  Sampled b = compose_magnetic(B, hbar, Phi, right, grid, omega);
  return l1_sup(a - b) / std::max(l1_sup(b), 1e-300);
}

PhaseSpaceSample pi_omega(const HullModel& model, const AtomSum& f, const HullPoint& omega,
                          const std::vector<Vec>& xs, const std::vector<Vec>& xis) {
  PhaseSpaceSample s{xs, xis, {}};
  s.values.resize(xs.size() * xis.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    HullPoint w = act(model, omega, xs[i]);
    for (std::size_t k = 0; k < xis.size(); ++k) s.values[i * xis.size() + k] = f.evaluate(w, xis[k]);
  }
  return s;
}

double poisson_map_defect(const MagneticField& B, const AtomSum& f, const AtomSum& g, const HullPoint& omega,
                          const std::vector<Vec>& xs, const std::vector<Vec>& xis, double h) {
  const HullModel& model = B.model();
  const int n = f.n;
  AtomSum bracket = poisson_Xi(B, f, g);
  std::vector<AtomSum> df, dg;
  for (int j = 0; j < n; ++j) {
    df.push_back(f.derivative(j));
    dg.push_back(g.derivative(j));
  }
  double worst = 0;
  for (const auto& x : xs) {
    HullPoint w = act(model, omega, x);
    Eigen::MatrixXd b = B.evaluate(w);
    for (const auto& xi : xis) {
      cplx lhs = bracket.evaluate(w, xi);
      cplx rhs = 0;
      std::vector<cplx> fx(n), gx(n), fxi(n), gxi(n);
      for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        HullPoint wp = act(model, omega, xp), wm = act(model, omega, xm);
        fx[j] = (f.evaluate(wp, xi) - f.evaluate(wm, xi)) / (2 * h);
        gx[j] = (g.evaluate(wp, xi) - g.evaluate(wm, xi)) / (2 * h);
        fxi[j] = df[j].evaluate(w, xi);
        gxi[j] = dg[j].evaluate(w, xi);
      }
      for (int j = 0; j < n; ++j) rhs += fxi[j] * gx[j] - fx[j] * gxi[j];
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) rhs -= b(j, k) * fxi[j] * gxi[k];
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

double jacobi_defect(const MagneticField& B, const AtomSum& f, const AtomSum& g, const AtomSum& k,
                     const std::vector<HullPoint>& omegas, const std::vector<Vec>& xis) {
  AtomSum a = poisson_Xi(B, f, poisson_Xi(B, g, k));
  AtomSum b = poisson_Xi(B, g, poisson_Xi(B, k, f));
  AtomSum c = poisson_Xi(B, k, poisson_Xi(B, f, g));
  double worst = 0;
  for (const auto& w : omegas)
    for (const auto& xi : xis) worst = std::max(worst, std::abs(a.evaluate(w, xi) + b.evaluate(w, xi) + c.evaluate(w, xi)));
  return worst;
}

}  // namespace magweyl
