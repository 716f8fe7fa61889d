#include "magweyl/audit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace magweyl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Sampled pointwise(const Sampled& a, const Sampled& b) {
  Sampled out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
  return out;
}

double l1(const Sampled& s) { return l1_norm(s).value; }

// Transports an X*-realization sample back to X before measuring.
double l1_transported(const Sampled& s) { return l1(partial_fourier(s)); }

std::vector<MultiIndex> indices_up_to(int dim, int order) {
  std::vector<MultiIndex> out;
  MultiIndex m(dim, 0);
  std::function<void(int, int)> rec = [&](int axis, int left) {
    if (axis == dim) {
      out.push_back(m);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      m[axis] = v;
      rec(axis + 1, left - v);
    }
    m[axis] = 0;
  };
  rec(0, order);
  return out;
}

std::vector<HullPoint> omega_samples(const OmegaGrid& grid, std::size_t count) {
  std::vector<HullPoint> out;
  const std::size_t total = grid.size();
  count = std::min(count, total);
  // Golden-ratio stepping; a uniform stride aliases onto a sublattice of the grid.
  const double phi = 0.6180339887498949;
  for (std::size_t k = 0; k < count; ++k) {
    double frac = std::fmod(static_cast<double>(k) * phi, 1.0);
    out.push_back(grid.point(std::min(total - 1, static_cast<std::size_t>(frac * static_cast<double>(total)))));
  }
  return out;
}

// Slope band check; sequences lying entirely below the floor carry no order information.
AuditCheck slope_check(const std::string& name, const std::vector<double>& values, const std::vector<double>& hbars,
                       double expected, double band, double floor) {
  double vmax = *std::max_element(values.begin(), values.end());
  if (vmax <= floor) return {name, kNaN, vmax, floor, true};
  SlopeFit fit = slope_fit(values, hbars);
  double d = std::fabs(fit.slope - expected);
  return {name, kNaN, d, band, fit.used >= 3 && d <= band};
}

AuditCheck monotone_check(const std::string& name, const std::vector<double>& values, double floor) {
  double worst = 0;
  for (std::size_t i = 1; i < values.size(); ++i) worst = std::max(worst, values[i] - values[i - 1]);
  return {name, kNaN, worst, floor, worst <= floor};
}

json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

SlopeFit slope_fit(const std::vector<double>& values, const std::vector<double>& hbars) {
  if (values.size() != hbars.size()) throw InputError("slope_fit needs one value per hbar");
  SlopeFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !(hbars[i] > 0.0)) {
      fit.dropped.push_back(i);
      continue;
    }
    lx.push_back(std::log(hbars[i]));
    ly.push_back(std::log(values[i]));
  }
  fit.used = lx.size();
  if (fit.used < 3) throw InputError("slope_fit needs at least three positive values");
  const double m = static_cast<double>(fit.used);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / m;
    my += ly[i] / m;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw InputError("slope_fit needs distinct hbar values");
  fit.slope = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double r = ly[i] - (my + fit.slope * (lx[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

double von_neumann_defect(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi,
                          const GridSpec& grid, const OmegaGrid& omega) {
  Sampled p = compose_magnetic(B, hbar, Phi, Psi, grid, omega);
  Sampled q = compose_magnetic(B, hbar, Psi, Phi, grid, omega);
  Sampled z = compose_zero(B.model(), Phi, Psi, grid, omega);
  return l1((p + q) * 0.5 - z);
}

double dirac_defect(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi, const GridSpec& grid,
                    const OmegaGrid& omega) {
  Sampled p = compose_magnetic(B, hbar, Phi, Psi, grid, omega);
  Sampled q = compose_magnetic(B, hbar, Psi, Phi, grid, omega);
  Sampled br = poisson_X(B, Phi, Psi, grid, omega);
  return l1((p - q) * cplx(0, 1.0 / hbar) - br);
}

std::vector<double> AuditSweep::hbars() const {
  std::vector<double> h;
  for (const auto& p : points) h.push_back(p.hbar);
  return h;
}

std::vector<std::size_t> discontinuity_flags(const std::vector<double>& values) {
  std::vector<std::size_t> flags;
  const std::size_t m = values.size();
  if (m < 3) return flags;
  double scale = 0;
  for (double v : values) scale = std::max(scale, std::fabs(v));
  const double floor = 1e-9 * scale;
  for (std::size_t i = 1; i < m; ++i) {
    const double jump = std::fabs(values[i] - values[i - 1]);
    double trend = 0;
    int count = 0;
    if (i >= 2) {
      trend += std::fabs(values[i - 1] - values[i - 2]);
      ++count;
    }
    if (i + 1 < m) {
      trend += std::fabs(values[i + 1] - values[i]);
      ++count;
    }
    trend /= count;
    if (jump > 3.0 * trend + floor) flags.push_back(i);
  }
  return flags;
}

AuditSweep rieffel_scan(const MagneticField& B, const Symbol& Phi, const std::vector<double>& hbars,
                        const std::vector<HullPoint>& omegas, const GridSpec& grid) {
  AuditSweep sweep;
  std::vector<double> lower;
  for (double h : hbars) {
    NormEstimate est = norm_estimate(B, h, Phi, omegas, grid);
    AuditPoint p;
    p.hbar = h;
    p.norm_lower = est.lower;
    p.norm_upper = est.upper;
    sweep.points.push_back(p);
    lower.push_back(est.lower);
  }
  sweep.discontinuities = discontinuity_flags(lower);
  return sweep;
}

AuditSweep axiom_sweep(const MagneticField& B, const Symbol& Phi, const Symbol& Psi, const std::vector<double>& hbars,
                       const GridSpec& grid, const OmegaGrid& omega, bool both_realizations) {
  AuditSweep sweep;
  const HullModel& model = B.model();
  Sampled bracket = poisson_X(B, Phi, Psi, grid, omega);
  const bool xi = both_realizations && Phi.is_atoms() && Psi.is_atoms();
  Symbol f, g;
  GridSpec xigrid, fine;
  Sampled fg, bracket_xi, bracket_fine;
  if (xi) {
    f = Symbol(fourier_atoms(Phi.atoms(), +1), Realization::XStar);
    g = Symbol(fourier_atoms(Psi.atoms(), +1), Realization::XStar);
    // The dual of the audit grid reaches only |xi| ~ pi N / (2 L); both realizations are
    // compared on a grid refined twice so the xi box holds the transformed atoms.
    fine = GridSpec(grid.L, 2 * grid.N, grid.n);
    xigrid = fine.dual();
    xigrid.tag = Realization::XStar;
    bracket_fine = poisson_X(B, Phi, Psi, fine, omega);
    fg = pointwise(sample(model, f, xigrid, omega), sample(model, g, xigrid, omega));
    bracket_xi = sample(model, Symbol(poisson_Xi(B, f.atoms(), g.atoms()), Realization::XStar), xigrid, omega);
  }
  for (double h : hbars) {
    ExpansionReport e = expansion_remainder(B, h, Phi, Psi, grid, omega);
    Sampled q = compose_magnetic(B, h, Psi, Phi, grid, omega);
    AuditPoint p;
    p.hbar = h;
    p.first_order_norm = e.first_order_norm;
    p.second_order_norm = e.second_order_norm;
    p.remainder_norm = e.remainder_norm;
    p.tolerance = e.tolerance;
    p.reliable = e.reliable;
    p.product_norm = e.product_norm;
    p.vn_defect = l1((e.product + q) * 0.5 - e.leading);
    p.dirac_defect = l1((e.product - q) * cplx(0, 1.0 / h) - bracket);
    if (xi) {
      Sampled fsg = moyal_magnetic(B, h, f, g, xigrid, omega);
      Sampled gsf = moyal_magnetic(B, h, g, f, xigrid, omega);
      Sampled a = compose_magnetic(B, h, Phi, Psi, fine, omega);
      Sampled b = compose_magnetic(B, h, Psi, Phi, fine, omega);
      Sampled z = compose_zero(model, Phi, Psi, fine, omega);
      p.vn_defect_fine = l1((a + b) * 0.5 - z);
      p.dirac_defect_fine = l1((a - b) * cplx(0, 1.0 / h) - bracket_fine);
      p.vn_defect_xi = l1_transported((fsg + gsf) * 0.5 - fg);
      p.dirac_defect_xi = l1_transported((fsg - gsf) * cplx(0, 1.0 / h) - bracket_xi);
    }
    sweep.points.push_back(p);
    sweep.products.push_back(std::move(e.product));
  }
  auto column = [&](double AuditPoint::*field) {
    std::vector<double> v;
    for (const auto& p : sweep.points) v.push_back(p.*field);
    return v;
  };
  const auto hs = sweep.hbars();
  auto fit = [&](double AuditPoint::*field) {
    auto v = column(field);
    if (std::count_if(v.begin(), v.end(), [](double x) { return x > 0.0; }) < 3) return SlopeFit{};
    return slope_fit(v, hs);
  };
  if (hs.size() >= 3) {
    sweep.vn_slope = fit(&AuditPoint::vn_defect);
    sweep.dirac_slope = fit(&AuditPoint::dirac_defect);
    sweep.first_order_slope = fit(&AuditPoint::first_order_norm);
    sweep.second_order_slope = fit(&AuditPoint::second_order_norm);
  }
  return sweep;
}

bool AuditReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
}

std::string AuditReport::csv() const {
  std::ostringstream out;
  out << "name,hbar,defect,tolerance,pass\n";
  for (const auto& c : checks)
    out << c.name << ',' << format_real(c.hbar) << ',' << format_real(c.defect) << ',' << format_real(c.tolerance)
        << ',' << (c.pass ? 1 : 0) << '\n';
  return out.str();
}

AuditReport audit_report(const RunConfig& config) {
  if (config.pair.size() != 2) throw InputError("audit needs two symbols");
  const MagneticField& B = config.field;
  const HullModel& model = B.model();
  const Symbol& Phi = config.first();
  const Symbol& Psi = config.second();
  const GridSpec grid = config.space_grid();
  const OmegaGrid omega = config.omega();
  const auto& hbars = config.hbar_list;
  AuditReport rep;
  auto add = [&](AuditCheck c) { rep.checks.push_back(std::move(c)); };

  FieldValidation fv = validate_field(B);
  add({"field_closed", kNaN, fv.closedness_defect, 1e-12, fv.closed && fv.closedness_defect <= 1e-12});

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  auto random_vec = [&]() {
    Vec v(model.n);
    for (auto& c : v) c = coord(rng);
    return v;
  };
  OmegaGrid coarse = OmegaGrid::uniform(model.d, 8);
  for (double h : hbars) {
    double cocycle_worst = 0, norm_worst = 0;
    for (int t = 0; t < 20; ++t) {
      Vec x = random_vec(), y = random_vec(), z = random_vec();
      cocycle_worst = std::max(cocycle_worst, cocycle_identity_defect(B, h, x, y, z, coarse).defect);
      norm_worst = std::max(norm_worst, normalization_defect(B, h, x, coarse).defect);
    }
    add({"cocycle_identity", h, cocycle_worst, 1e-9, cocycle_worst <= 1e-9});
    add({"cocycle_normalization", h, norm_worst, 1e-12, norm_worst <= 1e-12});
  }

  if (Phi.is_atoms() && Psi.is_atoms()) {
    // The third entry must not be a function of the first two in xi, or the cyclic sum
    // vanishes identically; the transform of the x-space product is not.
    AtomSum f = fourier_atoms(Phi.atoms(), +1), g = fourier_atoms(Psi.atoms(), +1);
    AtomSum k = fourier_atoms(Phi.atoms() * Psi.atoms(), +1);
    std::vector<Vec> xis;
    for (int k = 0; k < 5; ++k) {
      Vec v(model.n);
      for (auto& c : v) c = coord(rng) * 0.5;
      xis.push_back(v);
    }
    double jd = jacobi_defect(B, f, g, k, omega_samples(omega, 8), xis);
    add({"jacobi", kNaN, jd, 1e-6, jd <= 1e-6});
  }

  AuditSweep sweep = axiom_sweep(B, Phi, Psi, hbars, grid, omega);

  // Boundedness of the product seminorms along the sweep, orders up to two in each weight.
  {
    const auto as = indices_up_to(model.n, 2), bs = indices_up_to(model.d, 2);
    std::vector<std::vector<double>> table;
    for (const auto& product : sweep.products) {
      Symbol prod(product);
      std::vector<double> row;
      for (const auto& a : as)
        for (const auto& al : as)
          for (const auto& be : bs) row.push_back(seminorm(model, prod, a, al, be, grid, omega));
      table.push_back(row);
    }
    double worst = 0;
    bool finite = true;
    for (std::size_t k = 0; k < table[0].size(); ++k) {
      double ref = table[0][k], hi = 0;
      for (const auto& row : table) {
        finite = finite && std::isfinite(row[k]);
        hi = std::max(hi, row[k]);
      }
      if (ref > 0) worst = std::max(worst, hi / ref);
    }
    add({"seminorm_stability", kNaN, worst, 10.0, finite && worst <= 10.0});
  }

  std::vector<double> first, second, rem, vn, dirac;
  double floor = 0, scale = 0;
  for (const auto& p : sweep.points) {
    first.push_back(p.first_order_norm);
    second.push_back(p.second_order_norm);
    rem.push_back(p.remainder_norm);
    vn.push_back(p.vn_defect);
    dirac.push_back(p.dirac_defect);
    floor = std::max(floor, 10.0 * p.tolerance);
  }
  for (const auto& p : sweep.points) scale = std::max(scale, p.product_norm);
  floor = std::max(floor, 1e-10 * scale);
  for (const auto& p : sweep.points) {
    add({"expansion_first_order", p.hbar, p.first_order_norm, p.tolerance, true});
    add({"expansion_remainder", p.hbar, p.remainder_norm, p.tolerance, true});
    add({"von_neumann", p.hbar, p.vn_defect, floor, true});
    add({"dirac", p.hbar, p.dirac_defect, floor, true});
  }
  if (hbars.size() >= 3) {
    add(slope_check("expansion_first_order_slope", first, hbars, 1.0, 0.15, floor));
    add(slope_check("expansion_second_order_slope", second, hbars, 2.0, 0.2, floor));
    add(slope_check("von_neumann_slope", vn, hbars, 2.0, 0.2, floor));
    add(slope_check("dirac_slope", dirac, hbars, 1.0, 0.2, floor));
    double rmax = *std::max_element(rem.begin(), rem.end()), rmin = *std::min_element(rem.begin(), rem.end());
    if (rmax <= floor) {
      add({"expansion_remainder_uniform", kNaN, rmax, floor, true});
    } else {
      double ratio = rmin > 0 ? rmax / rmin : std::numeric_limits<double>::infinity();
      add({"expansion_remainder_uniform", kNaN, ratio, 2.0, ratio <= 2.0});
    }
  }
  add(monotone_check("von_neumann_monotone", vn, floor));
  add(monotone_check("dirac_monotone", dirac, floor));

  const bool xi = Phi.is_atoms() && Psi.is_atoms();
  if (xi) {
    for (const auto& p : sweep.points) {
      double tv = 1e-4 * p.vn_defect_fine + 1e-6 * p.product_norm;
      double td = 1e-4 * p.dirac_defect_fine + 1e-6 * p.product_norm;
      double dv = std::fabs(p.vn_defect_fine - p.vn_defect_xi), dd = std::fabs(p.dirac_defect_fine - p.dirac_defect_xi);
      add({"realization_von_neumann", p.hbar, dv, tv, dv <= tv});
      add({"realization_dirac", p.hbar, dd, td, dd <= td});
    }
  }

  AuditSweep scan = rieffel_scan(B, Phi, hbars, omega_samples(omega, 8), grid);
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    sweep.points[i].norm_lower = scan.points[i].norm_lower;
    sweep.points[i].norm_upper = scan.points[i].norm_upper;
    double over = std::max(0.0, scan.points[i].norm_lower - scan.points[i].norm_upper);
    add({"norm_sandwich", hbars[i], over, 0.0, over <= 0.0});
  }
  sweep.discontinuities = scan.discontinuities;
  add({"rieffel_continuity", kNaN, static_cast<double>(scan.discontinuities.size()), 0.0, scan.discontinuities.empty()});
  sweep.products.clear();
  rep.sweep = sweep;

  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"hbar", nan_to_null(c.hbar)},
                      {"defect", nan_to_null(c.defect)},
                      {"tolerance", nan_to_null(c.tolerance)},
                      {"pass", c.pass}});
  json points = json::array();
  for (const auto& p : sweep.points)
    points.push_back({{"hbar", p.hbar},
                      {"norm_lower", p.norm_lower},
                      {"norm_upper", p.norm_upper},
                      {"vn_defect", p.vn_defect},
                      {"dirac_defect", p.dirac_defect},
                      {"vn_defect_xi", p.vn_defect_xi},
                      {"dirac_defect_xi", p.dirac_defect_xi},
                      {"vn_defect_fine", p.vn_defect_fine},
                      {"dirac_defect_fine", p.dirac_defect_fine},
                      {"first_order_norm", p.first_order_norm},
                      {"second_order_norm", p.second_order_norm},
                      {"remainder_norm", p.remainder_norm},
                      {"tolerance", p.tolerance},
                      {"reliable", p.reliable}});
  auto slope_json = [](const SlopeFit& s) {
    return json{{"slope", s.slope}, {"residual", s.residual}, {"used", s.used}, {"dropped", s.dropped}};
  };
  rep.document = {{"config_hash", hash_hex(config_hash(config))},
                  {"pass", rep.pass()},
                  {"checks", checks},
                  {"sweep", points},
                  {"slopes",
                   {{"von_neumann", slope_json(sweep.vn_slope)},
                    {"dirac", slope_json(sweep.dirac_slope)},
                    {"first_order", slope_json(sweep.first_order_slope)},
                    {"second_order", slope_json(sweep.second_order_slope)}}},
                  {"rieffel_flags", sweep.discontinuities},
                  {"conventions",
                   {{"fourier", "forward partial transform int e^{+i x.xi}, inverse (2 pi)^{-n} int e^{-i x.xi}"},
                    {"norms", "L1 over X of the omega-grid maximum; X* defects are transported back to X and compared with X defects on the twice refined grid"},
                    {"grid", {{"L", grid.L}, {"N", grid.N}, {"n", grid.n}}},
                    {"omega_grid", omega.shape}}}};
  return rep;
}

}  // namespace magweyl
