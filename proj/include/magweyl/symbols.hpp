#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "magweyl/hull.hpp"

namespace magweyl {

enum class Realization { X, XStar };

// Uniform box [-L, L)^n with N points per axis, x_i = -L + i h.
struct GridSpec {
  double L = 8.0;
  int N = 32;
  int n = 2;
  Realization tag = Realization::X;

  GridSpec() = default;
  GridSpec(double L_, int N_, int n_, Realization t = Realization::X);
  double h() const { return 2.0 * L / N; }
  double weight() const;
  std::size_t size() const;
  double coord(int i) const { return -L + i * h(); }
  std::vector<int> multi_index(std::size_t flat) const;
  Vec point(std::size_t flat) const;
  // Grid conjugate under the discrete Fourier transform (same N, spacing pi / L).
  GridSpec dual() const;
  GridSpec scaled(double s) const { return GridSpec(L * s, N, n, tag); }
  bool same_as(const GridSpec& o) const;
};

using MultiIndex = std::vector<int>;

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {}
  static Polynomial one(int n, cplx c = 1.0);

  int dim() const { return n_; }
  const std::map<MultiIndex, cplx>& terms() const { return c_; }
  void add(const MultiIndex& a, cplx c);
  cplx evaluate(const Vec& u) const;
  int degree() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(cplx s) const;
  Polynomial derivative(int j) const;
  Polynomial times_coordinate(int j) const;  // u_j p(u)
  Polynomial shifted(const Vec& s) const;    // q(u) = p(u + s)
  Polynomial reflected_conj() const;         // q(u) = conj(p(-u))

 private:
  int n_ = 0;
  std::map<MultiIndex, cplx> c_;
};

// phi(omega) p(x - x0) exp(-gamma |x - x0|^2) exp(i x . xi0)
struct Atom {
  HullFunction hull;
  Polynomial poly;
  double gamma = 0.5;
  Vec center;
  Vec momentum;

  cplx envelope(const Vec& x) const;
  double sigma() const;
};

struct AtomSum {
  int n = 0;
  int d = 0;
  std::vector<Atom> atoms;

  AtomSum() = default;
  AtomSum(int n_, int d_) : n(n_), d(d_) {}
  static AtomSum gaussian(int n, const HullFunction& hull, double gamma, const Vec& center, const Vec& momentum);

  cplx evaluate(const HullPoint& omega, const Vec& x) const;
  AtomSum operator+(const AtomSum& o) const;
  AtomSum operator*(cplx s) const;
  AtomSum operator*(const AtomSum& o) const;  // pointwise product
  AtomSum times_hull(const HullFunction& f) const;
  AtomSum derivative(int j) const;
  AtomSum times_coordinate(int j) const;
  AtomSum hull_derivative(const HullModel& model, const std::vector<int>& beta) const;
  double max_extent() const;  // max over atoms of |x0|_inf + 8 sigma
};

struct Provenance {
  double tolerance = 0.0;
  std::vector<std::string> warnings;
};

// Values on an omega grid times a space grid, stored [omega][x].
struct Sampled {
  GridSpec grid;
  OmegaGrid omega;
  std::vector<cplx> values;
  Provenance prov;

  Sampled() = default;
  Sampled(GridSpec g, OmegaGrid w);
  cplx& at(std::size_t w, std::size_t x) { return values[w * grid.size() + x]; }
  cplx at(std::size_t w, std::size_t x) const { return values[w * grid.size() + x]; }
  // Fourier coefficients in omega, [mode index of omega grid][x].
  std::vector<cplx> mode_coefficients() const;
  Sampled operator+(const Sampled& o) const;
  Sampled operator-(const Sampled& o) const;
  Sampled operator*(cplx s) const;
};

class Symbol {
 public:
  Symbol() = default;
  Symbol(AtomSum a, Realization tag = Realization::X) : tag_(tag), backing_(std::move(a)) {}
  Symbol(Sampled s) : tag_(s.grid.tag), backing_(std::move(s)) {}

  Realization realization() const { return tag_; }
  bool is_atoms() const { return std::holds_alternative<AtomSum>(backing_); }
  const AtomSum& atoms() const { return std::get<AtomSum>(backing_); }
  const Sampled& sampled() const { return std::get<Sampled>(backing_); }
  int n() const;
  int d() const;

 private:
  Realization tag_ = Realization::X;
  std::variant<AtomSum, Sampled> backing_;
};

GridSpec default_grid(const AtomSum& a, Realization tag = Realization::X);

cplx evaluate(const HullModel& model, const Symbol& s, const HullPoint& omega, const Vec& x);
Sampled sample(const HullModel& model, const Symbol& s, const GridSpec& grid, const OmegaGrid& omega);

// Exact transform of every atom: sign +1 gives int e^{+i x.xi} g(x) dx, sign -1 gives
// (2 pi)^{-n} int e^{-i x.xi} g(xi) d xi.
AtomSum fourier_atoms(const AtomSum& a, int sign);
// Discrete partial Fourier transform; forward for X-tagged input, inverse for X*-tagged input.
Sampled partial_fourier(const Sampled& s);
Symbol partial_fourier(const HullModel& model, const Symbol& s, const GridSpec& grid, const OmegaGrid& omega);

// Q^a partial^alpha delta^beta, exact on atoms, finite differences on sampled data.
Symbol apply_weights(const HullModel& model, const Symbol& s, const MultiIndex& a, const MultiIndex& alpha,
                     const MultiIndex& beta);
double seminorm(const HullModel& model, const Symbol& s, const MultiIndex& a, const MultiIndex& alpha,
                const MultiIndex& beta, const GridSpec& grid, const OmegaGrid& omega);
Symbol involution(const Symbol& s);

// Sampled translation along the hull: values of s(theta_z[omega]; x) on the same grids.
Sampled translate_sampled(const HullModel& model, const Sampled& s, const Vec& z);

}  // namespace magweyl
