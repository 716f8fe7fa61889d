#pragma once

#include <vector>

#include "magweyl/flux.hpp"
#include "magweyl/symbols.hpp"

namespace magweyl {

// Mode expansion of a symbol on the integer lattice h Z^n: value(omega; p h) = sum_m c_m(p) e^{i m.omega}.
class LatticeModes {
 public:
  LatticeModes() = default;
  // Covers p in [lo, lo + count)^n. Sampled symbols must sit on the same spacing h.
  LatticeModes(const HullModel& model, const Symbol& s, double h, int lo, int count);

  int n() const { return n_; }
  double h() const { return h_; }
  const std::vector<Mode>& modes() const { return modes_; }
  std::size_t mode_count() const { return modes_.size(); }
  // Flat index of lattice point p, or npos when outside the stored range.
  std::size_t index(const int* p) const;
  const cplx* coefficients(std::size_t flat) const { return data_.data() + flat * modes_.size(); }
  double bound(std::size_t flat) const { return bound_[flat]; }
  double max_bound() const { return max_bound_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  int n_ = 0;
  double h_ = 0.0;
  int lo_ = 0;
  int count_ = 0;
  std::vector<Mode> modes_;
  std::vector<cplx> data_;  // [point][mode]
  std::vector<double> bound_;
  double max_bound_ = 0.0;
};

// Lattice quadrature of the magnetic product,
//   sum_u h^n Phi(theta_{hbar(u-z)/2} w; u) Psi(theta_{hbar u/2} w; z-u) e^{-i hbar Lambda_hbar(z,u)(w)},
// with u running over the box of `grid`. Output points z must lie on h Z^n unless Psi is an atom sum.
class MagneticProduct {
 public:
  struct Table {
    std::size_t count = 0;
    std::vector<cplx> phi, psi, field;  // e^{i m.w}, [mode][w]
  };

  MagneticProduct(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi, const GridSpec& grid);
  Table table(const std::vector<HullPoint>& points) const;
  void evaluate(const Vec& z, const Table& t, cplx* out) const;
  // Upper bound on the l1 quadrature error from truncating Phi at the box edge and from roundoff.
  double tolerance() const { return tolerance_; }

 private:
  MagneticField B_;
  double hbar_;
  GridSpec grid_;
  HullModel model_;
  Symbol psi_symbol_;
  LatticeModes phi_, psi_;
  std::vector<Vec> u_;
  std::vector<std::vector<int>> u_index_;
  std::vector<cplx> phi_pre_;    // Phi_m(u) e^{i hbar k_m.u/2}, [u][m]
  std::vector<cplx> psi_phase_;  // e^{i hbar k_m.u/2}, [u][m]
  std::vector<Vec> phi_k_, psi_k_;
  double threshold_ = 0.0;
  double tolerance_ = 0.0;
};

Sampled compose_zero(const HullModel& model, const Symbol& Phi, const Symbol& Psi, const GridSpec& grid,
                     const OmegaGrid& omega);
Sampled compose_magnetic(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi,
                         const GridSpec& grid, const OmegaGrid& omega);
// f #_hbar g by conjugating compose_magnetic with the partial Fourier transform; grid is the xi grid.
Sampled moyal_magnetic(const MagneticField& B, double hbar, const Symbol& f, const Symbol& g, const GridSpec& grid,
                       const OmegaGrid& omega);

// X-realization bracket i sum_j (Q_j Phi o0 delta_j Psi - delta_j Phi o0 Q_j Psi) + B^{jk} Q_j Phi o0 Q_k Psi.
Sampled poisson_X(const MagneticField& B, const Symbol& Phi, const Symbol& Psi, const GridSpec& grid,
                  const OmegaGrid& omega);
// X*-realization bracket, exact on atom sums.
AtomSum poisson_Xi(const MagneticField& B, const AtomSum& f, const AtomSum& g);
// Same bracket on sampled data: spectral delta, fourth-order differences in xi.
Sampled poisson_Xi(const MagneticField& B, const Symbol& f, const Symbol& g, const GridSpec& grid,
                   const OmegaGrid& omega);

struct L1Norm {
  double value = 0.0;  // h^n sum_x max over the omega grid
  double upper = 0.0;  // h^n sum_x sum of |omega-Fourier coefficients|
};
L1Norm l1_norm(const Sampled& s);
L1Norm l1_norm(const HullModel& model, const Symbol& s, const GridSpec& grid, const OmegaGrid& omega);

struct ExpansionReport {
  Sampled product;
  Sampled leading;     // Phi o0 Psi
  Sampled subleading;  // -(i/2){Phi, Psi}^B
  Sampled remainder;
  double product_norm = 0.0;
  double first_order_norm = 0.0;   // |product - leading|
  double second_order_norm = 0.0;  // |product - leading - hbar subleading|
  double leading_norm = 0.0;
  double subleading_norm = 0.0;
  double remainder_norm = 0.0;
  double reconstruction_defect = 0.0;
  double tolerance = 0.0;
  double hbar = 0.0;
  bool reliable = true;
};

ExpansionReport expansion_remainder(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi,
                                    const GridSpec& grid, const OmegaGrid& omega);

// Relative associativity defect |(Phi Psi) Xi - Phi (Psi Xi)|_1 / |Phi (Psi Xi)|_1 at hull point samples.
double associativity_defect(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi,
                            const Symbol& Xi, const GridSpec& grid, const OmegaGrid& omega);

// f_omega(x, xi) = f(theta_x[omega], xi) on the phase-space grid xs x xis, stored [x][xi].
struct PhaseSpaceSample {
  std::vector<Vec> xs;
  std::vector<Vec> xis;
  std::vector<cplx> values;
};
PhaseSpaceSample pi_omega(const HullModel& model, const AtomSum& f, const HullPoint& omega,
                          const std::vector<Vec>& xs, const std::vector<Vec>& xis);

// sup |pi_omega({f,g}_B) - {pi_omega f, pi_omega g}_{B_omega}|, with the x-derivatives of the
// orbit bracket taken by centered differences of step h.
double poisson_map_defect(const MagneticField& B, const AtomSum& f, const AtomSum& g, const HullPoint& omega,
                          const std::vector<Vec>& xs, const std::vector<Vec>& xis, double h);

// sup over points of |{f,{g,k}} + {g,{k,f}} + {k,{f,g}}|.
double jacobi_defect(const MagneticField& B, const AtomSum& f, const AtomSum& g, const AtomSum& k,
                     const std::vector<HullPoint>& omegas, const std::vector<Vec>& xis);

}  // namespace magweyl
