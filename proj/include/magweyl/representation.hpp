#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "magweyl/algebra.hpp"

namespace magweyl {

// Operator on L^2 discretized on grid; entries already carry the quadrature weight h^n.
struct KernelMatrix {
  GridSpec grid;
  Eigen::MatrixXcd M;
  double hbar = 1.0;
  HullPoint omega;
  double tolerance = 0.0;
  std::vector<std::string> warnings;
};

// M[x,y] = hbar^{-n} Phi(theta_{(x+y)/2}[omega]; (y-x)/hbar) e^{-(i/hbar) Gamma<0,x,y>} h^n.
KernelMatrix rep_matrix(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& Phi,
                        const GridSpec& grid);
// Op via the inverse partial Fourier transform of f followed by rep_matrix.
KernelMatrix op_matrix(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& f,
                       const GridSpec& grid);
// Op by direct xi quadrature of the oscillatory kernel (2 pi hbar)^{-n} int e^{(i/hbar)(x-y).xi} f(..; xi) d xi.
KernelMatrix op_matrix_direct(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& f,
                              const GridSpec& grid);

// Largest singular value by Lanczos iteration on M^* M.
double spectral_norm(const Eigen::MatrixXcd& M, double rel_tol = 1e-13, int max_iter = 400);
// Flat indices of the innermost 75% per axis.
std::vector<std::size_t> interior_indices(const GridSpec& grid);
Eigen::MatrixXcd interior_block(const Eigen::MatrixXcd& M, const GridSpec& grid);

// [T(y)u](x) = e^{-(i/hbar) Gamma<0, x, x + hbar y>} u(x + hbar y), zero outside the grid.
Eigen::MatrixXcd translation_matrix(const MagneticField& B, double hbar, const HullPoint& omega, const Vec& y,
                                    const GridSpec& grid);
// [r(phi)u](x) = phi(theta_x[omega]) u(x).
Eigen::MatrixXcd multiplication_matrix(const HullModel& model, const HullFunction& phi, const HullPoint& omega,
                                       const GridSpec& grid);

struct CovarianceReport {
  double product_defect = 0.0;      // T(x)T(y) - r[kappa(x,y)]T(x+y)
  double conjugation_defect = 0.0;  // T(x)r(phi)T(x)^* - r[theta_x(phi)]
  std::size_t samples = 0;
  bool pass(double tol = 1e-9) const { return product_defect <= tol && conjugation_defect <= tol; }
};

// Random lattice shifts small enough to keep the interior block away from zero fill.
CovarianceReport covariance_check(const MagneticField& B, double hbar, const HullPoint& omega, const GridSpec& grid,
                                  std::size_t samples, unsigned seed = 1);

// Relative interior spectral-norm defect of Rep(Phi o Psi) against Rep(Phi) Rep(Psi).
double morphism_defect(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& Phi,
                       const Symbol& Psi, const GridSpec& grid);

// (U u)(x) = e^{-(i/hbar) Gamma^{B_{omega'}}<0, x0, x0 + x>} u(x + x0); x0 must be a lattice vector.
KernelMatrix intertwiner(const MagneticField& B, double hbar, const HullPoint& omega_prime, const Vec& x0,
                         const GridSpec& grid);
// Relative interior defect of H_{theta_x[omega]} against U^{-1} H_omega U with H = op_matrix.
double equivariance_defect(const MagneticField& B, double hbar, const HullPoint& omega, const Vec& x,
                           const Symbol& f, const GridSpec& grid);

// Conjugation by e^{(i/hbar) chi} against line-integral phases of A + d chi, A the transverse gauge.
double gauge_covariance_defect(const MagneticField& B, double hbar, const HullPoint& omega, const Symbol& f,
                               const GridSpec& grid, const std::function<double(const Vec&)>& chi,
                               const std::function<Vec(const Vec&)>& grad_chi);

struct NormEstimate {
  double lower = 0.0;  // max over omega samples of the spectral norm of the regular representation slices
  double upper = 0.0;  // coefficient l1 norm
  std::vector<double> per_omega;
};

// The kernel is assembled on grid scaled by hbar, so (y - x)/hbar stays on the lattice of grid.
NormEstimate norm_estimate(const MagneticField& B, double hbar, const Symbol& Phi,
                           const std::vector<HullPoint>& omegas, const GridSpec& grid);

}  // namespace magweyl
