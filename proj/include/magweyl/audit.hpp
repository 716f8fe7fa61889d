#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "magweyl/io.hpp"
#include "magweyl/representation.hpp"

namespace magweyl {

struct SlopeFit {
  double slope = 0.0;
  double residual = 0.0;  // root mean square of the log-log residuals
  std::size_t used = 0;
  std::vector<std::size_t> dropped;  // indices of non-positive values
};

// Least-squares slope of log(value) against log(hbar).
SlopeFit slope_fit(const std::vector<double>& values, const std::vector<double>& hbars);

// |(Phi o Psi + Psi o Phi)/2 - Phi o0 Psi|_1
double von_neumann_defect(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi,
                          const GridSpec& grid, const OmegaGrid& omega);
// |(i/hbar)(Phi o Psi - Psi o Phi) - {Phi, Psi}^B|_1
double dirac_defect(const MagneticField& B, double hbar, const Symbol& Phi, const Symbol& Psi, const GridSpec& grid,
                    const OmegaGrid& omega);

struct AuditPoint {
  double hbar = 0.0;
  double norm_lower = 0.0;
  double norm_upper = 0.0;
  double vn_defect = 0.0;
  double dirac_defect = 0.0;
  double first_order_norm = 0.0;
  double second_order_norm = 0.0;
  double remainder_norm = 0.0;
  double product_norm = 0.0;
  double tolerance = 0.0;
  bool reliable = true;
  // The same axioms in the X* realization, measured after transport back to X, and their
  // X counterparts on the refined grid used for that comparison.
  double vn_defect_xi = 0.0;
  double dirac_defect_xi = 0.0;
  double vn_defect_fine = 0.0;
  double dirac_defect_fine = 0.0;
};

struct AuditSweep {
  std::vector<AuditPoint> points;
  SlopeFit vn_slope, dirac_slope, first_order_slope, second_order_slope;
  std::vector<std::size_t> discontinuities;  // indices where the lower norm bound jumps
  std::vector<Sampled> products;             // Phi o Psi per hbar, kept for reuse within a report

  std::vector<double> hbars() const;
};

// Norm bracket per hbar; the continuity test is a heuristic and proves nothing.
AuditSweep rieffel_scan(const MagneticField& B, const Symbol& Phi, const std::vector<double>& hbars,
                        const std::vector<HullPoint>& omegas, const GridSpec& grid);
std::vector<std::size_t> discontinuity_flags(const std::vector<double>& values);

// Expansion, von Neumann and Dirac defects on one sweep, sharing the products.
AuditSweep axiom_sweep(const MagneticField& B, const Symbol& Phi, const Symbol& Psi, const std::vector<double>& hbars,
                       const GridSpec& grid, const OmegaGrid& omega, bool both_realizations = true);

struct AuditCheck {
  std::string name;
  double hbar = std::numeric_limits<double>::quiet_NaN();
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  AuditSweep sweep;
  json document;
  bool pass() const;
  std::string csv() const;
};

AuditReport audit_report(const RunConfig& config);

}  // namespace magweyl
