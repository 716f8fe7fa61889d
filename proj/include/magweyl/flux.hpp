#pragma once

#include <array>
#include <string>
#include <vector>

#include "magweyl/hull.hpp"

namespace magweyl {

// Antisymmetric matrix of hull functions B^{jk}.
class MagneticField {
 public:
  struct Component {
    int j = 0;
    int k = 0;
    HullFunction value;
  };
  // Per-mode view: coefficient matrix C (n x n, antisymmetric) and wavevector F^T m.
  struct ModeTerm {
    Mode m;
    Vec k;
    Eigen::MatrixXcd C;
  };

  MagneticField() = default;
  MagneticField(HullModel model, const std::vector<Component>& upper);
  static MagneticField zero(const HullModel& model);
  static MagneticField constant(const HullModel& model, int j, int k, double b);

  const HullModel& model() const { return model_; }
  int n() const { return model_.n; }
  const HullFunction& operator()(int j, int k) const { return comp_[j * model_.n + k]; }
  const std::vector<ModeTerm>& mode_terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Eigen::MatrixXd evaluate(const HullPoint& omega) const;
  std::vector<Component> upper_components() const;

 private:
  HullModel model_;
  std::vector<HullFunction> comp_;
  std::vector<ModeTerm> terms_;
};

struct FieldValidation {
  bool antisymmetric = true;
  bool real = true;
  bool closed = true;
  double closedness_defect = 0.0;
  std::string message;
};

FieldValidation validate_field(const MagneticField& B);

// Flux of B_omega through the oriented triangle <a,b,c>, as a function of omega.
HullFunction triangle_flux(const MagneticField& B, const Vec& a, const Vec& b, const Vec& c);
// Second route: flux through <0, b-a, c-a> translated along the orbit by a.
HullFunction triangle_flux_translated(const MagneticField& B, const Vec& a, const Vec& b, const Vec& c);
double triangle_flux_oracle(const MagneticField& B, const HullPoint& omega, const Vec& a, const Vec& b,
                            const Vec& c, double rel_tol = 1e-12);

// Coefficients of Gamma<0, x, y> in the order of B.mode_terms(); no allocation.
void flux_origin_coefficients(const MagneticField& B, const double* x, const double* y, cplx* out);

// Lambda_hbar(x,y) and its first two derivatives in hbar, per mode in closed form.
HullFunction scaled_flux(const MagneticField& B, double hbar, const Vec& x, const Vec& y, int order = 0);
// Coefficients of Lambda_hbar(x,y) in the order of B.mode_terms(); no allocation.
void scaled_flux_coefficients(const MagneticField& B, double hbar, const double* x, const double* y, cplx* out);
// hbar Lambda_hbar = hbar^{-1} Gamma<-hbar x/2, hbar y - hbar x/2, hbar x/2>.
HullFunction scaled_flux_via_triangle(const MagneticField& B, double hbar, const Vec& x, const Vec& y);
double scaled_flux_oracle(const MagneticField& B, const HullPoint& omega, double hbar, const Vec& x,
                          const Vec& y, double rel_tol = 1e-12);

cplx cocycle(const MagneticField& B, double hbar, const HullPoint& omega, const Vec& x, const Vec& y);
std::vector<cplx> cocycle_on_grid(const MagneticField& B, double hbar, const OmegaGrid& grid, const Vec& x,
                                  const Vec& y);

struct DefectReport {
  double defect = 0.0;
  double tolerance = 0.0;
  std::string grid;
  double hbar = 0.0;
  HullPoint omega;
  bool pass() const { return defect <= tolerance; }
};

DefectReport cocycle_identity_defect(const MagneticField& B, double hbar, const Vec& x, const Vec& y,
                                     const Vec& z, const OmegaGrid& grid, double tolerance = 1e-9);
DefectReport normalization_defect(const MagneticField& B, double hbar, const Vec& x, const OmegaGrid& grid,
                                  double tolerance = 1e-12);
double translation_identity_defect(const MagneticField& B, const Vec& x, const Vec& y, const Vec& z,
                                   const HullPoint& omega);

Vec vector_potential_transverse(const MagneticField& B, const HullPoint& omega, const Vec& x);
double stokes_defect(const MagneticField& B, const HullPoint& omega, const Vec& a, const Vec& b, const Vec& c);
// Line integral of A_omega along the straight segment from p to q.
double circulation(const MagneticField& B, const HullPoint& omega, const Vec& p, const Vec& q);

struct Lemma3Sample {
  Vec x;
  Vec y;
  double hbar = 1.0;
  double tau = 1.0;
};

struct Lemma3Violation {
  std::string inequality;
  Lemma3Sample sample;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct Lemma3Report {
  std::size_t samples = 0;
  std::size_t checks = 0;
  std::vector<Lemma3Violation> violations;
  // Fitted domination constants for the existence statements, keyed by "(i) a=.. alpha=..".
  std::vector<std::pair<std::string, double>> fitted;
  std::size_t existence_checks = 0;
  std::size_t existence_violations = 0;
  bool pass() const { return violations.empty() && existence_violations == 0; }
};

Lemma3Report lemma3_check(const MagneticField& B, const std::vector<Lemma3Sample>& samples,
                          bool check_existence = false, unsigned seed = 7);

}  // namespace magweyl
