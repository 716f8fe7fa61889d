#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace magweyl {

using cplx = std::complex<double>;
using Vec = std::vector<double>;
using Mode = std::vector<int>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double wrap_angle(double a);
double angular_distance(double a, double b);

// Linear flow on T^d: theta_x[omega] = omega + F x (mod 2 pi).
struct HullModel {
  int d = 0;
  int n = 0;
  Eigen::MatrixXd F;

  HullModel() = default;
  HullModel(int d, int n, Eigen::MatrixXd F);
  static HullModel identity(int dim);

  Vec wavevector(const Mode& m) const;  // F^T m
  double phase(const Mode& m, const Vec& x) const;  // m . F x
};

struct HullPoint {
  Vec angles;
  double distance(const HullPoint& other) const;
};

HullPoint act(const HullModel& model, const HullPoint& omega, const Vec& x);

// Finite Fourier series on T^d.
class HullFunction {
 public:
  HullFunction() = default;
  explicit HullFunction(int d) : d_(d) {}
  static HullFunction constant(int d, cplx c);
  static HullFunction cosine(int d, int axis, double amplitude = 1.0);
  static HullFunction sine(int d, int axis, double amplitude = 1.0);

  int dim() const { return d_; }
  const std::map<Mode, cplx>& modes() const { return modes_; }
  void add(const Mode& m, cplx c);
  cplx coefficient(const Mode& m) const;
  bool empty() const { return modes_.empty(); }

  cplx evaluate(const HullPoint& omega) const;
  double l1_coefficients() const;
  double max_mode() const;

  HullFunction operator+(const HullFunction& o) const;
  HullFunction operator-(const HullFunction& o) const;
  HullFunction operator*(const HullFunction& o) const;
  HullFunction operator*(cplx s) const;
  HullFunction conj() const;
  HullFunction truncate(int max_abs_mode) const;
  HullFunction pruned(double tol = 0.0) const;

 private:
  int d_ = 0;
  std::map<Mode, cplx> modes_;
};

HullFunction translate(const HullModel& model, const HullFunction& phi, const Vec& x);
HullFunction derive(const HullModel& model, const HullFunction& phi, const std::vector<int>& alpha);
std::vector<cplx> orbit_function(const HullModel& model, const HullFunction& phi,
                                 const HullPoint& omega, const std::vector<Vec>& xs);

// Uniform product grid on T^d containing omega = 0.
struct OmegaGrid {
  std::vector<int> shape;

  OmegaGrid() = default;
  explicit OmegaGrid(std::vector<int> s) : shape(std::move(s)) {}
  static OmegaGrid uniform(int d, int per_axis);
  int dim() const { return static_cast<int>(shape.size()); }
  std::size_t size() const;
  HullPoint point(std::size_t index) const;
  std::vector<int> multi_index(std::size_t index) const;
  // Signed Fourier mode carried by DFT index.
  Mode mode_of(std::size_t index) const;
};

struct SeminormBracket {
  double lower = 0.0;  // grid maximum
  double upper = 0.0;  // coefficient l1 sum
};

SeminormBracket seminorm_salpha(const HullModel& model, const HullFunction& phi,
                                const std::vector<int>& alpha, const OmegaGrid& grid);

struct StabilizerReport {
  bool free = true;
  int continuous_dim = 0;
  std::vector<Vec> generators;
  long bound = 0;
  std::string status;
};

StabilizerReport stabilizer_report(const HullModel& model, long denominator_bound = 1000);

}  // namespace magweyl
