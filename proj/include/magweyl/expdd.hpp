#pragma once

#include <complex>

namespace magweyl {

// Divided difference exp[z_0, ..., z_{count-1}] of the exponential. Equals the
// integral of exp(sum lambda_i z_i) over the standard simplex (Hermite-Genocchi).
std::complex<double> exp_divided_difference(const std::complex<double>* z, int count);

inline std::complex<double> expdd(std::complex<double> a) { return std::exp(a); }
std::complex<double> expdd(std::complex<double> a, std::complex<double> b);
std::complex<double> expdd(std::complex<double> a, std::complex<double> b, std::complex<double> c);

}  // namespace magweyl
