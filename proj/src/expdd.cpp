#include "magweyl/expdd.hpp"

#include <cmath>
#include <stdexcept>

namespace magweyl {

namespace {

using cplx = std::complex<double>;

constexpr int kMaxNodes = 8;
constexpr int kTaylorTerms = 26;
constexpr double kSpreadThreshold = 1.0;

cplx taylor(const cplx* z, int count) {
  cplx c = 0;
  for (int i = 0; i < count; ++i) c += z[i];
  c /= static_cast<double>(count);
  cplx h[kTaylorTerms + 1];
  h[0] = 1.0;
  for (int k = 1; k <= kTaylorTerms; ++k) h[k] = 0.0;
  for (int i = 0; i < count; ++i) {
    cplx w = z[i] - c;
    for (int k = 1; k <= kTaylorTerms; ++k) h[k] += w * h[k - 1];
  }
  const int m = count - 1;
  double fact = 1.0;
  for (int j = 2; j <= m; ++j) fact *= j;
  cplx sum = 0;
  for (int k = 0; k <= kTaylorTerms; ++k) {
    if (k > 0) fact *= (k + m);
    sum += h[k] / fact;
  }
  return std::exp(c) * sum;
}

}  // namespace

cplx exp_divided_difference(const cplx* z, int count) {
  if (count < 1 || count > kMaxNodes) throw std::invalid_argument("exp divided difference: bad node count");
  if (count == 1) return std::exp(z[0]);
  double spread = 0.0;
  int ia = 0, ib = 0;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      double s = std::abs(z[i] - z[j]);
      if (s > spread) {
        spread = s;
        ia = i;
        ib = j;
      }
    }
  if (spread < kSpreadThreshold) return taylor(z, count);
  cplx without_a[kMaxNodes], without_b[kMaxNodes];
  int pa = 0, pb = 0;
  for (int i = 0; i < count; ++i) {
    if (i != ia) without_a[pa++] = z[i];
    if (i != ib) without_b[pb++] = z[i];
  }
  return (exp_divided_difference(without_a, count - 1) - exp_divided_difference(without_b, count - 1)) /
         (z[ib] - z[ia]);
}

cplx expdd(cplx a, cplx b) {
  cplx z[2] = {a, b};
  return exp_divided_difference(z, 2);
}

cplx expdd(cplx a, cplx b, cplx c) {
  cplx z[3] = {a, b, c};
  return exp_divided_difference(z, 3);
}

}  // namespace magweyl
