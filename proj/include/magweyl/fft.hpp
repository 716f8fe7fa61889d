#pragma once

#include <complex>
#include <vector>

namespace magweyl {

// Batched multi-dimensional FFT (FFTW). sign = -1 computes sum e^{-2 pi i jk/N}, +1 the
// unnormalized inverse. Element (batch b, multi-index j) sits at data[b * dist + flat(j) * stride].
void fft_many(std::complex<double>* data, const std::vector<int>& shape, int howmany, int stride, int dist,
              int sign);

}  // namespace magweyl
