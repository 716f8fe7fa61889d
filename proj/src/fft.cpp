#include "magweyl/fft.hpp"

#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace magweyl {

namespace {
std::mutex planner_mutex;
}

void fft_many(std::complex<double>* data, const std::vector<int>& shape, int howmany, int stride, int dist,
              int sign) {
  if (shape.empty() || howmany <= 0) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_many_dft(static_cast<int>(shape.size()), shape.data(), howmany, buf, nullptr, stride, dist, buf,
                              nullptr, stride, dist, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("FFTW planning failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex);
  fftw_destroy_plan(plan);
}

}  // namespace magweyl
