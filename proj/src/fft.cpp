#include "ghostbeam/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

#include "ghostbeam/constants.hpp"

namespace ghostbeam {

namespace {

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, fftw_plan> g_plans;

// Plans are created with FFTW_UNALIGNED so they can be executed on any buffer
// via fftw_execute_dft (plan creation is not thread safe; execution is).
fftw_plan plan_for(int n, int sign) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  std::vector<std::complex<double>> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  g_plans.emplace(key, p);
  return p;
}

}  // namespace

void fft_inplace(std::complex<double>* data, int n, int sign) {
  if (n <= 0) throw std::invalid_argument("fft: empty transform");
  if (sign != -1 && sign != 1) throw std::invalid_argument("fft: sign must be -1 or +1");
  fftw_plan p = plan_for(n, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, buf, buf);
  if (sign > 0) {
    double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) data[i] *= inv;
  }
}

double fft_wavenumber(int j, int n, double d) {
  int k = (j <= n / 2) ? j : j - n;
  return 2.0 * kPi * k / (n * d);
}

int next_fast_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

}  // namespace ghostbeam
