#pragma once

#include <complex>
#include <vector>

namespace ghostbeam {

// In-place complex FFT, FFTW backend. sign = -1 forward, +1 inverse.
// The inverse is scaled by 1/n so fft(ifft(x)) == x.
// Plans are cached per (n, sign) behind a mutex; execution on caller buffers
// is thread safe.
void fft_inplace(std::complex<double>* data, int n, int sign);

inline void fft(std::vector<std::complex<double>>& v, int sign) {
  fft_inplace(v.data(), static_cast<int>(v.size()), sign);
}

// FFT bin frequency in rad per unit length: bin j of an n-point transform with
// sample spacing d.
double fft_wavenumber(int j, int n, double d);

// Smallest size >= n whose factors are all 2, 3 or 5 (fast FFT lengths).
int next_fast_size(int n);

}  // namespace ghostbeam
