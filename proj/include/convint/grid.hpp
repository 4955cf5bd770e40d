// SPDX-License-Identifier: MIT
#pragma once

#include <complex>
#include <cstddef>

namespace convint {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Uniform grid on the unit torus [0,1)^2 with n points per axis. Physical
// values are stored row-major, f[i*n + j] at x = (i/n, j/n). Spectral
// coefficients use the half-complex layout of a real FFT: n rows indexed by
// k1, n/2+1 columns indexed by k2 >= 0. The k = 0 coefficient is the mean.
class PeriodicGrid {
 public:
  PeriodicGrid() = default;
  explicit PeriodicGrid(int n, double dealias_pad = 1.5);

  int n() const { return n_; }
  int half() const { return n_ / 2 + 1; }
  double dealias_pad() const { return pad_; }
  std::size_t spec_size() const { return static_cast<std::size_t>(n_) * half(); }
  std::size_t phys_size() const { return static_cast<std::size_t>(n_) * n_; }

  int k1(int row) const { return row < n_ / 2 ? row : row - n_; }
  int k2(int col) const { return col; }
  int row_of(int k1) const { return k1 >= 0 ? k1 : k1 + n_; }
  // Even padded size m >= factor * n.
  int padded(double factor) const;

  bool operator==(const PeriodicGrid& o) const { return n_ == o.n_; }

 private:
  int n_ = 0;
  double pad_ = 1.5;
};

bool is_power_of_two(int n);

namespace fft {

// spec[k] = n^{-2} sum_x phys[x] e^{-2 pi i k.x}; sizes n*n and n*(n/2+1).
void forward(int n, const double* phys, cplx* spec);
// phys[x] = sum_k spec[k] e^{2 pi i k.x}; spec is left untouched.
void inverse(int n, const cplx* spec, double* phys);

}  // namespace fft

}  // namespace convint
