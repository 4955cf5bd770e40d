// SPDX-License-Identifier: MIT
#include "convint/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace convint {

PeriodicGrid::PeriodicGrid(int n, double dealias_pad) : n_(n), pad_(dealias_pad) {
  if (n < 8 || !is_power_of_two(n)) throw std::invalid_argument("grid size must be a power of two >= 8");
  if (dealias_pad < 1.0) throw std::invalid_argument("dealias padding factor must be >= 1");
}

int PeriodicGrid::padded(double factor) const {
  int m = static_cast<int>(std::ceil(factor * n_ - 1e-9));
  if (m % 2) ++m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

namespace fft {
namespace {

struct Plans {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

const Plans& plans_for(int n) {
  static std::map<int, std::unique_ptr<Plans>> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto p = std::make_unique<Plans>();
  std::size_t ns = static_cast<std::size_t>(n) * (n / 2 + 1);
  double* r = fftw_alloc_real(static_cast<std::size_t>(n) * n);
  fftw_complex* c = fftw_alloc_complex(ns);
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p->fwd = fftw_plan_dft_r2c_2d(n, n, r, c, flags);
  p->inv = fftw_plan_dft_c2r_2d(n, n, c, r, flags);
  fftw_free(r);
  fftw_free(c);
  if (!p->fwd || !p->inv) throw std::runtime_error("fftw planning failed");
  return *cache.emplace(n, std::move(p)).first->second;
}

}  // namespace

void forward(int n, const double* phys, cplx* spec) {
  const Plans& p = plans_for(n);
  // r2c does not modify its input, but the new-array API wants non-const.
  fftw_execute_dft_r2c(p.fwd, const_cast<double*>(phys), reinterpret_cast<fftw_complex*>(spec));
  const double s = 1.0 / (static_cast<double>(n) * n);
  const std::size_t ns = static_cast<std::size_t>(n) * (n / 2 + 1);
  for (std::size_t i = 0; i < ns; ++i) spec[i] *= s;
}

void inverse(int n, const cplx* spec, double* phys) {
  const Plans& p = plans_for(n);
  std::vector<cplx> scratch(spec, spec + static_cast<std::size_t>(n) * (n / 2 + 1));
  fftw_execute_dft_c2r(p.inv, reinterpret_cast<fftw_complex*>(scratch.data()), phys);
}

}  // namespace fft
}  // namespace convint
