// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "convint/field.hpp"

namespace convint::testing {

// Field sampled from a closed-form function of (x1, x2), one callable per component.
inline Field sample(const PeriodicGrid& g, Rank r, const std::vector<std::function<double(double, double)>>& fs) {
  const int n = g.n();
  std::vector<double> vals(g.phys_size() * fs.size());
  for (std::size_t c = 0; c < fs.size(); ++c)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) vals[c * g.phys_size() + i * n + j] = fs[c](double(i) / n, double(j) / n);
  return Field::from_physical(g, r, vals);
}

// Random real field with modes |k1|, |k2| <= kmax.
inline Field random_field(const PeriodicGrid& g, Rank r, int kmax, unsigned seed, bool zero_mean = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(g, r);
  for (int c = 0; c < f.ncomp(); ++c)
    for (int k1 = -kmax; k1 <= kmax; ++k1)
      for (int k2 = 0; k2 <= kmax; ++k2) f.at(c, k1, k2) = cplx(nd(rng), nd(rng));
  // Round trip restores Hermitian symmetry of the k2 = 0 column.
  Field out = Field::from_physical(g, r, f.to_physical());
  if (zero_mean)
    for (int c = 0; c < out.ncomp(); ++c) out.comp(c)[0] = 0.0;
  return out;
}

inline double max_diff(const Field& a, const Field& b) { return (a - b).max_abs(); }

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace convint::testing
