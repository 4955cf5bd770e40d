// SPDX-License-Identifier: MIT
#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <vector>

namespace convint::detail {

struct Rule {
  std::vector<double> x;  // nodes on [0, 1]
  std::vector<double> w;  // weights summing to 1
};

// Gauss-Legendre rule mapped to [0, 1]; Boost stores only the nonnegative half.
template <unsigned N>
Rule gauss_legendre_unit() {
  using G = boost::math::quadrature::gauss<double, N>;
  Rule r;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      r.x.push_back(0.5);
      r.w.push_back(0.5 * w[i]);
      continue;
    }
    r.x.push_back(0.5 * (1.0 - a[i]));
    r.w.push_back(0.5 * w[i]);
    r.x.push_back(0.5 * (1.0 + a[i]));
    r.w.push_back(0.5 * w[i]);
  }
  return r;
}

// Composite 30-point Gauss-Legendre over equal panels.
template <class F>
double integrate(F f, double a, double b, int panels) {
  using G = boost::math::quadrature::gauss<double, 30>;
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) s += G::integrate(f, a + p * h, a + (p + 1) * h);
  return s;
}

}  // namespace convint::detail
