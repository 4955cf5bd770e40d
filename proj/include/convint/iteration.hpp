// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace convint {

// Exponents and constants of the iteration. Paper mode stores log2(a) since a
// is astronomically large; desk mode supplies lambda_q, delta_1 and l directly.
struct IterationParams {
  // paper ledger
  double log2_a = 0.0;
  std::int64_t b = 0;
  double alpha = 1.0;  // desk default; paper mode needs alpha < gamma/54
  double beta = 0.25;
  double gamma = 1.0 / 113.0;
  double r = 1.0;
  double aleph = 0.5;
  double fa = 0.0;     // noise roughness, fixes fa0 = min((1-3fa)/6, 1/12)
  double L = 1.0;      // noise moment constant
  double frakm = 1.0;  // max(||v0||_{C^1}, 1)
  double M_star = 1.0;

  // desk ledger
  std::vector<double> lambdas{8.0, 16.0};  // extended geometrically past the last entry
  double delta1 = 0.5;
  double l = 1.0 / 64.0;
  double frakc = 64.0;   // <= 0 selects the formula (r L / aleph)^{6/(1-3fa)}
  double frakC = -1.0;   // <= 0 selects frakm / aleph

  double fa0() const;
  double lambda(int q) const;       // desk
  double log2_lambda(int q) const;  // paper: b^q log2 a
  double delta(int q) const;        // delta_0 = 1, delta_q = delta1 (lambda_1/lambda_q)^{2 beta}
  double f(int q) const { return std::pow(lambda(q), alpha / 2.0); }
  double frakc_value() const;
  double frakc_formula() const;
  double frakC_value() const;
  double M_bar_L() const;
  double M_L() const;
};

struct ConstraintCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

// Paper ledger: "gamma = 1/113", "alpha < gamma/54", "alpha*b > 8/fa0",
// "alpha > 48*beta*b^2", "alpha > (8/fa0)*beta*b", "b in 113N",
// "a^(b*beta) >= 2+sqrt(2)", "a^(alpha*b/2) >= 1+1/aleph".
std::vector<ConstraintCheck> check_paper_params(const IterationParams& p);
// Desk ledger: ordering and range checks only.
std::vector<ConstraintCheck> check_desk_params(const IterationParams& p, int steps);
// Throws std::invalid_argument naming the first violated constraint.
void require(const std::vector<ConstraintCheck>& checks);

// A ledger satisfying every paper constraint: gamma = 1/113, alpha = 1/(55*113),
// b = 113*5281, beta just below alpha/(48 b^2), a as small as (ab2) allows.
IterationParams paper_compliant_example();

}  // namespace convint
