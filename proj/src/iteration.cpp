// SPDX-License-Identifier: MIT
#include "convint/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace convint {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double IterationParams::fa0() const { return std::min((1.0 - 3.0 * fa) / 6.0, 1.0 / 12.0); }

double IterationParams::lambda(int q) const {
  if (q < 0) throw std::invalid_argument("lambda: negative level");
  if (lambdas.empty()) throw std::invalid_argument("lambda: no desk frequencies given");
  if (q < int(lambdas.size())) return lambdas[q];
  const double ratio = lambdas.size() > 1 ? lambdas.back() / lambdas[lambdas.size() - 2] : 2.0;
  return lambdas.back() * std::pow(ratio, q - int(lambdas.size()) + 1);
}

double IterationParams::log2_lambda(int q) const { return std::pow(double(b), q) * log2_a; }

double IterationParams::delta(int q) const {
  if (q == 0) return 1.0;
  return delta1 * std::pow(lambda(1) / lambda(q), 2.0 * beta);
}

double IterationParams::frakc_formula() const { return std::pow(r * L / aleph, 6.0 / (1.0 - 3.0 * fa)); }
double IterationParams::frakc_value() const { return frakc > 0.0 ? frakc : frakc_formula(); }
double IterationParams::frakC_value() const { return frakC > 0.0 ? frakC : frakm / aleph; }

double IterationParams::M_bar_L() const {
  return std::pow(M_star * r * std::max(L, frakm) / aleph, 3.0 / (1.0 - 3.0 * fa));
}

double IterationParams::M_L() const { return 2.0 * std::pow(M_bar_L() * r, 3); }

std::vector<ConstraintCheck> check_paper_params(const IterationParams& p) {
  std::vector<ConstraintCheck> out;
  auto add = [&](const std::string& name, bool ok, const std::string& detail) { out.push_back({name, ok, detail}); };
  const double fa0 = p.fa0();
  const double b = double(p.b);
  add("gamma = 1/113", std::abs(p.gamma - 1.0 / 113.0) < 1e-15, "gamma = " + fmt(p.gamma));
  add("alpha < gamma/54", p.alpha < p.gamma / 54.0, fmt(p.alpha) + " vs " + fmt(p.gamma / 54.0));
  add("alpha*b > 8/fa0", p.alpha * b > 8.0 / fa0, fmt(p.alpha * b) + " vs " + fmt(8.0 / fa0));
  add("alpha > 48*beta*b^2", p.alpha > 48.0 * p.beta * b * b, fmt(p.alpha) + " vs " + fmt(48.0 * p.beta * b * b));
  add("alpha > (8/fa0)*beta*b", p.alpha > 8.0 / fa0 * p.beta * b, fmt(p.alpha) + " vs " + fmt(8.0 / fa0 * p.beta * b));
  add("b in 113N", p.b > 0 && p.b % 113 == 0, "b = " + std::to_string(p.b));
  // Compare exponents base 2 to stay finite.
  const double lhs1 = b * p.beta * p.log2_a, rhs1 = std::log2(2.0 + std::sqrt(2.0));
  add("a^(b*beta) >= 2+sqrt(2)", p.log2_a > 0.0 && lhs1 >= rhs1, "log2 lhs " + fmt(lhs1) + " vs " + fmt(rhs1));
  const double lhs2 = p.alpha * b / 2.0 * p.log2_a, rhs2 = std::log2(1.0 + 1.0 / p.aleph);
  add("a^(alpha*b/2) >= 1+1/aleph", p.log2_a > 0.0 && lhs2 >= rhs2, "log2 lhs " + fmt(lhs2) + " vs " + fmt(rhs2));
  return out;
}

std::vector<ConstraintCheck> check_desk_params(const IterationParams& p, int steps) {
  std::vector<ConstraintCheck> out;
  auto add = [&](const std::string& name, bool ok, const std::string& detail) { out.push_back({name, ok, detail}); };
  bool inc = !p.lambdas.empty() && p.lambdas.front() >= 1.0;
  for (std::size_t i = 1; i < p.lambdas.size(); ++i) inc = inc && p.lambdas[i] > p.lambdas[i - 1];
  add("lambda_q increasing", inc, "");
  bool integral = true;
  for (double x : p.lambdas) integral = integral && x == std::floor(x);
  add("lambda_q integral", integral, "");
  bool dec = p.delta1 > 0.0 && p.delta1 < 1.0 && p.beta > 0.0;
  for (int q = 2; q <= steps + 1 && dec; ++q) dec = p.delta(q) < p.delta(q - 1);
  add("delta_q decreasing in (0,1)", dec, "delta_1 = " + fmt(p.delta1));
  add("l in (0,1/2)", p.l > 0.0 && p.l < 0.5, "l = " + fmt(p.l));
  add("aleph in (0,1)", p.aleph > 0.0 && p.aleph < 1.0, fmt(p.aleph));
  add("r >= 1", p.r >= 1.0, fmt(p.r));
  add("fa in [0,1/3)", p.fa >= 0.0 && p.fa < 1.0 / 3.0, fmt(p.fa));
  add("alpha in (0,1]", p.alpha > 0.0 && p.alpha <= 1.0, fmt(p.alpha));
  add("frakc > 0", p.frakc_value() > 0.0 && std::isfinite(p.frakc_value()), fmt(p.frakc_value()));
  add("frakC >= 1", p.frakC_value() >= 1.0, fmt(p.frakC_value()));
  return out;
}

void require(const std::vector<ConstraintCheck>& checks) {
  for (const auto& c : checks)
    if (!c.ok) throw std::invalid_argument("parameter constraint violated: " + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
}

IterationParams paper_compliant_example() {
  IterationParams p;
  p.gamma = 1.0 / 113.0;
  p.alpha = 1.0 / (55.0 * 113.0);
  p.b = 113 * 5281;
  const double b = double(p.b);
  p.beta = 0.9 * p.alpha / (48.0 * b * b);
  p.log2_a = 2.0 * std::log2(2.0 + std::sqrt(2.0)) / (b * p.beta);
  return p;
}

}  // namespace convint
