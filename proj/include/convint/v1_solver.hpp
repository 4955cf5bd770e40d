// SPDX-License-Identifier: MIT
#pragma once

#include <vector>

#include "convint/field.hpp"
#include "convint/noise.hpp"

namespace convint {

// (d_t - Lap + frakc) v1 = P_H[z - div(z:2: + v < Z + Z > v)], v = v1 + v2,
// Z = L_f H_R z, with v1 = 0 for t < 0.
struct V1Problem {
  int q = 0;
  double f_q = 1.0;  // localizer radius lambda_q^{alpha/2}
  double frakc = 1.0;
  TimeSeriesField v2;
  const NoiseTrajectory* noise = nullptr;
  Field v1_start;  // empty: v1 = 0 up to t = 0 and the solve starts there
  double picard_tol = 1e-10;
  int picard_max = 50;
};

struct V1Solution {
  TimeSeriesField v1;
  std::vector<int> picard_iters;  // per frame, 0 where no solve happened
  std::vector<double> residual;   // a posteriori mild-equation residual per frame
};

// L_f H_R z at one frame.
Field v1_localized_noise(const V1Problem& p, std::size_t frame);
Field v1_rhs(const Field& v1, const V1Problem& p, std::size_t frame);
Field v1_rhs(const Field& v1, const V1Problem& p, std::size_t frame, const Field& localized);

// Exponential integrator (linear-in-time forcing) with Picard iteration per step.
// Throws std::runtime_error when Picard does not settle within picard_max sweeps.
V1Solution v1_solve(const V1Problem& p);

// ||(L_{J2} - L_{J1}) z||_{C^s}
double localizer_difference_norm(const Field& z, double J1, double J2, double s);

}  // namespace convint
