// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "convint/field.hpp"

namespace convint {

struct NoiseParams {
  double fa = 0.0;      // roughness exponent in [0, 1/3)
  double kappa = -1.0;  // regularity slack; negative selects a default inside the admissible interval
  std::uint64_t seed = 0;
  int k_max = -1;  // max(|k1|, |k2|) <= k_max; negative selects n/2 - 1

  double fa0() const;  // min((1 - 3 fa)/6, 1/12)
  double kappa_value() const;
  void validate() const;
};

// Stationary OU process dz = (Lap - 1) z dt + (-Lap)^{fa/2} dB projected on
// divergence-free mean-zero fields. Mode k carries z_k = c_k e_k with
// e_k = i k^perp / |k|, k^perp = (k2, -k1), c_{-k} = conj(c_k) and
// E|c_k|^2 = s_k^2 = (2 pi |k|)^{2 fa} / (2 (4 pi^2 |k|^2 + 1)).
struct NoiseState {
  PeriodicGrid grid;
  NoiseParams params;
  std::uint32_t stream = 0;  // ensemble member
  std::uint64_t step = 0;    // number of transitions taken
  double t = 0.0;
  std::vector<cplx> c;  // half-complex layout, scalar amplitude per mode

  cplx amp(int k1, int k2) const { return c[grid.row_of(k1) * grid.half() + k2]; }
};

double stationary_variance(double fa, int k1, int k2);
struct OuTransition {
  double decay;      // e^{-lam dt}, lam = 4 pi^2 |k|^2 + 1
  double innov_std;  // sqrt(s_k^2 (1 - e^{-2 lam dt}))
};
OuTransition ou_transition(double fa, int k1, int k2, double dt);
bool noise_mode_active(const NoiseState& s, int k1, int k2);

NoiseState ou_init_stationary(const PeriodicGrid& grid, const NoiseParams& params, std::uint32_t stream = 0);
// Exact transition over dt >= 0 (dt = 0 leaves the state untouched).
void ou_step(NoiseState& state, double dt);
Field ou_field(const NoiseState& state);

// E[z_eps (x) z_eps] for the truncated process mollified at scale eps (eps = 0: no mollification).
std::array<double, 3> wick_counterterm(const NoiseState& state, double eps);
// Pi(z_eps (x) z_eps) - E[z_eps (x) z_eps]
Field wick_square(const NoiseState& state, double eps);

// (1 + frakC * z_norm)^6
double cutoff_radius(double z_norm, double frakC);

struct MomentRow {
  double q = 0;
  double moment_z = 0;       // E[||z||^q_{C^{-fa-kappa}}]^{1/q}
  double moment_holder = 0;  // same for the C^{fa0/2}_t C^{-fa-fa0-kappa} norm on [0, 1]
  double moment_wick = 0;    // same for ||z:2:||_{C^{-2fa-kappa}}
  double L_z = 0, L_holder = 0, L_wick = 0, fitted_L = 0;
};
struct MomentReport {
  int n_samples = 0;
  std::vector<MomentRow> rows;
  double growth_exponent = 0;  // slope of log L_z against log q
};
// Ensemble moments at resolution n, time window [0,1] sampled with `time_steps` steps.
MomentReport moment_audit(int n, const NoiseParams& params, int n_samples, const std::vector<double>& qs,
                          int time_steps = 16, bool zero_state = false);

// Noise sampled on t0 + k dt: z, its Wick square (eps = 0) and the cutoff
// radius R(t) = (1 + frakC ||z(t)||_{C^{-fa-fa0-kappa}})^6. Frozen keeps z(t0).
struct NoiseTrajectory {
  TimeSeriesField z, z2;
  std::vector<double> radius;
  std::size_t size() const { return z.size(); }
};
NoiseTrajectory noise_trajectory(const PeriodicGrid& grid, const NoiseParams& params, double t0, double dt,
                                 int frames, double frakC, bool frozen = false, std::uint32_t stream = 0);
// z = 0, z:2: = 0, R = 1.
NoiseTrajectory zero_noise_trajectory(const PeriodicGrid& grid, double t0, double dt, int frames);

struct VarianceCheck {
  double fa = 0, target = 0, mean = 0, std_error = 0;
  int samples = 0;
  bool pass = false;
  bool degenerate = false;  // zero sample variance; never passes
};
// Monte Carlo E|<z(0), phi>|^2 for phi = (0, e^{2 pi i x1}) against (2 pi)^{2 fa} / (2 (4 pi^2 + 1)).
// zero_noise replaces every sample by z = 0.
VarianceCheck variance_check(double fa, int samples, std::uint64_t seed, int n = 16, bool zero_noise = false);

}  // namespace convint
