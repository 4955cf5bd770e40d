// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "convint/field.hpp"
#include "convint/iteration.hpp"
#include "convint/jets.hpp"
#include "convint/noise.hpp"

namespace convint {

// (v1_q, v2_q, R_q) on a common uniform window.
struct StepState {
  int q = 0;
  TimeSeriesField v1, v2, R;  // R: trace-free symtensor

  double t0() const { return v2.times.front(); }
  double t1() const { return v2.times.back(); }
  std::size_t size() const { return v2.size(); }
  void validate() const;
};

struct StepConfig {
  IterationParams iter;
  JetParams jets = JetParams::desk();  // jets.n is overwritten by the grid size
  DirectionSet dirs = DirectionSet::default_set();
  double clamp_margin = 0.999;  // admissible |R_l|/rho is clamp_margin * r_star
  double rho_inflation = 1.0;   // rho = sqrt(l^2 + (s |R_l|)^2); 1 is the plain formula
  int amplitude_kmax = -1;      // negative selects n/4 - 1
  double dealias_factor = 2.0;  // padding used for w_p (x) w_p in the oscillation check
  bool perturb = true;          // false: zero amplitudes, w = 0
};

// Optional sink for intermediate fields; invoked concurrently from worker threads.
using DumpFn = std::function<void(const std::string& name, std::size_t frame, double t, const Field& f)>;

// rho = sqrt(l^2 + s^2 |R|^2) with |R| the Frobenius norm.
Field rho_frame(const Field& R, double l, double inflation = 1.0);
TimeSeriesField rho_field(const TimeSeriesField& R, double l, double inflation = 1.0);

struct AmplitudeFrame {
  Field rho;
  Field R_clamped;               // R_l after the positivity clamp
  std::vector<Field> a;          // pointwise amplitudes, interpolated
  std::vector<Field> a_bl;       // low-passed amplitudes fed to the jets
  double phoid_residual = 0.0;   // max |sum a^2 xi (x) xi - (rho Id - R_clamped)| over grid points
  double clamp_max = 0.0;        // max |R_l - R_clamped|
  double clamp_fraction = 0.0;   // share of grid points clamped
};

// Throws std::domain_error naming the point if a coefficient turns negative.
AmplitudeFrame amplitudes_frame(const Field& R_l, double l, const DirectionSet& dirs, double clamp_margin = 0.999,
                                int kmax = -1, double inflation = 1.0);

struct Perturbation {
  Field wp, wc, wo, wa;
  Field total() const { return wp + wc + wo + wa; }
};

// Perturbations at time t from band-limited amplitudes (one per direction).
Perturbation perturbations_frame(const std::vector<Field>& a_bl, const JetFamily& fam, double t);

// sigma^{-1} sum perp_grad(a g Psi) - (w_p + w_c), pointwise max.
double curl_form_residual(const Perturbation& w, const std::vector<Field>& a_bl, const JetFamily& fam, double t);

// w_p (x) w_p + R_l - [sum a~^2 g^2 P(W (x) W) + sum a~^2 (g^2 - 1) xi (x) xi + rho Id + E], pointwise max,
// with E = sum (a~^2 - a^2) xi (x) xi + (R_l - R_clamped) the band-limiting and clamp defect.
double oscillation_identity_residual(const Field& wp, const AmplitudeFrame& amp, const Field& R_l,
                                     const JetFamily& fam, double t, double dealias_factor);

// v (x) Lz + Lz (x) v + v (x) v + v >= Hz + Hz <= v, full symmetric tensor.
Field nonlinear_flux(const Field& v, const Field& Lz, const Field& Hz);
// The part linear in v (everything except v (x) v).
Field linear_flux(const Field& v, const Field& Lz, const Field& Hz);

struct NormTable {
  double v2_L2L2 = 0.0;    // (sum dt ||v2||_L2^2)^{1/2}
  double v2_C1 = 0.0;      // sup (|v2| + |grad v2| + |d_t v2|)
  double v2_W12_65 = 0.0;  // sup_t ||v2||_{W^{1/2,6/5}}
  double R_L1L1 = 0.0;     // sum dt ||R||_L1
};

struct StepReport {
  int q = 0;  // level produced
  double t0 = 0.0, t1 = 0.0, dt = 0.0;
  std::size_t frames = 0, dropped = 0;

  double phoid_residual = 0.0;
  double oscillation_residual = 0.0;
  double curl_form_residual = 0.0;
  double div_v2 = 0.0, mean_v2 = 0.0, div_v1 = 0.0, mean_v1 = 0.0;
  double trace_defect = 0.0;  // trace of the summed ledger before projection
  double trace_R = 0.0;       // trace of the stored stress
  double clamp_max = 0.0, clamp_fraction = 0.0;
  double amplitude_C0 = 0.0, amplitude_constant = 0.0;  // sup |a~| and sup |a~| l^2 (||R_q||+1)^{-1/2}
  double rho_C0 = 0.0, wp_C0 = 0.0;                     // sup rho and sup |w_p|, scales of the identities

  double master_residual = 0.0;      // max over interior frames of the L2 residual at level q+1
  double master_residual_rms = 0.0;  // root mean square over interior frames
  double master_scale = 0.0;         // max ||d_t v2|| + ||Lap v2|| for context
  double input_residual = 0.0;       // same residual at level q, for reference

  NormTable before, after;
  double dv2_L2L2 = 0.0, monotone_bound = 0.0;
  bool monotone_ok = false;

  std::vector<std::pair<std::string, double>> ledger;  // L1L1 norm per stress component
  int picard_max = 0;
  double v1_residual = 0.0;
  std::vector<int> v1_picard;         // per output frame
  std::vector<double> v1_residuals;  // per output frame

  double ledger_value(const std::string& name) const;
};

struct StepResult {
  StepState next;
  StepReport report;
};

// One convex integration step. The noise trajectory must cover the state's window on the same
// time grid; the output window drops the first M = ceil(l/dt) frames.
StepResult step(const StepState& state, const NoiseTrajectory& noise, const StepConfig& cfg, const DumpFn& dump = {});

// Divergence-free, mean-zero seed without Nyquist modes.
Field taylor_green(const PeriodicGrid& g, double amplitude);

// Level-0 triple from a time-independent v2 = v0 and the matching v1 solve.
StepState initial_state(const Field& v0, const NoiseTrajectory& noise, const IterationParams& iter);

struct Window {
  double t0 = 0.0, dt = 0.0;
  int frames = 0;
};
// Window whose output after `steps` steps is [0, T] (frames are aligned with t = 0).
Window desk_window(double T, double dt, double l, int steps);

// P_H[d_t v2 - Lap v2 - c v1 + div N(v) - div R] at interior frames, Nyquist row excluded.
std::vector<double> master_residuals(const StepState& s, const NoiseTrajectory& noise, double frakc);

NormTable norm_table(const StepState& s);

// Key, value CSV and a short human-readable summary.
void write_report_csv(const std::string& path, const StepReport& r);
std::string summary(const StepReport& r);

}  // namespace convint
