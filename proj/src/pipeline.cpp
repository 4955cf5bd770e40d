// SPDX-License-Identifier: MIT
#include "convint/pipeline.hpp"

#include <cmath>

namespace convint {

NoiseTrajectory run_noise(const RunConfig& cfg, const Window& w) {
  const PeriodicGrid g(cfg.n);
  return noise_trajectory(g, cfg.noise, w.t0, w.dt, w.frames, cfg.step.iter.frakC_value(), cfg.frozen_noise);
}

StepState run_initial_state(const RunConfig& cfg, const NoiseTrajectory& noise) {
  const PeriodicGrid g(cfg.n);
  return initial_state(taylor_green(g, cfg.v0_amplitude), noise, cfg.step.iter);
}

RunResult run_pipeline(const RunConfig& cfg, const DumpFn& dump, const LevelFn& on_level) {
  cfg.validate();
  RunResult out;
  out.window = desk_window(cfg.T, cfg.dt, cfg.step.iter.l, cfg.steps);
  const NoiseTrajectory noise = run_noise(cfg, out.window);
  StepState s = run_initial_state(cfg, noise);
  out.initial_norms = norm_table(s);
  for (double r : master_residuals(s, noise, cfg.step.iter.frakc_value()))
    out.initial_residual = std::max(out.initial_residual, r);
  if (on_level) on_level(s, nullptr);
  for (int i = 0; i < cfg.steps; ++i) {
    StepResult r = step(s, noise, cfg.step, dump);
    s = std::move(r.next);
    out.reports.push_back(std::move(r.report));
    if (on_level) on_level(s, &out.reports.back());
  }
  out.final_state = std::move(s);
  return out;
}

Field magnitude(const Field& f) {
  const auto v = f.to_physical();
  const std::size_t np = f.grid().phys_size();
  std::vector<double> m(np, 0.0);
  for (int c = 0; c < f.ncomp(); ++c) {
    // Off-diagonal entries of a symmetric tensor count twice in the Frobenius norm.
    const double w = (f.rank() == Rank::SymTensor && c == 1) ? 2.0 : 1.0;
    for (std::size_t p = 0; p < np; ++p) m[p] += w * v[c * np + p] * v[c * np + p];
  }
  for (double& x : m) x = std::sqrt(x);
  return Field::from_physical(f.grid(), Rank::Scalar, m);
}

}  // namespace convint
