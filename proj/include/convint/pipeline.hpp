// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <vector>

#include "convint/config.hpp"
#include "convint/noise.hpp"
#include "convint/step.hpp"

namespace convint {

struct RunResult {
  Window window;
  NormTable initial_norms;
  double initial_residual = 0.0;  // max master residual of the level-0 triple
  std::vector<StepReport> reports;
  StepState final_state;
};

// Called with the level-0 triple and after every step (report is null for level 0).
using LevelFn = std::function<void(const StepState& s, const StepReport* report)>;

// Noise on the run window, then the level-0 triple from a Taylor-Green seed, then cfg.steps steps.
// The dump sink receives the step's intermediate fields.
RunResult run_pipeline(const RunConfig& cfg, const DumpFn& dump = {}, const LevelFn& on_level = {});

// The noise trajectory and level-0 triple run_pipeline starts from.
NoiseTrajectory run_noise(const RunConfig& cfg, const Window& w);
StepState run_initial_state(const RunConfig& cfg, const NoiseTrajectory& noise);

// Pointwise magnitude (Euclidean or Frobenius) as a scalar field.
Field magnitude(const Field& f);

}  // namespace convint
