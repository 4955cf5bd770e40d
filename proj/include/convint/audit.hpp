// SPDX-License-Identifier: MIT
#pragma once

#include <string>
#include <vector>

#include "convint/config.hpp"
#include "convint/step.hpp"

namespace convint {

// One invariant: passes iff lo <= value <= hi.
struct AuditCheck {
  std::string suite, name;
  double value = 0.0, lo = 0.0, hi = 0.0;
  bool pass = false;
};

const std::vector<std::string>& audit_suites();  // spectral, besov, noise, jets, step

// Runs every invariant of a module. The spectral, noise and jets suites use the
// configured grid; scaling fits and the besov ensembles use fixed grids of their
// own. The step suite runs one step of the configured pipeline. Throws
// std::invalid_argument for an unknown suite.
std::vector<AuditCheck> run_audit(const std::string& suite, const RunConfig& cfg);

// Identity checks of one step report: absolute tolerances at level 1, relative
// to the size of the terms at later levels.
std::vector<AuditCheck> step_report_checks(const StepReport& r);

bool all_pass(const std::vector<AuditCheck>& checks);
void write_audit_csv(const std::string& path, const std::vector<AuditCheck>& checks);

}  // namespace convint
