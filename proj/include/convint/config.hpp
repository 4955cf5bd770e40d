// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "convint/noise.hpp"
#include "convint/step.hpp"

namespace convint {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a run needs. Files use INI syntax: "[section]" headers with
// "key = value" lines, or flat "section.key = value" lines.
struct RunConfig {
  int n = 128;
  double dt = 1.0 / 256;
  double T = 1.0 / 16;  // output window [0, T] after the last step
  int steps = 1;
  NoiseParams noise;
  bool frozen_noise = false;
  double v0_amplitude = 0.5;  // Taylor-Green seed
  StepConfig step;
  bool paper_mode = false;  // iteration ledger checked against the paper constraints

  std::string out = "convint_out";
  bool dump_fields = true;
  bool dump_intermediates = false;

  int variance_samples = 10000;
  std::vector<double> variance_fa{0.0, 0.125, 0.25};
  bool variance_zero_noise = false;

  RunConfig();
  // Throws ConfigError naming the offending key. Without pipeline only the
  // grid, noise and variance settings are checked.
  void validate(bool pipeline = true) const;
};

// Applies one "section.key" setting; throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& c, const std::string& key, const std::string& value);
// Reads a file over the defaults.
RunConfig load_config(const std::string& path);
RunConfig load_config(const std::string& path, RunConfig base);
// Flat "section.key = value" text that load_config reads back to the same values.
std::string to_ini(const RunConfig& c);

}  // namespace convint
