// SPDX-License-Identifier: MIT
// convint: audit suites, pipeline runs and the mode-variance check.
// Exit codes: 0 success, 1 audit or identity failure, 2 configuration error.
#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "convint/audit.hpp"
#include "convint/config.hpp"
#include "convint/io.hpp"
#include "convint/iteration.hpp"
#include "convint/pipeline.hpp"
#include "convint/threads.hpp"

namespace fs = std::filesystem;
using namespace convint;

namespace {

constexpr int kOk = 0, kFail = 1, kConfig = 2;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid, steps;
  std::optional<std::string> out;
  bool paper_validate = false, dump_intermediates = false;
  std::string suite;
  std::optional<double> dealias_factor;
  std::optional<int> samples;
  bool zero_noise = false;
};

RunConfig resolve(const Flags& f) {
  RunConfig base;
  if (f.paper_validate) apply_setting(base, "iteration.preset", "paper");
  RunConfig c = f.config.empty() ? base : load_config(f.config, base);
  if (f.seed) c.noise.seed = *f.seed;
  if (f.grid) apply_setting(c, "grid.n", std::to_string(*f.grid));
  if (f.steps) c.steps = *f.steps;
  if (f.out) c.out = *f.out;
  if (f.dump_intermediates) c.dump_intermediates = true;
  if (f.dealias_factor) c.step.dealias_factor = *f.dealias_factor;
  if (f.samples) c.variance_samples = *f.samples;
  if (f.zero_noise) c.variance_zero_noise = true;
  return c;
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

int paper_validate(const RunConfig& c) {
  const auto checks = check_paper_params(c.step.iter);
  bool ok = true;
  for (const auto& ch : checks) {
    std::cout << (ch.ok ? "ok        " : "VIOLATED  ") << ch.name << (ch.detail.empty() ? "" : "  (" + ch.detail + ")")
              << "\n";
    ok = ok && ch.ok;
  }
  std::cout << (ok ? "parameter ledger accepted\n" : "parameter ledger rejected\n");
  return ok ? kOk : kFail;
}

int cmd_audit(const RunConfig& c, const std::string& suite) {
  c.validate(suite == "jets" || suite == "step");
  fs::create_directories(c.out);
  const auto checks = run_audit(suite, c);
  const std::string path = (fs::path(c.out) / ("audit_" + suite + ".csv")).string();
  write_audit_csv(path, checks);
  for (const auto& ch : checks)
    std::cout << (ch.pass ? "PASS  " : "FAIL  ") << suite << "." << ch.name << " = " << num(ch.value) << "  in ["
              << num(ch.lo) << ", " << num(ch.hi) << "]\n";
  const bool ok = all_pass(checks);
  std::cout << suite << ": " << (ok ? "all checks pass" : "FAILED") << " (" << path << ")\n";
  return ok ? kOk : kFail;
}

int cmd_run(const RunConfig& c) {
  c.validate();
  if (c.paper_mode) throw ConfigError("run needs the desk iteration preset; the paper ledger is only validated");
  const fs::path out(c.out);
  fs::create_directories(out);
  std::ofstream(out / "config.ini") << to_ini(c);

  std::atomic<int> level{1};
  DumpFn dump;
  if (c.dump_intermediates)
    dump = [&](const std::string& name, std::size_t frame, double, const Field& f) {
      const fs::path dir = out / "intermediates" / ("q" + std::to_string(level.load()));
      std::error_code ec;
      fs::create_directories(dir, ec);
      std::ostringstream file;
      file << name << "_" << std::setw(4) << std::setfill('0') << frame << ".bin";
      io::write_field((dir / file.str()).string(), f);
    };

  std::vector<std::vector<double>> norm_rows;
  std::vector<AuditCheck> checks;
  const auto on_level = [&](const StepState& s, const StepReport* r) {
    const std::string q = "q" + std::to_string(s.q);
    if (c.dump_fields) {
      io::write_field((out / (q + "_v1.bin")).string(), s.v1.frames.back());
      io::write_field((out / (q + "_v2.bin")).string(), s.v2.frames.back());
      io::write_field((out / (q + "_R.bin")).string(), s.R.frames.back());
      io::write_pgm((out / (q + "_v2_abs.pgm")).string(), magnitude(s.v2.frames.back()));
      io::write_pgm((out / (q + "_R_abs.pgm")).string(), magnitude(s.R.frames.back()));
    }
    if (!r) return;
    write_report_csv((out / ("report_" + q + ".csv")).string(), *r);
    std::vector<std::vector<double>> diag;
    for (std::size_t k = 0; k < r->v1_picard.size(); ++k)
      diag.push_back({double(k), double(r->v1_picard[k]), r->v1_residuals[k]});
    io::write_csv((out / ("v1_solver_" + q + ".csv")).string(), {"frame", "picard_iters", "residual"}, diag);
    const NormTable& a = r->after;
    norm_rows.push_back({double(r->q), a.v2_L2L2, a.v2_C1, a.v2_W12_65, a.R_L1L1, r->master_residual,
                         r->master_residual_rms, r->dv2_L2L2, r->monotone_ok ? 1.0 : 0.0});
    for (auto ch : step_report_checks(*r)) {
      ch.name = q + "." + ch.name;
      checks.push_back(ch);
    }
    std::cout << summary(*r);
    level = s.q + 1;
  };

  const RunResult res = run_pipeline(c, dump, on_level);
  const NormTable& b = res.initial_norms;
  norm_rows.insert(norm_rows.begin(),
                   {0.0, b.v2_L2L2, b.v2_C1, b.v2_W12_65, b.R_L1L1, res.initial_residual, 0.0, 0.0, 1.0});
  io::write_csv((out / "norms.csv").string(),
                {"q", "v2_L2L2", "v2_C1", "v2_W12_65", "R_L1L1", "master_residual", "master_residual_rms", "dv2_L2L2",
                 "monotone_ok"},
                norm_rows);
  write_audit_csv((out / "identities.csv").string(), checks);
  bool ok = true;
  for (const auto& ch : checks)
    if (!ch.pass) {
      ok = false;
      std::cout << "FAIL  " << ch.name << " = " << num(ch.value) << " > " << num(ch.hi) << "\n";
    }
  std::cout << "run: " << c.steps << " step(s), " << (ok ? "all identities hold" : "identity check FAILED")
            << " (" << out.string() << ")\n";
  return ok ? kOk : kFail;
}

int cmd_variance(const RunConfig& c) {
  c.validate(false);
  fs::create_directories(c.out);
  std::vector<std::vector<double>> rows;
  bool ok = true;
  for (double fa : c.variance_fa) {
    const VarianceCheck v = variance_check(fa, c.variance_samples, c.noise.seed, 16, c.variance_zero_noise);
    const double z = v.degenerate ? std::numeric_limits<double>::infinity() : (v.mean - v.target) / v.std_error;
    rows.push_back({fa, double(v.samples), v.target, v.mean, v.std_error, z, v.pass ? 1.0 : 0.0, v.degenerate ? 1.0 : 0.0});
    std::cout << (v.pass ? "PASS  " : "FAIL  ") << "fa = " << num(fa) << "  estimate " << num(v.mean) << " +- "
              << num(v.std_error) << "  target " << num(v.target) << "  (" << num(z) << " std errors)"
              << (v.degenerate ? "  degenerate input: zero sample variance" : "") << "\n";
    ok = ok && v.pass;
  }
  const std::string path = (fs::path(c.out) / "variance.csv").string();
  io::write_csv(path, {"fa", "samples", "target", "mean", "std_error", "z_score", "pass", "degenerate"}, rows);
  std::cout << "variance-check: " << (ok ? "pass" : "FAILED") << " (" << path << ")\n";
  return ok ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex integration lab for 2D stochastic Navier-Stokes"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  Flags f;
  app.add_option("--config", f.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "noise seed (U64)");
  app.add_option("--grid", f.grid, "grid size n");
  app.add_option("--steps", f.steps, "number of convex integration steps");
  app.add_option("--out", f.out, "output directory");
  app.add_flag("--paper-validate", f.paper_validate, "check the paper parameter ledger and exit");
  app.add_flag("--dump-intermediates", f.dump_intermediates, "dump every intermediate field of each step");

  auto* audit = app.add_subcommand("audit", "run the invariant suite of one module");
  audit->add_option("--suite", f.suite, "spectral, besov, noise, jets or step")
      ->required()
      ->check(CLI::IsMember(audit_suites()));
  audit->add_option("--dealias-factor", f.dealias_factor, "padding factor of the oscillation check (fault injection)");
  auto* run = app.add_subcommand("run", "noise, v1 solve and convex steps with reports and dumps");
  auto* var = app.add_subcommand("variance-check", "Monte Carlo OU mode variance against the closed form");
  var->add_option("--samples", f.samples, "number of samples (>= 10000)");
  var->add_flag("--zero-noise", f.zero_noise, "replace the noise by zero (degenerate input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const RunConfig c = resolve(f);
    if (f.paper_validate) return paper_validate(c);
    std::cerr << "convint: " << worker_count() << " worker thread(s)\n";
    if (*audit) return cmd_audit(c, f.suite);
    if (*run) return cmd_run(c);
    if (*var) return cmd_variance(c);
    std::cerr << app.help();
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
}
