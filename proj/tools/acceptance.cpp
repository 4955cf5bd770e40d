// SPDX-License-Identifier: MIT
// Acceptance criteria, one PASS/FAIL line each. Usage: convint_acceptance PATH_TO_CLI [WORKDIR]
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "convint/audit.hpp"
#include "convint/config.hpp"
#include "convint/iteration.hpp"
#include "convint/noise.hpp"
#include "convint/pipeline.hpp"
#include "convint/spectral.hpp"
#include "convint/v1_solver.hpp"

namespace fs = std::filesystem;
using namespace convint;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << x;
  return os.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Picks named checks out of a suite run; all must be present and pass.
Outcome pick(const std::vector<AuditCheck>& checks, const std::vector<std::string>& names) {
  Outcome o{true, ""};
  for (const auto& name : names) {
    bool found = false;
    for (const auto& c : checks)
      if (c.name == name) {
        found = true;
        o.pass = o.pass && c.pass;
        o.detail += (o.detail.empty() ? "" : ", ") + name + " " + num(c.value);
      }
    if (!found) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : ", ") + name + " missing";
    }
  }
  return o;
}

Outcome ou_variance() {
  const auto t0 = Clock::now();
  Outcome o{true, ""};
  for (double fa : {0.0, 0.125, 0.25}) {
    const VarianceCheck v = variance_check(fa, 10000, 2024);
    o.pass = o.pass && v.pass;
    o.detail += "fa " + num(fa) + ": " + num((v.mean - v.target) / v.std_error) + " se; ";
  }
  const double t = seconds_since(t0);
  o.pass = o.pass && t < 30.0;
  o.detail += num(t) + " s";
  return o;
}

Outcome step_identities(double& runtime) {
  RunConfig c;
  apply_setting(c, "grid.n", "256");
  c.dt = 1.0 / 128;
  c.T = 0.25;
  c.step.iter.l = 1.0 / 64;
  c.noise.seed = 1;
  const auto t0 = Clock::now();
  const RunResult r = run_pipeline(c);
  runtime = seconds_since(t0);
  Outcome o = pick(step_report_checks(r.reports.front()),
                   {"amplitude_reconstruction", "oscillation_identity", "div_v2", "stress_trace"});
  o.pass = o.pass && runtime < 300.0;
  o.detail += ", " + num(runtime) + " s";
  return o;
}

Outcome master_refinement() {
  std::vector<double> mr;
  for (int inv : {2048, 4096, 8192}) {
    RunConfig c;
    c.dt = 1.0 / inv;
    c.T = 1.0 / 256;
    c.frozen_noise = true;
    c.noise.seed = 1;
    mr.push_back(run_pipeline(c).reports.front().master_residual);
  }
  const double r1 = mr[0] / mr[1], r2 = mr[1] / mr[2];
  return {r1 >= 3.5 && r2 >= 3.5, "residuals " + num(mr[0]) + ", " + num(mr[1]) + ", " + num(mr[2]) + "; ratios " +
                                      num(r1) + ", " + num(r2)};
}

TimeSeriesField zeros(const PeriodicGrid& g, double t0, double dt, int frames) {
  return TimeSeriesField::uniform(t0, dt, std::vector<Field>(frames, Field(g, Rank::Vector)));
}

Field div_free_mode(const PeriodicGrid& g, int k1, int k2) {
  const int n = g.n();
  std::vector<double> v(2 * g.phys_size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double c = std::cos(kTwoPi * (k1 * double(i) / n + k2 * double(j) / n));
      v[i * n + j] = k2 * c;
      v[g.phys_size() + i * n + j] = -k1 * c;
    }
  return Field::from_physical(g, Rank::Vector, v);
}

Outcome v1_solver() {
  // Closed-form decay of one mode.
  double decay = 0.0;
  {
    const PeriodicGrid g(32);
    const double frakc = 5.0, dt = 0.003;
    const int frames = 20, k1 = 2, k2 = 3;
    const Field u = div_free_mode(g, k1, k2);
    auto tr = zero_noise_trajectory(g, 0.0, dt, frames);
    V1Problem p;
    p.v2 = zeros(g, 0.0, dt, frames);
    p.noise = &tr;
    p.frakc = frakc;
    p.v1_start = u;
    const auto sol = v1_solve(p);
    const double L = frakc + 4 * kPi * kPi * (k1 * k1 + k2 * k2);
    for (int k = 0; k < frames; ++k)
      decay = std::max(decay, (sol.v1.frames[k] - std::exp(-L * sol.v1.times[k]) * u).max_abs());
  }
  // A posteriori residual with live noise and a nontrivial paraproduct term.
  double residual = 0.0;
  {
    const PeriodicGrid g(64);
    NoiseParams np;
    np.seed = 11;
    const double dt = 1.0 / 256, t0 = -4 * dt;
    const int frames = 24;
    auto tr = noise_trajectory(g, np, t0, dt, frames, 1.0);
    tr.radius.assign(frames, 2.0);
    std::vector<Field> v2;
    for (int k = 0; k < frames; ++k) v2.push_back(helmholtz_project(div_free_mode(g, 1 + k % 3, 2) * 0.3));
    V1Problem p;
    p.v2 = TimeSeriesField::uniform(t0, dt, v2);
    p.noise = &tr;
    p.f_q = 20.0;
    p.frakc = 16.0;
    for (double r : v1_solve(p).residual) residual = std::max(residual, r);
  }
  // sup_t ||v1||_L2 decreases as the damping doubles.
  bool monotone = true;
  std::string norms;
  {
    const PeriodicGrid g(64);
    NoiseParams np;
    np.seed = 21;
    const double dt = 1.0 / 256;
    const int frames = 40;
    auto tr = noise_trajectory(g, np, 0.0, dt, frames, 1.0);
    tr.radius.assign(frames, 2.0);
    double prev = INFINITY;
    for (double c : {4.0, 8.0, 16.0, 32.0}) {
      V1Problem p;
      p.v2 = TimeSeriesField::uniform(0.0, dt, std::vector<Field>(frames, div_free_mode(g, 2, 1) * 0.5));
      p.noise = &tr;
      p.f_q = 20.0;
      p.frakc = c;
      double m = 0.0;
      for (const auto& f : v1_solve(p).v1.frames) m = std::max(m, f.l2_norm());
      monotone = monotone && m < prev;
      prev = m;
      norms += (norms.empty() ? "" : " > ") + num(m);
    }
  }
  return {decay <= 1e-10 && residual <= 1e-9 && monotone,
          "decay error " + num(decay) + ", mild residual " + num(residual) + ", norms " + norms};
}

Outcome parameter_validator() {
  auto failing = [](const IterationParams& p) {
    std::vector<std::string> out;
    for (const auto& c : check_paper_params(p))
      if (!c.ok) out.push_back(c.name);
    return out;
  };
  const IterationParams good = paper_compliant_example();
  if (!failing(good).empty()) return {false, "compliant ledger rejected: " + failing(good).front()};
  const std::vector<std::pair<std::string, std::function<void(IterationParams&)>>> cases{
      {"gamma = 1/113", [](IterationParams& p) { p.gamma = 1.0 / 112.0; }},
      {"alpha < gamma/54", [](IterationParams& p) { p.alpha = p.gamma / 53.0; }},
      {"alpha*b > 8/fa0", [](IterationParams& p) { p.fa = 0.3; }},
      {"alpha > 48*beta*b^2", [](IterationParams& p) { p.beta = 1.01 * p.alpha / (48.0 * double(p.b) * double(p.b)); }},
      {"b in 113N", [](IterationParams& p) { p.b += 1; }},
      {"a^(b*beta) >= 2+sqrt(2)", [](IterationParams& p) { p.log2_a *= 0.49; }},
  };
  int named = 0;
  std::string miss;
  for (const auto& [name, brk] : cases) {
    IterationParams p = good;
    brk(p);
    const auto bad = failing(p);
    if (bad.size() == 1 && bad.front() == name)
      ++named;
    else
      miss += " " + name;
  }
  // The remaining two constraints follow from the others and cannot fail alone.
  return {named == int(cases.size()),
          "compliant ledger accepted; " + std::to_string(named) + "/" + std::to_string(cases.size()) +
              " independent violations named" + (miss.empty() ? "" : "; missed:" + miss)};
}

std::map<std::string, std::string> binary_dumps(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".bin") {
      std::ifstream is(e.path(), std::ios::binary);
      out[fs::relative(e.path(), dir).string()] = std::string(std::istreambuf_iterator<char>(is), {});
    }
  return out;
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  std::map<std::string, std::string> runs[2];
  const char* threads[2] = {"1", "3"};
  for (int i = 0; i < 2; ++i) {
    const fs::path out = work / ("determinism_" + std::string(threads[i]));
    fs::remove_all(out);
    const std::string cmd = "CONVINT_THREADS=" + std::string(threads[i]) + " \"" + cli + "\" run --seed 7 --steps 2" +
                            " --dump-intermediates --out \"" + out.string() + "\" > \"" + out.string() + ".log\" 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, "run with CONVINT_THREADS=" + std::string(threads[i]) + " exited with " + std::to_string(rc)};
    runs[i] = binary_dumps(out);
  }
  if (runs[0].empty()) return {false, "no dumps written"};
  std::size_t same = 0;
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    if (it != runs[1].end() && it->second == bytes) ++same;
  }
  const bool ok = same == runs[0].size() && runs[0].size() == runs[1].size();
  return {ok, std::to_string(same) + "/" + std::to_string(runs[0].size()) + " dumps bit-identical (threads 1 vs 3)"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: convint_acceptance PATH_TO_CLI [WORKDIR]\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "convint_acceptance";
  fs::create_directories(work);

  RunConfig base;
  base.noise.seed = 1;
  std::vector<AuditCheck> spectral, besov, jets;
  double step_runtime = 0.0;

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"OU mode variance within 3 standard errors", ou_variance},
      {"geometric lemma reconstruction and positivity",
       [&] {
         jets = run_audit("jets", base);
         return pick(jets, {"geometric_reconstruction", "geometric_min_coefficient", "geometric_radius"});
       }},
      {"jet identities and second-order transport",
       [&] {
         return pick(jets, {"stationary_normalization", "moving_normalization", "stationary_curl_potential",
                            "moving_curl_potential", "h_derivative_order", "energy_transport_order",
                            "potential_transport_order"});
       }},
      {"anti-divergence identities and scaling",
       [&] {
         spectral = run_audit("spectral", base);
         return pick(spectral, {"antidivergence_right_inverse", "antidivergence_laplacian", "antidivergence_scaling_slope"});
       }},
      {"Bony completeness, H+L = Id, high-pass smoothing",
       [&] {
         besov = run_audit("besov", base);
         return pick(besov, {"bony_completeness", "high_plus_low_is_identity", "high_pass_smoothing_slope"});
       }},
      {"improved Hoelder decorrelation slopes",
       [&] { return pick(besov, {"improved_holder_slope_p1", "improved_holder_slope_p2"}); }},
      {"convex step identities on the n = 256 desk preset", [&] { return step_identities(step_runtime); }},
      {"master residual second order under dt halving", master_refinement},
      {"v1 solver decay, mild residual, damping monotonicity", v1_solver},
      {"parameter validator", parameter_validator},
      {"bit-identical dumps across CONVINT_THREADS", [&] { return determinism(cli, work); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << std::setw(2) << i + 1 << "] " << criteria[i].first << "  ("
              << o.detail << ")" << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
