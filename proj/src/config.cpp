// SPDX-License-Identifier: MIT
#include "convint/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "convint/iteration.hpp"

namespace convint {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw ConfigError(key + " = '" + value + "': " + why);
}

// Accepts "x" or "p/q".
double parse_double(const std::string& key, const std::string& v) {
  auto whole = [&](const std::string& s) {
    const std::string t = boost::trim_copy(s);
    std::size_t pos = 0;
    const double x = std::stod(t, &pos);
    if (t.empty() || pos != t.size()) throw 0;
    return x;
  };
  try {
    const auto slash = v.find('/');
    if (slash == std::string::npos) return whole(v);
    const double b = whole(v.substr(slash + 1));
    if (b == 0.0) throw 0;
    return whole(v.substr(0, slash)) / b;
  } catch (...) {
    bad(key, v, "expected a number");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw 0;
    return x;
  } catch (...) {
    bad(key, v, "expected an integer");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw 0;
    return x;
  } catch (...) {
    bad(key, v, "expected an unsigned integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = boost::to_lower_copy(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad(key, v, "expected true or false");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<std::string> parts;
  boost::split(parts, v, boost::is_any_of(","));
  std::vector<double> out;
  for (auto& p : parts) out.push_back(parse_double(key, boost::trim_copy(p)));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
  return s;
}

struct Entry {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Entry real(T RunConfig::*outer, double T::*field) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) { (c.*outer).*field = parse_double(k, v); },
          [=](const RunConfig& c) { return fmt((c.*outer).*field); }};
}

Entry real(double RunConfig::*field) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_double(k, v); },
          [=](const RunConfig& c) { return fmt(c.*field); }};
}

Entry flag(bool RunConfig::*field) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_bool(k, v); },
          [=](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

template <class Get>
Entry iter_real(Get get) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) { get(c.step.iter) = parse_double(k, v); },
          [=](const RunConfig& c) { return fmt(get(c.step.iter)); }};
}

template <class Get>
Entry jet_int(Get get) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) {
            get(c.step.jets) = static_cast<int>(parse_int(k, v));
          },
          [=](const RunConfig& c) { return std::to_string(get(c.step.jets)); }};
}

const std::map<std::string, Entry>& table() {
  static const std::map<std::string, Entry> t = [] {
    std::map<std::string, Entry> m;
    m["grid.n"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.n = int(parse_int(k, v)); },
                   [](const RunConfig& c) { return std::to_string(c.n); }};
    m["time.dt"] = real(&RunConfig::dt);
    m["time.T"] = real(&RunConfig::T);
    m["run.steps"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.steps = int(parse_int(k, v)); },
                      [](const RunConfig& c) { return std::to_string(c.steps); }};
    m["run.out"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.out = v; },
                    [](const RunConfig& c) { return c.out; }};
    m["run.dump_fields"] = flag(&RunConfig::dump_fields);
    m["run.dump_intermediates"] = flag(&RunConfig::dump_intermediates);
    m["run.v0_amplitude"] = real(&RunConfig::v0_amplitude);

    m["noise.fa"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                       c.noise.fa = parse_double(k, v);
                       c.step.iter.fa = c.noise.fa;
                     },
                     [](const RunConfig& c) { return fmt(c.noise.fa); }};
    m["noise.kappa"] = real(&RunConfig::noise, &NoiseParams::kappa);
    m["noise.seed"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.noise.seed = parse_u64(k, v); },
                       [](const RunConfig& c) { return std::to_string(c.noise.seed); }};
    m["noise.k_max"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                          c.noise.k_max = int(parse_int(k, v));
                        },
                        [](const RunConfig& c) { return std::to_string(c.noise.k_max); }};
    m["noise.frozen"] = flag(&RunConfig::frozen_noise);

    m["iteration.preset"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                               if (v == "desk") {
                                 c.step.iter = RunConfig().step.iter;
                                 c.paper_mode = false;
                               } else if (v == "paper") {
                                 c.step.iter = paper_compliant_example();
                                 c.paper_mode = true;
                               } else {
                                 bad(k, v, "unknown preset (desk, paper)");
                               }
                               c.step.iter.fa = c.noise.fa;
                             },
                             [](const RunConfig& c) { return std::string(c.paper_mode ? "paper" : "desk"); }};
    m["iteration.log2_a"] = iter_real([](auto& p) -> auto& { return p.log2_a; });
    m["iteration.b"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.step.iter.b = parse_int(k, v); },
                        [](const RunConfig& c) { return std::to_string(c.step.iter.b); }};
    m["iteration.alpha"] = iter_real([](auto& p) -> auto& { return p.alpha; });
    m["iteration.beta"] = iter_real([](auto& p) -> auto& { return p.beta; });
    m["iteration.gamma"] = iter_real([](auto& p) -> auto& { return p.gamma; });
    m["iteration.r"] = iter_real([](auto& p) -> auto& { return p.r; });
    m["iteration.aleph"] = iter_real([](auto& p) -> auto& { return p.aleph; });
    m["iteration.L"] = iter_real([](auto& p) -> auto& { return p.L; });
    m["iteration.frakm"] = iter_real([](auto& p) -> auto& { return p.frakm; });
    m["iteration.M_star"] = iter_real([](auto& p) -> auto& { return p.M_star; });
    m["iteration.delta1"] = iter_real([](auto& p) -> auto& { return p.delta1; });
    m["iteration.l"] = iter_real([](auto& p) -> auto& { return p.l; });
    m["iteration.frakc"] = iter_real([](auto& p) -> auto& { return p.frakc; });
    m["iteration.frakC"] = iter_real([](auto& p) -> auto& { return p.frakC; });
    m["iteration.lambdas"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                                c.step.iter.lambdas = parse_list(k, v);
                              },
                              [](const RunConfig& c) { return join(c.step.iter.lambdas); }};

    m["jets.sigma"] = jet_int([](auto& p) -> auto& { return p.sigma; });
    m["jets.eta"] = jet_int([](auto& p) -> auto& { return p.eta; });
    m["jets.nu"] = jet_int([](auto& p) -> auto& { return p.nu; });
    m["jets.mu"] = jet_int([](auto& p) -> auto& { return p.mu; });
    m["jets.theta"] = jet_int([](auto& p) -> auto& { return p.theta; });
    m["jets.bump_order"] = jet_int([](auto& p) -> auto& { return p.bump_order; });
    m["jets.mu0"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                       c.step.jets.mu0 = parse_double(k, v);
                     },
                     [](const RunConfig& c) { return fmt(c.step.jets.mu0); }};

    auto step_real = [](double StepConfig::*f) {
      return Entry{[=](RunConfig& c, const std::string& k, const std::string& v) { c.step.*f = parse_double(k, v); },
                   [=](const RunConfig& c) { return fmt(c.step.*f); }};
    };
    m["amplitude.clamp_margin"] = step_real(&StepConfig::clamp_margin);
    m["amplitude.rho_inflation"] = step_real(&StepConfig::rho_inflation);
    m["amplitude.dealias_factor"] = step_real(&StepConfig::dealias_factor);
    m["amplitude.kmax"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                             c.step.amplitude_kmax = int(parse_int(k, v));
                           },
                           [](const RunConfig& c) { return std::to_string(c.step.amplitude_kmax); }};
    m["amplitude.perturb"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                                c.step.perturb = parse_bool(k, v);
                              },
                              [](const RunConfig& c) { return std::string(c.step.perturb ? "true" : "false"); }};

    m["variance.samples"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                               c.variance_samples = int(parse_int(k, v));
                             },
                             [](const RunConfig& c) { return std::to_string(c.variance_samples); }};
    m["variance.fa"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.variance_fa = parse_list(k, v); },
                        [](const RunConfig& c) { return join(c.variance_fa); }};
    m["variance.zero_noise"] = flag(&RunConfig::variance_zero_noise);
    return m;
  }();
  return t;
}

}  // namespace

RunConfig::RunConfig() {
  step.iter.l = 1.0 / 32;
  step.jets.n = n;
}

void RunConfig::validate(bool pipeline) const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  need(n >= 8 && (n & (n - 1)) == 0, "grid.n must be a power of two >= 8, got " + std::to_string(n));
  need(dt > 0.0 && std::isfinite(dt), "time.dt must be positive");
  need(T > 0.0 && std::isfinite(T), "time.T must be positive");
  need(steps >= 1 && steps <= 8, "run.steps must lie in [1, 8]");
  need(!out.empty(), "run.out must not be empty");
  need(v0_amplitude >= 0.0, "run.v0_amplitude must be non-negative");
  need(variance_samples >= 10000, "variance.samples must be at least 10000");
  need(!variance_fa.empty(), "variance.fa must list at least one exponent");
  for (double fa : variance_fa) need(fa >= 0.0 && fa < 1.0 / 3.0, "variance.fa entries must lie in [0, 1/3)");
  try {
    noise.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  if (!pipeline) return;
  need(step.clamp_margin > 0.0 && step.clamp_margin < 1.0, "amplitude.clamp_margin must lie in (0, 1)");
  need(step.rho_inflation > 0.0, "amplitude.rho_inflation must be positive");
  need(step.dealias_factor >= 1.0, "amplitude.dealias_factor must be at least 1");
  if (paper_mode) return;  // the paper ledger is only checked, never run
  try {
    require(check_desk_params(step.iter, steps));
    JetParams jp = step.jets;
    jp.n = n;
    jp.validate(step.dirs);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const double l = step.iter.l;
  need(l > 2.0 / n, "iteration.l must exceed 2/n (mollifier support), got " + fmt(l));
  need(l > dt, "iteration.l must exceed time.dt, got l = " + fmt(l) + ", dt = " + fmt(dt));
  const double dt_max = 1.0 / (8.0 * step.jets.sigma * step.jets.eta);
  need(dt <= dt_max, "time.dt must resolve the oscillators: dt <= 1/(8 sigma eta) = " + fmt(dt_max));
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  const auto it = table().find(key);
  if (it == table().end()) throw ConfigError("unknown key '" + key + "'");
  it->second.set(c, key, boost::trim_copy(value));
  if (key == "grid.n") c.step.jets.n = c.n;
}

RunConfig load_config(const std::string& path) { return load_config(path, RunConfig()); }

RunConfig load_config(const std::string& path, RunConfig base) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply_setting(base, name, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError("nested section under '" + name + "'");
      apply_setting(base, name + "." + key, leaf.data());
    }
  }
  return base;
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream os;
  // The preset goes first: applying it resets the iteration ledger.
  os << "iteration.preset = " << table().at("iteration.preset").get(c) << "\n";
  for (const auto& [key, e] : table())
    if (key != "iteration.preset") os << key << " = " << e.get(c) << "\n";
  return os.str();
}

}  // namespace convint
