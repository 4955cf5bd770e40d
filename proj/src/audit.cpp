// SPDX-License-Identifier: MIT
#include "convint/audit.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "convint/besov.hpp"
#include "convint/io.hpp"
#include "convint/jets.hpp"
#include "convint/noise.hpp"
#include "convint/pipeline.hpp"
#include "convint/spectral.hpp"

namespace convint {

namespace {

constexpr double kBig = std::numeric_limits<double>::infinity();
constexpr double kTiny = std::numeric_limits<double>::min();

class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}
  void range(const std::string& check, double value, double lo, double hi) {
    out_.push_back({name_, check, value, lo, hi, std::isfinite(value) && value >= lo && value <= hi});
  }
  void at_most(const std::string& check, double value, double hi) { range(check, value, 0.0, hi); }
  void at_least(const std::string& check, double value, double lo) { range(check, value, lo, kBig); }
  std::vector<AuditCheck> take() { return std::move(out_); }

 private:
  std::string name_;
  std::vector<AuditCheck> out_;
};

Field random_field(const PeriodicGrid& g, Rank r, int kmax, unsigned seed, bool zero_mean = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(g, r);
  for (int c = 0; c < f.ncomp(); ++c)
    for (int k1 = -kmax; k1 <= kmax; ++k1)
      for (int k2 = 0; k2 <= kmax; ++k2) f.at(c, k1, k2) = cplx(nd(rng), nd(rng));
  Field out = Field::from_physical(g, r, f.to_physical());  // restores Hermitian symmetry
  if (zero_mean)
    for (int c = 0; c < out.ncomp(); ++c) out.comp(c)[0] = 0.0;
  return out;
}

Field sample(const PeriodicGrid& g, Rank r, const std::vector<std::function<double(double, double)>>& fs) {
  const int n = g.n();
  std::vector<double> vals(g.phys_size() * fs.size());
  for (std::size_t c = 0; c < fs.size(); ++c)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) vals[c * g.phys_size() + i * n + j] = fs[c](double(i) / n, double(j) / n);
  return Field::from_physical(g, r, vals);
}

double rel(const Field& a, const Field& b) {
  const double s = std::max(b.max_abs(), 1e-300);
  return (a - b).max_abs() / s;
}

// Observed orders log2(e_k / e_{k+1}); returns the smallest.
double min_order(const std::vector<double>& errs) {
  double m = kBig;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) m = std::min(m, std::log2(errs[i] / errs[i + 1]));
  return m;
}

// ---- spectral -------------------------------------------------------------

std::vector<AuditCheck> spectral_suite(const RunConfig& cfg) {
  Suite s("spectral");
  const PeriodicGrid g(cfg.n);
  const int n = cfg.n, kmax = n / 2 - 1;

  {
    std::mt19937_64 rng(cfg.noise.seed);
    std::normal_distribution<double> nd;
    std::vector<double> vals(2 * g.phys_size());
    for (double& x : vals) x = nd(rng);
    const auto back = Field::from_physical(g, Rank::Vector, vals).to_physical();
    double e = 0.0, m = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) e = std::max(e, std::abs(back[i] - vals[i])), m = std::max(m, std::abs(vals[i]));
    s.at_most("fft_round_trip", e / m, 1e-13);
  }
  {
    const int a = 1, b = std::min(2, kmax);
    const Field f = sample(g, Rank::Scalar, {[&](double x, double y) { return std::sin(kTwoPi * (a * x + b * y)); }});
    const Field d1 = sample(g, Rank::Scalar,
                            {[&](double x, double y) { return kTwoPi * a * std::cos(kTwoPi * (a * x + b * y)); }});
    const Field d22 = sample(g, Rank::Scalar, {[&](double x, double y) {
                               return -kTwoPi * kTwoPi * b * b * std::sin(kTwoPi * (a * x + b * y));
                             }});
    s.at_most("derivative_single_mode", rel(derivative(f, 0), d1), 1e-12);
    s.at_most("second_derivative_single_mode", rel(derivative(f, 1, 2), d22), 1e-12);
    Field nyq(g, Rank::Scalar);
    nyq.at(0, -n / 2, 0) = 1.0;
    s.at_most("odd_derivative_drops_nyquist", derivative(nyq, 0).max_abs(), 0.0);
  }
  {
    // Band limits add up below the Nyquist row, so the grid product is exact.
    const int kb = std::max(1, kmax / 2);
    const Field f = random_field(g, Rank::Scalar, kb, 11), h = random_field(g, Rank::Scalar, kb, 12);
    const auto fv = f.to_physical(), hv = h.to_physical();
    std::vector<double> p(fv.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = fv[i] * hv[i];
    s.at_most("product_band_limited", rel(multiply(f, h), Field::from_physical(g, Rank::Scalar, p)), 1e-13);
    const Field c1 = sample(g, Rank::Scalar, {[](double x, double) { return std::cos(kTwoPi * x); }});
    const Field c2 = sample(g, Rank::Scalar, {[](double x, double) { return 0.5 + 0.5 * std::cos(2 * kTwoPi * x); }});
    s.at_most("product_trig_identity", rel(multiply(c1, c1), c2), 1e-14);
  }
  {
    const Field v = random_field(g, Rank::Vector, kmax, 21, true);
    const Field pv = helmholtz_project(v);
    s.at_most("helmholtz_divergence_free", divergence(pv).max_abs() / v.max_abs(), 1e-12);
    s.at_most("helmholtz_idempotent", rel(helmholtz_project(pv), pv), 1e-13);
    const Field phi = random_field(g, Rank::Scalar, kmax, 22);
    s.at_most("helmholtz_kills_gradients", helmholtz_project(gradient(phi)).max_abs() / gradient(phi).max_abs(),
              1e-13);
  }
  {
    const Field v = random_field(g, Rank::Vector, kmax, 31);
    const Field r = antidivergence(v);
    s.at_most("antidivergence_right_inverse", (divergence(r) - remove_mean(v)).max_abs() / v.max_abs(), 1e-10);
    s.at_most("antidivergence_trace_free", trace(r).max_abs() / v.max_abs(), 1e-13);
    const Field w = helmholtz_project(random_field(g, Rank::Vector, kmax, 32, true));
    s.at_most("antidivergence_laplacian", rel(antidivergence(laplacian(w)), sym_gradient(w)), 1e-10);
  }
  {
    // ||R f(s.)||_L2 ~ s^{-1} for a fixed mean-zero profile.
    const PeriodicGrid gs(128);
    const Field prof = random_field(gs, Rank::Vector, 3, 8, true);
    std::vector<double> xs, ys;
    for (int sc : {2, 4, 8, 16}) {
      Field fs(gs, Rank::Vector);
      for (int c = 0; c < 2; ++c)
        for (int k1 = -3; k1 <= 3; ++k1)
          for (int k2 = 0; k2 <= 3; ++k2) fs.at(c, sc * k1, sc * k2) = prof.at(c, k1, k2);
      xs.push_back(sc);
      ys.push_back(antidivergence(fs).l2_norm());
    }
    s.range("antidivergence_scaling_slope", loglog_slope(xs, ys), -1.05, -0.95);
  }
  {
    const Field v = random_field(g, Rank::Vector, kmax, 41);
    const Field A = random_field(g, Rank::Tensor, kmax, 42, true);
    const Field vA = vecmat(v, A);
    s.at_most("bilinear_divergence", (divergence(antidivergence_bilinear(v, A)) - remove_mean(vA)).max_abs() /
                                         vA.max_abs(), 1e-10);
  }
  {
    const Field f = random_field(g, Rank::Scalar, kmax, 51);
    s.at_most("heat_semigroup", rel(heat_apply(heat_apply(f, 1e-3), 2e-3), heat_apply(f, 3e-3)), 1e-13);
  }
  {
    const Field f = random_field(g, Rank::SymTensor, kmax, 61);
    static std::atomic<int> counter{0};
    const auto path = std::filesystem::temp_directory_path() /
                      ("convint_audit_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()) +
                       "_" + std::to_string(counter++) + ".bin");
    io::write_field(path.string(), f);
    const Field back = io::read_field(path.string());
    std::filesystem::remove(path);
    s.at_most("dump_round_trip", rel(back, f), 1e-13);
  }
  return s.take();
}

// ---- besov ----------------------------------------------------------------

std::vector<AuditCheck> besov_suite(const RunConfig&) {
  Suite s("besov");
  {
    double e = 0.0;
    for (int n : {8, 64, 256}) {
      const DyadicPartition part(n);
      for (double r = 0.0; r <= n; r += 0.173) {
        double sum = 0.0;
        for (int j = -1; j <= part.j_max(); ++j) sum += part.symbol(j, r);
        e = std::max(e, std::abs(sum - 1.0));
      }
    }
    s.at_most("partition_of_unity", e, 1e-12);
  }
  const PeriodicGrid g(64);
  {
    const Field f = random_field(g, Rank::Scalar, 31, 1);
    Field sum(g, Rank::Scalar);
    for (const Field& b : lp_blocks(f)) sum += b;
    s.at_most("block_reconstruction", rel(sum, f), 1e-12);
  }
  {
    double e = 0.0;
    std::mt19937 rng(5);
    for (int t = 0; t < 100; ++t) {
      const int ka = 2 + int(rng() % 30), kb = 2 + int(rng() % 30);
      const Field f = random_field(g, Rank::Scalar, ka, 100 + 2 * t), h = random_field(g, Rank::Scalar, kb, 101 + 2 * t);
      const auto sp = paraproduct_split(f, h);
      const Field p = multiply(f, h);
      e = std::max(e, rel(sp.lower + sp.resonant + sp.upper, p));
    }
    s.at_most("bony_completeness", e, 1e-12);
  }
  {
    const PeriodicGrid gb(256);
    const Field f = sample(gb, Rank::Scalar, {[](double x, double) { return std::cos(kTwoPi * 4 * x); }});
    const Field h = sample(gb, Rank::Scalar, {[](double, double y) { return std::cos(kTwoPi * 64 * y); }});
    const auto sp = paraproduct_split(f, h);
    const Field fh = multiply(f, h);
    s.at_most("paraproduct_separated_blocks",
              std::max({(sp.lower - fh).max_abs(), sp.resonant.max_abs(), sp.upper.max_abs()}), 1e-13);
  }
  {
    const Field f = random_field(g, Rank::Scalar, 31, 9);
    double e = 0.0;
    for (double J : {0.3, 3.7, 11.0, 40.0})
      e = std::max(e, rel(freq_project(f, J, FreqPart::High) + freq_project(f, J, FreqPart::Low), f));
    s.at_most("high_plus_low_is_identity", e, 1e-14);
  }
  {
    // Lacunary data, bounded in C^1 and no smoother: ||H_J f||_{C^0} ~ J^{-1} ||f||_{C^1}.
    const PeriodicGrid gl(256);
    const Field f = sample(gl, Rank::Scalar, {[](double x, double) {
                             double v = 0;
                             for (int j = 0; j <= 6; ++j) v += std::exp2(-j) * std::cos(kTwoPi * std::exp2(j) * x);
                             return v;
                           }});
    std::vector<double> Js{4, 8, 16, 32}, r;
    for (double J : Js) r.push_back(holder_norm(freq_project(f, J, FreqPart::High), 0.0) / holder_norm(f, 1.0));
    s.range("high_pass_smoothing_slope", loglog_slope(Js, r), -1.2, -0.8);
  }
  {
    const PeriodicGrid gh(16);
    const Field f = sample(gh, Rank::Scalar, {[](double x, double) { return std::sin(kTwoPi * x); }});
    auto a = [](double x, double y) { return 1.0 + 0.5 * std::sin(x + 0.5 * y); };
    const std::vector<double> sig{4, 8, 16, 32, 64};
    s.range("improved_holder_slope_p1", improved_holder_check(a, f, 1.0, sig).slope, -kBig, -1.0 + 0.15);
    s.range("improved_holder_slope_p2", improved_holder_check(a, f, 2.0, sig).slope, -kBig, -0.5 + 0.15);
    const Field c = sample(gh, Rank::Scalar, {[](double x, double y) { return std::sin(kTwoPi * x) + 0.3 * std::cos(kTwoPi * y); }});
    double d = 0.0;
    for (double x : improved_holder_check([](double, double) { return 2.0; }, c, 1.0, {2, 4, 8}).defects)
      d = std::max(d, x);
    s.at_most("improved_holder_constant_amplitude", d, 1e-12);
  }
  {
    const Field c = sample(g, Rank::Scalar, {[](double, double) { return 2.5; }});
    s.at_most("mollifier_keeps_constants", rel(mollify_space(c, 1.0 / 8), c), 1e-14);
    double sum = 0.0;
    for (double w : time_mollifier_weights(1.0 / 32, 1.0 / 512)) sum += w;
    s.at_most("time_mollifier_mass", std::abs(sum - 1.0), 1e-14);
  }
  return s.take();
}

// ---- noise ----------------------------------------------------------------

std::vector<AuditCheck> noise_suite(const RunConfig& cfg) {
  Suite s("noise");
  for (double fa : cfg.variance_fa) {
    const VarianceCheck v = variance_check(fa, cfg.variance_samples, cfg.noise.seed, 16, cfg.variance_zero_noise);
    const double z = v.degenerate ? kBig : std::abs(v.mean - v.target) / v.std_error;
    std::ostringstream name;
    name << "mode_variance_fa_" << fa;
    s.at_most(name.str(), z, 3.0);
  }
  {
    double e = 0.0;
    for (double fa : {0.0, 0.125, 0.3})
      for (double dt : {1e-4, 0.01, 1.0})
        for (auto [k1, k2] : std::vector<std::pair<int, int>>{{1, 0}, {3, -5}, {20, 31}}) {
          const auto tr = ou_transition(fa, k1, k2, dt);
          const double s2 = stationary_variance(fa, k1, k2);
          e = std::max(e, std::abs(tr.decay * tr.decay * s2 + tr.innov_std * tr.innov_std - s2) / s2);
        }
    s.at_most("transition_keeps_stationary_variance", e, 1e-12);
  }
  const PeriodicGrid g(cfg.n);
  NoiseState st = ou_init_stationary(g, cfg.noise);
  {
    double div = 0.0, mean = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Field z = ou_field(st);
      div = std::max(div, divergence(z).max_abs() / z.max_abs());
      mean = std::max({mean, std::abs(z.mean(0)), std::abs(z.mean(1))});
      ou_step(st, 0.01);
    }
    s.at_most("ou_divergence_free", div, 1e-12);
    s.at_most("ou_mean_zero", mean, 0.0);
  }
  {
    NoiseState a = ou_init_stationary(g, cfg.noise), b = ou_init_stationary(g, cfg.noise);
    ou_step(a, 0.1);
    ou_step(b, 0.1);
    s.at_most("same_seed_same_bits", (ou_field(a) - ou_field(b)).max_abs(), 0.0);
    NoiseParams other = cfg.noise;
    other.seed ^= 0x9e3779b97f4a7c15ULL;
    s.at_least("seed_changes_sample", (ou_field(ou_init_stationary(g, other)) - ou_field(a)).max_abs(), kTiny);
  }
  {
    // Pointwise mean of the Wick square vanishes.
    const PeriodicGrid gw(16);
    NoiseParams p = cfg.noise;
    const int N = 4000;
    double m[3] = {0, 0, 0}, m2[3] = {0, 0, 0};
    for (int i = 0; i < N; ++i) {
      const auto vals = wick_square(ou_init_stationary(gw, p, i), 1.0 / 8).to_physical();
      for (int c = 0; c < 3; ++c) {
        const double x = vals[c * gw.phys_size() + 37];
        m[c] += x / N;
        m2[c] += x * x / N;
      }
    }
    double worst = 0.0;
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(m[c]) / std::sqrt((m2[c] - m[c] * m[c]) / (N - 1)));
    s.at_most("wick_square_mean_zero_in_std_errors", worst, 3.0);
  }
  s.at_most("cutoff_radius_at_zero", std::abs(cutoff_radius(0.0, 2.0) - 1.0), 0.0);
  s.at_most("cutoff_radius_sixth_power", std::abs(cutoff_radius(1.0, 2.0) - 729.0), 1e-12);
  {
    const auto tr = noise_trajectory(g, cfg.noise, 0.0, 0.01, 4, 2.0, true);
    double e = 0.0;
    for (const auto& z : tr.z.frames) e = std::max(e, (z - tr.z.frames.front()).max_abs());
    s.at_most("frozen_trajectory_is_constant", e, 0.0);
  }
  return s.take();
}

// ---- jets -----------------------------------------------------------------

std::vector<AuditCheck> jets_suite(const RunConfig& cfg) {
  Suite s("jets");
  const DirectionSet& d = cfg.step.dirs;
  {
    std::mt19937_64 rng(cfg.noise.seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    double worst = 0.0, minc = kBig;
    for (int t = 0; t < 1000; ++t) {
      const double u[3] = {nd(rng), nd(rng), nd(rng)};
      const double r = d.r_star * std::cbrt(ud(rng)) / std::sqrt(u[0] * u[0] + 2 * u[1] * u[1] + u[2] * u[2]);
      const Sym2 R{1.0 + r * u[0], r * u[1], 1.0 + r * u[2]};
      const Sym2 c = geometric_coefficients(R, d);
      Sym2 back{};
      for (std::size_t i = 0; i < d.size(); ++i) {
        back[0] += c[i] * d.xi[i][0] * d.xi[i][0];
        back[1] += c[i] * d.xi[i][0] * d.xi[i][1];
        back[2] += c[i] * d.xi[i][1] * d.xi[i][1];
        minc = std::min(minc, c[i]);
      }
      for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(back[i] - R[i]));
    }
    s.at_most("geometric_reconstruction", worst, 1e-12);
    s.at_least("geometric_min_coefficient", minc, kTiny);
    s.at_least("geometric_radius", d.r_star, 0.25);
  }

  JetParams jp = cfg.step.jets;
  jp.n = cfg.n;
  const JetFamily fam(jp, d);
  const double sig = jp.sigma;
  {
    double norm = 0.0, mean = 0.0, curl = 0.0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const auto& J = fam.stationary(i);
      const Field WW = outer_self(J.W);
      norm = std::max({norm, std::abs(WW.mean(0) - J.xi[0] * J.xi[0]), std::abs(WW.mean(1) - J.xi[0] * J.xi[1]),
                       std::abs(WW.mean(2) - J.xi[1] * J.xi[1])});
      mean = std::max({mean, std::abs(J.W.mean(0)), std::abs(J.W.mean(1))});
      const Field lhs = perp_gradient(J.Psi);
      curl = std::max(curl, (lhs - (J.W + J.Wc)).max_abs() / (1.0 + lhs.max_abs()));
    }
    s.at_most("stationary_normalization", norm, 1e-8);
    s.at_most("stationary_mean_zero", mean, 0.0);
    s.at_most("stationary_curl_potential", curl, 1e-10);
  }
  {
    const JetFields jf = build_moving_jets(fam, 0.0, 1.0 / 64.0, 12);
    double curl = 0.0, norm = 0.0, overlap = 0.0;
    for (std::size_t i = 0; i < fam.size(); ++i)
      for (std::size_t k = 0; k < jf.times.size(); ++k) {
        const Field& W = jf.W[i].frames[k];
        const Field lhs = perp_gradient(jf.Psi[i].frames[k]) * (1.0 / sig);
        curl = std::max(curl, (lhs - (W + jf.Wc[i].frames[k])).max_abs() / (1.0 + lhs.max_abs()));
        const Field WW = outer_self(W);
        const Vec2 xi = fam.stationary(i).xi;
        norm = std::max({norm, std::abs(WW.mean(0) - xi[0] * xi[0]), std::abs(WW.mean(1) - xi[0] * xi[1])});
        for (std::size_t j = i + 1; j < fam.size(); ++j)
          overlap = std::max(overlap, dot(W * jf.g[i][k], jf.W[j].frames[k] * jf.g[j][k]).max_abs());
      }
    s.at_most("moving_curl_potential", curl, 1e-10);
    s.at_most("moving_normalization", norm, 1e-8);
    s.at_most("moving_disjoint_supports", overlap, 0.0);
  }
  const Oscillators& o = fam.osc();
  {
    const double period = 1.0 / jp.sigma;
    const int N = 1 << 16;
    double s1 = 0.0, s2 = 0.0, hmax = 0.0, overlap = 0.0;
    for (std::size_t i = 0; i < o.count(); ++i) {
      double a = 0.0, b = 0.0;
      for (int k = 0; k < N; ++k) {
        const double t = (k + 0.5) * period / N;
        a += o.g(i, t) * period / N;
        b += o.g(i, t) * o.g(i, t) * period / N;
        hmax = std::max(hmax, std::abs(o.h(i, t)));
        for (std::size_t j = i + 1; j < o.count(); ++j) overlap = std::max(overlap, std::abs(o.g(i, t) * o.g(j, t)));
      }
      s1 = std::max(s1, std::abs(a));
      s2 = std::max(s2, std::abs(b - period));
    }
    s.at_most("oscillator_mean_zero", s1, 1e-9);
    s.at_most("oscillator_unit_energy", s2, 1e-8);
    s.at_most("oscillator_h_bounded", hmax, 1.0);
    s.at_most("oscillators_disjoint_in_time", overlap, 0.0);
  }
  {
    // d/dt (h / sigma) = g^2 - 1 by centred differences.
    std::vector<double> errs;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
      double e = 0.0;
      for (std::size_t i = 0; i < o.count(); ++i)
        for (int k = 0; k < 200; ++k) {
          const double t = 0.0123 + k * 0.0025;
          const double dh = (o.h(i, t + dt) - o.h(i, t - dt)) / (2 * dt) / jp.sigma;
          e = std::max(e, std::abs(dh - (o.g(i, t) * o.g(i, t) - 1.0)));
        }
      errs.push_back(e);
    }
    s.at_least("h_derivative_order", min_order(errs), 1.8);
  }
  {
    // Transport identities for the moving jets at a time where direction 1 is active.
    const std::size_t i = std::min<std::size_t>(1, fam.size() - 1);
    double t = 0.0;
    for (int k = 0; k < 4000; ++k)
      if (std::abs(o.g(i, k / 4000.0)) > 1.0) {
        t = k / 4000.0;
        break;
      }
    const Vec2 xi = fam.stationary(i).xi;
    const double fac = double(jp.theta) * o.g(i, t) / jp.sigma;
    const Field rhs_energy = divergence(outer_self(fam.W(i, t))) * fac;
    const Field rhs_psi = fam.dt_moving(fam.Psi(i, t), i, t);
    std::vector<double> ea, eb;
    for (double dt : {1.0 / 2048, 1.0 / 4096, 1.0 / 8192}) {
      const Field dW2 =
          (dot(fam.W(i, t + dt), fam.W(i, t + dt)) - dot(fam.W(i, t - dt), fam.W(i, t - dt))) * (0.5 / dt);
      const Field lhs = Field::from_components({dW2 * xi[0], dW2 * xi[1]}, Rank::Vector);
      ea.push_back(rel(lhs, rhs_energy));
      eb.push_back(rel((fam.Psi(i, t + dt) - fam.Psi(i, t - dt)) * (0.5 / dt), rhs_psi));
    }
    s.at_least("energy_transport_order", min_order(ea), 1.8);
    s.at_least("potential_transport_order", min_order(eb), 1.8);
  }
  return s.take();
}

// ---- step -----------------------------------------------------------------

std::vector<AuditCheck> step_suite(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.steps = 1;
  const RunResult r = run_pipeline(c);
  auto checks = step_report_checks(r.reports.front());
  for (auto& ch : checks) ch.suite = "step";
  return checks;
}

}  // namespace

std::vector<AuditCheck> step_report_checks(const StepReport& r) {
  Suite s("step");
  // Level 1 uses the absolute tolerances. Later levels divide by the size of the
  // terms in each identity, since round-off grows with the stress.
  const bool abs = r.q <= 1;
  auto scaled = [&](const std::string& name, double value, double scale, double tol) {
    if (abs)
      s.at_most(name, value, tol);
    else
      s.at_most(name + "_relative", value / std::max(1.0, scale), tol);
  };
  scaled("amplitude_reconstruction", r.phoid_residual, r.rho_C0, 1e-10);
  scaled("oscillation_identity", r.oscillation_residual, std::max(r.rho_C0, r.wp_C0 * r.wp_C0), 1e-10);
  scaled("curl_form", r.curl_form_residual, r.wp_C0, 1e-10);
  scaled("div_v2", r.div_v2, r.after.v2_C1, 1e-10);
  scaled("mean_v2", r.mean_v2, r.after.v2_C1, 1e-12);
  s.at_most("div_v1", r.div_v1, 1e-10);
  s.at_most("mean_v1", r.mean_v1, 1e-12);
  s.at_most("stress_trace", r.trace_R, 1e-12);
  s.at_most("v1_mild_residual", r.v1_residual, 1e-9);
  if (r.q == 1) s.at_most("level0_residual", r.input_residual, 1e-10);
  double bad = 0.0;
  for (const auto& [k, v] : r.ledger)
    if (!std::isfinite(v)) bad += 1.0;
  s.at_most("ledger_nonfinite_terms", bad, 0.0);
  return s.take();
}

const std::vector<std::string>& audit_suites() {
  static const std::vector<std::string> names{"spectral", "besov", "noise", "jets", "step"};
  return names;
}

std::vector<AuditCheck> run_audit(const std::string& suite, const RunConfig& cfg) {
  if (suite == "spectral") return spectral_suite(cfg);
  if (suite == "besov") return besov_suite(cfg);
  if (suite == "noise") return noise_suite(cfg);
  if (suite == "jets") return jets_suite(cfg);
  if (suite == "step") return step_suite(cfg);
  throw std::invalid_argument("unknown audit suite '" + suite + "' (spectral, besov, noise, jets, step)");
}

bool all_pass(const std::vector<AuditCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

void write_audit_csv(const std::string& path, const std::vector<AuditCheck>& checks) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17) << "suite,check,value,lo,hi,pass\n";
  for (const auto& c : checks)
    os << c.suite << "," << c.name << "," << c.value << "," << c.lo << "," << c.hi << "," << (c.pass ? 1 : 0) << "\n";
}

}  // namespace convint
