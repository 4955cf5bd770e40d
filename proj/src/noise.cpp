// SPDX-License-Identifier: MIT
#include "convint/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "convint/besov.hpp"
#include "convint/philox.hpp"
#include "convint/spectral.hpp"
#include "convint/threads.hpp"

namespace convint {

double NoiseParams::fa0() const { return std::min((1.0 - 3.0 * fa) / 6.0, 1.0 / 12.0); }

double NoiseParams::kappa_value() const {
  if (kappa >= 0.0) return kappa;
  const double upper = 1.0 / 3.0 - fa - fa0();
  return std::min(0.01, 0.5 * upper);
}

void NoiseParams::validate() const {
  if (!(fa >= 0.0 && fa < 1.0 / 3.0)) throw std::invalid_argument("noise roughness must lie in [0, 1/3)");
  const double k = kappa_value();
  if (!(k > 0.0 && k < 1.0 / 3.0 - fa - fa0())) throw std::invalid_argument("kappa must lie in (0, 1/3 - fa - fa0)");
}

double stationary_variance(double fa, int k1, int k2) {
  const double k2sum = double(k1) * k1 + double(k2) * k2;
  if (k2sum == 0.0) return 0.0;
  return std::pow(kTwoPi * std::sqrt(k2sum), 2.0 * fa) / (2.0 * (4.0 * kPi * kPi * k2sum + 1.0));
}

OuTransition ou_transition(double fa, int k1, int k2, double dt) {
  const double lam = 4.0 * kPi * kPi * (double(k1) * k1 + double(k2) * k2) + 1.0;
  return {std::exp(-lam * dt), std::sqrt(stationary_variance(fa, k1, k2) * -std::expm1(-2.0 * lam * dt))};
}

namespace {

int effective_kmax(const NoiseState& s) {
  const int cap = s.grid.n() / 2 - 1;
  return s.params.k_max < 0 ? cap : std::min(s.params.k_max, cap);
}

// Standard complex Gaussian (E|zeta|^2 = 1) for one mode and transition index.
cplx draw(const NoiseState& s, int k1, int k2, std::uint64_t step) {
  const PhiloxCounter ctr = {static_cast<std::uint32_t>(k1), static_cast<std::uint32_t>(k2),
                             static_cast<std::uint32_t>(step), s.stream};
  const auto g = philox_normal_pair(ctr, philox_key(s.params.seed));
  return cplx(g[0], g[1]) * std::sqrt(0.5);
}

// Calls f(k1, k2, index) for one representative of each {k, -k} pair.
template <class F>
void for_independent_modes(const NoiseState& s, F&& f) {
  const int km = effective_kmax(s);
  const int h = s.grid.half();
  for (int k2 = 0; k2 <= km; ++k2)
    for (int k1 = -km; k1 <= km; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      f(k1, k2, static_cast<std::size_t>(s.grid.row_of(k1)) * h + k2);
    }
}

void mirror_zero_column(NoiseState& s) {
  const int km = effective_kmax(s);
  const int h = s.grid.half();
  for (int k1 = 1; k1 <= km; ++k1) s.c[s.grid.row_of(-k1) * h] = std::conj(s.c[s.grid.row_of(k1) * h]);
}

}  // namespace

bool noise_mode_active(const NoiseState& s, int k1, int k2) {
  const int km = effective_kmax(s);
  return (k1 != 0 || k2 != 0) && std::abs(k1) <= km && std::abs(k2) <= km;
}

NoiseState ou_init_stationary(const PeriodicGrid& grid, const NoiseParams& params, std::uint32_t stream) {
  params.validate();
  NoiseState s;
  s.grid = grid;
  s.params = params;
  s.stream = stream;
  s.c.assign(grid.spec_size(), cplx(0.0));
  for_independent_modes(s, [&](int k1, int k2, std::size_t idx) {
    s.c[idx] = std::sqrt(stationary_variance(params.fa, k1, k2)) * draw(s, k1, k2, 0);
  });
  mirror_zero_column(s);
  return s;
}

void ou_step(NoiseState& s, double dt) {
  if (dt < 0.0) throw std::invalid_argument("ou_step: negative time step");
  if (dt == 0.0) return;
  ++s.step;
  for_independent_modes(s, [&](int k1, int k2, std::size_t idx) {
    const OuTransition tr = ou_transition(s.params.fa, k1, k2, dt);
    s.c[idx] = tr.decay * s.c[idx] + tr.innov_std * draw(s, k1, k2, s.step);
  });
  mirror_zero_column(s);
  s.t += dt;
}

Field ou_field(const NoiseState& s) {
  Field z(s.grid, Rank::Vector);
  const int h = s.grid.half();
  for (int r = 0; r < s.grid.n(); ++r)
    for (int k2 = 0; k2 < h; ++k2) {
      const int k1 = s.grid.k1(r);
      if (!noise_mode_active(s, k1, k2)) continue;
      const double kn = std::hypot(double(k1), double(k2));
      const cplx a = s.c[r * h + k2];
      // e_k = i (k2, -k1) / |k|
      z.comp(0)[r * h + k2] = cplx(0.0, k2 / kn) * a;
      z.comp(1)[r * h + k2] = cplx(0.0, -k1 / kn) * a;
    }
  return z;
}

std::array<double, 3> wick_counterterm(const NoiseState& s, double eps) {
  std::array<double, 3> e = {0.0, 0.0, 0.0};
  std::shared_ptr<const std::vector<double>> m;
  if (eps > 0.0) m = spatial_mollifier_table(s.grid, eps);
  const int h = s.grid.half();
  for (int r = 0; r < s.grid.n(); ++r)
    for (int k2 = 0; k2 < h; ++k2) {
      const int k1 = s.grid.k1(r);
      if (!noise_mode_active(s, k1, k2)) continue;
      const double kk = double(k1) * k1 + double(k2) * k2;
      // Columns k2 > 0 also stand for the mirrored mode -k.
      double w = (k2 == 0 ? 1.0 : 2.0) * stationary_variance(s.params.fa, k1, k2) / kk;
      if (m) w *= (*m)[r * h + k2] * (*m)[r * h + k2];
      e[0] += w * k2 * k2;
      e[1] -= w * k1 * k2;
      e[2] += w * k1 * k1;
    }
  return e;
}

Field wick_square(const NoiseState& s, double eps) {
  if (eps < 0.0 || (eps > 0.0 && eps < 1.0 / s.grid.n()))
    throw std::invalid_argument("wick_square: eps must be 0 or at least the grid spacing");
  Field z = ou_field(s);
  if (eps > 0.0) z = apply_spatial_mollifier(z, eps);
  Field sq = outer_self(z);
  const auto e = wick_counterterm(s, eps);
  for (int c = 0; c < 3; ++c) sq.comp(c)[0] -= e[c];
  return sq;
}

double cutoff_radius(double z_norm, double frakC) {
  if (z_norm < 0.0 || frakC < 1.0) throw std::invalid_argument("cutoff_radius: need z_norm >= 0 and frakC >= 1");
  return std::pow(1.0 + frakC * z_norm, 6);
}

MomentReport moment_audit(int n, const NoiseParams& params, int n_samples, const std::vector<double>& qs,
                          int time_steps, bool zero_state) {
  params.validate();
  if (n_samples < 1) throw std::invalid_argument("moment_audit: need samples");
  for (double q : qs)
    if (!(q >= 2.0)) throw std::invalid_argument("moment_audit: q must be >= 2");
  const PeriodicGrid g(n);
  const double fa = params.fa, fa0 = params.fa0(), kap = params.kappa_value();
  std::vector<double> nz(n_samples), nh(n_samples), nw(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    NoiseState s = ou_init_stationary(g, params, static_cast<std::uint32_t>(i));
    if (zero_state) std::fill(s.c.begin(), s.c.end(), cplx(0.0));
    nz[i] = holder_norm(ou_field(s), -fa - kap);
    Field w = wick_square(s, 0.0);
    if (zero_state) w = Field(g, Rank::SymTensor);
    nw[i] = holder_norm(w, -2.0 * fa - kap);
    std::vector<Field> frames;
    const double dt = 1.0 / time_steps;
    for (int k = 0; k <= time_steps; ++k) {
      if (k > 0) ou_step(s, dt);
      if (zero_state) std::fill(s.c.begin(), s.c.end(), cplx(0.0));
      frames.push_back(ou_field(s));
    }
    const double a = -fa - fa0 - kap;
    double sup = 0.0, semi = 0.0;
    for (int k = 0; k <= time_steps; ++k) {
      sup = std::max(sup, holder_norm(frames[k], a));
      for (int j = 0; j < k; ++j)
        semi = std::max(semi, holder_norm(frames[k] - frames[j], a) / std::pow((k - j) * dt, 0.5 * fa0));
    }
    nh[i] = sup + semi;
  });
  MomentReport rep;
  rep.n_samples = n_samples;
  std::vector<double> lz_q, lz;
  for (double q : qs) {
    auto mom = [q](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += std::pow(x, q);
      return std::pow(s / v.size(), 1.0 / q);
    };
    MomentRow r;
    r.q = q;
    r.moment_z = mom(nz);
    r.moment_holder = mom(nh);
    r.moment_wick = mom(nw);
    r.L_z = r.moment_z / std::sqrt(q - 1.0);
    r.L_holder = r.moment_holder / std::sqrt(q - 1.0);
    r.L_wick = r.moment_wick / (2.0 * q - 1.0);
    r.fitted_L = std::max({r.L_z, r.L_holder, r.L_wick});
    rep.rows.push_back(r);
    if (r.L_z > 0.0) {
      lz_q.push_back(q);
      lz.push_back(r.L_z);
    }
  }
  rep.growth_exponent = lz.size() >= 2 ? loglog_slope(lz_q, lz) : 0.0;
  return rep;
}

VarianceCheck variance_check(double fa, int samples, std::uint64_t seed, int n, bool zero_noise) {
  if (samples < 2) throw std::invalid_argument("variance_check: need at least 2 samples");
  const PeriodicGrid g(n);
  NoiseParams p;
  p.fa = fa;
  p.seed = seed;
  std::vector<double> x2(samples);
  parallel_for(samples, [&](std::size_t i) {
    if (zero_noise) return;
    const NoiseState s = ou_init_stationary(g, p, static_cast<std::uint32_t>(i));
    // <z, phi> = int z_2(x) e^{-2 pi i x1} dx by the grid quadrature.
    const auto z2 = ou_field(s).component_physical(1);
    cplx acc = 0.0;
    for (int r = 0; r < n; ++r) {
      const cplx w = std::polar(1.0, -kTwoPi * r / n);
      for (int c = 0; c < n; ++c) acc += z2[r * n + c] * w;
    }
    acc /= double(n) * n;
    x2[i] = std::norm(acc);
  });
  VarianceCheck v;
  v.fa = fa;
  v.samples = samples;
  v.target = std::pow(kTwoPi, 2.0 * fa) / (2.0 * (4.0 * kPi * kPi + 1.0));
  double s = 0.0, ss = 0.0;
  for (double x : x2) s += x;
  v.mean = s / samples;
  for (double x : x2) ss += (x - v.mean) * (x - v.mean);
  v.std_error = std::sqrt(ss / (samples - 1) / samples);
  v.degenerate = !(v.std_error > 0.0);
  v.pass = !v.degenerate && std::abs(v.mean - v.target) <= 3.0 * v.std_error;
  return v;
}

}  // namespace convint

namespace convint {

NoiseTrajectory noise_trajectory(const PeriodicGrid& grid, const NoiseParams& params, double t0, double dt,
                                 int frames, double frakC, bool frozen, std::uint32_t stream) {
  if (frames < 1 || !(dt > 0.0)) throw std::invalid_argument("noise_trajectory: need dt > 0 and frames >= 1");
  NoiseState s = ou_init_stationary(grid, params, stream);
  s.t = t0;
  std::vector<Field> zs;
  for (int k = 0; k < frames; ++k) {
    if (k > 0 && !frozen) ou_step(s, dt);
    zs.push_back(ou_field(s));
  }
  NoiseTrajectory tr;
  tr.z = TimeSeriesField::uniform(t0, dt, zs);
  std::vector<Field> sq(frames);
  tr.radius.assign(frames, 0.0);
  const double reg = -params.fa - params.fa0() - params.kappa_value();
  // Wick squares need the counterterm of the state, which is time independent.
  const auto e = wick_counterterm(s, 0.0);
  parallel_for(frames, [&](std::size_t k) {
    sq[k] = outer_self(zs[k]);
    for (int c = 0; c < 3; ++c) sq[k].comp(c)[0] -= e[c];
    tr.radius[k] = cutoff_radius(holder_norm(zs[k], reg), frakC);
  });
  tr.z2 = TimeSeriesField::uniform(t0, dt, std::move(sq));
  return tr;
}

NoiseTrajectory zero_noise_trajectory(const PeriodicGrid& grid, double t0, double dt, int frames) {
  NoiseTrajectory tr;
  tr.z = TimeSeriesField::uniform(t0, dt, std::vector<Field>(frames, Field(grid, Rank::Vector)));
  tr.z2 = TimeSeriesField::uniform(t0, dt, std::vector<Field>(frames, Field(grid, Rank::SymTensor)));
  tr.radius.assign(frames, 1.0);
  return tr;
}

}  // namespace convint
