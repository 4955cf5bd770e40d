// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "convint/besov.hpp"
#include "convint/noise.hpp"
#include "convint/philox.hpp"
#include "convint/spectral.hpp"
#include "test_util.hpp"

using namespace convint;

namespace {

struct Stats {
  double mean = 0, var = 0, se = 0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  for (double x : v) s.mean += x / v.size();
  for (double x : v) s.var += (x - s.mean) * (x - s.mean) / (v.size() - 1);
  s.se = std::sqrt(s.var / v.size());
  return s;
}

}  // namespace

TEST(Philox, KnownAnswers) {
  auto r = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r, (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  r = philox4x32_10({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
  EXPECT_EQ(r, (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  r = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(r, (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(NoiseParams, DerivedExponents) {
  NoiseParams p;
  EXPECT_DOUBLE_EQ(p.fa0(), 1.0 / 12);
  p.fa = 0.25;
  EXPECT_DOUBLE_EQ(p.fa0(), 1.0 / 24);
  EXPECT_NO_THROW(p.validate());
  p.fa = 1.0 / 3;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.fa = 0.1;
  p.kappa = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(OU, StationaryVarianceFormula) {
  EXPECT_DOUBLE_EQ(stationary_variance(0.0, 0, 2), 1.0 / (2 * (16 * M_PI * M_PI + 1)));
  EXPECT_DOUBLE_EQ(stationary_variance(0.3, 0, 0), 0.0);
  EXPECT_NEAR(stationary_variance(0.25, 1, 0), std::pow(2 * M_PI, 0.5) / (2 * (4 * M_PI * M_PI + 1)), 1e-16);
}

TEST(OU, StateInvariants) {
  PeriodicGrid g(32);
  NoiseParams p;
  p.fa = 0.125;
  p.seed = 42;
  NoiseState s = ou_init_stationary(g, p);
  for (int step = 0; step < 3; ++step) {
    Field z = ou_field(s);
    EXPECT_EQ(z.mean(0), 0.0);
    EXPECT_EQ(z.mean(1), 0.0);
    EXPECT_LT(divergence(z).max_abs() / z.max_abs(), 1e-12);
    for (int k1 = 1; k1 < 16; ++k1) EXPECT_EQ(s.amp(-k1, 0), std::conj(s.amp(k1, 0)));
    EXPECT_EQ(s.amp(-16, 3), 0.0);  // Nyquist truncated
    ou_step(s, 0.01);
  }
  NoiseState s2 = s;
  ou_step(s2, 0.0);
  EXPECT_EQ(s2.c, s.c);
  EXPECT_THROW(ou_step(s2, -0.1), std::invalid_argument);
}

TEST(OU, ReproducibleBySeed) {
  PeriodicGrid g(16);
  NoiseParams p;
  p.seed = 7;
  NoiseState a = ou_init_stationary(g, p), b = ou_init_stationary(g, p);
  ou_step(a, 0.1);
  ou_step(b, 0.1);
  EXPECT_EQ(a.c, b.c);
  p.seed = 8;
  EXPECT_NE(ou_init_stationary(g, p).c, ou_init_stationary(g, NoiseParams{0.0, -1.0, 7, -1}).c);
}

TEST(OU, TransitionPreservesStationaryVariance) {
  for (double fa : {0.0, 0.125, 0.3})
    for (double dt : {1e-4, 0.01, 1.0})
      for (auto [k1, k2] : std::vector<std::pair<int, int>>{{1, 0}, {3, -5}, {20, 31}}) {
        auto tr = ou_transition(fa, k1, k2, dt);
        const double s2 = stationary_variance(fa, k1, k2);
        EXPECT_NEAR(tr.decay * tr.decay * s2 + tr.innov_std * tr.innov_std, s2, 1e-12 * s2);
      }
}

TEST(OU, ModeVarianceMonteCarlo) {
  // fa = 0, k = (0, 2): E|c_k|^2 = 1 / (2 (16 pi^2 + 1)).
  PeriodicGrid g(8);
  NoiseParams p;
  p.seed = 3;
  std::vector<double> v;
  for (int i = 0; i < 10000; ++i) v.push_back(std::norm(ou_init_stationary(g, p, i).amp(0, 2)));
  auto st = stats(v);
  EXPECT_NEAR(st.mean, 1.0 / (2 * (16 * M_PI * M_PI + 1)), 3 * st.se);
}

TEST(OU, VarianceCheckAgainstClosedForm) {
  for (double fa : {0.0, 0.125, 0.25}) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = variance_check(fa, 10000, 2024);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_TRUE(r.pass) << fa << " mean " << r.mean << " target " << r.target << " se " << r.std_error;
    EXPECT_LT(secs, 30.0);
  }
}

TEST(OU, LagAutocovariance) {
  PeriodicGrid g(8);
  NoiseParams p;
  p.seed = 11;
  const double dt = 0.02;
  const double lam = 4 * M_PI * M_PI + 1;
  std::vector<double> prod;
  for (int i = 0; i < 10000; ++i) {
    NoiseState s = ou_init_stationary(g, p, i);
    cplx a = s.amp(1, 0);
    ou_step(s, dt);
    prod.push_back((s.amp(1, 0) * std::conj(a)).real());
  }
  auto st = stats(prod);
  EXPECT_NEAR(st.mean, stationary_variance(0, 1, 0) * std::exp(-lam * dt), 3 * st.se);
}

TEST(OU, TwoHalfStepsEqualOneStepInLaw) {
  PeriodicGrid g(8);
  NoiseParams p;
  p.seed = 5;
  const NoiseState start = ou_init_stationary(g, p, 999999);
  const double dt = 0.01;
  std::vector<double> one, two;
  for (int i = 0; i < 10000; ++i) {
    NoiseState a = start, b = start;
    a.stream = i;
    b.stream = 20000 + i;
    ou_step(a, dt);
    ou_step(b, dt / 2);
    ou_step(b, dt / 2);
    one.push_back(a.amp(1, 1).real());
    two.push_back(b.amp(1, 1).real());
  }
  auto s1 = stats(one), s2 = stats(two);
  EXPECT_LT(std::abs(s1.mean - s2.mean), 4 * std::hypot(s1.se, s2.se));
  // Variance of a sample variance for Gaussian data: 2 sigma^4 / (N - 1).
  const double vse = std::sqrt(2.0 / 9999) * std::hypot(s1.var, s2.var);
  EXPECT_LT(std::abs(s1.var - s2.var), 4 * vse);
  auto tr = ou_transition(0, 1, 1, dt);
  EXPECT_NEAR(s1.mean, tr.decay * start.amp(1, 1).real(), 4 * s1.se);
  EXPECT_NEAR(s1.var, tr.innov_std * tr.innov_std / 2, 4 * std::sqrt(2.0 / 9999) * s1.var);
}

TEST(Wick, MeanZeroAndCountertermMatchesMonteCarlo) {
  PeriodicGrid g(16);
  NoiseParams p;
  p.fa = 0.125;
  p.seed = 77;
  const double eps = 1.0 / 8;
  std::vector<double> raw[3], point[3];
  NoiseState ref = ou_init_stationary(g, p);
  auto ct = wick_counterterm(ref, eps);
  for (int i = 0; i < 10000; ++i) {
    NoiseState s = ou_init_stationary(g, p, i);
    Field w = wick_square(s, eps);
    auto vals = w.to_physical();
    for (int c = 0; c < 3; ++c) {
      raw[c].push_back(w.mean(c) + ct[c]);
      point[c].push_back(vals[c * g.phys_size() + 37]);
    }
  }
  for (int c = 0; c < 3; ++c) {
    auto sr = stats(raw[c]);
    EXPECT_NEAR(sr.mean, ct[c], 3 * sr.se) << c;
    auto sp = stats(point[c]);
    EXPECT_NEAR(sp.mean, 0.0, 3 * sp.se) << c;
  }
  EXPECT_GT(ct[0], 0.0);
  EXPECT_NEAR(ct[0], ct[2], 1e-15);  // isotropic truncation
}

TEST(Cutoff, Examples) {
  EXPECT_EQ(cutoff_radius(0.0, 3.0), 1.0);
  EXPECT_EQ(cutoff_radius(1.0, 1.0), 64.0);
  EXPECT_THROW(cutoff_radius(1.0, 0.5), std::invalid_argument);
}

TEST(Cutoff, HighPartOfNoiseShrinksLikeInverseFrakC) {
  PeriodicGrid g(64);
  NoiseParams p;
  p.seed = 31;
  const double fa = p.fa, fa0 = p.fa0(), kap = p.kappa_value();
  std::vector<double> Cs = {1, 2, 4}, worst;
  for (double C : Cs) {
    double w = 0.0;
    for (int i = 0; i < 100; ++i) {
      Field z = ou_field(ou_init_stationary(g, p, i));
      const double R = cutoff_radius(holder_norm(z, -fa - fa0 - kap), C);
      w = std::max(w, holder_norm(freq_project(z, R, FreqPart::High), -1.0 / 6 - fa - fa0 - kap));
    }
    worst.push_back(w * C);
  }
  // frakC * sup ||H_R z|| stays bounded (here: does not grow).
  for (std::size_t i = 1; i < worst.size(); ++i) EXPECT_LE(worst[i], 1.05 * worst[0]);
}

TEST(MomentAudit, ZeroStateAndDeterminism) {
  NoiseParams p;
  p.seed = 1;
  auto z = moment_audit(16, p, 1000, {2}, 4, true);
  EXPECT_EQ(z.rows[0].moment_z, 0.0);
  EXPECT_EQ(z.rows[0].moment_holder, 0.0);
  EXPECT_EQ(z.rows[0].moment_wick, 0.0);
  auto a = moment_audit(16, p, 1000, {2, 4, 8}, 4);
  auto b = moment_audit(16, p, 1000, {2, 4, 8}, 4);
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].fitted_L, b.rows[i].fitted_L);
  EXPECT_LT(a.growth_exponent, 1.0);
  // Golden value from the first run with seed 1, n = 16, 1000 samples.
  EXPECT_NEAR(a.rows[0].fitted_L, 1.779389, 5e-6);
}

TEST(OU, ZeroedNoiseIsDegenerate) {
  const auto v = variance_check(0.0, 100, 1, 16, true);
  EXPECT_EQ(v.mean, 0.0);
  EXPECT_TRUE(v.degenerate);
  EXPECT_FALSE(v.pass);
  EXPECT_THROW(variance_check(0.0, 1, 1), std::invalid_argument);
}
