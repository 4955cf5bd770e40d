// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "convint/besov.hpp"
#include "convint/jets.hpp"
#include "convint/spectral.hpp"
#include "test_util.hpp"

using namespace convint;
using convint::testing::max_diff;

namespace {

Sym2 reconstruct(const Sym2& c, const DirectionSet& d) {
  Sym2 r{};
  for (std::size_t i = 0; i < d.size(); ++i) {
    r[0] += c[i] * d.xi[i][0] * d.xi[i][0];
    r[1] += c[i] * d.xi[i][0] * d.xi[i][1];
    r[2] += c[i] * d.xi[i][1] * d.xi[i][1];
  }
  return r;
}

// Time-independent part shared by the moving-jet tests.
const JetFamily& desk_family() {
  static const JetFamily fam(JetParams::desk(), DirectionSet::default_set());
  return fam;
}

double bump(double s, double mu0) {
  const double q = 1.0 - mu0 * mu0 * s * s;
  return q > 0.0 ? std::pow(q, 4) : 0.0;
}

double dbump(double s, double mu0) {
  const double q = 1.0 - mu0 * mu0 * s * s;
  return q > 0.0 ? -8.0 * mu0 * mu0 * s * std::pow(q, 3) : 0.0;
}

}  // namespace

TEST(Geometric, IdentityCoefficients) {
  const auto d = DirectionSet::default_set();
  const Sym2 c = geometric_coefficients({1.0, 0.0, 1.0}, d);
  EXPECT_NEAR(c[0], 25.0 / 32.0, 1e-14);
  EXPECT_NEAR(c[1], 25.0 / 32.0, 1e-14);
  EXPECT_NEAR(c[2], 7.0 / 16.0, 1e-14);
}

TEST(Geometric, DiagonalCoefficients) {
  const auto d = DirectionSet::default_set();
  // |R - Id|_F = 1/2 lies outside the verified ball; the affine map is still defined.
  EXPECT_THROW(geometric_coefficients({1.0, 0.0, 0.5}, d), std::domain_error);
  const Sym2 c = geometric_coefficients({1.0, 0.0, 0.5}, d, false);
  EXPECT_NEAR(c[0], 25.0 / 64.0, 1e-14);
  EXPECT_NEAR(c[1], 25.0 / 64.0, 1e-14);
  EXPECT_NEAR(c[2], 23.0 / 32.0, 1e-14);
}

TEST(Geometric, RandomReconstructionInBall) {
  const auto d = DirectionSet::default_set();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 0.0, minc = 1.0;
  for (int t = 0; t < 1000; ++t) {
    double s[3] = {nd(rng), nd(rng), nd(rng)};
    const double r = d.r_star * std::cbrt(ud(rng)) / std::sqrt(s[0] * s[0] + 2 * s[1] * s[1] + s[2] * s[2]);
    const Sym2 R{1.0 + r * s[0], r * s[1], 1.0 + r * s[2]};
    const Sym2 c = geometric_coefficients(R, d);
    const Sym2 back = reconstruct(c, d);
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, std::abs(back[i] - R[i]));
      minc = std::min(minc, c[i]);
    }
  }
  EXPECT_LE(worst, 1e-12);
  EXPECT_GT(minc, 0.0);
}

TEST(Geometric, PositivityRadiusMatchesSphereScan) {
  const auto d = DirectionSet::default_set();
  // Scan |S|_F = r via S = (u1, u2 / sqrt 2, u3) with u on the unit sphere.
  auto min_on_sphere = [&](double r) {
    double m = 1e300;
    const int N = 400;
    for (int a = 0; a <= N; ++a)
      for (int b = 0; b < 2 * N; ++b) {
        const double th = kPi * a / N, ph = kPi * b / N;
        const double u[3] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
        const Sym2 R{1.0 + r * u[0], r * u[1] / std::sqrt(2.0), 1.0 + r * u[2]};
        for (double c : geometric_coefficients(R, d, false)) m = std::min(m, c);
      }
    return m;
  };
  EXPECT_GT(min_on_sphere(0.999 * d.r_star), 0.0);
  EXPECT_LT(min_on_sphere(1.01 * d.r_star), 0.0);
  EXPECT_NEAR(d.r_star, 7.0 / std::sqrt(337.0), 1e-12);
}

TEST(Geometric, OutsideBallRejected) {
  const auto d = DirectionSet::default_set();
  try {
    geometric_coefficients({1.5, 0.0, 1.0}, d);
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
  }
  EXPECT_THROW(DirectionSet::make({{{3, 4, 6}, {3, -4, 5}, {1, 0, 1}}}), std::invalid_argument);
  EXPECT_THROW(DirectionSet::make({{{3, 4, 5}, {-3, -4, 5}, {1, 0, 1}}}), std::invalid_argument);
}

TEST(JetParams, Validation) {
  const auto d = DirectionSet::default_set();
  EXPECT_NO_THROW(JetParams::desk().validate(d));
  JetParams p = JetParams::desk();
  p.n = 64;
  EXPECT_THROW(p.validate(d), std::invalid_argument);  // 2.7 cells across the support
  p = JetParams::desk();
  p.nu = 3;
  EXPECT_THROW(p.validate(d), std::invalid_argument);
  p = JetParams::desk();
  p.t_offsets = {0.0, 0.2, 0.6};
  EXPECT_THROW(p.validate(d), std::invalid_argument);
  p = JetParams::desk();
  p.centers = {{0.1, 0.1}, {0.15, 0.1}, {0.6, 0.6}};
  EXPECT_THROW(p.validate(d), std::invalid_argument);
  p = JetParams::desk();
  p.sigma = 1;
  EXPECT_THROW(p.validate(d), std::invalid_argument);
}

TEST(JetParams, PaperScales) {
  const auto s = paper_jet_scales(std::pow(2.0, 113.0), 1.0 / 113.0);
  EXPECT_NEAR(std::log2(s.sigma), 2.0, 1e-12);
  EXPECT_NEAR(std::log2(s.eta), 16.0, 1e-12);
  EXPECT_NEAR(std::log2(s.nu), 105.0, 1e-10);
  EXPECT_NEAR(std::log2(s.theta), 118.0, 1e-10);
  EXPECT_LT(s.nu, s.mu);
}

TEST(StationaryJets, NormalizationAndMean) {
  const auto& fam = desk_family();
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto& J = fam.stationary(i);
    const Field WW = outer_self(J.W);
    const Vec2 xi = J.xi;
    EXPECT_NEAR(WW.mean(0), xi[0] * xi[0], 1e-8);
    EXPECT_NEAR(WW.mean(1), xi[0] * xi[1], 1e-8);
    EXPECT_NEAR(WW.mean(2), xi[1] * xi[1], 1e-8);
    EXPECT_EQ(J.W.mean(0), 0.0);
    EXPECT_EQ(J.W.mean(1), 0.0);
    EXPECT_GT(J.c, 0.0);
  }
}

TEST(StationaryJets, CoefficientsMatchSampledProfile) {
  // Fourier coefficients of the closed-form W~ sampled on a fine grid.
  const auto& fam = desk_family();
  const JetParams& p = fam.params();
  const PeriodicGrid fine(2048);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto& J = fam.stationary(i);
    const Vec2 c = p.center(i);
    auto profile = [&](double x1, double x2) {
      double best = 0.0;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
          const double d1 = x1 - c[0] + a, d2 = x2 - c[1] + b;
          const double xx = d1 * J.xi[0] + d2 * J.xi[1], yy = d1 * J.xi_perp[0] + d2 * J.xi_perp[1];
          best += -J.c * std::sqrt(double(p.nu) * p.mu) * bump(p.nu * xx, p.mu0) * dbump(p.mu * yy, p.mu0);
        }
      return best;
    };
    const Field ref = convint::testing::sample(fine, Rank::Vector,
                                      {[&](double a, double b) { return profile(a, b) * J.xi[0]; },
                                       [&](double a, double b) { return profile(a, b) * J.xi[1]; }});
    const int K = p.stationary_kmax();
    double err = 0.0, scale = 0.0;
    for (int d = 0; d < 2; ++d)
      for (int k1 = -K; k1 <= K; ++k1)
        for (int k2 = 0; k2 <= K; ++k2) {
          err = std::max(err, std::abs(ref.at(d, k1, k2) - J.W.at(d, k1, k2)));
          scale = std::max(scale, std::abs(ref.at(d, k1, k2)));
        }
    EXPECT_LT(err, 1e-8 * scale) << "direction " << i;
  }
}

TEST(StationaryJets, CurlPotential) {
  const auto& fam = desk_family();
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto& J = fam.stationary(i);
    const Field lhs = perp_gradient(J.Psi);
    EXPECT_LE(max_diff(lhs, J.W + J.Wc), 1e-10 * (1.0 + lhs.max_abs()));
    EXPECT_LE(divergence(J.W + J.Wc).max_abs(), 1e-10 * (1.0 + lhs.max_abs()));
  }
}

TEST(StationaryJets, LpScaling) {
  const auto d = DirectionSet::default_set();
  for (double p : {1.0, 4.0}) {
    std::vector<double> xs, ys;
    for (int s : {1, 2, 4}) {
      JetParams jp = JetParams::desk();
      jp.n = 1024;
      jp.nu = 4 * s;
      jp.mu = 8 * s;
      const auto jets = build_stationary_jets(jp, d);
      xs.push_back(double(jp.nu) * jp.mu);
      ys.push_back(lp_norm(jets[0].W, p));
    }
    EXPECT_NEAR(loglog_slope(xs, ys), 0.5 - 1.0 / p, 0.1) << "p = " << p;
  }
}

TEST(Oscillators, PeriodIntegrals) {
  const JetParams p = JetParams::desk();
  const Oscillators o(p, 3);
  const double period = 1.0 / p.sigma;
  const int N = 1 << 16;
  for (std::size_t i = 0; i < 3; ++i) {
    double s1 = 0.0, s2 = 0.0, hmax = 0.0;
    for (int k = 0; k < N; ++k) {
      const double t = (k + 0.5) * period / N;
      s1 += o.g(i, t) * period / N;
      s2 += o.g(i, t) * o.g(i, t) * period / N;
      hmax = std::max(hmax, std::abs(o.h(i, t)));
    }
    EXPECT_NEAR(s1, 0.0, 1e-9);
    EXPECT_NEAR(s2, period, 1e-8);
    EXPECT_LE(hmax, 1.0);
    EXPECT_NEAR(o.h(i, period), 0.0, 1e-13);
    EXPECT_NEAR(o.h(i, 3 * period), 0.0, 1e-12);
    EXPECT_NEAR(o.phi(i, period), 0.0, 1e-13);
  }
}

TEST(Oscillators, DisjointInTime) {
  const Oscillators o(JetParams::desk(), 3);
  for (int k = 0; k < 20000; ++k) {
    const double t = k / 20000.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) ASSERT_EQ(o.g(i, t) * o.g(j, t), 0.0) << t;
  }
}

TEST(Oscillators, DerivativesSecondOrder) {
  const JetParams p = JetParams::desk();
  const Oscillators o(p, 3);
  auto err = [&](double dt) {
    double e = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (int k = 0; k < 200; ++k) {
        const double t = 0.0123 + k * 0.0025;
        const double dh = (o.h(i, t + dt) - o.h(i, t - dt)) / (2 * dt) / p.sigma;
        e = std::max(e, std::abs(dh - (o.g(i, t) * o.g(i, t) - 1.0)));
        const double dphi = (o.phi(i, t + dt) - o.phi(i, t - dt)) / (2 * dt);
        e = std::max(e, std::abs(dphi - p.theta * o.g(i, t)) / p.theta);
        const double dg = (o.g(i, t + dt) - o.g(i, t - dt)) / (2 * dt);
        e = std::max(e, std::abs(dg - o.dg(i, t)) / (p.sigma * p.eta * 10.0));
      }
    return e;
  };
  const double e1 = err(1e-3), e2 = err(5e-4), e3 = err(2.5e-4);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.2);
}

TEST(MovingJets, ZeroPhaseIsRescaledStationary) {
  const auto& fam = desk_family();
  const int n = fam.params().n, s = fam.params().sigma;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    ASSERT_EQ(fam.osc().phi(i, 0.0), 0.0);
    const auto mv = fam.W(i, 0.0).to_physical();
    const auto st = fam.stationary(i).W.to_physical();
    double e = 0.0;
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          e = std::max(e, std::abs(mv[c * n * n + a * n + b] - st[c * n * n + (s * a % n) * n + (s * b % n)]));
    EXPECT_LT(e, 1e-10);
  }
}

TEST(MovingJets, IdentitiesAtEveryFrame) {
  const auto& fam = desk_family();
  const double sig = fam.params().sigma;
  const JetFields jf = build_moving_jets(fam, 0.0, 1.0 / 64.0, 12);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    jf.W[i].validate();
    for (std::size_t k = 0; k < jf.times.size(); ++k) {
      const Field& W = jf.W[i].frames[k];
      const Field lhs = perp_gradient(jf.Psi[i].frames[k]) * (1.0 / sig);
      EXPECT_LE(max_diff(lhs, W + jf.Wc[i].frames[k]), 1e-10 * (1.0 + lhs.max_abs()));
      const Field WW = outer_self(W);
      EXPECT_NEAR(WW.mean(0), fam.stationary(i).xi[0] * fam.stationary(i).xi[0], 1e-8);
      EXPECT_NEAR(WW.mean(1), fam.stationary(i).xi[0] * fam.stationary(i).xi[1], 1e-8);
    }
  }
  // Pointwise disjointness of g W across directions.
  for (std::size_t k = 0; k < jf.times.size(); ++k)
    for (std::size_t i = 0; i < fam.size(); ++i)
      for (std::size_t j = i + 1; j < fam.size(); ++j) {
        const Field a = jf.W[i].frames[k] * jf.g[i][k], b = jf.W[j].frames[k] * jf.g[j][k];
        EXPECT_EQ(dot(a, b).max_abs(), 0.0);
      }
}

TEST(MovingJets, TransportIdentitiesSecondOrder) {
  const auto& fam = desk_family();
  const auto& p = fam.params();
  const std::size_t i = 1;
  const double t = 1.0 / 3.0 / p.sigma + 0.05;  // inside the support of g_1
  ASSERT_NE(fam.osc().g(i, t), 0.0);
  const Vec2 xi = fam.stationary(i).xi;
  const double fac = double(p.theta) * fam.osc().g(i, t) / p.sigma;
  const Field W = fam.W(i, t);
  const Field rhs9 = divergence(outer_self(W)) * fac;
  const Field rhs10 = fam.dt_moving(fam.Psi(i, t), i, t);
  auto errs = [&](double dt) {
    const Field dW2 = (dot(fam.W(i, t + dt), fam.W(i, t + dt)) - dot(fam.W(i, t - dt), fam.W(i, t - dt))) *
                      (0.5 / dt);
    const Field lhs9 = Field::from_components({dW2 * xi[0], dW2 * xi[1]}, Rank::Vector);
    const Field lhs10 = (fam.Psi(i, t + dt) - fam.Psi(i, t - dt)) * (0.5 / dt);
    return std::pair{max_diff(lhs9, rhs9) / rhs9.max_abs(), max_diff(lhs10, rhs10) / rhs10.max_abs()};
  };
  const auto [a1, b1] = errs(1.0 / 2048);
  const auto [a2, b2] = errs(1.0 / 4096);
  const auto [a3, b3] = errs(1.0 / 8192);
  EXPECT_NEAR(std::log2(a1 / a2), 2.0, 0.25);
  EXPECT_NEAR(std::log2(a2 / a3), 2.0, 0.25);
  EXPECT_NEAR(std::log2(b1 / b2), 2.0, 0.25);
  EXPECT_NEAR(std::log2(b2 / b3), 2.0, 0.25);
  EXPECT_LT(a3, 1e-2);
}

TEST(MovingJets, WindowErrors) {
  const auto& fam = desk_family();
  EXPECT_THROW(build_moving_jets(fam, 0.0, 1.0 / 16.0, 4), std::invalid_argument);
  EXPECT_THROW(build_moving_jets(fam, 0.001, 1.0 / 64.0, 4), std::invalid_argument);
  EXPECT_NO_THROW(build_moving_jets(fam, 3.0 / 64.0, 1.0 / 64.0, 2));
}
