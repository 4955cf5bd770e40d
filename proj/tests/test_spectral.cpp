// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <random>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "convint/io.hpp"
#include "convint/spectral.hpp"
#include "test_util.hpp"

using namespace convint;
using convint::testing::max_diff;
using convint::testing::random_field;
using convint::testing::sample;

namespace {

const double tp = 2.0 * M_PI;

Field scalar(const PeriodicGrid& g, std::function<double(double, double)> f) {
  return sample(g, Rank::Scalar, {f});
}

Field vec(const PeriodicGrid& g, std::function<double(double, double)> a, std::function<double(double, double)> b) {
  return sample(g, Rank::Vector, {a, b});
}

}  // namespace

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(PeriodicGrid(12), std::invalid_argument);
  EXPECT_THROW(PeriodicGrid(4), std::invalid_argument);
  EXPECT_NO_THROW(PeriodicGrid(8));
}

TEST(Field, RoundTrip) {
  PeriodicGrid g(32);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> vals(3 * g.phys_size());
  for (auto& v : vals) v = u(rng);
  Field f = Field::from_physical(g, Rank::SymTensor, vals);
  auto back = f.to_physical();
  double err = 0, ref = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    err = std::max(err, std::abs(back[i] - vals[i]));
    ref = std::max(ref, std::abs(vals[i]));
  }
  EXPECT_LE(err / ref, 1e-12);
  EXPECT_EQ(f.ncomp(), 3);
}

TEST(Field, MeanIsZeroCoefficient) {
  PeriodicGrid g(16);
  Field f = scalar(g, [](double x, double) { return 3.0 + std::sin(tp * x); });
  EXPECT_NEAR(f.mean(), 3.0, 1e-14);
  EXPECT_NEAR(f.l2_norm(), std::sqrt(9.0 + 0.5), 1e-12);
}

TEST(Derivative, SingleMode) {
  PeriodicGrid g(16);
  Field f = scalar(g, [](double x, double) { return std::sin(tp * x); });
  Field ex = scalar(g, [](double x, double) { return tp * std::cos(tp * x); });
  EXPECT_LT(max_diff(derivative(f, 0), ex), 1e-12);
  EXPECT_LT(derivative(scalar(g, [](double, double) { return 4.2; }), 1).max_abs(), 1e-14);
}

TEST(Derivative, MixedProductSymbolic) {
  PeriodicGrid g(16);
  Field f = scalar(g, [](double x, double y) { return std::sin(tp * x) * std::sin(2 * tp * y); });
  Field ex = scalar(g, [](double x, double y) { return 2 * tp * std::sin(tp * x) * std::cos(2 * tp * y); });
  EXPECT_LT(max_diff(derivative(f, 1), ex), 1e-11);
  Field ex2 = scalar(g, [](double x, double y) { return -5 * tp * tp * std::sin(tp * x) * std::sin(2 * tp * y); });
  EXPECT_LT(max_diff(laplacian(f), ex2), 1e-10);
}

TEST(Derivative, NyquistZeroedForOddOrders) {
  PeriodicGrid g(8);
  Field f = scalar(g, [](double x, double) { return std::cos(8 * M_PI * x); });  // k1 = -n/2
  EXPECT_LT(derivative(f, 0, 1).max_abs(), 1e-14);
  EXPECT_GT(derivative(f, 0, 2).max_abs(), 1.0);
}

TEST(Multiply, TrigIdentity) {
  PeriodicGrid g(16);
  Field s = scalar(g, [](double x, double) { return std::sin(tp * x); });
  Field ex = scalar(g, [](double x, double) { return 0.5 - 0.5 * std::cos(2 * tp * x); });
  EXPECT_LT(max_diff(multiply(s, s), ex), 1e-14);
  Field one = scalar(g, [](double, double) { return 1.0; });
  Field v = random_field(g, Rank::Vector, 5, 1);
  EXPECT_LT(max_diff(multiply(one, v), v), 1e-13);
}

// Brute force: evaluate both factors by direct trigonometric sums on the
// padded grid, multiply pointwise, and take the direct DFT.
TEST(Multiply, MatchesBruteForcePaddedProduct) {
  PeriodicGrid g(8);
  Field f = random_field(g, Rank::Scalar, 3, 11);
  Field h = random_field(g, Rank::Scalar, 3, 12);
  const int m = 12;
  auto eval = [&](const Field& a, double x, double y) {
    double s = 0.0;
    for (int k1 = -3; k1 <= 3; ++k1)
      for (int k2 = -3; k2 <= 3; ++k2) {
        std::complex<double> c = k2 >= 0 ? a.at(0, k1, k2) : std::conj(a.at(0, -k1, -k2));
        s += (c * std::exp(std::complex<double>(0, tp * (k1 * x + k2 * y)))).real();
      }
    return s;
  };
  std::vector<double> prod(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) prod[i * m + j] = eval(f, double(i) / m, double(j) / m) * eval(h, double(i) / m, double(j) / m);
  Field fh = multiply(f, h);
  for (int k1 = -3; k1 <= 3; ++k1)
    for (int k2 = 0; k2 <= 3; ++k2) {
      std::complex<double> c = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          c += prod[i * m + j] * std::exp(std::complex<double>(0, -tp * (k1 * i + k2 * j) / m));
      c /= double(m * m);
      EXPECT_LT(std::abs(c - fh.at(0, k1, k2)), 1e-12) << k1 << "," << k2;
    }
}

TEST(Multiply, BilinearAndProductRule) {
  PeriodicGrid g(32);
  Field a = random_field(g, Rank::Scalar, 15, 1), b = random_field(g, Rank::Scalar, 15, 2), c = random_field(g, Rank::Scalar, 15, 3);
  EXPECT_LT(max_diff(multiply(a + 2.0 * b, c), multiply(a, c) + 2.0 * multiply(b, c)), 1e-11);
  for (int ax = 0; ax < 2; ++ax)
    EXPECT_LT(max_diff(derivative(multiply(a, b), ax), multiply(derivative(a, ax), b) + multiply(a, derivative(b, ax))), 1e-9);
}

TEST(Multiply, TripleProductAtFactorTwoMatchesNested) {
  PeriodicGrid g(32);
  Field a = random_field(g, Rank::Scalar, 7, 4), b = random_field(g, Rank::Scalar, 7, 5), c = random_field(g, Rank::Scalar, 7, 6);
  // Bandwidths 7 + 7 + 7 fit the grid, so nested and single-pass agree.
  Field ref = multiply(multiply(a, b), c);
  EXPECT_LT(max_diff(multiply3(a, b, c), ref) / ref.max_abs(), 1e-13);
}

TEST(Multiply, TensorKinds) {
  PeriodicGrid g(16);
  Field v = random_field(g, Rank::Vector, 4, 7), w = random_field(g, Rank::Vector, 4, 8);
  Field vw = multiply(v, w);
  EXPECT_EQ(vw.rank(), Rank::Tensor);
  EXPECT_LT(max_diff(trace(vw), dot(v, w)), 1e-12);
  EXPECT_LT(max_diff(sym_outer(v, w), 2.0 * sym_part(vw)), 1e-12);
  EXPECT_LT(max_diff(outer_self(v), sym_part(multiply(v, v))), 1e-12);
  EXPECT_LT(max_diff(vecmat(v, vw), matvec(transpose(vw), v)), 1e-12);
  EXPECT_THROW(multiply(vw, v), std::invalid_argument);
}

TEST(Helmholtz, GradientAnnihilated) {
  PeriodicGrid g(16);
  Field v = vec(g, [](double x, double) { return tp * std::cos(tp * x); }, [](double, double) { return 0.0; });
  EXPECT_LT(helmholtz_project(v).max_abs(), 1e-12);
}

TEST(Helmholtz, DivergenceFreeUnchangedAndIdempotent) {
  PeriodicGrid g(32);
  Field psi = random_field(g, Rank::Scalar, 10, 9);
  Field u = perp_gradient(psi);
  EXPECT_LT(max_diff(helmholtz_project(u), u), 1e-10);
  Field v = random_field(g, Rank::Vector, 12, 10);
  Field p = helmholtz_project(v);
  EXPECT_LT(divergence(p).max_abs() / v.max_abs(), 1e-12);
  EXPECT_LT(max_diff(helmholtz_project(p), p), 1e-12);
  EXPECT_NEAR(p.mean(0), v.mean(0), 1e-14);
  EXPECT_NEAR(p.mean(1), v.mean(1), 1e-14);
}

TEST(Helmholtz, PerModeOracle) {
  PeriodicGrid g(16);
  Field v = vec(g, [](double x, double) { return std::sin(tp * x); }, [](double x, double) { return std::sin(tp * x); });
  // k = (1, 0): (Id - kk^T/|k|^2) removes the first component.
  Field ex = vec(g, [](double, double) { return 0.0; }, [](double x, double) { return std::sin(tp * x); });
  EXPECT_LT(max_diff(helmholtz_project(v), ex), 1e-13);
  Field w = random_field(g, Rank::Vector, 5, 21);
  Field pw = helmholtz_project(w);
  for (int k1 = -5; k1 <= 5; ++k1)
    for (int k2 = 0; k2 <= 5; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      double kk = double(k1) * k1 + double(k2) * k2;
      std::complex<double> a = w.at(0, k1, k2), b = w.at(1, k1, k2);
      std::complex<double> kv = double(k1) * a + double(k2) * b;
      EXPECT_LT(std::abs(pw.at(0, k1, k2) - (a - double(k1) * kv / kk)), 1e-13);
      EXPECT_LT(std::abs(pw.at(1, k1, k2) - (b - double(k2) * kv / kk)), 1e-13);
    }
}

TEST(Traceless, Examples) {
  PeriodicGrid g(8);
  auto c = [](double v) { return [v](double, double) { return v; }; };
  Field id = sample(g, Rank::SymTensor, {c(1), c(0), c(1)});
  EXPECT_LT(traceless(id).max_abs(), 1e-15);
  Field d = sample(g, Rank::SymTensor, {c(3), c(0.5), c(1)});
  Field ex = sample(g, Rank::SymTensor, {c(1), c(0.5), c(-1)});
  EXPECT_LT(max_diff(traceless(d), ex), 1e-14);
  Field t = traceless(random_field(g, Rank::SymTensor, 3, 2));
  EXPECT_LT(max_diff(traceless(t), t), 1e-14);
  EXPECT_LT(trace(t).max_abs(), 1e-14);
}

TEST(Antidivergence, SingleModeKernelOracle) {
  PeriodicGrid g(16);
  Field v = vec(g, [](double, double y) { return std::sin(tp * y); }, [](double, double) { return 0.0; });
  Field ex = sample(g, Rank::SymTensor,
                    {[](double, double) { return 0.0; }, [](double, double y) { return -std::cos(tp * y) / tp; },
                     [](double, double) { return 0.0; }});
  Field r = antidivergence(v);
  EXPECT_LT(max_diff(r, ex), 1e-14);
  EXPECT_LT(max_diff(divergence(r), v), 1e-13);
  EXPECT_LT(antidivergence(Field(g, Rank::Vector)).max_abs(), 1e-16);
}

TEST(Antidivergence, RightInverseAndTraceFree) {
  PeriodicGrid g(32);
  Field v = random_field(g, Rank::Vector, 15, 5);
  Field r = antidivergence(v);
  Field back = divergence(r);
  EXPECT_LT(max_diff(back, remove_mean(v)) / v.max_abs(), 1e-10);
  EXPECT_LT(trace(r).max_abs(), 1e-13);
}

TEST(Antidivergence, LaplacianIdentityForDivFree) {
  PeriodicGrid g(32);
  Field v = helmholtz_project(random_field(g, Rank::Vector, 12, 6, true));
  Field lhs = antidivergence(laplacian(v));
  Field rhs = sym_gradient(v);
  EXPECT_LT(max_diff(lhs, rhs) / rhs.max_abs(), 1e-10);
}

TEST(Antidivergence, ScalesInverselyWithFrequency) {
  PeriodicGrid g(128);
  Field prof = random_field(g, Rank::Vector, 3, 8, true);
  std::vector<double> xs, ys;
  for (int s : {2, 4, 8, 16}) {
    Field fs(g, Rank::Vector);
    for (int c = 0; c < 2; ++c)
      for (int k1 = -3; k1 <= 3; ++k1)
        for (int k2 = 0; k2 <= 3; ++k2) fs.at(c, s * k1, s * k2) = prof.at(c, k1, k2);
    xs.push_back(std::log(double(s)));
    ys.push_back(std::log(antidivergence(fs).l2_norm()));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  EXPECT_NEAR(sxy / sxx, -1.0, 0.05);
}

TEST(Bilinear, Degenerate) {
  PeriodicGrid g(16);
  Field A = random_field(g, Rank::Tensor, 5, 3, true);
  EXPECT_LT(antidivergence_bilinear(Field(g, Rank::Vector), A).max_abs(), 1e-15);
  Field c = sample(g, Rank::Vector, {[](double, double) { return 0.7; }, [](double, double) { return -1.3; }});
  Field row0(g, Rank::Vector), row1(g, Rank::Vector);
  row0.set_component(0, A.component(0));
  row0.set_component(1, A.component(1));
  row1.set_component(0, A.component(2));
  row1.set_component(1, A.component(3));
  Field ex = 0.7 * antidivergence(row0) + (-1.3) * antidivergence(row1);
  EXPECT_LT(max_diff(antidivergence_bilinear(c, A), ex), 1e-13);
}

TEST(Bilinear, DivergenceIdentity) {
  PeriodicGrid g(64);
  Field v = random_field(g, Rank::Vector, 15, 13);
  Field A = random_field(g, Rank::Tensor, 15, 14, true);
  Field B = antidivergence_bilinear(v, A);
  Field vA = vecmat(v, A);
  Field ex = remove_mean(vA);
  EXPECT_LT(max_diff(divergence(B), ex) / vA.max_abs(), 1e-10);
  Field S = random_field(g, Rank::SymTensor, 15, 15, true);
  EXPECT_LT(max_diff(divergence(antidivergence_bilinear(v, S)), remove_mean(vecmat(v, S))) / S.max_abs(), 1e-10);
  Field bad = random_field(g, Rank::Tensor, 4, 16);
  EXPECT_THROW(antidivergence_bilinear(v, bad), std::invalid_argument);
}

TEST(Bilinear, ScalarVersion) {
  PeriodicGrid g(64);
  Field f = random_field(g, Rank::Scalar, 15, 17);
  Field a = random_field(g, Rank::Vector, 15, 18, true);
  Field B = antidivergence_bilinear_scalar(f, a);
  EXPECT_LT(max_diff(divergence(B), remove_mean(multiply(f, a))) / a.max_abs(), 1e-10);
}

TEST(Heat, MultiplierAndSemigroup) {
  PeriodicGrid g(16);
  Field f = scalar(g, [](double x, double) { return 2.0 * std::cos(tp * x); });
  EXPECT_LT(max_diff(heat_apply(f, 0.0), f), 1e-15);
  Field ex = scalar(g, [](double x, double) { return 2.0 * std::exp(-tp * tp) * std::cos(tp * x); });
  EXPECT_LT(max_diff(heat_apply(f, 1.0), ex), 1e-15);
  Field r = random_field(g, Rank::Vector, 7, 2);
  EXPECT_LT(max_diff(heat_apply(heat_apply(r, 0.01), 0.02), heat_apply(r, 0.03)), 1e-12);
  EXPECT_NEAR(heat_apply(r, 0.5).mean(1), r.mean(1), 1e-15);
  EXPECT_LE(heat_apply(r, 0.001).l2_norm(), r.l2_norm());
  EXPECT_THROW(heat_apply(r, -1.0), std::invalid_argument);
}

namespace {

// Closed form of u' = -lam u + fhat, u(0) = 0.
double steady_error(const PeriodicGrid& g, double c, double dt, DuhamelOrder ord, double T, bool oscillating) {
  const int steps = static_cast<int>(std::lround(T / dt));
  Field base = Field(g, Rank::Scalar);
  base.at(0, 1, 0) = 1.0;
  base.at(0, -1, 0) = 1.0;
  std::vector<Field> frames;
  for (int i = 0; i <= steps; ++i) frames.push_back(base * (oscillating ? std::cos(3.0 * i * dt) : 1.0));
  auto u = duhamel(TimeSeriesField::uniform(0.0, dt, frames), c, ord);
  const double lam = c + 4 * M_PI * M_PI;
  double ex;
  if (!oscillating) {
    ex = (1.0 - std::exp(-lam * T)) / lam;
  } else {
    // int_0^T e^{-lam (T-s)} cos(3s) ds
    const double w = 3.0;
    ex = (lam * std::cos(w * T) + w * std::sin(w * T) - lam * std::exp(-lam * T)) / (lam * lam + w * w);
  }
  return std::abs(u.frames.back().at(0, 1, 0).real() - ex);
}

}  // namespace

TEST(Duhamel, ZeroAndSteadyLimit) {
  PeriodicGrid g(8);
  std::vector<Field> zeros(5, Field(g, Rank::Vector));
  auto z = duhamel(TimeSeriesField::uniform(0, 0.1, zeros), 1.0);
  for (const auto& f : z.frames) EXPECT_EQ(f.max_abs(), 0.0);
  const double c = 2.0, lam = c + 4 * M_PI * M_PI, T = 1.0;
  // Constant forcing is integrated exactly by either order.
  EXPECT_LT(steady_error(g, c, 0.05, DuhamelOrder::Held, T, false), 1e-14);
  Field base(g, Rank::Scalar);
  base.at(0, 1, 0) = 1.0;
  base.at(0, -1, 0) = 1.0;
  std::vector<Field> frames(21, base);
  auto u = duhamel(TimeSeriesField::uniform(0.0, 0.05, frames), c);
  EXPECT_LT(std::abs(u.frames.back().at(0, 1, 0).real() - 1.0 / lam), 1.01 * std::exp(-lam * T) / lam);
}

TEST(Duhamel, ConvergenceOrders) {
  PeriodicGrid g(8);
  const double c = 1.0, T = 1.0;
  double h1 = steady_error(g, c, 1.0 / 200, DuhamelOrder::Held, T, true);
  double h2 = steady_error(g, c, 1.0 / 400, DuhamelOrder::Held, T, true);
  double l1 = steady_error(g, c, 1.0 / 200, DuhamelOrder::Linear, T, true);
  double l2 = steady_error(g, c, 1.0 / 400, DuhamelOrder::Linear, T, true);
  EXPECT_NEAR(h1 / h2, 2.0, 0.2);
  EXPECT_NEAR(l1 / l2, 4.0, 0.4);
}

TEST(Duhamel, RejectsNonUniformTimes) {
  PeriodicGrid g(8);
  TimeSeriesField ts;
  ts.times = {0.0, 0.1, 0.3};
  ts.frames.assign(3, Field(g, Rank::Scalar));
  EXPECT_THROW(duhamel(ts, 1.0), std::invalid_argument);
  EXPECT_THROW(duhamel(TimeSeriesField::uniform(0, 0.1, ts.frames), 0.0), std::invalid_argument);
}

TEST(IO, DumpRoundTrip) {
  PeriodicGrid g(16);
  Field f = random_field(g, Rank::SymTensor, 5, 99);
  auto path = (std::filesystem::temp_directory_path() / "convint_io_test.cins").string();
  io::write_field(path, f);
  EXPECT_EQ(std::filesystem::file_size(path), 4u + 4 + 4 + 1 + 1 + 3 * 16 * 16 * 8);
  Field back = io::read_field(path);
  EXPECT_EQ(back.rank(), Rank::SymTensor);
  EXPECT_LT(max_diff(back, f), 1e-13);
  std::remove(path.c_str());
}

TEST(Helmholtz, FullSpectrumWhiteNoise) {
  // Point values, so the Nyquist lines carry energy too.
  PeriodicGrid g(32);
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> vals(2 * g.phys_size());
  for (double& x : vals) x = nd(rng);
  const Field v = Field::from_physical(g, Rank::Vector, vals);
  const Field p = helmholtz_project(v);
  EXPECT_LT(divergence(p).max_abs(), 1e-12);
  EXPECT_LT(max_diff(helmholtz_project(p), p), 1e-13);
}
