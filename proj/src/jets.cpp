// SPDX-License-Identifier: MIT
#include "convint/jets.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "convint/spectral.hpp"
#include "convint/threads.hpp"
#include "quadrature.hpp"

namespace convint {

namespace {

using Poly = std::vector<double>;  // coefficients in ascending powers

Poly mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly power(const Poly& a, int m) {
  Poly r{1.0};
  for (int i = 0; i < m; ++i) r = mul(r, a);
  return r;
}

double eval(const Poly& p, double x) {
  double s = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
  return s;
}

// Antiderivative vanishing at s = -1.
Poly antiderivative(const Poly& p) {
  Poly r(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) r[i + 1] = p[i] / double(i + 1);
  r[0] = -eval(r, -1.0);
  return r;
}

double frac(double x) { return x - std::floor(x); }

double torus_distance(const Vec2& a, const Vec2& b) {
  double s = 0.0;
  for (int d = 0; d < 2; ++d) {
    double t = std::abs(frac(a[d] - b[d]));
    t = std::min(t, 1.0 - t);
    s += t * t;
  }
  return std::sqrt(s);
}

// Fourier transform of u -> (1 - (mu0 u)^2)^m on |u| < 1/mu0 at frequency w.
double bump_transform(double w, double mu0, int m) {
  const double a = 2.0 * kPi * w / mu0;
  const int panels = 2 + int(std::abs(a) / 8.0);
  const double v = detail::integrate(
      [&](double s) { return std::pow(1.0 - s * s, m) * std::cos(a * s); }, 0.0, 1.0, panels);
  return 2.0 * v / mu0;
}

void fail(const std::string& what) { throw std::invalid_argument("jets: " + what); }

}  // namespace

DirectionSet DirectionSet::make(const std::vector<std::array<int, 3>>& triples) {
  if (triples.size() != 3) fail("direction set must have exactly three directions");
  DirectionSet d;
  d.triples = triples;
  Eigen::Matrix3d M;
  for (std::size_t i = 0; i < 3; ++i) {
    auto [a, b, c] = triples[i];
    if (c <= 0 || long(a) * a + long(b) * b != long(c) * c)
      fail("direction " + std::to_string(a) + "/" + std::to_string(c) + ", " + std::to_string(b) +
           "/" + std::to_string(c) + " is not a rational unit vector");
    const double x = double(a) / c, y = double(b) / c;
    d.xi.push_back({x, y});
    M(0, i) = x * x;
    M(1, i) = x * y;
    M(2, i) = y * y;
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
  if (lu.rank() < 3) fail("dyads of the directions do not span symmetric matrices");
  const Eigen::Matrix3d inv = lu.inverse();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d.inverse[i][j] = inv(i, j);

  // Each coefficient is affine, c_i(Id + S) = c_i(Id) + l_i(S). Its minimum over
  // |S|_F <= r is c_i(Id) - r |l_i|_*, the dual norm taken for |S|_F^2 = S11^2 + 2 S12^2 + S22^2.
  d.r_star = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double c0 = inv(i, 0) + inv(i, 2);
    Eigen::Vector3d l(inv(i, 0), inv(i, 1) / std::sqrt(2.0), inv(i, 2));
    if (c0 <= 0.0) fail("coefficients are not positive at the identity");
    d.r_star = std::min(d.r_star, c0 / l.norm());
  }
  return d;
}

DirectionSet DirectionSet::default_set() { return make({{{3, 4, 5}, {3, -4, 5}, {1, 0, 1}}}); }

double frobenius_distance_to_identity(const Sym2& R) {
  return std::sqrt((R[0] - 1.0) * (R[0] - 1.0) + 2.0 * R[1] * R[1] + (R[2] - 1.0) * (R[2] - 1.0));
}

Sym2 geometric_coefficients(const Sym2& R, const DirectionSet& dirs, bool check) {
  if (check) {
    const double d = frobenius_distance_to_identity(R);
    if (d > dirs.r_star * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "geometric_coefficients: |R - Id|_F = " << d << " exceeds the positivity radius "
         << dirs.r_star;
      throw std::domain_error(os.str());
    }
  }
  Sym2 c{};
  for (int i = 0; i < 3; ++i)
    c[i] = dirs.inverse[i][0] * R[0] + dirs.inverse[i][1] * R[1] + dirs.inverse[i][2] * R[2];
  return c;
}

JetParams JetParams::desk() { return JetParams{}; }

Vec2 JetParams::center(std::size_t i) const {
  if (i < centers.size()) return centers[i];
  const double s = (double(i) + 0.5) / 3.0;
  return {frac(s - 1.0 / 3.0), frac(s)};
}

double JetParams::t_offset(std::size_t i, std::size_t count) const {
  if (i < t_offsets.size()) return t_offsets[i];
  return double(i) / double(count);
}

void JetParams::validate(const DirectionSet& dirs) const {
  if (!is_power_of_two(n) || n < 16) fail("grid size must be a power of two >= 16");
  for (auto [v, name] : {std::pair{sigma, "sigma"}, {eta, "eta"}, {nu, "nu"}, {mu, "mu"}, {theta, "theta"}})
    if (v < 2) fail(std::string(name) + " must be an integer >= 2");
  if (!(mu0 > 2.0)) fail("mu0 must exceed 2");
  if (!(mu0 < nu && nu <= mu)) fail("need mu0 < nu <= mu");
  if (bump_order < 2) fail("bump order must be >= 2");
  if (stationary_kmax() < 2) fail("grid too coarse for sigma: stationary band below 2");
  const std::size_t k = dirs.size();
  if (!centers.empty() && centers.size() != k) fail("one center per direction required");
  if (!t_offsets.empty() && t_offsets.size() != k) fail("one time offset per direction required");

  const double width = 2.0 / (mu0 * mu * sigma);
  if (width * n < 4.0) {
    std::ostringstream os;
    os << "profile support " << width * n << " cells wide, need at least 4";
    fail(os.str());
  }
  // Stationary support is the rectangle |x_xi| < 1/(mu0 nu), |y_xi| < 1/(mu0 mu).
  const double a = 1.0 / (mu0 * nu), b = 1.0 / (mu0 * mu);
  const double rho = std::sqrt(a * a + b * b);
  if (rho >= 0.5) fail("stationary support wraps around the torus");
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (torus_distance(center(i), center(j)) <= 2.0 * rho) fail("stationary supports overlap");

  // Temporal supports [t_xi, t_xi + 1/(2 eta)] modulo one must be disjoint.
  const double len = 0.5 / eta;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && frac(t_offset(j, k) - t_offset(i, k)) < len)
        fail("overlapping time offsets");
}

PaperJetScales paper_jet_scales(double lambda, double gamma) {
  if (!(lambda > 1.0) || !(gamma > 0.0) || !(gamma < 1.0 / 8.0))
    throw std::invalid_argument("paper_jet_scales: need lambda > 1 and 0 < gamma < 1/8");
  return {std::pow(lambda, 2 * gamma), std::pow(lambda, 16 * gamma), std::pow(lambda, 1 - 8 * gamma),
          lambda, std::pow(lambda, 1 + 5 * gamma)};
}

Oscillators::Oscillators(const JetParams& p, std::size_t count)
    : sigma_(p.sigma), eta_(p.eta), theta_(p.theta), order_(p.bump_order) {
  const Poly base = power(Poly{1.0, 0.0, -1.0}, order_);
  const Poly p1 = mul(Poly{0.0, 1.0}, base);
  const Poly p2 = mul(p1, p1);
  poly1_ = antiderivative(p1);
  poly2_ = antiderivative(p2);
  c_ = std::sqrt(4.0 / eval(poly2_, 1.0));
  for (std::size_t i = 0; i < count; ++i) offsets_.push_back(p.t_offset(i, count));
}

double Oscillators::G(double u) const {
  if (u <= 0.0 || u >= 0.5) return 0.0;
  const double s = 4.0 * u - 1.0;
  return c_ * s * std::pow(1.0 - s * s, order_);
}

double Oscillators::gt(std::size_t i, double tau) const {
  return std::sqrt(double(eta_)) * G(eta_ * frac(tau - offsets_[i]));
}

double Oscillators::g(std::size_t i, double t) const { return gt(i, sigma_ * t); }

double Oscillators::dg(std::size_t i, double t) const {
  const double u = eta_ * frac(sigma_ * t - offsets_[i]);
  if (u <= 0.0 || u >= 0.5) return 0.0;
  const double s = 4.0 * u - 1.0, q = 1.0 - s * s;
  const double dGdu = 4.0 * c_ * (std::pow(q, order_) - 2.0 * order_ * s * s * std::pow(q, order_ - 1));
  return sigma_ * std::pow(double(eta_), 1.5) * dGdu;
}

double Oscillators::F1(double f) const {
  const double s = std::min(4.0 * eta_ * f - 1.0, 1.0);
  if (s <= -1.0) return 0.0;
  return c_ / 4.0 * eval(poly1_, s) / std::sqrt(double(eta_));
}

double Oscillators::F2(double f) const {
  const double s = std::min(4.0 * eta_ * f - 1.0, 1.0);
  if (s <= -1.0) return 0.0;
  return c_ * c_ / 4.0 * eval(poly2_, s);
}

double Oscillators::h(std::size_t i, double t) const {
  const double tau = sigma_ * t, o = offsets_[i];
  auto P = [&](double x) { return std::floor(x) + F2(frac(x)); };
  return P(tau - o) - P(-o) - tau;
}

double Oscillators::phi(std::size_t i, double t) const {
  const double tau = sigma_ * t, o = offsets_[i];
  return double(theta_) / sigma_ * (F1(frac(tau - o)) - F1(frac(-o)));
}

std::vector<StationaryJet> build_stationary_jets(const JetParams& p, const DirectionSet& dirs) {
  p.validate(dirs);
  const PeriodicGrid grid(p.n);
  const int K = p.stationary_kmax();
  std::vector<StationaryJet> out(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t i) {
    StationaryJet& J = out[i];
    J.xi = dirs.xi[i];
    J.xi_perp = dirs.perp(i);
    const Vec2 c = p.center(i);
    Field psi(grid, Rank::Scalar), w(grid, Rank::Vector), wc(grid, Rank::Vector);
    const double amp = std::sqrt(double(p.nu) * p.mu) / p.mu;
    for (int k1 = -K; k1 <= K; ++k1) {
      for (int k2 = 0; k2 <= K; ++k2) {
        const double kx = k1 * J.xi[0] + k2 * J.xi[1];
        const double ky = k1 * J.xi_perp[0] + k2 * J.xi_perp[1];
        const double mag = amp * bump_transform(kx / p.nu, p.mu0, p.bump_order) / p.nu *
                           bump_transform(ky / p.mu, p.mu0, p.bump_order) / p.mu;
        const cplx v = mag * std::exp(cplx(0.0, -kTwoPi * (k1 * c[0] + k2 * c[1])));
        psi.at(0, k1, k2) = v;
        const cplx dy = cplx(0.0, kTwoPi * ky) * v, dx = cplx(0.0, kTwoPi * kx) * v;
        for (int d = 0; d < 2; ++d) {
          w.at(d, k1, k2) = -dy * J.xi[d];
          wc.at(d, k1, k2) = dx * J.xi_perp[d];
        }
      }
    }
    J.c = 1.0 / w.l2_norm();
    J.Psi = psi * J.c;
    J.W = w * J.c;
    J.Wc = wc * J.c;
  });
  return out;
}

JetFamily::JetFamily(const JetParams& p, const DirectionSet& dirs)
    : p_(p), dirs_(dirs), osc_(p, dirs.size()), jets_(build_stationary_jets(p, dirs)) {}

Field JetFamily::move(const Field& X, std::size_t i, double t) const {
  const int K = p_.stationary_kmax(), s = p_.sigma;
  const double ph = osc_.phi(i, t);
  const Vec2 xi = dirs_.xi[i];
  Field out(X.grid(), X.rank());
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = 0; k2 <= K; ++k2) {
      const cplx e = std::exp(cplx(0.0, kTwoPi * ph * (k1 * xi[0] + k2 * xi[1])));
      for (int c = 0; c < X.ncomp(); ++c) out.at(c, s * k1, s * k2) = e * X.at(c, k1, k2);
    }
  return out;
}

Field JetFamily::dt_moving(const Field& X, std::size_t i, double t) const {
  const Vec2 xi = dirs_.xi[i];
  Field d = derivative(X, 0) * xi[0] + derivative(X, 1) * xi[1];
  return d * (double(p_.theta) * osc_.g(i, t) / p_.sigma);
}

JetFields build_moving_jets(const JetFamily& fam, double t0, double dt, int frames) {
  const JetParams& p = fam.params();
  if (!(dt > 0.0) || frames < 1) fail("need dt > 0 and at least one frame");
  if (dt > 1.0 / (8.0 * p.sigma * p.eta) * (1.0 + 1e-12))
    fail("time step does not resolve the oscillator bump (dt > 1/(8 sigma eta))");
  const double r = t0 / dt;
  if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, std::abs(r)))
    fail("window start is not aligned with dt");
  JetFields out;
  for (int k = 0; k < frames; ++k) out.times.push_back(t0 + k * dt);
  const std::size_t m = fam.size();
  out.W.resize(m);
  out.Wc.resize(m);
  out.Psi.resize(m);
  out.g.assign(m, {});
  out.h.assign(m, {});
  out.phi.assign(m, {});
  parallel_for(m, [&](std::size_t i) {
    for (double t : out.times) {
      out.W[i].times.push_back(t);
      out.W[i].frames.push_back(fam.W(i, t));
      out.Wc[i].times.push_back(t);
      out.Wc[i].frames.push_back(fam.Wc(i, t));
      out.Psi[i].times.push_back(t);
      out.Psi[i].frames.push_back(fam.Psi(i, t));
      out.g[i].push_back(fam.osc().g(i, t));
      out.h[i].push_back(fam.osc().h(i, t));
      out.phi[i].push_back(fam.osc().phi(i, t));
    }
  });
  return out;
}

}  // namespace convint
