// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <string>
#include <vector>

#include "convint/field.hpp"

namespace convint {

using Vec2 = std::array<double, 2>;
using Sym2 = std::array<double, 3>;  // (11, 12, 22)

// Rational unit directions xi = (a/c, b/c) with a^2 + b^2 = c^2.
struct DirectionSet {
  std::vector<std::array<int, 3>> triples;
  std::vector<Vec2> xi;
  std::array<std::array<double, 3>, 3> inverse{};  // maps R (11, 12, 22) to coefficients
  double r_star = 0.0;

  static DirectionSet make(const std::vector<std::array<int, 3>>& triples);
  static DirectionSet default_set();  // {(3/5, 4/5), (3/5, -4/5), (1, 0)}
  std::size_t size() const { return xi.size(); }
  Vec2 perp(std::size_t i) const { return {xi[i][1], -xi[i][0]}; }
};

// gamma_xi^2(R): the unique coefficients with sum c_xi xi (x) xi = R. With
// check set, R must satisfy |R - Id|_F <= r_star (throws with the distance).
Sym2 geometric_coefficients(const Sym2& R, const DirectionSet& dirs, bool check = true);
double frobenius_distance_to_identity(const Sym2& R);

struct JetParams {
  int n = 256;
  int sigma = 2, eta = 2, nu = 4, mu = 8, theta = 4;
  double mu0 = 3.0;
  int bump_order = 4;
  std::vector<Vec2> centers;  // empty: defaults per direction
  std::vector<double> t_offsets;  // empty: i / |Lambda|

  static JetParams desk();
  // Largest stationary wavenumber kept per axis, so that sigma K <= n/4 - 1.
  int stationary_kmax() const { return (n / 4 - 1) / sigma; }
  Vec2 center(std::size_t i) const;
  double t_offset(std::size_t i, std::size_t count) const;
  // Throws std::invalid_argument naming the violated condition.
  void validate(const DirectionSet& dirs) const;
};

// (lambda^{2g}, lambda^{16g}, lambda^{1-8g}, lambda, lambda^{1+5g}) for (sigma, eta, nu, mu, theta).
struct PaperJetScales {
  double sigma, eta, nu, mu, theta;
};
PaperJetScales paper_jet_scales(double lambda, double gamma);

// Temporal profile G(u) = c s (1 - s^2)^m, s = 4u - 1, supported in (0, 1/2),
// with int G = 0 and int G^2 = 1 over [0, 1].
class Oscillators {
 public:
  Oscillators(const JetParams& p, std::size_t count);

  double G(double u) const;
  double g(std::size_t i, double t) const;
  double dg(std::size_t i, double t) const;
  double h(std::size_t i, double t) const;
  double dh(std::size_t i, double t) const { return sigma_ * (g(i, t) * g(i, t) - 1.0); }
  double phi(std::size_t i, double t) const;  // phi' = theta g, phi(0) = 0
  std::size_t count() const { return offsets_.size(); }

 private:
  double gt(std::size_t i, double tau) const;  // g tilde
  double F1(double f) const;  // int_0^f g tilde(t_xi + s) ds on one period
  double F2(double f) const;  // int_0^f g tilde^2(t_xi + s) ds on one period

  int sigma_, eta_, theta_, order_;
  double c_;
  std::vector<double> offsets_;
  std::vector<double> poly1_, poly2_;  // antiderivatives in s of s(1-s^2)^m and s^2(1-s^2)^{2m}
};

struct StationaryJet {
  Vec2 xi, xi_perp;
  double c = 0.0;  // normalizing constant
  Field Psi, W, Wc;  // band-limited periodized profiles, |k|_inf <= stationary_kmax
};

std::vector<StationaryJet> build_stationary_jets(const JetParams& p, const DirectionSet& dirs);

// Moving jets X(x, t) = X~(sigma x + phi(t) xi), evaluated exactly by phase shifts.
class JetFamily {
 public:
  JetFamily(const JetParams& p, const DirectionSet& dirs);

  const JetParams& params() const { return p_; }
  const DirectionSet& directions() const { return dirs_; }
  const Oscillators& osc() const { return osc_; }
  const StationaryJet& stationary(std::size_t i) const { return jets_[i]; }
  std::size_t size() const { return jets_.size(); }

  Field W(std::size_t i, double t) const { return move(jets_[i].W, i, t); }
  Field Wc(std::size_t i, double t) const { return move(jets_[i].Wc, i, t); }
  Field Psi(std::size_t i, double t) const { return move(jets_[i].Psi, i, t); }
  // d/dt X = sigma^{-1} theta g (xi . grad) X for X in {W, Wc, Psi}.
  Field dt_moving(const Field& moving, std::size_t i, double t) const;
  Field move(const Field& stationary, std::size_t i, double t) const;

 private:
  JetParams p_;
  DirectionSet dirs_;
  Oscillators osc_;
  std::vector<StationaryJet> jets_;
};

struct JetFields {
  std::vector<TimeSeriesField> W, Wc, Psi;
  std::vector<std::vector<double>> g, h, phi;
  std::vector<double> times;
};

// Samples every jet on t0 + k dt, k = 0..frames-1. Requires dt <= 1/(8 sigma eta).
JetFields build_moving_jets(const JetFamily& fam, double t0, double dt, int frames);

}  // namespace convint
