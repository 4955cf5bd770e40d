// SPDX-License-Identifier: MIT
#include "convint/v1_solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "convint/besov.hpp"
#include "convint/spectral.hpp"
#include "convint/threads.hpp"

namespace convint {

namespace {

void check_problem(const V1Problem& p) {
  if (!p.noise) throw std::invalid_argument("v1_solve: noise trajectory missing");
  p.v2.validate();
  if (p.v2.size() != p.noise->size()) throw std::invalid_argument("v1_solve: v2 and noise frame counts differ");
  for (std::size_t k = 0; k < p.v2.size(); ++k)
    if (std::abs(p.v2.times[k] - p.noise->z.times[k]) > 1e-12) throw std::invalid_argument("v1_solve: time grids differ");
  if (!(p.frakc > 0.0)) throw std::invalid_argument("v1_solve: damping must be positive");
}

// Per-mode e^{-L dt}, dt phi1(-L dt), dt phi2(-L dt) with L = c + 4 pi^2 |k|^2.
struct Propagator {
  std::vector<double> e, p1, p2;
};

Propagator make_propagator(const PeriodicGrid& g, double c, double dt) {
  Propagator P;
  const int h = g.half();
  for (int r = 0; r < g.n(); ++r)
    for (int k2 = 0; k2 < h; ++k2) {
      const double k1 = g.k1(r);
      const double z = -(c + 4.0 * kPi * kPi * (k1 * k1 + double(k2) * k2)) * dt;
      P.e.push_back(std::exp(z));
      P.p1.push_back(dt * phi1(z));
      P.p2.push_back(dt * phi2(z));
    }
  return P;
}

Field scale(const std::vector<double>& a, const Field& x) {
  Field out(x.grid(), x.rank());
  for (int comp = 0; comp < x.ncomp(); ++comp)
    for (std::size_t i = 0; i < x.comp_size(); ++i) out.comp(comp)[i] = a[i] * x.comp(comp)[i];
  return out;
}

double rel(const Field& d, const Field& ref) { return d.l2_norm() / std::max(1.0, ref.l2_norm()); }

}  // namespace

Field v1_localized_noise(const V1Problem& p, std::size_t frame) {
  const Field& z = p.noise->z.frames[frame];
  return freq_project(freq_project(z, p.noise->radius[frame], FreqPart::High), p.f_q, FreqPart::Low);
}

Field v1_rhs(const Field& v1, const V1Problem& p, std::size_t frame, const Field& Z) {
  const Field v = v1 + p.v2.frames[frame];
  Field inner = divergence(p.noise->z2.frames[frame]);
  if (Z.max_abs() > 0.0)
    inner += divergence(paraproduct(v, Z, ParaKind::Lower) + paraproduct(Z, v, ParaKind::Upper));
  return helmholtz_project(p.noise->z.frames[frame] - inner);
}

Field v1_rhs(const Field& v1, const V1Problem& p, std::size_t frame) {
  return v1_rhs(v1, p, frame, v1_localized_noise(p, frame));
}

V1Solution v1_solve(const V1Problem& p) {
  check_problem(p);
  const std::size_t K = p.v2.size();
  const PeriodicGrid& g = p.v2.frames[0].grid();
  const double dt = p.v2.dt();
  V1Solution sol;
  sol.picard_iters.assign(K, 0);
  sol.residual.assign(K, 0.0);
  std::vector<Field> v(K, Field(g, Rank::Vector));

  std::size_t start = 0;
  if (p.v1_start.empty()) {
    const double eps = 1e-9 * std::max(dt, 1e-300);
    while (start < K && p.v2.times[start] < -eps) ++start;
    if (start == K) {
      sol.v1 = TimeSeriesField::uniform(p.v2.times[0], dt, std::move(v));
      return sol;
    }
    if (std::abs(p.v2.times[start]) > eps)
      throw std::invalid_argument("v1_solve: window starts after t = 0 and no starting value was supplied");
  } else {
    v[0] = helmholtz_project(p.v1_start);
  }

  std::vector<Field> Z(K);
  parallel_for(K - start, [&](std::size_t i) { Z[start + i] = v1_localized_noise(p, start + i); });
  if (K - start < 2) {
    sol.v1 = TimeSeriesField::uniform(p.v2.times[0], dt, std::move(v));
    return sol;
  }
  const Propagator P = make_propagator(g, p.frakc, dt);
  Field F0 = v1_rhs(v[start], p, start, Z[start]);
  for (std::size_t k = start; k + 1 < K; ++k) {
    const Field explicit_part = scale(P.e, v[k]) + scale(P.p1, F0);
    const Field base = explicit_part - scale(P.p2, F0);
    Field cur = explicit_part;
    Field F1;
    int it = 0;
    for (;; ++it) {
      if (it >= p.picard_max)
        throw std::runtime_error("v1_solve: Picard iteration did not contract within " + std::to_string(p.picard_max) +
                                 " sweeps at t = " + std::to_string(p.v2.times[k + 1]) +
                                 " (increase the damping or reduce dt)");
      F1 = v1_rhs(cur, p, k + 1, Z[k + 1]);
      Field next = base + scale(P.p2, F1);
      const double d = rel(next - cur, next);
      cur = std::move(next);
      if (d < p.picard_tol) break;
    }
    sol.picard_iters[k + 1] = it + 1;
    v[k + 1] = std::move(cur);
    F0 = std::move(F1);
  }

  // Substitute the solution back into the one-step mild formula.
  std::vector<Field> F(K);
  parallel_for(K - start, [&](std::size_t i) { F[start + i] = v1_rhs(v[start + i], p, start + i, Z[start + i]); });
  for (std::size_t k = start; k + 1 < K; ++k) {
    const Field pred = scale(P.e, v[k]) + scale(P.p1, F[k]) + scale(P.p2, F[k + 1] - F[k]);
    sol.residual[k + 1] = rel(v[k + 1] - pred, v[k + 1]);
  }
  sol.v1 = TimeSeriesField::uniform(p.v2.times[0], dt, std::move(v));
  return sol;
}

double localizer_difference_norm(const Field& z, double J1, double J2, double s) {
  const Field d = freq_project(z, J2, FreqPart::Low) - freq_project(z, J1, FreqPart::Low);
  return holder_norm(d, s);
}

}  // namespace convint
