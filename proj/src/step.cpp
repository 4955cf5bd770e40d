// SPDX-License-Identifier: MIT
#include "convint/step.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "convint/besov.hpp"
#include "convint/spectral.hpp"
#include "convint/threads.hpp"
#include "convint/v1_solver.hpp"

namespace convint {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("step: " + what); }

// s xi (x) xi as a symtensor.
Field dyad(const Field& s, const Vec2& xi) {
  return Field::from_components({s * (xi[0] * xi[0]), s * (xi[0] * xi[1]), s * (xi[1] * xi[1])}, Rank::SymTensor);
}

Field along(const Field& s, const Vec2& xi) { return Field::from_components({s * xi[0], s * xi[1]}, Rank::Vector); }

Field directional(const Field& f, const Vec2& xi) { return derivative(f, 0) * xi[0] + derivative(f, 1) * xi[1]; }

// Second-order differences, one-sided at the ends.
Field ddt(const std::vector<Field>& f, std::size_t k, double dt) {
  const std::size_t K = f.size();
  if (K < 3) fail("time derivative needs at least three frames");
  if (k == 0) return (f[1] * 4.0 - f[0] * 3.0 - f[2]) * (0.5 / dt);
  if (k == K - 1) return (f[K - 1] * 3.0 - f[K - 2] * 4.0 + f[K - 3]) * (0.5 / dt);
  return (f[k + 1] - f[k - 1]) * (0.5 / dt);
}

Field drop_nyquist(const Field& f) { return low_pass(f, f.n() / 2 - 1); }

double max_trace(const Field& R) { return (R.component(0) + R.component(2)).max_abs(); }

// Index of the noise frame matching t0, with K frames available from there.
std::size_t noise_offset(const NoiseTrajectory& noise, const TimeSeriesField& ref) {
  const double dt = ref.dt();
  const double tol = 1e-9 * std::max(dt, 1e-300);
  for (std::size_t i = 0; i < noise.size(); ++i)
    if (std::abs(noise.z.times[i] - ref.times.front()) < tol) {
      if (i + ref.size() > noise.size()) break;
      for (std::size_t k = 0; k < ref.size(); ++k)
        if (std::abs(noise.z.times[i + k] - ref.times[k]) > tol) fail("noise and state time grids differ");
      return i;
    }
  fail("noise trajectory does not cover the state window");
}

NoiseTrajectory slice(const NoiseTrajectory& tr, std::size_t from, std::size_t count) {
  NoiseTrajectory out;
  const double dt = tr.z.dt();
  out.z = TimeSeriesField::uniform(tr.z.times[from], dt, {tr.z.frames.begin() + from, tr.z.frames.begin() + from + count});
  out.z2 =
      TimeSeriesField::uniform(tr.z.times[from], dt, {tr.z2.frames.begin() + from, tr.z2.frames.begin() + from + count});
  out.radius.assign(tr.radius.begin() + from, tr.radius.begin() + from + count);
  return out;
}

struct SplitNoise {
  Field L, H;
};

SplitNoise split_noise(const NoiseTrajectory& tr, std::size_t k) {
  const Field& z = tr.z.frames[k];
  return {freq_project(z, tr.radius[k], FreqPart::Low), freq_project(z, tr.radius[k], FreqPart::High)};
}

double mean_abs(const Field& v) {
  double m = 0.0;
  for (int c = 0; c < v.ncomp(); ++c) m = std::max(m, std::abs(v.mean(c)));
  return m;
}

double residual_frame(const Field& dtv2, const Field& v1, const Field& v2, const Field& R, const SplitNoise& z,
                      double frakc) {
  const Field rhs = dtv2 - laplacian(v2) - v1 * frakc + divergence(nonlinear_flux(v1 + v2, z.L, z.H)) - divergence(R);
  return drop_nyquist(helmholtz_project(rhs)).l2_norm();
}

}  // namespace

void StepState::validate() const {
  v1.validate();
  v2.validate();
  R.validate();
  if (v2.size() < 3) fail("state needs at least three frames");
  if (v1.size() != v2.size() || R.size() != v2.size()) fail("state components have different frame counts");
  for (std::size_t k = 0; k < v2.size(); ++k)
    if (v1.times[k] != v2.times[k] || R.times[k] != v2.times[k]) fail("state components have different times");
  if (v1.frames[0].rank() != Rank::Vector || v2.frames[0].rank() != Rank::Vector ||
      R.frames[0].rank() != Rank::SymTensor)
    fail("state ranks must be (vector, vector, symtensor)");
}

Field rho_frame(const Field& R, double l, double inflation) {
  if (R.rank() != Rank::SymTensor) fail("rho needs a symtensor");
  if (!(l > 0.0)) fail("rho needs l > 0");
  const std::size_t np = R.grid().phys_size();
  const auto v = R.to_physical();
  std::vector<double> rho(np);
  for (std::size_t p = 0; p < np; ++p) {
    const double m2 = v[p] * v[p] + 2.0 * v[np + p] * v[np + p] + v[2 * np + p] * v[2 * np + p];
    rho[p] = std::sqrt(l * l + inflation * inflation * m2);
  }
  return Field::from_physical(R.grid(), Rank::Scalar, rho);
}

TimeSeriesField rho_field(const TimeSeriesField& R, double l, double inflation) {
  std::vector<Field> out(R.size());
  parallel_for(R.size(), [&](std::size_t k) { out[k] = rho_frame(R.frames[k], l, inflation); });
  TimeSeriesField ts;
  ts.times = R.times;
  ts.frames = std::move(out);
  return ts;
}

AmplitudeFrame amplitudes_frame(const Field& R_l, double l, const DirectionSet& dirs, double clamp_margin, int kmax,
                                double inflation) {
  if (R_l.rank() != Rank::SymTensor) fail("amplitudes need a symtensor stress");
  if (!(l > 0.0)) fail("amplitudes need l > 0");
  if (!(clamp_margin > 0.0 && clamp_margin <= 1.0)) fail("clamp margin must lie in (0, 1]");
  if (!(inflation >= 1.0)) fail("rho inflation must be >= 1");
  const PeriodicGrid& g = R_l.grid();
  const int n = g.n();
  const std::size_t np = g.phys_size(), nd = dirs.size();
  if (nd != 3) fail("amplitudes need exactly three directions");
  if (kmax < 0) kmax = n / 4 - 1;
  const auto R = R_l.to_physical();
  const double lim = dirs.r_star * clamp_margin;
  std::vector<double> rho(np), Rc(3 * np), a(nd * np);
  AmplitudeFrame out;
  std::size_t clamped = 0;
  for (std::size_t p = 0; p < np; ++p) {
    const double r11 = R[p], r12 = R[np + p], r22 = R[2 * np + p];
    const double mag = std::sqrt(r11 * r11 + 2.0 * r12 * r12 + r22 * r22);
    const double rh = std::sqrt(l * l + inflation * inflation * mag * mag);
    double s = 1.0;
    if (mag > lim * rh) {
      s = lim * rh / mag;
      ++clamped;
    }
    out.clamp_max = std::max(out.clamp_max, (1.0 - s) * mag);
    const Sym2 c{s * r11, s * r12, s * r22};
    rho[p] = rh;
    Rc[p] = c[0], Rc[np + p] = c[1], Rc[2 * np + p] = c[2];
    const Sym2 M{1.0 - c[0] / rh, -c[1] / rh, 1.0 - c[2] / rh};
    const Sym2 coef = geometric_coefficients(M, dirs, false);
    Sym2 S{};
    for (std::size_t i = 0; i < nd; ++i) {
      if (!(coef[i] >= 0.0)) {
        std::ostringstream os;
        os << "amplitudes: negative coefficient " << coef[i] << " for direction " << i << " at x = ("
           << double(p / n) / n << ", " << double(p % n) / n << "), |R_l|/rho = " << s * mag / rh;
        throw std::domain_error(os.str());
      }
      const double ai = std::sqrt(rh * coef[i]);
      a[i * np + p] = ai;
      const Vec2& xi = dirs.xi[i];
      S[0] += ai * ai * xi[0] * xi[0], S[1] += ai * ai * xi[0] * xi[1], S[2] += ai * ai * xi[1] * xi[1];
    }
    const double d = std::max({std::abs(S[0] - (rh - c[0])), std::abs(S[1] + c[1]), std::abs(S[2] - (rh - c[2]))});
    out.phoid_residual = std::max(out.phoid_residual, d);
  }
  out.clamp_fraction = double(clamped) / double(np);
  out.rho = Field::from_physical(g, Rank::Scalar, rho);
  out.R_clamped = Field::from_physical(g, Rank::SymTensor, Rc);
  for (std::size_t i = 0; i < nd; ++i) {
    out.a.push_back(Field::from_physical(g, Rank::Scalar, std::span<const double>(a.data() + i * np, np)));
    out.a_bl.push_back(low_pass(out.a.back(), kmax));
  }
  return out;
}

Perturbation perturbations_frame(const std::vector<Field>& a_bl, const JetFamily& fam, double t) {
  if (a_bl.size() != fam.size()) fail("one amplitude per direction expected");
  const PeriodicGrid& g = a_bl[0].grid();
  if (g.n() != fam.params().n) fail("amplitude and jet grids differ");
  const double sigma = fam.params().sigma, theta = fam.params().theta;
  Perturbation w{Field(g, Rank::Vector), Field(g, Rank::Vector), Field(g, Rank::Vector), Field(g, Rank::Vector)};
  Field wo_pre(g, Rank::Vector), wa_pre(g, Rank::Vector);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const Field& a = a_bl[i];
    const double gi = fam.osc().g(i, t), hi = fam.osc().h(i, t);
    const Vec2& xi = fam.directions().xi[i];
    const Field a2 = multiply(a, a);
    if (gi != 0.0) {
      const Field W = fam.W(i, t);
      w.wp += multiply(a, W) * gi;
      w.wc += (multiply(a, fam.Wc(i, t)) + multiply(fam.Psi(i, t), perp_gradient(a)) * (1.0 / sigma)) * gi;
      wa_pre += along(multiply(a2, remove_mean(dot(W, W))), xi) * gi;
    }
    wo_pre += along(directional(a2, xi), xi) * hi;
  }
  w.wo = helmholtz_project(remove_mean(wo_pre)) * (-1.0 / sigma);
  w.wa = helmholtz_project(remove_mean(wa_pre)) * (-sigma / theta);
  return w;
}

double curl_form_residual(const Perturbation& w, const std::vector<Field>& a_bl, const JetFamily& fam, double t) {
  const PeriodicGrid& g = a_bl[0].grid();
  Field s(g, Rank::Scalar);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double gi = fam.osc().g(i, t);
    if (gi != 0.0) s += multiply(a_bl[i], fam.Psi(i, t)) * gi;
  }
  const Field expect = perp_gradient(s) * (1.0 / fam.params().sigma);
  return (expect - w.wp - w.wc).max_abs();
}

double oscillation_identity_residual(const Field& wp, const AmplitudeFrame& amp, const Field& R_l,
                                     const JetFamily& fam, double t, double dealias_factor) {
  const PeriodicGrid& g = wp.grid();
  const Field lhs = outer_self(wp, dealias_factor) + R_l;
  Field rhs = identity_times(amp.rho) + (R_l - amp.R_clamped);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const Vec2& xi = fam.directions().xi[i];
    const double gi = fam.osc().g(i, t);
    const Field at2 = multiply(amp.a_bl[i], amp.a_bl[i]);
    const Field a2 = Field::from_physical(g, Rank::Scalar, [&] {
      auto v = amp.a[i].to_physical();
      for (auto& x : v) x *= x;
      return v;
    }());
    if (gi != 0.0) rhs += multiply(at2, remove_mean(outer_self(fam.W(i, t)))) * (gi * gi);
    rhs += dyad(at2, xi) * (gi * gi - 1.0) + dyad(at2 - a2, xi);
  }
  return (lhs - rhs).max_abs();
}

Field linear_flux(const Field& v, const Field& Lz, const Field& Hz) {
  Field out = sym_outer(v, Lz);
  if (Hz.max_abs() > 0.0) {
    const ParaSplit s = paraproduct_split(v, Hz);
    // Hz <= v is the transpose of v >= Hz.
    out += sym_part(s.resonant + s.upper) * 2.0;
  }
  return out;
}

Field nonlinear_flux(const Field& v, const Field& Lz, const Field& Hz) { return linear_flux(v, Lz, Hz) + outer_self(v); }

double StepReport::ledger_value(const std::string& name) const {
  for (const auto& [k, v] : ledger)
    if (k == name) return v;
  throw std::out_of_range("ledger component " + name);
}

NormTable norm_table(const StepState& s) {
  NormTable t;
  const double dt = s.v2.dt();
  const std::size_t K = s.size();
  std::vector<double> l2(K), c1(K), w(K), r1(K);
  parallel_for(K, [&](std::size_t k) {
    const Field& v = s.v2.frames[k];
    l2[k] = v.l2_norm();
    c1[k] = v.max_abs() + gradient(v).max_abs() + (K >= 3 ? ddt(s.v2.frames, k, dt).max_abs() : 0.0);
    w[k] = sobolev_norm(v, 0.5, 1.2);
    r1[k] = lp_norm(s.R.frames[k], 1.0);
  });
  for (std::size_t k = 0; k < K; ++k) {
    t.v2_L2L2 += dt * l2[k] * l2[k];
    t.v2_C1 = std::max(t.v2_C1, c1[k]);
    t.v2_W12_65 = std::max(t.v2_W12_65, w[k]);
    t.R_L1L1 += dt * r1[k];
  }
  t.v2_L2L2 = std::sqrt(t.v2_L2L2);
  return t;
}

std::vector<double> master_residuals(const StepState& s, const NoiseTrajectory& noise, double frakc) {
  s.validate();
  const std::size_t off = noise_offset(noise, s.v2);
  const std::size_t K = s.size();
  std::vector<double> out(K - 2);
  parallel_for(K - 2, [&](std::size_t i) {
    const std::size_t k = i + 1;
    out[i] = residual_frame(ddt(s.v2.frames, k, s.v2.dt()), s.v1.frames[k], s.v2.frames[k], s.R.frames[k],
                            split_noise(noise, off + k), frakc);
  });
  return out;
}

StepResult step(const StepState& state, const NoiseTrajectory& noise, const StepConfig& cfg, const DumpFn& dump) {
  state.validate();
  const IterationParams& ip = cfg.iter;
  const double l = ip.l, dt = state.v2.dt(), frakc = ip.frakc_value();
  const PeriodicGrid& g = state.v2.frames[0].grid();
  const int n = g.n();
  if (!(l > 2.0 / n)) fail("mollification scale l must exceed 2/n");
  const std::size_t off = noise_offset(noise, state.v2);
  const std::size_t Kin = state.size();
  const std::size_t M = time_mollifier_weights(l, dt).size() - 1;
  if (Kin < M + 3) fail("window too short: need at least ceil(l/dt) + 3 frames");
  const std::size_t K = Kin - M;

  JetParams jp = cfg.jets;
  jp.n = n;
  jp.validate(cfg.dirs);
  const JetFamily fam(jp, cfg.dirs);
  const std::size_t nd = fam.size();
  const double sigma = jp.sigma, theta = jp.theta;
  auto emit = [&](const std::string& name, std::size_t k, double t, const Field& f) {
    if (dump) dump(name, k, t, f);
  };

  // Level-q fields and the nonlinear flux on the input window.
  std::vector<SplitNoise> zin(Kin);
  std::vector<Field> vq(Kin), Ncom(Kin);
  parallel_for(Kin, [&](std::size_t k) {
    zin[k] = split_noise(noise, off + k);
    vq[k] = state.v1.frames[k] + state.v2.frames[k];
    Ncom[k] = nonlinear_flux(vq[k], zin[k].L, zin[k].H);
  });
  const TimeSeriesField v1l = mollify_spacetime(state.v1, l);
  const TimeSeriesField v2l = mollify_spacetime(state.v2, l);
  const TimeSeriesField Rl = mollify_spacetime(state.R, l);
  const TimeSeriesField Nl = mollify_spacetime(TimeSeriesField{state.v2.times, Ncom}, l);
  const std::vector<double>& times = Rl.times;

  StepReport rep;
  rep.q = state.q + 1;
  rep.t0 = times.front(), rep.t1 = times.back(), rep.dt = dt;
  rep.frames = K, rep.dropped = M;

  // Pass 1: amplitudes, perturbations and the new v2.
  std::vector<std::vector<Field>> at(K);
  std::vector<Field> wp(K), w(K), v2n(K);
  std::vector<double> phoid(K), osc(K), curl(K), cmax(K), cfrac(K), aC0(K), rhoC0(K), wpC0(K);
  parallel_for(K, [&](std::size_t k) {
    const double t = times[k];
    AmplitudeFrame amp =
        amplitudes_frame(Rl.frames[k], l, cfg.dirs, cfg.clamp_margin, cfg.amplitude_kmax, cfg.rho_inflation);
    if (!cfg.perturb)
      for (auto& a : amp.a_bl) a = Field(g, Rank::Scalar);
    const Perturbation pw = perturbations_frame(amp.a_bl, fam, t);
    phoid[k] = amp.phoid_residual;
    cmax[k] = amp.clamp_max;
    cfrac[k] = amp.clamp_fraction;
    curl[k] = curl_form_residual(pw, amp.a_bl, fam, t);
    osc[k] = cfg.perturb ? oscillation_identity_residual(pw.wp, amp, Rl.frames[k], fam, t, cfg.dealias_factor) : 0.0;
    for (const auto& a : amp.a_bl) aC0[k] = std::max(aC0[k], a.max_abs());
    rhoC0[k] = amp.rho.max_abs();
    wpC0[k] = pw.wp.max_abs();
    wp[k] = pw.wp;
    w[k] = pw.total();
    v2n[k] = v2l.frames[k] + w[k];
    at[k] = std::move(amp.a_bl);
    if (dump) {
      emit("rho", k, t, amp.rho);
      emit("R_l", k, t, Rl.frames[k]);
      emit("R_clamped", k, t, amp.R_clamped);
      for (std::size_t i = 0; i < nd; ++i) emit("a_" + std::to_string(i), k, t, at[k][i]);
      emit("w_p", k, t, pw.wp);
      emit("w_c", k, t, pw.wc);
      emit("w_o", k, t, pw.wo);
      emit("w_a", k, t, pw.wa);
    }
  });

  // v1 at level q+1 on the output window.
  const NoiseTrajectory nout = slice(noise, off + M, K);
  V1Problem vp;
  vp.q = state.q + 1;
  vp.f_q = ip.f(state.q + 1);
  vp.frakc = frakc;
  vp.v2 = TimeSeriesField::uniform(times.front(), dt, v2n);
  vp.noise = &nout;
  if (times.front() > 1e-9 * dt) vp.v1_start = state.v1.frames[M];
  V1Solution v1s = v1_solve(vp);
  for (std::size_t k = 0; k < K; ++k) {
    rep.picard_max = std::max(rep.picard_max, v1s.picard_iters[k]);
    rep.v1_residual = std::max(rep.v1_residual, v1s.residual[k]);
  }
  rep.v1_picard = v1s.picard_iters;
  rep.v1_residuals = v1s.residual;
  const std::vector<Field>& v1n = v1s.v1.frames;

  // Pass 2: the stress ledger.
  static const char* names[] = {"R_lin", "R_cor", "R_osc_x", "R_osc_a", "R_osc_t", "R_amp",
                                "R_com", "R_com1", "R_com2", "R_com3"};
  constexpr int NC = 10;
  std::vector<Field> Rn(K);
  std::vector<std::array<double, NC>> norms(K);
  std::vector<double> trace_def(K);
  std::vector<std::string> bad(K);
  parallel_for(K, [&](std::size_t k) {
    const double t = times[k];
    const std::size_t kin = k + M;
    std::vector<Field> a2(nd), Da2(nd);
    Field dwpc(g, Rank::Vector);
    Field Rlin, Rcor, Rox(g, Rank::SymTensor), Roa(g, Rank::SymTensor), Rot(g, Rank::SymTensor), Ramp = Rl.frames[k];
    Field dpsi(g, Rank::Scalar);
    for (std::size_t i = 0; i < nd; ++i) {
      // Differences only need the neighbouring frames.
      const std::size_t lo = k == 0 ? 0 : (k == K - 1 ? K - 3 : k - 1);
      const Field Da = ddt({at[lo][i], at[lo + 1][i], at[lo + 2][i]}, k - lo, dt);
      const Field& a = at[k][i];
      const Vec2& xi = cfg.dirs.xi[i];
      const double gi = fam.osc().g(i, t), dgi = fam.osc().dg(i, t), hi_ = fam.osc().h(i, t);
      a2[i] = multiply(a, a);
      Da2[i] = multiply(a, Da) * 2.0;
      Ramp += traceless(dyad(a2[i], xi));
      Rot += antidivergence(along(directional(Da2[i], xi), xi) * hi_);
      if (gi != 0.0 || dgi != 0.0) {
        const Field Psi = fam.Psi(i, t), W = fam.W(i, t);
        // d_t(a g Psi) = Da g Psi + a (g' Psi + g d_t Psi)
        dpsi += multiply(Da, Psi) * gi + multiply(a, Psi * dgi + fam.dt_moving(Psi, i, t) * gi);
        const Field W2 = remove_mean(dot(W, W));
        Roa += antidivergence_bilinear_scalar(Da2[i] * gi + a2[i] * dgi, along(W2, xi));
        if (gi != 0.0) Rox += antidivergence_bilinear(gradient(a2[i]), remove_mean(outer_self(W))) * (gi * gi);
      }
    }
    Roa *= -sigma / theta;
    Rot *= -1.0 / sigma;
    dwpc = perp_gradient(dpsi) * (1.0 / sigma);
    const Field u = v2l.frames[k] + v1n[k];
    Rlin = sym_gradient(w[k]) * -1.0 + antidivergence(dwpc) + traceless(sym_outer(u, w[k]));
    Rcor = traceless(outer_self(w[k]) - outer_self(wp[k]));
    const Field vnew = v1n[k] + v2n[k];
    const Field Rcom = traceless(Ncom[kin] - Nl.frames[k]);
    const Field Rcom1 = traceless(linear_flux(vnew - vq[kin], zin[kin].L, zin[kin].H));
    const Field Rcom2 = traceless(outer_self(u) - outer_self(vq[kin]));
    const Field Rcom3 = antidivergence(v1l.frames[k] - v1n[k]) * frakc;
    const Field* parts[NC] = {&Rlin, &Rcor, &Rox, &Roa, &Rot, &Ramp, &Rcom, &Rcom1, &Rcom2, &Rcom3};
    Field sum(g, Rank::SymTensor);
    for (int c = 0; c < NC; ++c) {
      norms[k][c] = lp_norm(*parts[c], 1.0);
      if (!std::isfinite(norms[k][c]) && bad[k].empty()) bad[k] = names[c];
      sum += *parts[c];
      emit(names[c], k, t, *parts[c]);
    }
    trace_def[k] = max_trace(sum);
    Rn[k] = traceless(sum);
  });
  for (std::size_t k = 0; k < K; ++k)
    if (!bad[k].empty()) {
      std::ostringstream os;
      os << "step: non-finite values in " << bad[k] << " at t = " << times[k] << "; ledger:";
      for (int c = 0; c < NC; ++c) os << " " << names[c] << "=" << norms[k][c];
      throw std::runtime_error(os.str());
    }

  StepResult res;
  res.next.q = state.q + 1;
  res.next.v1 = std::move(v1s.v1);
  res.next.v2 = TimeSeriesField::uniform(times.front(), dt, std::move(v2n));
  res.next.R = TimeSeriesField::uniform(times.front(), dt, std::move(Rn));
  const StepState& nx = res.next;

  for (std::size_t k = 0; k < K; ++k) {
    rep.phoid_residual = std::max(rep.phoid_residual, phoid[k]);
    rep.oscillation_residual = std::max(rep.oscillation_residual, osc[k]);
    rep.curl_form_residual = std::max(rep.curl_form_residual, curl[k]);
    rep.clamp_max = std::max(rep.clamp_max, cmax[k]);
    rep.clamp_fraction = std::max(rep.clamp_fraction, cfrac[k]);
    rep.amplitude_C0 = std::max(rep.amplitude_C0, aC0[k]);
    rep.rho_C0 = std::max(rep.rho_C0, rhoC0[k]);
    rep.wp_C0 = std::max(rep.wp_C0, wpC0[k]);
    rep.trace_defect = std::max(rep.trace_defect, trace_def[k]);
    rep.trace_R = std::max(rep.trace_R, max_trace(nx.R.frames[k]));
    rep.div_v2 = std::max(rep.div_v2, divergence(nx.v2.frames[k]).max_abs());
    rep.mean_v2 = std::max(rep.mean_v2, mean_abs(nx.v2.frames[k]));
    rep.div_v1 = std::max(rep.div_v1, divergence(nx.v1.frames[k]).max_abs());
    rep.mean_v1 = std::max(rep.mean_v1, mean_abs(nx.v1.frames[k]));
  }
  for (int c = 0; c < NC; ++c) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += dt * norms[k][c];
    rep.ledger.emplace_back(names[c], s);
  }

  // Equation residuals at both levels, interior frames.
  const auto mr = master_residuals(nx, noise, frakc);
  double ss = 0.0;
  for (double x : mr) rep.master_residual = std::max(rep.master_residual, x), ss += x * x;
  rep.master_residual_rms = std::sqrt(ss / double(mr.size()));
  for (std::size_t k = 1; k + 1 < K; ++k)
    rep.master_scale = std::max(rep.master_scale, ddt(nx.v2.frames, k, dt).l2_norm() + laplacian(nx.v2.frames[k]).l2_norm());
  for (double x : master_residuals(state, noise, frakc)) rep.input_residual = std::max(rep.input_residual, x);

  rep.before = norm_table(state);
  rep.after = norm_table(nx);
  rep.amplitude_constant = rep.amplitude_C0 * l * l / std::sqrt(rep.before.R_L1L1 + 1.0);
  double d2 = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double d = (nx.v2.frames[k] - state.v2.frames[k + M]).l2_norm();
    d2 += dt * d * d;
  }
  rep.dv2_L2L2 = std::sqrt(d2);
  rep.monotone_bound = std::sqrt(ip.delta(state.q + 1) * ip.M_L());
  rep.monotone_ok = rep.dv2_L2L2 <= rep.monotone_bound;
  res.report = std::move(rep);
  return res;
}

Field taylor_green(const PeriodicGrid& g, double amplitude) {
  // v = A (sin 2 pi x1 cos 2 pi x2, -cos 2 pi x1 sin 2 pi x2)
  const int n = g.n();
  const std::size_t np = g.phys_size();
  std::vector<double> vals(2 * np);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = kTwoPi * i / n, y = kTwoPi * j / n;
      vals[i * n + j] = amplitude * std::sin(x) * std::cos(y);
      vals[np + i * n + j] = -amplitude * std::cos(x) * std::sin(y);
    }
  return Field::from_physical(g, Rank::Vector, vals);
}

StepState initial_state(const Field& v0, const NoiseTrajectory& noise, const IterationParams& iter) {
  if (v0.rank() != Rank::Vector) fail("seed field must be a vector field");
  const Field seed = drop_nyquist(helmholtz_project(remove_mean(v0)));
  const std::size_t K = noise.size();
  const double dt = noise.z.dt();
  StepState s;
  s.q = 0;
  s.v2 = TimeSeriesField::uniform(noise.z.times.front(), dt, std::vector<Field>(K, seed));
  V1Problem p;
  p.q = 0;
  p.f_q = iter.f(0);
  p.frakc = iter.frakc_value();
  p.v2 = s.v2;
  p.noise = &noise;
  s.v1 = v1_solve(p).v1;
  std::vector<Field> R(K);
  const Field grad_part = sym_gradient(seed) * -1.0;
  parallel_for(K, [&](std::size_t k) {
    const SplitNoise z = split_noise(noise, k);
    const Field& v1 = s.v1.frames[k];
    R[k] = traceless(grad_part - antidivergence(v1) * p.frakc + nonlinear_flux(v1 + seed, z.L, z.H));
  });
  s.R = TimeSeriesField::uniform(noise.z.times.front(), dt, std::move(R));
  return s;
}

Window desk_window(double T, double dt, double l, int steps) {
  if (!(T > 0.0) || !(dt > 0.0) || steps < 1) fail("window needs T > 0, dt > 0 and steps >= 1");
  const int M = static_cast<int>(time_mollifier_weights(l, dt).size()) - 1;
  const int out = static_cast<int>(std::llround(T / dt)) + 1;
  Window w;
  w.dt = dt;
  w.frames = out + steps * M;
  w.t0 = -double(steps * M) * dt;
  return w;
}

void write_report_csv(const std::string& path, const StepReport& r) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17) << "key,value\n";
  auto kv = [&](const std::string& k, double v) { os << k << "," << v << "\n"; };
  kv("q", r.q);
  kv("t0", r.t0), kv("t1", r.t1), kv("dt", r.dt);
  kv("frames", double(r.frames)), kv("dropped_frames", double(r.dropped));
  kv("phoid_residual", r.phoid_residual);
  kv("oscillation_residual", r.oscillation_residual);
  kv("curl_form_residual", r.curl_form_residual);
  kv("div_v2", r.div_v2), kv("mean_v2", r.mean_v2), kv("div_v1", r.div_v1), kv("mean_v1", r.mean_v1);
  kv("trace_defect", r.trace_defect), kv("trace_R", r.trace_R);
  kv("clamp_max", r.clamp_max), kv("clamp_fraction", r.clamp_fraction);
  kv("amplitude_C0", r.amplitude_C0), kv("amplitude_constant", r.amplitude_constant);
  kv("rho_C0", r.rho_C0), kv("wp_C0", r.wp_C0);
  kv("master_residual", r.master_residual), kv("master_residual_rms", r.master_residual_rms);
  kv("master_scale", r.master_scale), kv("input_residual", r.input_residual);
  auto table = [&](const std::string& p, const NormTable& t) {
    kv(p + "v2_L2L2", t.v2_L2L2), kv(p + "v2_C1", t.v2_C1), kv(p + "v2_W12_65", t.v2_W12_65), kv(p + "R_L1L1", t.R_L1L1);
  };
  table("before_", r.before);
  table("after_", r.after);
  kv("dv2_L2L2", r.dv2_L2L2), kv("monotone_bound", r.monotone_bound), kv("monotone_ok", r.monotone_ok ? 1 : 0);
  for (const auto& [k, v] : r.ledger) kv("ledger_" + k, v);
  kv("picard_max", r.picard_max), kv("v1_residual", r.v1_residual);
}

std::string summary(const StepReport& r) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3);
  os << "step to q = " << r.q << " on [" << r.t0 << ", " << r.t1 << "], " << r.frames << " frames (dt " << r.dt
     << ")\n";
  os << "  amplitude identity    " << r.phoid_residual << "\n";
  os << "  oscillation identity  " << r.oscillation_residual << "\n";
  os << "  curl form of w_p+w_c  " << r.curl_form_residual << "\n";
  os << "  div v2 / mean v2      " << r.div_v2 << " / " << r.mean_v2 << "\n";
  os << "  trace of R            " << r.trace_R << " (before projection " << r.trace_defect << ")\n";
  os << "  clamp                 max " << r.clamp_max << ", fraction " << r.clamp_fraction << "\n";
  os << "  equation residual     max " << r.master_residual << ", rms " << r.master_residual_rms << " (scale "
     << r.master_scale << ", level q " << r.input_residual << ")\n";
  os << "  ||R||_L1L1            " << r.before.R_L1L1 << " -> " << r.after.R_L1L1 << "\n";
  os << "  ||v2||_L2L2           " << r.before.v2_L2L2 << " -> " << r.after.v2_L2L2 << "\n";
  os << "  ledger (L1L1):";
  for (const auto& [k, v] : r.ledger) os << " " << k << "=" << v;
  os << "\n  v1 Picard max " << r.picard_max << ", residual " << r.v1_residual << "\n";
  return os.str();
}

}  // namespace convint
