// SPDX-License-Identifier: MIT
#include "convint/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "convint/threads.hpp"

namespace convint {

namespace {

// Per-mode symbols. Odd-order symbols vanish on the Nyquist line of their axis.
struct Symbols {
  cplx d1, d2;   // 2 pi i k_a
  double lap;    // -4 pi^2 |k|^2
  bool nyquist;  // k1 = -n/2 or k2 = n/2
};

template <class F>
void for_modes(const PeriodicGrid& g, F&& body) {
  const int n = g.n(), h = g.half();
  for (int r = 0; r < n; ++r) {
    const int k1 = g.k1(r);
    for (int c = 0; c < h; ++c) {
      const int k2 = c;
      Symbols s;
      s.nyquist = (k1 == -n / 2) || (k2 == n / 2);
      s.d1 = (k1 == -n / 2) ? cplx(0.0) : cplx(0.0, kTwoPi * k1);
      s.d2 = (k2 == n / 2) ? cplx(0.0) : cplx(0.0, kTwoPi * k2);
      s.lap = -4.0 * kPi * kPi * (double(k1) * k1 + double(k2) * k2);
      body(static_cast<std::size_t>(r) * h + c, k1, k2, s);
    }
  }
}

void require_rank(const Field& f, Rank r, const char* what) {
  if (f.rank() != r) throw std::invalid_argument(std::string(what) + ": expected " + rank_name(r) + " field");
}

bool is_matrix(Rank r) { return r == Rank::SymTensor || r == Rank::Tensor; }

}  // namespace

int sym_index(int i, int j) { return i + j; }
int tensor_index(int i, int j) { return 2 * i + j; }
int comp_index(Rank r, int i, int j) {
  switch (r) {
    case Rank::Scalar: return 0;
    case Rank::Vector: return i;
    case Rank::SymTensor: return sym_index(i, j);
    case Rank::Tensor: return tensor_index(i, j);
  }
  return 0;
}

Field apply_multiplier(const Field& f, const std::function<cplx(int, int)>& m) {
  Field out(f.grid(), f.rank());
  for_modes(f.grid(), [&](std::size_t idx, int k1, int k2, const Symbols&) {
    const cplx mk = m(k1, k2);
    for (int c = 0; c < f.ncomp(); ++c) out.comp(c)[idx] = mk * f.comp(c)[idx];
  });
  return out;
}

Field apply_real_multiplier(const Field& f, const std::function<double(int, int)>& m) {
  return apply_multiplier(f, [&](int k1, int k2) { return cplx(m(k1, k2)); });
}

Field derivative(const Field& f, int axis, int order) {
  if (axis < 0 || axis > 1 || order < 0) throw std::invalid_argument("derivative: bad axis or order");
  Field out(f.grid(), f.rank());
  const int n = f.n();
  for_modes(f.grid(), [&](std::size_t idx, int k1, int k2, const Symbols&) {
    const int k = axis == 0 ? k1 : k2;
    const bool nyq = axis == 0 ? (k1 == -n / 2) : (k2 == n / 2);
    cplx m = (nyq && order % 2 == 1) ? cplx(0.0) : std::pow(cplx(0.0, kTwoPi * k), order);
    if (order == 0) m = 1.0;
    for (int c = 0; c < f.ncomp(); ++c) out.comp(c)[idx] = m * f.comp(c)[idx];
  });
  return out;
}

Field gradient(const Field& f) {
  if (f.rank() == Rank::Scalar) {
    Field out(f.grid(), Rank::Vector);
    for_modes(f.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
      out.comp(0)[idx] = s.d1 * f.comp(0)[idx];
      out.comp(1)[idx] = s.d2 * f.comp(0)[idx];
    });
    return out;
  }
  require_rank(f, Rank::Vector, "gradient");
  Field out(f.grid(), Rank::Tensor);
  for_modes(f.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
    const cplx d[2] = {s.d1, s.d2};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.comp(tensor_index(i, j))[idx] = d[j] * f.comp(i)[idx];
  });
  return out;
}

Field sym_gradient(const Field& v) {
  require_rank(v, Rank::Vector, "sym_gradient");
  Field out(v.grid(), Rank::SymTensor);
  for_modes(v.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
    const cplx a = v.comp(0)[idx], b = v.comp(1)[idx];
    out.comp(0)[idx] = 2.0 * s.d1 * a;
    out.comp(1)[idx] = s.d2 * a + s.d1 * b;
    out.comp(2)[idx] = 2.0 * s.d2 * b;
  });
  return out;
}

Field perp_gradient(const Field& f) {
  require_rank(f, Rank::Scalar, "perp_gradient");
  Field out(f.grid(), Rank::Vector);
  for_modes(f.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
    out.comp(0)[idx] = s.d2 * f.comp(0)[idx];
    out.comp(1)[idx] = -s.d1 * f.comp(0)[idx];
  });
  return out;
}

Field divergence(const Field& f) {
  if (f.rank() == Rank::Vector) {
    Field out(f.grid(), Rank::Scalar);
    for_modes(f.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
      out.comp(0)[idx] = s.d1 * f.comp(0)[idx] + s.d2 * f.comp(1)[idx];
    });
    return out;
  }
  if (!is_matrix(f.rank())) throw std::invalid_argument("divergence: expected vector or tensor field");
  Field out(f.grid(), Rank::Vector);
  const Rank r = f.rank();
  for_modes(f.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
    for (int i = 0; i < 2; ++i)
      out.comp(i)[idx] = s.d1 * f.comp(comp_index(r, i, 0))[idx] + s.d2 * f.comp(comp_index(r, i, 1))[idx];
  });
  return out;
}

Field laplacian(const Field& f) {
  Field out(f.grid(), f.rank());
  for_modes(f.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
    for (int c = 0; c < f.ncomp(); ++c) out.comp(c)[idx] = s.lap * f.comp(c)[idx];
  });
  return out;
}

Field inverse_laplacian(const Field& f) {
  Field out(f.grid(), f.rank());
  for_modes(f.grid(), [&](std::size_t idx, int k1, int k2, const Symbols& s) {
    if (k1 == 0 && k2 == 0) return;
    for (int c = 0; c < f.ncomp(); ++c) out.comp(c)[idx] = f.comp(c)[idx] / s.lap;
  });
  return out;
}

Field remove_mean(const Field& f) {
  Field out = f;
  for (int c = 0; c < f.ncomp(); ++c) out.comp(c)[0] = 0.0;
  return out;
}

Field low_pass(const Field& f, int kmax) {
  return apply_real_multiplier(f, [kmax](int k1, int k2) {
    return (std::abs(k1) <= kmax && std::abs(k2) <= kmax) ? 1.0 : 0.0;
  });
}

Field helmholtz_project(const Field& v) {
  require_rank(v, Rank::Vector, "helmholtz_project");
  Field out = v;
  for_modes(v.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
    // Discrete |d|^2 rather than the Laplacian symbol: they differ on the Nyquist
    // lines, where only this choice keeps the projection exact.
    const double dd = std::norm(s.d1) + std::norm(s.d2);
    if (dd == 0.0) return;
    const cplx div = s.d1 * v.comp(0)[idx] + s.d2 * v.comp(1)[idx];
    out.comp(0)[idx] += s.d1 * div / dd;
    out.comp(1)[idx] += s.d2 * div / dd;
  });
  return out;
}

Field traceless(const Field& T) {
  require_rank(T, Rank::SymTensor, "traceless");
  Field out = T;
  for (std::size_t i = 0; i < T.comp_size(); ++i) {
    const cplx half_tr = 0.5 * (T.comp(0)[i] + T.comp(2)[i]);
    out.comp(0)[i] -= half_tr;
    out.comp(2)[i] -= half_tr;
  }
  return out;
}

Field trace(const Field& T) {
  if (!is_matrix(T.rank())) throw std::invalid_argument("trace: expected tensor field");
  Field out(T.grid(), Rank::Scalar);
  const int c22 = comp_index(T.rank(), 1, 1);
  for (std::size_t i = 0; i < T.comp_size(); ++i) out.comp(0)[i] = T.comp(0)[i] + T.comp(c22)[i];
  return out;
}

Field transpose(const Field& T) {
  if (T.rank() == Rank::SymTensor) return T;
  require_rank(T, Rank::Tensor, "transpose");
  Field out = T;
  std::copy(T.comp(2), T.comp(2) + T.comp_size(), out.comp(1));
  std::copy(T.comp(1), T.comp(1) + T.comp_size(), out.comp(2));
  return out;
}

Field sym_part(const Field& T) {
  if (T.rank() == Rank::SymTensor) return T;
  require_rank(T, Rank::Tensor, "sym_part");
  Field out(T.grid(), Rank::SymTensor);
  for (std::size_t i = 0; i < T.comp_size(); ++i) {
    out.comp(0)[i] = T.comp(0)[i];
    out.comp(1)[i] = 0.5 * (T.comp(1)[i] + T.comp(2)[i]);
    out.comp(2)[i] = T.comp(3)[i];
  }
  return out;
}

Field to_tensor(const Field& S) {
  if (S.rank() == Rank::Tensor) return S;
  require_rank(S, Rank::SymTensor, "to_tensor");
  Field out(S.grid(), Rank::Tensor);
  const int map[4] = {0, 1, 1, 2};
  for (int c = 0; c < 4; ++c) std::copy(S.comp(map[c]), S.comp(map[c]) + S.comp_size(), out.comp(c));
  return out;
}

Field identity_times(const Field& f) {
  require_rank(f, Rank::Scalar, "identity_times");
  Field out(f.grid(), Rank::SymTensor);
  out.set_component(0, f);
  out.set_component(2, f);
  return out;
}

Field antidivergence(const Field& v) {
  require_rank(v, Rank::Vector, "antidivergence");
  Field out(v.grid(), Rank::SymTensor);
  for_modes(v.grid(), [&](std::size_t idx, int k1, int k2, const Symbols& s) {
    if ((k1 == 0 && k2 == 0) || s.nyquist) return;
    const cplx a = v.comp(0)[idx], b = v.comp(1)[idx];
    const cplx div = s.d1 * a + s.d2 * b;
    out.comp(0)[idx] = (-div + 2.0 * s.d1 * a) / s.lap;
    out.comp(1)[idx] = (s.d1 * b + s.d2 * a) / s.lap;
    out.comp(2)[idx] = (-div + 2.0 * s.d2 * b) / s.lap;
  });
  return out;
}

namespace {

void require_mean_zero(const Field& A, const char* what) {
  const double scale = 1.0 + A.l2_norm();
  for (int c = 0; c < A.ncomp(); ++c)
    if (std::abs(A.comp(c)[0]) > 1e-10 * scale)
      throw std::invalid_argument(std::string(what) + ": second argument must have zero mean");
}

}  // namespace

Field antidivergence_bilinear(const Field& v, const Field& A) {
  require_rank(v, Rank::Vector, "antidivergence_bilinear");
  if (!is_matrix(A.rank())) throw std::invalid_argument("antidivergence_bilinear: expected tensor A");
  require_mean_zero(A, "antidivergence_bilinear");
  const int m = product_size(v.grid());
  // T^(l) = R(A_l.), row l of A.
  Padded T[2];
  for (int l = 0; l < 2; ++l) {
    Field row(A.grid(), Rank::Vector);
    row.set_component(0, A.component(comp_index(A.rank(), l, 0)));
    row.set_component(1, A.component(comp_index(A.rank(), l, 1)));
    T[l] = Padded(antidivergence(row), m);
  }
  Padded pv(v, m), pgrad(gradient(v), m);  // pgrad comp (l, i) = d_i v_l
  Padded first(v.grid(), Rank::SymTensor, m), Y(v.grid(), Rank::Vector, m);
  const std::size_t np = first.points();
  for (std::size_t p = 0; p < np; ++p) {
    for (int l = 0; l < 2; ++l) {
      const double vl = pv.comp(l)[p];
      for (int c = 0; c < 3; ++c) first.comp(c)[p] += vl * T[l].comp(c)[p];
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
          Y.comp(j)[p] += pgrad.comp(tensor_index(l, i))[p] * T[l].comp(sym_index(i, j))[p];
    }
  }
  return first.truncate() - antidivergence(Y.truncate());
}

Field antidivergence_bilinear_scalar(const Field& f, const Field& a) {
  require_rank(f, Rank::Scalar, "antidivergence_bilinear_scalar");
  require_rank(a, Rank::Vector, "antidivergence_bilinear_scalar");
  require_mean_zero(a, "antidivergence_bilinear_scalar");
  const int m = product_size(f.grid());
  Padded T(antidivergence(a), m), pf(f, m), pg(gradient(f), m);
  Padded first(f.grid(), Rank::SymTensor, m), Y(f.grid(), Rank::Vector, m);
  for (std::size_t p = 0; p < first.points(); ++p) {
    for (int c = 0; c < 3; ++c) first.comp(c)[p] = pf.comp(0)[p] * T.comp(c)[p];
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) Y.comp(j)[p] += pg.comp(i)[p] * T.comp(sym_index(i, j))[p];
  }
  return first.truncate() - antidivergence(Y.truncate());
}

Field heat_apply(const Field& f, double t) {
  if (t < 0.0) throw std::invalid_argument("heat_apply: negative time");
  Field out(f.grid(), f.rank());
  for_modes(f.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
    const double m = std::exp(s.lap * t);
    for (int c = 0; c < f.ncomp(); ++c) out.comp(c)[idx] = m * f.comp(c)[idx];
  });
  return out;
}

double phi1(double z) {
  if (std::abs(z) < 1e-3) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0 + z * z * z * z / 120.0;
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-3) return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0 + z * z * z * z / 720.0;
  return (std::expm1(z) - z) / (z * z);
}

TimeSeriesField duhamel(const TimeSeriesField& f, double c, DuhamelOrder order) {
  if (!(c > 0.0)) throw std::invalid_argument("duhamel: damping rate must be positive");
  f.validate();
  TimeSeriesField out;
  out.times = f.times;
  if (f.frames.empty()) return out;
  const double h = f.dt();
  const Field& f0 = f.frames.front();
  out.frames.assign(f.size(), Field(f0.grid(), f0.rank()));
  const int nc = f0.ncomp();
  const std::size_t ns = f0.comp_size();
  std::vector<double> decay(ns), w0(ns), w1(ns);
  for_modes(f0.grid(), [&](std::size_t idx, int, int, const Symbols& s) {
    const double z = -(c - s.lap) * h;
    decay[idx] = std::exp(z);
    if (order == DuhamelOrder::Held) {
      w0[idx] = h * phi1(z);
      w1[idx] = 0.0;
    } else {
      // Linear interpolation of f over the step.
      w1[idx] = h * phi2(z);
      w0[idx] = h * phi1(z) - w1[idx];
    }
  });
  for (std::size_t k = 1; k < f.size(); ++k) {
    const Field& a = f.frames[k - 1];
    const Field& b = f.frames[k];
    const Field& prev = out.frames[k - 1];
    Field& cur = out.frames[k];
    for (int comp = 0; comp < nc; ++comp)
      for (std::size_t i = 0; i < ns; ++i)
        cur.comp(comp)[i] = decay[i] * prev.comp(comp)[i] + w0[i] * a.comp(comp)[i] + w1[i] * b.comp(comp)[i];
  }
  return out;
}

// ---- padded products ------------------------------------------------------

int product_size(const PeriodicGrid& g, double factor) {
  return g.padded(factor > 0.0 ? factor : g.dealias_pad());
}

Padded::Padded(const PeriodicGrid& grid, Rank rank, int m)
    : grid_(grid), rank_(rank), m_(m), vals_(static_cast<std::size_t>(components(rank)) * m * m, 0.0) {
  if (m < grid.n() || m % 2) throw std::invalid_argument("padded size must be even and >= n");
}

Padded::Padded(const Field& f, int m) : Padded(f.grid(), f.rank(), m) {
  const int n = f.n(), h = f.grid().half(), hm = m / 2 + 1;
  std::vector<cplx> spec(static_cast<std::size_t>(m) * hm);
  for (int c = 0; c < f.ncomp(); ++c) {
    std::fill(spec.begin(), spec.end(), cplx(0.0));
    const cplx* src = f.comp(c);
    for (int r = 0; r < n; ++r) {
      const int k1 = f.grid().k1(r);
      if (k1 == -n / 2) continue;
      const int rm = k1 >= 0 ? k1 : k1 + m;
      for (int k2 = 0; k2 < n / 2; ++k2) spec[static_cast<std::size_t>(rm) * hm + k2] = src[r * h + k2];
    }
    fft::inverse(m, spec.data(), comp(c));
  }
}

Field Padded::truncate() const {
  Field out(grid_, rank_);
  const int n = grid_.n(), h = grid_.half(), hm = m_ / 2 + 1;
  std::vector<cplx> spec(static_cast<std::size_t>(m_) * hm);
  for (int c = 0; c < ncomp(); ++c) {
    fft::forward(m_, comp(c), spec.data());
    cplx* dst = out.comp(c);
    for (int r = 0; r < n; ++r) {
      const int k1 = grid_.k1(r);
      if (k1 == -n / 2) continue;
      const int rm = k1 >= 0 ? k1 : k1 + m_;
      for (int k2 = 0; k2 < n / 2; ++k2) dst[r * h + k2] = spec[static_cast<std::size_t>(rm) * hm + k2];
    }
  }
  return out;
}

Field multiply(const Field& f, const Field& g, double factor) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("multiply: grid mismatch");
  const int m = product_size(f.grid(), factor);
  Rank out_rank;
  if (f.rank() == Rank::Scalar) out_rank = g.rank();
  else if (g.rank() == Rank::Scalar) out_rank = f.rank();
  else if (f.rank() == Rank::Vector && g.rank() == Rank::Vector) out_rank = Rank::Tensor;
  else throw std::invalid_argument("multiply: unsupported rank combination");
  Padded pf(f, m), pg(g, m), out(f.grid(), out_rank, m);
  const std::size_t np = out.points();
  if (out_rank == Rank::Tensor && f.rank() == Rank::Vector) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (std::size_t p = 0; p < np; ++p)
          out.comp(tensor_index(i, j))[p] = pf.comp(i)[p] * pg.comp(j)[p];
  } else {
    const Padded& s = f.rank() == Rank::Scalar ? pf : pg;
    const Padded& o = f.rank() == Rank::Scalar ? pg : pf;
    for (int c = 0; c < out.ncomp(); ++c)
      for (std::size_t p = 0; p < np; ++p) out.comp(c)[p] = s.comp(0)[p] * o.comp(c)[p];
  }
  return out.truncate();
}

Field multiply3(const Field& f, const Field& g, const Field& h, double factor) {
  if (f.rank() != Rank::Scalar || g.rank() != Rank::Scalar)
    throw std::invalid_argument("multiply3: first two factors must be scalar");
  const int m = product_size(f.grid(), factor);
  Padded pf(f, m), pg(g, m), ph(h, m), out(f.grid(), h.rank(), m);
  for (int c = 0; c < out.ncomp(); ++c)
    for (std::size_t p = 0; p < out.points(); ++p) out.comp(c)[p] = pf.comp(0)[p] * pg.comp(0)[p] * ph.comp(c)[p];
  return out.truncate();
}

Field dot(const Field& v, const Field& w, double factor) {
  require_rank(v, Rank::Vector, "dot");
  require_rank(w, Rank::Vector, "dot");
  const int m = product_size(v.grid(), factor);
  Padded pv(v, m), pw(w, m), out(v.grid(), Rank::Scalar, m);
  for (std::size_t p = 0; p < out.points(); ++p)
    out.comp(0)[p] = pv.comp(0)[p] * pw.comp(0)[p] + pv.comp(1)[p] * pw.comp(1)[p];
  return out.truncate();
}

Field outer_self(const Field& v, double factor) {
  require_rank(v, Rank::Vector, "outer_self");
  const int m = product_size(v.grid(), factor);
  Padded pv(v, m), out(v.grid(), Rank::SymTensor, m);
  for (std::size_t p = 0; p < out.points(); ++p) {
    const double a = pv.comp(0)[p], b = pv.comp(1)[p];
    out.comp(0)[p] = a * a;
    out.comp(1)[p] = a * b;
    out.comp(2)[p] = b * b;
  }
  return out.truncate();
}

Field sym_outer(const Field& v, const Field& w, double factor) {
  require_rank(v, Rank::Vector, "sym_outer");
  require_rank(w, Rank::Vector, "sym_outer");
  const int m = product_size(v.grid(), factor);
  Padded pv(v, m), pw(w, m), out(v.grid(), Rank::SymTensor, m);
  for (std::size_t p = 0; p < out.points(); ++p) {
    const double a = pv.comp(0)[p], b = pv.comp(1)[p], c = pw.comp(0)[p], d = pw.comp(1)[p];
    out.comp(0)[p] = 2.0 * a * c;
    out.comp(1)[p] = a * d + b * c;
    out.comp(2)[p] = 2.0 * b * d;
  }
  return out.truncate();
}

Field matvec(const Field& A, const Field& v, double factor) {
  if (!is_matrix(A.rank())) throw std::invalid_argument("matvec: expected tensor");
  require_rank(v, Rank::Vector, "matvec");
  const int m = product_size(v.grid(), factor);
  Padded pa(A, m), pv(v, m), out(v.grid(), Rank::Vector, m);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double* a = pa.comp(comp_index(A.rank(), i, j));
      for (std::size_t p = 0; p < out.points(); ++p) out.comp(i)[p] += a[p] * pv.comp(j)[p];
    }
  return out.truncate();
}

Field vecmat(const Field& v, const Field& A, double factor) {
  return matvec(transpose(A), v, factor);
}

}  // namespace convint
