// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <vector>

#include "convint/field.hpp"

namespace convint {

// ---- Fourier multipliers and differential operators -----------------------

// m(k1, k2) applied to every component. The multiplier must satisfy
// m(-k) = conj(m(k)) for the result to stay real.
Field apply_multiplier(const Field& f, const std::function<cplx(int, int)>& m);
Field apply_real_multiplier(const Field& f, const std::function<double(int, int)>& m);

// axis 0 -> x1, axis 1 -> x2.
Field derivative(const Field& f, int axis, int order = 1);
Field gradient(const Field& f);        // scalar -> vector; vector -> tensor (T_ij = d_j v_i)
Field sym_gradient(const Field& v);    // grad v + grad v^T
Field perp_gradient(const Field& f);   // (d2 f, -d1 f)
Field divergence(const Field& f);      // vector -> scalar; (sym)tensor -> vector, (div T)_i = d_j T_ij
Field laplacian(const Field& f);
Field inverse_laplacian(const Field& f);  // zero mode -> 0
Field remove_mean(const Field& f);
Field low_pass(const Field& f, int kmax);  // keep max(|k1|,|k2|) <= kmax

Field helmholtz_project(const Field& v);
Field traceless(const Field& T);
Field trace(const Field& T);
Field transpose(const Field& T);
Field sym_part(const Field& T);  // (T + T^T)/2 as symtensor
Field to_tensor(const Field& S);  // symtensor -> full tensor
Field identity_times(const Field& f);  // f Id as symtensor

// (Rv)_ij = -delta_ij Lap^{-1} div v + Lap^{-1}(d_i v_j + d_j v_i)
Field antidivergence(const Field& v);
// div B(v, A) = vA - mean(vA) with (vA)_j = v_l A_lj; A mean-zero (tensor or symtensor).
Field antidivergence_bilinear(const Field& v, const Field& A);
// Scalar version: div B(f, a) = f a - mean(f a) for a mean-zero vector a.
Field antidivergence_bilinear_scalar(const Field& f, const Field& a);

// ---- Heat semigroup -------------------------------------------------------

Field heat_apply(const Field& f, double t);

enum class DuhamelOrder { Held = 1, Linear = 2 };
// u(t) = int_0^t e^{-c(t-s)} P_{t-s} f(s) ds on the sample instants of f.
TimeSeriesField duhamel(const TimeSeriesField& f, double c, DuhamelOrder order = DuhamelOrder::Linear);
// phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2, stable near zero.
double phi1(double z);
double phi2(double z);

// ---- Dealiased products ---------------------------------------------------
//
// Inputs are read without their Nyquist modes, evaluated on an m x m grid,
// multiplied there and truncated back with the output Nyquist modes zeroed.
// For m >= 3n/2 a two-factor product is the exact truncation of the product
// of the (Nyquist-free) inputs; m >= 2n covers three factors.

// Physical values of a field on the padded grid.
class Padded {
 public:
  Padded() = default;
  Padded(const Field& f, int m);
  Padded(const PeriodicGrid& grid, Rank rank, int m);  // zeros

  int m() const { return m_; }
  Rank rank() const { return rank_; }
  int ncomp() const { return components(rank_); }
  double* comp(int c) { return vals_.data() + static_cast<std::size_t>(c) * m_ * m_; }
  const double* comp(int c) const { return vals_.data() + static_cast<std::size_t>(c) * m_ * m_; }
  std::size_t points() const { return static_cast<std::size_t>(m_) * m_; }
  Field truncate() const;

 private:
  PeriodicGrid grid_;
  Rank rank_ = Rank::Scalar;
  int m_ = 0;
  std::vector<double> vals_;
};

int product_size(const PeriodicGrid& g, double factor = 0.0);  // factor 0 -> grid default

// scalar * any -> any; any * scalar -> any; vector * vector -> tensor v_i w_j.
Field multiply(const Field& f, const Field& g, double factor = 0.0);
Field multiply3(const Field& f, const Field& g, const Field& h, double factor = 2.0);
Field dot(const Field& v, const Field& w, double factor = 0.0);
Field outer_self(const Field& v, double factor = 0.0);                   // v (x) v
Field sym_outer(const Field& v, const Field& w, double factor = 0.0);    // v (x) w + w (x) v
Field matvec(const Field& A, const Field& v, double factor = 0.0);       // (Av)_i = A_ij v_j
Field vecmat(const Field& v, const Field& A, double factor = 0.0);       // (vA)_j = v_l A_lj

// Tensor component index helpers.
int sym_index(int i, int j);     // into (11, 12, 22)
int tensor_index(int i, int j);  // into (11, 12, 21, 22)
int comp_index(Rank r, int i, int j);

}  // namespace convint
