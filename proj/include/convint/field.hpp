// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "convint/grid.hpp"

namespace convint {

// Component layouts: Vector (1, 2); SymTensor (11, 12, 22); Tensor (11, 12, 21, 22).
enum class Rank : std::uint8_t { Scalar = 0, Vector = 1, SymTensor = 2, Tensor = 3 };

int components(Rank r);
const char* rank_name(Rank r);

// Real field on the torus, stored by its half-complex Fourier coefficients.
// Realness is structural: the r2c layout only holds Hermitian-symmetric data.
class Field {
 public:
  Field() = default;
  Field(const PeriodicGrid& grid, Rank rank);

  static Field from_physical(const PeriodicGrid& grid, Rank rank, std::span<const double> values);
  static Field from_components(const std::vector<Field>& scalars, Rank rank);

  const PeriodicGrid& grid() const { return grid_; }
  int n() const { return grid_.n(); }
  Rank rank() const { return rank_; }
  int ncomp() const { return components(rank_); }
  bool real_valued() const { return true; }
  bool empty() const { return data_.empty(); }

  std::size_t comp_size() const { return grid_.spec_size(); }
  cplx* comp(int c) { return data_.data() + c * comp_size(); }
  const cplx* comp(int c) const { return data_.data() + c * comp_size(); }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  cplx& at(int c, int k1, int k2) { return comp(c)[grid_.row_of(k1) * grid_.half() + k2]; }
  cplx at(int c, int k1, int k2) const { return comp(c)[grid_.row_of(k1) * grid_.half() + k2]; }

  // Physical values, components concatenated (ncomp * n * n).
  std::vector<double> to_physical() const;
  std::vector<double> component_physical(int c) const;
  Field component(int c) const;
  void set_component(int c, const Field& scalar);
  double mean(int c = 0) const { return comp(c)[0].real(); }

  double l2_norm() const;  // (sum_c int |f_c|^2)^{1/2} via Parseval
  double max_abs() const;  // max over grid points and components

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  void check_compatible(const Field& o) const;

  PeriodicGrid grid_;
  Rank rank_ = Rank::Scalar;
  std::vector<cplx> data_;
};

// Uniformly sampled sequence of fields sharing one grid and rank.
struct TimeSeriesField {
  std::vector<double> times;
  std::vector<Field> frames;

  static TimeSeriesField uniform(double t0, double dt, std::vector<Field> frames);
  std::size_t size() const { return frames.size(); }
  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  // Throws unless times are strictly increasing and uniform, frames share grid and rank.
  void validate() const;
};

}  // namespace convint
