// SPDX-License-Identifier: MIT
#include "convint/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace convint {

int components(Rank r) {
  switch (r) {
    case Rank::Scalar: return 1;
    case Rank::Vector: return 2;
    case Rank::SymTensor: return 3;
    case Rank::Tensor: return 4;
  }
  return 0;
}

const char* rank_name(Rank r) {
  switch (r) {
    case Rank::Scalar: return "scalar";
    case Rank::Vector: return "vector2";
    case Rank::SymTensor: return "symtensor2";
    case Rank::Tensor: return "tensor2";
  }
  return "?";
}

Field::Field(const PeriodicGrid& grid, Rank rank)
    : grid_(grid), rank_(rank), data_(grid.spec_size() * components(rank)) {}

Field Field::from_physical(const PeriodicGrid& grid, Rank rank, std::span<const double> values) {
  Field f(grid, rank);
  const std::size_t np = grid.phys_size();
  if (values.size() != np * f.ncomp()) throw std::invalid_argument("physical data has wrong size");
  for (int c = 0; c < f.ncomp(); ++c) fft::forward(grid.n(), values.data() + c * np, f.comp(c));
  return f;
}

Field Field::from_components(const std::vector<Field>& scalars, Rank rank) {
  if (scalars.empty() || static_cast<int>(scalars.size()) != components(rank))
    throw std::invalid_argument("component count does not match rank");
  Field f(scalars.front().grid(), rank);
  for (int c = 0; c < f.ncomp(); ++c) f.set_component(c, scalars[c]);
  return f;
}

std::vector<double> Field::to_physical() const {
  const std::size_t np = grid_.phys_size();
  std::vector<double> out(np * ncomp());
  for (int c = 0; c < ncomp(); ++c) fft::inverse(n(), comp(c), out.data() + c * np);
  return out;
}

std::vector<double> Field::component_physical(int c) const {
  std::vector<double> out(grid_.phys_size());
  fft::inverse(n(), comp(c), out.data());
  return out;
}

Field Field::component(int c) const {
  Field s(grid_, Rank::Scalar);
  std::copy(comp(c), comp(c) + comp_size(), s.comp(0));
  return s;
}

void Field::set_component(int c, const Field& scalar) {
  if (scalar.rank() != Rank::Scalar || !(scalar.grid() == grid_))
    throw std::invalid_argument("set_component needs a scalar on the same grid");
  std::copy(scalar.comp(0), scalar.comp(0) + comp_size(), comp(c));
}

double Field::l2_norm() const {
  const int h = grid_.half();
  const int n2 = n() / 2;
  double s = 0.0;
  for (int c = 0; c < ncomp(); ++c) {
    const cplx* d = comp(c);
    for (int r = 0; r < n(); ++r)
      for (int k = 0; k < h; ++k) {
        // Columns 1..n/2-1 stand for two conjugate modes.
        double w = (k == 0 || k == n2) ? 1.0 : 2.0;
        s += w * std::norm(d[r * h + k]);
      }
  }
  return std::sqrt(s);
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : to_physical()) m = std::max(m, std::abs(v));
  return m;
}

void Field::check_compatible(const Field& o) const {
  if (!(o.grid_ == grid_) || o.rank_ != rank_) throw std::invalid_argument("field grid or rank mismatch");
}

Field& Field::operator+=(const Field& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

TimeSeriesField TimeSeriesField::uniform(double t0, double dt, std::vector<Field> frames) {
  TimeSeriesField ts;
  ts.times.resize(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) ts.times[i] = t0 + dt * static_cast<double>(i);
  ts.frames = std::move(frames);
  return ts;
}

void TimeSeriesField::validate() const {
  if (times.size() != frames.size()) throw std::invalid_argument("time series has mismatched times and frames");
  if (frames.empty()) return;
  const double h = dt();
  for (std::size_t i = 1; i < times.size(); ++i) {
    double step = times[i] - times[i - 1];
    if (!(step > 0.0)) throw std::invalid_argument("time series times must be strictly increasing");
    if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("time series times must be uniform");
  }
  for (const auto& f : frames)
    if (!(f.grid() == frames.front().grid()) || f.rank() != frames.front().rank())
      throw std::invalid_argument("time series frames must share grid and rank");
}

}  // namespace convint
