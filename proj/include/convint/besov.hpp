// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "convint/field.hpp"

namespace convint {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Polynomial smoothstep S_N: 0 for x <= 0, 1 for x >= 1, C^N across both ends.
double smoothstep(double x, int order = 7);

// Radial dyadic partition: chi is 1 on |k| <= 3/4 and 0 on |k| >= 1 (smoothstep
// in log2|k|), phi(r) = chi(r/2) - chi(r). Block j_max = log2(n) - 2 is the
// remainder 1 - chi(2^{-j_max} r), so the blocks sum to 1 on every mode.
class DyadicPartition {
 public:
  explicit DyadicPartition(int n, int order = 7);

  int j_max() const { return j_max_; }
  int order() const { return order_; }
  double chi(double r) const;
  double phi(double r) const { return chi(0.5 * r) - chi(r); }
  double symbol(int j, double r) const;

 private:
  int j_max_;
  int order_;
};

struct BesovIndex {
  double alpha = 0.0;
  double p = kInf;
  double q = kInf;
};

Field lp_block(const Field& f, int j);
std::vector<Field> lp_blocks(const Field& f);  // j = -1 .. j_max

// Pointwise Euclidean / Frobenius magnitude, L^p over the unit torus.
double lp_norm(const Field& f, double p);
double besov_norm(const Field& f, const BesovIndex& idx);
inline double holder_norm(const Field& f, double alpha) { return besov_norm(f, {alpha, kInf, kInf}); }
double sobolev_norm(const Field& f, double s, double p);

enum class ParaKind { Lower, Resonant, Upper };
// Bony decomposition with the rank rules of multiply(): f<g + f o g + f>g = fg.
Field paraproduct(const Field& f, const Field& g, ParaKind kind);
struct ParaSplit {
  Field lower, resonant, upper;
};
ParaSplit paraproduct_split(const Field& f, const Field& g);

// h = 0 on r <= 1/2, 1 on r >= 1; l = 1 - h.
double cutoff_h(double r, int order = 7);
enum class FreqPart { High, Low };
Field freq_project(const Field& f, double J, FreqPart which);

// Normalized radial bump exp(-1/(1-|x|^2)) at scale l, as a Fourier multiplier.
double spatial_mollifier_symbol(double kabs, double l);
// Symbol per half-complex mode, cached per (n, l).
std::shared_ptr<const std::vector<double>> spatial_mollifier_table(const PeriodicGrid& g, double l);
Field apply_spatial_mollifier(const Field& f, double l);  // any l in (0, 1/2)
Field mollify_space(const Field& f, double l);            // requires l > 2/n
// Weights w_i for offsets i*dt, i = 0..M, of the one-sided bump supported in (0, l).
std::vector<double> time_mollifier_weights(double l, double dt);
// Output frame k combines inputs k - M .. k; the first M input frames only serve as history.
TimeSeriesField mollify_spacetime(const TimeSeriesField& f, double l);

struct HolderDecorrelation {
  std::vector<double> sigmas;
  std::vector<double> defects;
  double slope = 0.0;
};
// Defect |‖a f(s.)‖_{L^p(W)} - ‖a‖_{L^p(W)} ‖f‖_{L^p(T^2)}| on the window
// W = [u, u+1]^2, where a is any C^1 function on R^2 and f a periodic profile.
// With signed_integral (p = 1, f mean-zero) the defect is |int_W a f(s.)|.
HolderDecorrelation improved_holder_check(const std::function<double(double, double)>& a, const Field& f, double p,
                                          const std::vector<double>& sigmas, double u = 0.0,
                                          bool signed_integral = false);

// Least-squares slope of log(ys) against log(xs).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace convint
