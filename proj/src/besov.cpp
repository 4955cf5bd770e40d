// SPDX-License-Identifier: MIT
#include "convint/besov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <boost/math/special_functions/binomial.hpp>

#include "convint/spectral.hpp"
#include "quadrature.hpp"

namespace convint {

double smoothstep(double x, int order) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // S(x) + S(1 - x) = 1; evaluating the short side keeps both tails exact in sign.
  if (x > 0.5) return 1.0 - smoothstep(1.0 - x, order);
  double s = 0.0, xk = 1.0;
  for (int k = 0; k <= order; ++k) {
    s += boost::math::binomial_coefficient<double>(order + k, k) *
         boost::math::binomial_coefficient<double>(2 * order + 1, order - k) * xk;
    xk *= -x;
  }
  return s * std::pow(x, order + 1);
}

DyadicPartition::DyadicPartition(int n, int order) : j_max_(0), order_(order) {
  if (n < 8 || !is_power_of_two(n)) throw std::invalid_argument("dyadic partition needs a power-of-two grid >= 8");
  j_max_ = static_cast<int>(std::lround(std::log2(n))) - 2;
}

double DyadicPartition::chi(double r) const {
  static const double lo = std::log2(0.75);
  if (r <= 0.75) return 1.0;
  if (r >= 1.0) return 0.0;
  return 1.0 - smoothstep((std::log2(r) - lo) / (-lo), order_);
}

double DyadicPartition::symbol(int j, double r) const {
  if (j < -1 || j > j_max_) throw std::out_of_range("Littlewood-Paley block index out of range");
  if (j == -1) return chi(r);
  if (j == j_max_) return 1.0 - chi(std::ldexp(r, -j));
  return phi(std::ldexp(r, -j));
}

namespace {

// Block symbols per grid size, cached: table[j+1][mode].
const std::vector<std::vector<double>>& block_table(const PeriodicGrid& g) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<std::vector<std::vector<double>>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(g.n());
  if (it != cache.end()) return *it->second;
  DyadicPartition part(g.n());
  auto table = std::make_unique<std::vector<std::vector<double>>>(part.j_max() + 2,
                                                                  std::vector<double>(g.spec_size()));
  const int h = g.half();
  for (int r = 0; r < g.n(); ++r)
    for (int c = 0; c < h; ++c) {
      const double k = std::hypot(double(g.k1(r)), double(c));
      for (int j = -1; j <= part.j_max(); ++j) (*table)[j + 1][r * h + c] = part.symbol(j, k);
    }
  return *cache.emplace(g.n(), std::move(table)).first->second;
}

Field apply_table(const Field& f, const std::vector<double>& sym) {
  Field out(f.grid(), f.rank());
  for (int c = 0; c < f.ncomp(); ++c)
    for (std::size_t i = 0; i < f.comp_size(); ++i) out.comp(c)[i] = sym[i] * f.comp(c)[i];
  return out;
}

// Pointwise magnitude weights: symmetric off-diagonal entries count twice.
double component_weight(Rank r, int c) { return (r == Rank::SymTensor && c == 1) ? 2.0 : 1.0; }

std::vector<double> magnitude_squared(const Padded& p) {
  std::vector<double> out(p.points(), 0.0);
  for (int c = 0; c < p.ncomp(); ++c) {
    const double w = component_weight(p.rank(), c);
    const double* v = p.comp(c);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * v[i] * v[i];
  }
  return out;
}

}  // namespace

Field lp_block(const Field& f, int j) {
  const auto& table = block_table(f.grid());
  if (j < -1 || j + 1 >= static_cast<int>(table.size())) throw std::out_of_range("Littlewood-Paley block index out of range");
  return apply_table(f, table[j + 1]);
}

std::vector<Field> lp_blocks(const Field& f) {
  const auto& table = block_table(f.grid());
  std::vector<Field> out;
  out.reserve(table.size());
  for (const auto& sym : table) out.push_back(apply_table(f, sym));
  return out;
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("L^p norm needs p >= 1");
  if (p == 2.0) {
    double s = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) {
      const double n = f.component(c).l2_norm();
      s += component_weight(f.rank(), c) * n * n;
    }
    return std::sqrt(s);
  }
  Padded pf(f, f.grid().padded(2.0));
  const auto mag2 = magnitude_squared(pf);
  if (std::isinf(p)) return std::sqrt(*std::max_element(mag2.begin(), mag2.end()));
  double s = 0.0;
  for (double v : mag2) s += std::pow(v, 0.5 * p);
  return std::pow(s / static_cast<double>(mag2.size()), 1.0 / p);
}

double besov_norm(const Field& f, const BesovIndex& idx) {
  if (!(idx.p >= 1.0) || !(idx.q >= 1.0)) throw std::invalid_argument("Besov index needs p, q >= 1");
  const auto blocks = lp_blocks(f);
  double acc = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const int j = static_cast<int>(b) - 1;
    // The low block carries weight 1 so that constants have norm |c|.
    const double w = j < 0 ? 1.0 : std::exp2(j * idx.alpha);
    const double v = w * lp_norm(blocks[b], idx.p);
    if (std::isinf(idx.q)) acc = std::max(acc, v);
    else acc += std::pow(v, idx.q);
  }
  return std::isinf(idx.q) ? acc : std::pow(acc, 1.0 / idx.q);
}

double sobolev_norm(const Field& f, double s, double p) {
  Field g = apply_real_multiplier(f, [s](int k1, int k2) {
    return std::pow(1.0 + 4.0 * kPi * kPi * (double(k1) * k1 + double(k2) * k2), 0.5 * s);
  });
  return lp_norm(g, p);
}

namespace {

struct Pairing {
  Rank rank;
  std::vector<std::array<int, 3>> terms;  // out component, f component, g component
};

Pairing pairing(Rank f, Rank g) {
  Pairing p;
  if (f == Rank::Scalar || g == Rank::Scalar) {
    p.rank = f == Rank::Scalar ? g : f;
    for (int c = 0; c < components(p.rank); ++c)
      p.terms.push_back({c, f == Rank::Scalar ? 0 : c, f == Rank::Scalar ? c : 0});
    return p;
  }
  if (f == Rank::Vector && g == Rank::Vector) {
    p.rank = Rank::Tensor;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) p.terms.push_back({tensor_index(i, j), i, j});
    return p;
  }
  throw std::invalid_argument("paraproduct: unsupported rank combination");
}

}  // namespace

ParaSplit paraproduct_split(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("paraproduct: grid mismatch");
  const Pairing pr = pairing(f.rank(), g.rank());
  const int m = product_size(f.grid());
  const auto fb = lp_blocks(f), gb = lp_blocks(g);
  const int nb = static_cast<int>(fb.size());
  std::vector<Padded> pf, pg;
  for (int b = 0; b < nb; ++b) {
    pf.emplace_back(fb[b], m);
    pg.emplace_back(gb[b], m);
  }
  Padded lo(f.grid(), pr.rank, m), res(f.grid(), pr.rank, m), up(f.grid(), pr.rank, m);
  const std::size_t np = lo.points();
  std::vector<double> sf(np), sg(np);
  for (const auto& t : pr.terms) {
    const int oc = t[0], fc = t[1], gc = t[2];
    std::fill(sf.begin(), sf.end(), 0.0);
    std::fill(sg.begin(), sg.end(), 0.0);
    // Blocks are indexed from 0 (j = -1). For block b, sf holds sum_{i <= b-2} f_i.
    for (int b = 0; b < nb; ++b) {
      if (b >= 2) {
        const double* fi = pf[b - 2].comp(fc);
        const double* gi = pg[b - 2].comp(gc);
        for (std::size_t p = 0; p < np; ++p) sf[p] += fi[p], sg[p] += gi[p];
      }
      const double* fb_ = pf[b].comp(fc);
      const double* gb_ = pg[b].comp(gc);
      double* l = lo.comp(oc);
      double* u = up.comp(oc);
      double* r = res.comp(oc);
      for (std::size_t p = 0; p < np; ++p) {
        l[p] += sf[p] * gb_[p];
        u[p] += fb_[p] * sg[p];
      }
      for (int i = std::max(0, b - 1); i <= std::min(nb - 1, b + 1); ++i) {
        const double* fi = pf[i].comp(fc);
        for (std::size_t p = 0; p < np; ++p) r[p] += fi[p] * gb_[p];
      }
    }
  }
  return {lo.truncate(), res.truncate(), up.truncate()};
}

Field paraproduct(const Field& f, const Field& g, ParaKind kind) {
  ParaSplit s = paraproduct_split(f, g);
  switch (kind) {
    case ParaKind::Lower: return s.lower;
    case ParaKind::Resonant: return s.resonant;
    case ParaKind::Upper: return s.upper;
  }
  return s.lower;
}

double cutoff_h(double r, int order) { return smoothstep(2.0 * r - 1.0, order); }

Field freq_project(const Field& f, double J, FreqPart which) {
  if (!(J > 0.0)) throw std::invalid_argument("freq_project: J must be positive");
  return apply_real_multiplier(f, [J, which](int k1, int k2) {
    const double h = cutoff_h(std::hypot(double(k1), double(k2)) / J);
    return which == FreqPart::High ? h : 1.0 - h;
  });
}

namespace {

double bump(double r) { return r * r >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - r * r)); }

double radial_transform(double xi) {
  // 2 pi int_0^1 bump(r) J0(2 pi xi r) r dr, normalized by the same integral at xi = 0.
  static const double mass = detail::integrate([](double r) { return bump(r) * r; }, 0.0, 1.0, 8);
  const double v = detail::integrate(
      [xi](double r) { return bump(r) * std::cyl_bessel_j(0.0, kTwoPi * xi * r) * r; }, 0.0, 1.0,
      8 + static_cast<int>(4.0 * xi));
  return v / mass;
}

}  // namespace

double spatial_mollifier_symbol(double kabs, double l) { return radial_transform(kabs * l); }

std::shared_ptr<const std::vector<double>> spatial_mollifier_table(const PeriodicGrid& g, double l) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{g.n(), l}];
  if (!slot) {
    auto t = std::make_shared<std::vector<double>>(g.spec_size());
    std::map<long, double> radial;
    for (int r = 0; r < g.n(); ++r)
      for (int c = 0; c < g.half(); ++c) {
        const long key = long(g.k1(r)) * g.k1(r) + long(c) * c;
        auto it = radial.find(key);
        if (it == radial.end()) it = radial.emplace(key, spatial_mollifier_symbol(std::sqrt(double(key)), l)).first;
        (*t)[r * g.half() + c] = it->second;
      }
    slot = t;
  }
  return slot;
}

Field apply_spatial_mollifier(const Field& f, double l) {
  if (!(l > 0.0) || !(l < 0.5)) throw std::invalid_argument("mollify: scale must lie in (0, 1/2)");
  return apply_table(f, *spatial_mollifier_table(f.grid(), l));
}

Field mollify_space(const Field& f, double l) {
  if (!(l > 2.0 / f.n())) throw std::invalid_argument("mollify: spatial scale under-resolved by the grid");
  return apply_spatial_mollifier(f, l);
}

std::vector<double> time_mollifier_weights(double l, double dt) {
  if (!(dt > 0.0) || !(l > dt)) throw std::invalid_argument("mollify: time scale must exceed the time step");
  const int M = static_cast<int>(std::ceil(l / dt - 1e-9));
  std::vector<double> w(M + 1);
  double s = 0.0;
  for (int i = 0; i <= M; ++i) s += (w[i] = bump(2.0 * i * dt / l - 1.0));
  for (auto& v : w) v /= s;
  return w;
}

TimeSeriesField mollify_spacetime(const TimeSeriesField& f, double l) {
  f.validate();
  if (f.frames.empty()) throw std::invalid_argument("mollify: empty series");
  const auto w = time_mollifier_weights(l, f.dt());
  const int M = static_cast<int>(w.size()) - 1;
  if (static_cast<int>(f.size()) <= M) throw std::invalid_argument("mollify: series shorter than the mollifier");
  TimeSeriesField out;
  for (std::size_t k = M; k < f.size(); ++k) {
    Field acc(f.frames[k].grid(), f.frames[k].rank());
    for (int i = 0; i <= M; ++i)
      if (w[i] != 0.0) acc += w[i] * f.frames[k - i];
    out.times.push_back(f.times[k]);
    out.frames.push_back(mollify_space(acc, l));
  }
  return out;
}

HolderDecorrelation improved_holder_check(const std::function<double(double, double)>& a, const Field& f, double p,
                                          const std::vector<double>& sigmas, double u, bool signed_integral) {
  if (f.rank() != Rank::Scalar) throw std::invalid_argument("improved_holder_check: scalar profile expected");
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("improved_holder_check: need finite p >= 1");
  if (signed_integral && (p != 1.0 || std::abs(f.mean()) > 1e-12 * (1.0 + f.l2_norm())))
    throw std::invalid_argument("improved_holder_check: signed variant needs p = 1 and a mean-zero profile");
  if (sigmas.size() < 2) throw std::invalid_argument("improved_holder_check: need at least two sigmas");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double s = sigmas[i];
    if (!(s >= 1.0) || !is_power_of_two(static_cast<int>(s)) || s != std::floor(s) || (i > 0 && !(s > sigmas[i - 1])))
      throw std::invalid_argument("improved_holder_check: sigmas must be increasing powers of two");
  }

  // Product quadrature: per cell of side 1/sigma, a is interpolated on a
  // tensor Gauss-Legendre grid while the profile enters only through the
  // moments W_q = int g(y) l_q1(y1) l_q2(y2) dy, computed once on a fine grid.
  const auto rule = detail::gauss_legendre_unit<10>();
  const int Q = static_cast<int>(rule.x.size());
  const int M = std::max(2048, 8 * f.n());
  Padded pf(f, M);
  std::vector<double> g(pf.points());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = signed_integral ? pf.comp(0)[i] : std::pow(std::abs(pf.comp(0)[i]), p);
  std::vector<double> L(static_cast<std::size_t>(Q) * (M + 1));
  for (int q = 0; q < Q; ++q)
    for (int i = 0; i <= M; ++i) {
      const double y = double(i) / M;
      double v = 1.0;
      for (int r = 0; r < Q; ++r)
        if (r != q) v *= (y - rule.x[r]) / (rule.x[q] - rule.x[r]);
      // Trapezoid weights on the closed interval.
      L[q * (M + 1) + i] = v * ((i == 0 || i == M) ? 0.5 : 1.0) / M;
    }
  // T[q1][j] = sum_i L[q1][i] g(i, j), then W = T L^T; index M wraps to 0.
  std::vector<double> T(static_cast<std::size_t>(Q) * (M + 1), 0.0), W(static_cast<std::size_t>(Q) * Q, 0.0);
  for (int q = 0; q < Q; ++q)
    for (int i = 0; i <= M; ++i) {
      const double li = L[q * (M + 1) + i];
      const double* row = g.data() + static_cast<std::size_t>(i % M) * M;
      double* t = T.data() + static_cast<std::size_t>(q) * (M + 1);
      for (int j = 0; j < M; ++j) t[j] += li * row[j];
      t[M] += li * row[0];
    }
  double gint = 0.0;
  for (int q1 = 0; q1 < Q; ++q1)
    for (int q2 = 0; q2 < Q; ++q2) {
      double s = 0.0;
      for (int j = 0; j <= M; ++j) s += T[q1 * (M + 1) + j] * L[q2 * (M + 1) + j];
      W[q1 * Q + q2] = s;
      gint += s;
    }
  const double fnorm = signed_integral ? 0.0 : std::pow(gint, 1.0 / p);

  HolderDecorrelation out;
  for (double s : sigmas) {
    const int cells = static_cast<int>(s);
    double val = 0.0, anorm = 0.0;
    for (int c1 = 0; c1 < cells; ++c1)
      for (int c2 = 0; c2 < cells; ++c2)
        for (int q1 = 0; q1 < Q; ++q1)
          for (int q2 = 0; q2 < Q; ++q2) {
            const double av = a(u + (c1 + rule.x[q1]) / s, u + (c2 + rule.x[q2]) / s);
            const double A = signed_integral ? av : std::pow(std::abs(av), p);
            val += W[q1 * Q + q2] * A;
            anorm += rule.w[q1] * rule.w[q2] * A;
          }
    val /= s * s;
    anorm /= s * s;
    const double defect = signed_integral ? std::abs(val) : std::abs(std::pow(val, 1.0 / p) - std::pow(anorm, 1.0 / p) * fnorm);
    out.sigmas.push_back(s);
    out.defects.push_back(defect);
  }
  out.slope = loglog_slope(out.sigmas, out.defects);
  return out;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("loglog_slope: need matching samples");
  double mx = 0, my = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) mx += std::log(xs[i]) / n, my += std::log(ys[i]) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace convint
