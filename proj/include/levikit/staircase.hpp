#pragma once

// Fat Cantor interval systems, devil's-staircase iterates f_n and the
// C^{1,1} function F(x) = int_0^x (f(t) - t) dt built from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levikit/errors.hpp"
#include "levikit/field_io.hpp"
#include "levikit/numeric.hpp"

namespace levikit {

template <class T>
struct Interval {
  T a;
  T b;
  [[nodiscard]] T length() const { return b - a; }
};

/// Interval families I[n][i] (n = 0..N) and J[n][i] (n = 0..N-1), 0-based i.
/// J[n][i] is the closed middle piece of relative length alpha_{n+1} of
/// I[n][i]; I[n+1][2i], I[n+1][2i+1] are the two pieces left over.
template <class T>
class CantorSystem {
 public:
  CantorSystem(std::vector<T> alphas, int generations) : alphas_(std::move(alphas)), n_(generations) {
    if (n_ < 1) throw ParameterError("build_cantor: need N >= 1");
    if (static_cast<int>(alphas_.size()) < n_) throw ParameterError("build_cantor: fewer alphas than generations");
    if (n_ > 24) throw ParameterError("build_cantor: N > 24 exceeds the memory budget");
    alphas_.resize(static_cast<std::size_t>(n_));
    for (std::size_t k = 0; k < alphas_.size(); ++k) {
      if (!(alphas_[k] > T(0)) || !(alphas_[k] < T(1))) throw ParameterError("build_cantor: alpha_k must lie in (0, 1)");
      if (k > 0 && !(alphas_[k] < alphas_[k - 1])) throw ParameterError("build_cantor: alphas must be strictly decreasing");
    }
    I_.push_back({{T(0), T(1)}});
    for (int n = 0; n < n_; ++n) {
      const T& alpha = alphas_[static_cast<std::size_t>(n)];
      std::vector<Interval<T>> next;
      std::vector<Interval<T>> js;
      next.reserve(I_[n].size() * 2);
      js.reserve(I_[n].size());
      for (const Interval<T>& iv : I_[n]) {
        const T c = (iv.a + iv.b) / T(2);
        const T half = alpha * iv.length() / T(2);
        const Interval<T> j{c - half, c + half};
        js.push_back(j);
        next.push_back({iv.a, j.a});
        next.push_back({j.b, iv.b});
      }
      J_.push_back(std::move(js));
      I_.push_back(std::move(next));
    }
  }

  [[nodiscard]] int generations() const { return n_; }
  [[nodiscard]] const std::vector<T>& alphas() const { return alphas_; }
  [[nodiscard]] const std::vector<Interval<T>>& I(int n) const { return I_.at(static_cast<std::size_t>(n)); }
  [[nodiscard]] const std::vector<Interval<T>>& J(int n) const { return J_.at(static_cast<std::size_t>(n)); }

  /// prod_{k <= n} (1 - alpha_k).
  [[nodiscard]] T retained_fraction(int n) const {
    T p(1);
    for (int k = 0; k < n; ++k) p *= T(1) - alphas_[static_cast<std::size_t>(k)];
    return p;
  }
  /// Slope of f_n on the generation-n intervals: 1 / retained_fraction(n).
  [[nodiscard]] T slope(int n) const { return T(1) / retained_fraction(n); }
  /// Measure of the generation-N union, the estimate for |E_0|.
  [[nodiscard]] T limit_measure() const { return retained_fraction(n_); }

 private:
  std::vector<T> alphas_;
  int n_;
  std::vector<std::vector<Interval<T>>> I_;
  std::vector<std::vector<Interval<T>>> J_;
};

/// alpha_k = alpha1 4^{-(k-1)}, k = 1..N.
template <class T = double>
std::vector<T> default_alphas(const T& alpha1, int n) {
  std::vector<T> a;
  T x = alpha1;
  for (int k = 0; k < n; ++k) {
    a.push_back(x);
    x /= T(4);
  }
  return a;
}

template <class T>
CantorSystem<T> build_cantor(std::vector<T> alphas, int n) {
  return CantorSystem<T>(std::move(alphas), n);
}

/// Piecewise-affine f_n given by its breakpoints (increasing xs).
template <class T>
struct StaircaseIterate {
  int n = 0;
  T slope;
  std::vector<T> xs;
  std::vector<T> ys;

  [[nodiscard]] T operator()(const T& x) const {
    if (!(x > xs.front())) return ys.front();
    if (!(x < xs.back())) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
    if (xs[k + 1] == xs[k]) return ys[k + 1];
    return ys[k] + (ys[k + 1] - ys[k]) * (x - xs[k]) / (xs[k + 1] - xs[k]);
  }
};

/// f_n: affine with slope ell_n on each I[n][i] rising from i/2^n to
/// (i+1)/2^n, constant on every J[m][i] with m < n.
template <class T>
StaircaseIterate<T> staircase_f(const CantorSystem<T>& sys, int n) {
  if (n < 0 || n > sys.generations()) throw ParameterError("staircase_f: generation out of range");
  StaircaseIterate<T> f;
  f.n = n;
  f.slope = sys.slope(n);
  const auto& in = sys.I(n);
  const T denom = T(std::uint64_t{1} << n);
  for (std::size_t i = 0; i < in.size(); ++i) {
    f.xs.push_back(in[i].a);
    f.ys.push_back(T(static_cast<std::uint64_t>(i)) / denom);
    f.xs.push_back(in[i].b);
    f.ys.push_back(T(static_cast<std::uint64_t>(i + 1)) / denom);
  }
  return f;
}

/// F(x) = int_0^x (f_N(t) - t) chi_[0,1](t) dt, evaluated exactly piecewise.
class FatF {
 public:
  explicit FatF(const CantorSystem<double>& sys) : FatF(sys, sys.generations()) {}

  FatF(const CantorSystem<double>& sys, int n) : f_(staircase_f(sys, n)), alpha1_(sys.alphas().front()) {
    i11_ = sys.I(1).front();
    // Merge coincident breakpoints (none for alpha in (0,1), kept for safety).
    const auto& xs = f_.xs;
    const auto& ys = f_.ys;
    knots_.push_back(xs.front());
    vals_.push_back(ys.front());
    for (std::size_t k = 1; k < xs.size(); ++k) {
      if (xs[k] > knots_.back()) {
        knots_.push_back(xs[k]);
        vals_.push_back(ys[k]);
      }
    }
    cum_.assign(knots_.size(), 0.0);
    CompensatedSum s;
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
      const double x0 = knots_[k], x1 = knots_[k + 1];
      s.add(0.5 * (vals_[k] + vals_[k + 1]) * (x1 - x0) - 0.5 * (x1 - x0) * (x1 + x0));
      cum_[k + 1] = s.value();
    }
    slope_n_ = f_.slope;
  }

  [[nodiscard]] int generations() const { return f_.n; }
  [[nodiscard]] const StaircaseIterate<double>& iterate() const { return f_; }
  [[nodiscard]] const std::vector<double>& knots() const { return knots_; }
  [[nodiscard]] double alpha1() const { return alpha1_; }
  [[nodiscard]] const Interval<double>& I11() const { return i11_; }
  /// Uniform distance bound to the limit object, 2^{-N+1}.
  [[nodiscard]] double limit_error_bound() const { return std::ldexp(1.0, -f_.n + 1); }
  /// Lipschitz constant of F' (the largest |F''|).
  [[nodiscard]] double second_derivative_bound() const { return std::max(1.0, slope_n_ - 1.0); }

  [[nodiscard]] double operator()(double x) const {
    if (!(x > 0.0) || !(x < 1.0)) return 0.0;
    const std::size_t k = piece(x);
    const double dx = x - knots_[k];
    return cum_[k] + dx * (vals_[k] + 0.5 * seg_slope(k) * dx) - 0.5 * dx * (x + knots_[k]);
  }

  /// F'(x) = f_N(x) - x on [0, 1], 0 outside.
  [[nodiscard]] double d1(double x) const {
    if (!(x > 0.0) || !(x < 1.0)) return 0.0;
    return f_(x) - x;
  }

  /// F''(x), right-continuous at breakpoints; 0 outside (0, 1).
  [[nodiscard]] double d2(double x) const {
    if (!(x >= 0.0) || !(x < 1.0)) return 0.0;
    return seg_slope(piece(x)) - 1.0;
  }

  /// Points where F'' jumps: the knots plus 0 and 1.
  [[nodiscard]] std::vector<double> kinks() const { return knots_; }

  /// Piecewise-constant F'' as (left, right, value) pieces covering R.
  struct Piece {
    double lo, hi, value;
  };
  [[nodiscard]] std::vector<Piece> second_derivative_pieces() const {
    std::vector<Piece> out;
    out.push_back({-std::numeric_limits<double>::infinity(), 0.0, 0.0});
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k) out.push_back({knots_[k], knots_[k + 1], seg_slope(k) - 1.0});
    out.push_back({1.0, std::numeric_limits<double>::infinity(), 0.0});
    return out;
  }

 private:
  [[nodiscard]] std::size_t piece(double x) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - knots_.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, knots_.size() - 2);
  }
  [[nodiscard]] double seg_slope(std::size_t k) const {
    return (vals_[k + 1] - vals_[k]) / (knots_[k + 1] - knots_[k]);
  }

  StaircaseIterate<double> f_;
  double alpha1_;
  Interval<double> i11_{};
  std::vector<double> knots_;
  std::vector<double> vals_;
  std::vector<double> cum_;
  double slope_n_ = 1.0;
};

inline FatF fat_F(const CantorSystem<double>& sys, int n) { return FatF(sys, n); }

// ---------------------------------------------------------------------------
// The convexity point x0.

inline double quadratic_constant(double alpha1) { return 0.5 * (1.0 / (1.0 - alpha1) - 1.0); }

/// Largest r <= cap such that Q(t) = F(x0+t) - F(x0) - t F'(x0) - L t^2 >= -tol
/// for all |t| < r. Exact: Q is quadratic between consecutive knots.
inline double certified_radius(const FatF& F, double x0, double L, double cap, double tol = 1e-15) {
  const double F0 = F(x0), D0 = F.d1(x0);
  const std::vector<double>& cuts = F.knots();  // sorted, starts at 0 and ends at 1
  auto Q = [&](double t) { return F(x0 + t) - F0 - t * D0 - L * t * t; };
  double radius = cap;
  for (int dir : {+1, -1}) {
    // Piece boundaries in |t|, walking away from x0.
    std::vector<double> ts{0.0};
    if (dir > 0) {
      for (auto it = std::upper_bound(cuts.begin(), cuts.end(), x0); it != cuts.end() && *it - x0 < cap; ++it)
        ts.push_back(*it - x0);
    } else {
      auto it = std::lower_bound(cuts.begin(), cuts.end(), x0);
      while (it != cuts.begin()) {
        --it;
        if (x0 - *it >= cap) break;
        ts.push_back(x0 - *it);
      }
    }
    ts.push_back(cap);
    for (std::size_t p = 0; p + 1 < ts.size() && ts[p] < radius; ++p) {
      const double u0 = ts[p], u1 = std::min(ts[p + 1], radius);
      if (u1 <= u0) continue;
      // Q restricted to the piece is quadratic in s = |t|: fit through 3 points.
      const double um = 0.5 * (u0 + u1);
      const double q0 = Q(dir * u0), qm = Q(dir * um), q1 = Q(dir * u1);
      const double w = u1 - u0;
      const double c2 = 2.0 * (q1 - 2.0 * qm + q0) / (w * w);
      const double c1 = (q1 - q0) / w - c2 * (u0 + u1);
      const double c0 = q0 - c1 * u0 - c2 * u0 * u0;
      auto q = [&](double s) { return c0 + s * (c1 + s * c2); };
      double lo_bad = std::numeric_limits<double>::infinity();
      if (q(u1) < -tol) lo_bad = u1;
      if (c2 > 0.0) {
        const double sv = -c1 / (2.0 * c2);
        if (sv > u0 && sv < u1 && q(sv) < -tol) lo_bad = std::min(lo_bad, sv);
      }
      if (q(u0) < -tol && u0 > 0.0) lo_bad = u0;
      if (std::isfinite(lo_bad)) {
        // First crossing of -tol in [u0, lo_bad].
        double a = u0, b = lo_bad;
        for (int it = 0; it < 200 && b - a > 1e-17; ++it) {
          const double m = 0.5 * (a + b);
          (q(m) < -tol ? b : a) = m;
        }
        radius = std::min(radius, a);
        break;
      }
    }
  }
  return radius;
}

struct X0Result {
  double x0 = 0.0;
  double L = 0.0;
  double delta0 = 0.0;
  double certified_radius = 0.0;
  // The absolute minimiser of g = f_N - x / (1 - alpha1) on I[1][1].
  double g_argmin = 0.0;
  double g_argmin_radius = 0.0;
  std::size_t samples = 0;
  double min_margin = 0.0;
};

/// Exact leftmost minimiser of g(x) = f_N(x) - x / (1 - alpha1) on I[1][1];
/// g is piecewise affine so its minimum sits at a knot.
inline double g_argmin(const FatF& F) {
  const double l1 = 1.0 / (1.0 - F.alpha1());
  const auto& i11 = F.I11();
  double best = i11.a, gbest = F.iterate()(i11.a) - l1 * i11.a;
  for (double x : F.knots()) {
    if (x < i11.a || x > i11.b) continue;
    const double g = F.iterate()(x) - l1 * x;
    if (g < gbest) {
      gbest = g;
      best = x;
    }
  }
  return best;
}

/// Point x0 in the interior of I[1][1] with F(x0+s) >= F(x0) + s F'(x0) + L s^2
/// for |s| < delta0, L = ((1 - alpha1)^{-1} - 1) / 2. Candidates are scored by
/// min(0.05, dist(x0, boundary of I[1][1]) / 2, certified radius): a uniform
/// search followed by a finer local search; leftmost on ties. The bound is then
/// re-checked at `samples` offsets.
inline X0Result find_x0(const FatF& F, std::size_t samples = 1000, std::uint64_t seed = 1) {
  if (F.generations() < 3) throw ParameterError("find_x0: need N >= 3");
  X0Result r;
  r.L = quadratic_constant(F.alpha1());
  const auto& i11 = F.I11();
  const double width = i11.b - i11.a;
  auto score = [&](double x, double* rad) {
    const double dist = std::min(x - i11.a, i11.b - x);
    const double cap = std::min(0.05, 0.5 * dist);
    const double rr = certified_radius(F, x, r.L, cap);
    if (rad) *rad = rr;
    return std::min(cap, rr);
  };
  const int coarse = 2048;
  double best_x = i11.a + 0.5 * width, best_s = -1.0;
  for (int k = 1; k < coarse; ++k) {
    const double x = i11.a + width * k / coarse;
    const double s = score(x, nullptr);
    if (s > best_s) {
      best_s = s;
      best_x = x;
    }
  }
  const double cell = width / coarse;
  const int fine = 256;
  const double centre = best_x;
  for (int k = -fine; k <= fine; ++k) {
    const double x = centre + cell * k / fine;
    if (!(x > i11.a && x < i11.b)) continue;
    const double s = score(x, nullptr);
    if (s > best_s || (s == best_s && x < best_x)) {
      best_s = s;
      best_x = x;
    }
  }
  r.x0 = best_x;
  score(r.x0, &r.certified_radius);
  r.delta0 = best_s;
  if (!(r.delta0 > 0.0)) throw ConstructionError("find_x0: no point of I[1][1] supports the quadratic bound");
  r.g_argmin = g_argmin(F);
  r.g_argmin_radius = certified_radius(F, r.g_argmin, r.L, std::min(0.05, 0.5 * std::min(r.g_argmin - i11.a, i11.b - r.g_argmin)));

  Rng rng(seed);
  const double F0 = F(r.x0), D0 = F.d1(r.x0);
  r.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const double s = rng.uniform(-r.delta0, r.delta0);
    const double margin = F(r.x0 + s) - (F0 + s * D0 + r.L * s * s);
    r.min_margin = std::min(r.min_margin, margin);
    if (margin < -1e-14) throw ConstructionError("find_x0: sampled violation of the quadratic lower bound");
  }
  r.samples = samples;
  return r;
}

// ---------------------------------------------------------------------------
// JSON.

namespace detail {
/// "m/2^k" when x is a dyadic rational with k <= 30, else 17 significant digits.
inline std::string dyadic_or_decimal(double x) {
  for (int k = 0; k <= 30; ++k) {
    const double m = std::ldexp(x, k);
    if (m == std::floor(m) && std::abs(m) < 0x1p53) {
      const auto mi = static_cast<long long>(m);
      return k == 0 ? std::to_string(mi) : std::to_string(mi) + "/" + std::to_string(1LL << k);
    }
  }
  return format_double(x);
}
template <class T>
std::string endpoint_string(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return dyadic_or_decimal(x);
  } else {
    return x.str();
  }
}
}  // namespace detail

template <class T>
Json to_json(const CantorSystem<T>& sys) {
  Json alphas = Json::array(), I = Json::array(), J = Json::array();
  for (const T& a : sys.alphas()) alphas.push_back(detail::endpoint_string(a));
  for (int n = 0; n <= sys.generations(); ++n) {
    Json row = Json::array();
    for (const auto& iv : sys.I(n)) row.push_back({detail::endpoint_string(iv.a), detail::endpoint_string(iv.b)});
    I.push_back(std::move(row));
  }
  for (int n = 0; n < sys.generations(); ++n) {
    Json row = Json::array();
    for (const auto& iv : sys.J(n)) row.push_back({detail::endpoint_string(iv.a), detail::endpoint_string(iv.b)});
    J.push_back(std::move(row));
  }
  return {{"kind", "CantorSystem"}, {"generations", sys.generations()}, {"alphas", alphas}, {"I", I}, {"J", J}};
}

inline Json to_json(const FatF& F) {
  Json knots = Json::array(), vals = Json::array();
  for (double x : F.knots()) {
    knots.push_back(detail::dyadic_or_decimal(x));
    vals.push_back(detail::dyadic_or_decimal(F.iterate()(x)));
  }
  return {{"kind", "FatF"},
          {"generations", F.generations()},
          {"alpha1", F.alpha1()},
          {"limit_error_bound", F.limit_error_bound()},
          {"f_knots", knots},
          {"f_values", vals}};
}

inline Json to_json(const X0Result& r) {
  return {{"x0", r.x0},
          {"L", r.L},
          {"delta0", r.delta0},
          {"certified_radius", r.certified_radius},
          {"g_argmin", r.g_argmin},
          {"g_argmin_certified_radius", r.g_argmin_radius},
          {"samples", r.samples},
          {"min_margin", r.min_margin}};
}

}  // namespace levikit
