#pragma once

// Radial mollifiers, direct 3-D convolution on the shrunk grid U^delta, the
// regularised defining functions x1 - phi*theta_delta + eps|z|^2 + eps, and the
// sign-preservation certificate for -Delta_{tau(phi)}(v * theta_delta).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "levikit/errors.hpp"
#include "levikit/field.hpp"
#include "levikit/field_io.hpp"
#include "levikit/levi.hpp"
#include "levikit/numeric.hpp"
#include "levikit/parallel.hpp"
#include "levikit/staircase.hpp"

namespace levikit {

/// theta(x) = exp(-1/(1 - |x|^2)) / Z on the unit ball of R^3.
class BumpKernel {
 public:
  static double profile(double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; }

  [[nodiscard]] double normalization() const { return z_; }
  /// int x1^2 theta(x) dx for the unit kernel.
  [[nodiscard]] double m2() const { return m2_; }
  [[nodiscard]] double density(double r) const { return profile(r) / z_; }

  /// Marginal along one axis: k(s) = 2 pi int_{|s|}^1 theta(r) r dr.
  [[nodiscard]] double marginal(double s) const {
    const double a = std::abs(s);
    if (a >= 1.0) return 0.0;
    return 2.0 * kPi * integrate([](double r) { return profile(r) * r; }, a, 1.0) / z_;
  }

  /// int_{-1}^{s} k, via int_0^a k = 2 pi int_0^1 theta(r) r min(r, a) dr.
  [[nodiscard]] double marginal_cdf(double s) const {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::abs(s);
    const double inner = integrate([](double r) { return profile(r) * r * r; }, 0.0, a) +
                         a * integrate([](double r) { return profile(r) * r; }, a, 1.0);
    const double half = 2.0 * kPi * inner / z_;
    return s < 0 ? 0.5 - half : 0.5 + half;
  }

  static const BumpKernel& instance() {
    static const BumpKernel k;
    return k;
  }

 private:
  BumpKernel() {
    z_ = 4.0 * kPi * integrate([](double r) { return profile(r) * r * r; }, 0.0, 1.0);
    m2_ = 4.0 * kPi / 3.0 * integrate([](double r) { return profile(r) * r * r * r * r; }, 0.0, 1.0) / z_;
  }

  template <class Fn>
  static double integrate(Fn f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 6, 1e-13);
  }

  double z_ = 1.0;
  double m2_ = 0.0;
};

/// theta_delta(x) = theta(x / delta) / delta^3 sampled on the lattice h Z^3.
/// Weights are normalised to unit discrete mass; raw_mass is the lattice
/// quadrature of the continuous kernel before normalisation.
struct ScaledKernel {
  double delta = 0.0;
  double h = 0.0;
  int reach = 0;  // offsets lie in [-reach, reach]^3
  std::vector<std::array<int, 3>> offsets;
  std::vector<double> weights;
  double raw_mass = 0.0;
  double second_moment = 0.0;  // sum w x1^2 over the lattice
  double continuous_second_moment = 0.0;  // delta^2 m2

  [[nodiscard]] double value_at(const Point3& x) const {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return BumpKernel::instance().density(r / delta) / (delta * delta * delta);
  }
};

inline constexpr double kMinKernelCells = 2.0;

inline ScaledKernel make_kernel(double delta, double h) {
  if (!(delta > 0.0)) throw ParameterError("make_kernel: delta must be > 0");
  if (!(h > 0.0)) throw ParameterError("make_kernel: grid spacing must be > 0");
  if (delta < kMinKernelCells * h) throw ResolutionError("make_kernel: kernel under-resolved (delta < 2 grid cells)");
  const BumpKernel& K = BumpKernel::instance();
  ScaledKernel k;
  k.delta = delta;
  k.h = h;
  k.reach = static_cast<int>(std::floor(delta / h));
  const double scale = h * h * h / (delta * delta * delta);
  CompensatedSum raw;
  for (int a = -k.reach; a <= k.reach; ++a) {
    for (int b = -k.reach; b <= k.reach; ++b) {
      for (int c = -k.reach; c <= k.reach; ++c) {
        const double r = h * std::sqrt(double(a * a + b * b + c * c)) / delta;
        if (!(r < 1.0)) continue;
        const double w = K.density(r) * scale;
        if (w == 0.0) continue;
        k.offsets.push_back({a, b, c});
        k.weights.push_back(w);
        raw.add(w);
      }
    }
  }
  k.raw_mass = raw.value();
  CompensatedSum m2;
  for (std::size_t q = 0; q < k.weights.size(); ++q) {
    k.weights[q] /= k.raw_mass;
    const double x = k.offsets[q][0] * h;
    m2.add(k.weights[q] * x * x);
  }
  k.second_moment = m2.value();
  k.continuous_second_moment = delta * delta * K.m2();
  return k;
}

/// v * theta_delta on U^delta, the nodes farther than delta from every face.
struct MollifiedField {
  ScalarField3 field;  // on the shrunk grid
  double delta = 0.0;
  int margin = 0;  // cells trimmed on each side of the base grid

  /// Node of the base grid matching a node of the shrunk grid.
  [[nodiscard]] Node base_node(Node n) const { return {n.i + margin, n.j + margin, n.k + margin}; }
};

/// Cells trimmed from each face so that every kept node is farther than delta
/// from the boundary.
inline int shrink_margin(double delta, double h) { return static_cast<int>(std::floor(delta / h + 1e-12)) + 1; }

inline Grid3 shrunk_grid(const Grid3& g, int margin) {
  const auto& e = g.extents();
  const std::array<int, 3> ext{e[0] - 2 * margin, e[1] - 2 * margin, e[2] - 2 * margin};
  for (int x : ext) {
    if (x < 5) throw ParameterError("convolve3: U^delta has fewer than 5 nodes per axis");
  }
  return Grid3(g.coord({margin, margin, margin}), g.spacing(), ext);
}

inline MollifiedField convolve3(const ScalarField3& v, const ScaledKernel& k) {
  const Grid3& g = v.grid();
  if (std::abs(k.h - g.spacing()) > 1e-12 * g.spacing()) throw ParameterError("convolve3: kernel built for another spacing");
  const int margin = shrink_margin(k.delta, g.spacing());
  const Grid3 out = shrunk_grid(g, margin);
  std::vector<double> vals(out.size());
  parallel_for(out.size(), [&](std::size_t idx) {
    const Node n = out.node(idx);
    const Node b{n.i + margin, n.j + margin, n.k + margin};
    double s = 0.0;
    for (std::size_t q = 0; q < k.weights.size(); ++q) {
      const auto& o = k.offsets[q];
      s += k.weights[q] * v({b.i + o[0], b.j + o[1], b.k + o[2]});
    }
    vals[idx] = s;
  });
  Regularity reg = Regularity::smooth(v.regularity().constant);
  return {ScalarField3(out, std::move(vals), reg), k.delta, margin};
}

inline MollifiedField convolve3(const ScalarField3& v, double delta) {
  return convolve3(v, make_kernel(delta, v.grid().spacing()));
}

// ---------------------------------------------------------------------------
// Regularised defining functions.

/// Exponent alpha - 3/p of the mollification error bound. Smooth and C^{1,1}
/// data use alpha = 1, p = infinity.
struct RateExponent {
  double alpha = 1.0;
  double p = std::numeric_limits<double>::infinity();
  [[nodiscard]] double value() const { return alpha - 3.0 / p; }
  /// delta(eps) = eps^{1 / (alpha - 3/p)}.
  [[nodiscard]] double delta_of(double eps) const { return std::pow(eps, 1.0 / value()); }

  static RateExponent from(const Regularity& r, double p_default = 6.0) {
    if (r.kind == Regularity::Kind::c1alpha) return {r.alpha, p_default};
    return {};
  }
};

/// rho_{delta,eps}(x1, xi) = x1 - (phi * theta_delta)(xi) + eps (x1^2 + |xi|^2) + eps,
/// the smoothing of rho = x1 - phi. delta = 0 means no smoothing.
class RegularizedDefining {
 public:
  RegularizedDefining(const ScalarField3& phi, double eps, double delta, RateExponent rate)
      : phi_(std::make_shared<ScalarField3>(phi)), eps_(eps), delta_(delta), rate_(rate) {
    if (!(eps >= 0.0)) throw ParameterError("regularized_defining: eps must be >= 0");
    if (!(delta >= 0.0)) throw ParameterError("regularized_defining: delta must be >= 0");
    if (eps > 0.0 && delta > rate.delta_of(eps) * (1.0 + 1e-12)) {
      throw ParameterError("regularized_defining: delta exceeds delta(eps) = eps^{1/(alpha - 3/p)}");
    }
    if (delta == 0.0) {
      smooth_ = std::make_shared<ScalarField3>(phi);
      margin_ = 0;
    } else {
      MollifiedField m = convolve3(phi, delta);
      margin_ = m.margin;
      smooth_ = std::make_shared<ScalarField3>(std::move(m.field));
    }
    check_containment();
  }

  [[nodiscard]] double eps() const { return eps_; }
  [[nodiscard]] double delta() const { return delta_; }
  [[nodiscard]] const ScalarField3& smoothed_phi() const { return *smooth_; }
  [[nodiscard]] const Grid3& grid() const { return smooth_->grid(); }

  /// rho(x1, xi) = x1 - phi(xi) at a node of the shrunk grid.
  [[nodiscard]] double reference(double x1, Node n) const { return x1 - (*phi_)(base(n)); }
  [[nodiscard]] double operator()(double x1, Node n) const {
    const Point3 xi = grid().coord(n);
    return x1 - (*smooth_)(n) + eps_ * (x1 * x1 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) + eps_;
  }

  /// Upper end of {x1 : rho_{delta,eps}(x1, xi) < 0}, or -inf if that set is empty.
  [[nodiscard]] double upper_root(Node n) const {
    const Point3 xi = grid().coord(n);
    const double c = eps_ * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] + 1.0) - (*smooth_)(n);
    if (eps_ == 0.0) return -c;
    const double disc = 1.0 - 4.0 * eps_ * c;
    if (disc < 0.0) return -std::numeric_limits<double>::infinity();
    // Stable form of (-1 + sqrt(disc)) / (2 eps).
    return -2.0 * c / (1.0 + std::sqrt(disc));
  }

  /// sup over the shrunk grid of |upper_root - phi|: vertical distance between
  /// the zero sets {rho_{delta,eps} = 0} and {rho = 0}.
  [[nodiscard]] double zero_set_distance() const {
    std::vector<double> d(grid().size());
    parallel_for(d.size(), [&](std::size_t idx) {
      const Node n = grid().node(idx);
      const double r = upper_root(n);
      d[idx] = std::isfinite(r) ? std::abs(r - (*phi_)(base(n))) : std::numeric_limits<double>::infinity();
    });
    return *std::max_element(d.begin(), d.end());
  }

  /// Wirtinger jet of rho_{delta,eps} at (x1, node) from fd derivatives of phi*theta_delta.
  [[nodiscard]] LeviJet jet(double x1, Node n) const {
    const Vector3 g = fd_gradient(*smooth_, n);
    const Matrix3 H = fd_hessian(*smooth_, n);
    const Wirtinger w = wirtinger_from_real(g, H);
    const Point3 xi = grid().coord(n);
    const Complex z1(x1, xi[0]), z2(xi[1], xi[2]);
    LeviJet j;
    j.value = (*this)(x1, n);
    j.r1 = Complex(0.5, 0.5 * g[0]) + eps_ * std::conj(z1);
    j.r2 = -w.dz2 + eps_ * std::conj(z2);
    j.r11 = -0.25 * H[0][0] + eps_;
    j.r22 = -w.dz2dz2bar + eps_;
    j.r12 = Complex(0.0, 0.5) * w.dy1dz2bar;
    return j;
  }

  /// Gridded Defining2: (z1, z2) must sit on a node of the shrunk grid.
  [[nodiscard]] Defining2 defining() const {
    auto self = std::make_shared<RegularizedDefining>(*this);
    return {"regularized", [self](Complex z1, Complex z2) {
              const Point3 xi{z1.imag(), z2.real(), z2.imag()};
              const Node n = self->grid().nearest(xi);
              const Point3 p = self->grid().coord(n);
              const double tol = 1e-9 * self->grid().spacing();
              if (!self->grid().contains(n) || std::abs(p[0] - xi[0]) > tol || std::abs(p[1] - xi[1]) > tol ||
                  std::abs(p[2] - xi[2]) > tol) {
                throw DomainError("regularized defining function: point is not a grid node");
              }
              return self->jet(z1.real(), n);
            }};
  }

 private:
  [[nodiscard]] Node base(Node n) const { return {n.i + margin_, n.j + margin_, n.k + margin_}; }

  // {rho_{delta,eps} < 0} lies in {rho < 0}: at each node, the x1-interval where
  // rho_{delta,eps} < 0 must end at or below phi(xi).
  void check_containment() const {
    if (eps_ == 0.0) return;
    std::vector<char> bad(grid().size(), 0);
    parallel_for(bad.size(), [&](std::size_t idx) {
      const Node n = grid().node(idx);
      bad[idx] = upper_root(n) > (*phi_)(base(n)) ? 1 : 0;
    });
    if (std::find(bad.begin(), bad.end(), 1) != bad.end()) {
      throw ParameterError("regularized_defining: {rho_delta,eps < 0} is not inside {rho < 0}; eps or delta too large");
    }
  }

  std::shared_ptr<const ScalarField3> phi_;
  std::shared_ptr<const ScalarField3> smooth_;
  double eps_;
  double delta_;
  RateExponent rate_;
  int margin_ = 0;
};

inline RegularizedDefining regularized_defining(const ScalarField3& phi, double eps, double delta) {
  return RegularizedDefining(phi, eps, delta, RateExponent::from(phi.regularity()));
}
inline RegularizedDefining regularized_defining(const ScalarField3& phi, double eps, double delta, RateExponent rate) {
  return RegularizedDefining(phi, eps, delta, rate);
}

// ---------------------------------------------------------------------------
// W^{2,p} estimate.

/// (sum over nodes of (|v|^p + sum_a |v_a|^p + sum_{a,b} |v_ab|^p) h^3)^{1/p},
/// with fd derivatives at nodes one cell inside the grid, skipping nodes for
/// which `skip` returns true (declared kink cells).
inline double w2p_estimate(const ScalarField3& v, double p, const std::function<bool(const Point3&)>& skip = {}) {
  const Grid3& g = v.grid();
  std::vector<double> terms(g.size(), 0.0);
  parallel_for(g.size(), [&](std::size_t idx) {
    const Node n = g.node(idx);
    if (!g.interior(n)) return;
    const Point3 x = g.coord(n);
    if (skip && skip(x)) return;
    const Vector3 d = fd_gradient(v, n);
    const Matrix3 H = fd_hessian(v, n);
    double t = std::pow(std::abs(v(n)), p);
    for (int a = 0; a < 3; ++a) {
      t += std::pow(std::abs(d[a]), p);
      for (int b = 0; b < 3; ++b) t += std::pow(std::abs(H[a][b]), p);
    }
    terms[idx] = t;
  });
  const double h = g.spacing();
  return std::pow(compensated_sum(terms) * h * h * h, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Models for the certificate. A model supplies
//   hypothesis_min()        min of -Delta_{tau(phi)} v over non-kink nodes,
//   min_mollified(delta)    min over U^delta of -Delta_{tau(phi)}(v * theta_delta),
//   w2p(p)                  the W^{2,p} estimate of v.

/// v and phi sampled on the same grid; mollification by direct convolution.
class GridPair {
 public:
  GridPair(ScalarField3 v, ScalarField3 phi, std::function<bool(const Point3&)> kink = {})
      : v_(std::move(v)), phi_(std::move(phi)), kink_(std::move(kink)) {
    if (!(v_.grid() == phi_.grid())) throw ParameterError("GridPair: v and phi must share a grid");
  }

  [[nodiscard]] double hypothesis_min() const {
    const Grid3& g = v_.grid();
    std::vector<double> vals(g.size(), std::numeric_limits<double>::infinity());
    parallel_for(g.size(), [&](std::size_t idx) {
      const Node n = g.node(idx);
      if (!g.interior(n) || (kink_ && kink_(g.coord(n)))) return;
      vals[idx] = -delta_tau(v_, tau_of_phi(phi_, n), n);
    });
    return *std::min_element(vals.begin(), vals.end());
  }

  [[nodiscard]] double min_mollified(double delta) const {
    const MollifiedField m = convolve3(v_, delta);
    const Grid3& g = m.field.grid();
    std::vector<double> vals(g.size(), std::numeric_limits<double>::infinity());
    parallel_for(g.size(), [&](std::size_t idx) {
      const Node n = g.node(idx);
      if (!g.interior(n)) return;
      const TangentPair tau = tau_of_phi(phi_, m.base_node(n));
      vals[idx] = -delta_tau(m.field, tau, n);
    });
    return *std::min_element(vals.begin(), vals.end());
  }

  [[nodiscard]] double w2p(double p) const { return w2p_estimate(v_, p, kink_); }

 private:
  ScalarField3 v_;
  ScalarField3 phi_;
  std::function<bool(const Point3&)> kink_;
};

/// v = phi = F(xi1) - |z2|^2 with the staircase F, evaluated at the nodes of a
/// box grid. The Hessian of v * theta_delta is exact: the xi1xi1 entry is
/// (F'' * k_delta)(xi1) with k the kernel's axis marginal, the z2 block is
/// -2 I, and mixed entries vanish. tau is taken from phi itself.
class LiftedStaircase {
 public:
  LiftedStaircase(std::shared_ptr<const FatF> F, Grid3 grid) : F_(std::move(F)), grid_(std::move(grid)) {
    pieces_ = F_->second_derivative_pieces();
  }

  [[nodiscard]] const Grid3& grid() const { return grid_; }
  [[nodiscard]] double phi(const Point3& x) const { return (*F_)(x[0]) - x[1] * x[1] - x[2] * x[2]; }

  /// (F'' * k_delta)(x) from the exact piecewise-constant F''.
  [[nodiscard]] double smoothed_second_derivative(double x, double delta) const {
    if (delta == 0.0) return F_->d2(x);
    const BumpKernel& K = BumpKernel::instance();
    // First piece whose upper end exceeds x - delta.
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x - delta,
                               [](double v, const FatF::Piece& p) { return v < p.hi; });
    double s = 0.0;
    for (; it != pieces_.end() && it->lo < x + delta; ++it) {
      // Weight of [lo, hi] under k_delta(x - .) is K((x - lo)/delta) - K((x - hi)/delta).
      const double a = std::isfinite(it->lo) ? K.marginal_cdf((x - it->lo) / delta) : 1.0;
      const double b = std::isfinite(it->hi) ? K.marginal_cdf((x - it->hi) / delta) : 0.0;
      s += it->value * (a - b);
    }
    return s;
  }

  [[nodiscard]] double value(const Point3& x, double v11) const {
    const TangentPair tau = tau_from_gradient({F_->d1(x[0]), -2.0 * x[1], -2.0 * x[2]});
    Matrix3 H{};
    H[0][0] = v11;
    H[1][1] = H[2][2] = -2.0;
    return -delta_tau_from_hessian(H, tau);
  }

  [[nodiscard]] double hypothesis_min() const {
    std::vector<double> vals(grid_.size(), std::numeric_limits<double>::infinity());
    const auto& knots = F_->knots();
    parallel_for(grid_.size(), [&](std::size_t idx) {
      const Point3 x = grid_.coord(grid_.node(idx));
      const auto it = std::lower_bound(knots.begin(), knots.end(), x[0] - 1e-12);
      if (it != knots.end() && std::abs(*it - x[0]) <= 1e-12) return;  // F'' undefined on a knot
      vals[idx] = value(x, F_->d2(x[0]));
    });
    return *std::min_element(vals.begin(), vals.end());
  }

  [[nodiscard]] double min_mollified(double delta) const {
    const int margin = shrink_margin(delta, grid_.spacing());
    const Grid3 u = shrunk_grid(grid_, margin);
    // v11 depends on xi1 only.
    std::vector<double> v11(static_cast<std::size_t>(u.extents()[0]));
    parallel_for(v11.size(), [&](std::size_t i) {
      v11[i] = smoothed_second_derivative(u.coord({static_cast<int>(i), 0, 0})[0], delta);
    });
    std::vector<double> vals(u.size());
    parallel_for(u.size(), [&](std::size_t idx) {
      const Node n = u.node(idx);
      vals[idx] = value(u.coord(n), v11[static_cast<std::size_t>(n.i)]);
    });
    return *std::min_element(vals.begin(), vals.end());
  }

  [[nodiscard]] double w2p(double p) const {
    const ScalarField3 v = ScalarField3::sample(grid_, [&](const Point3& x) { return phi(x); });
    const auto& knots = F_->knots();
    const double h = grid_.spacing();
    return w2p_estimate(v, p, [&](const Point3& x) {
      const auto it = std::lower_bound(knots.begin(), knots.end(), x[0] - h);
      return it != knots.end() && *it <= x[0] + h;
    });
  }

 private:
  std::shared_ptr<const FatF> F_;
  Grid3 grid_;
  std::vector<FatF::Piece> pieces_;
};

// ---------------------------------------------------------------------------

struct CertificateParams {
  double epsilon = 1e-2;
  double alpha = 0.9;
  double p = 6.0;
  int sweep = 7;  // delta_k = delta0 2^{-k}, k = 0..sweep-1
};

struct CertificateReport {
  double epsilon = 0.0;
  double alpha = 0.0;
  double p = 0.0;
  double rate = 0.0;  // alpha - 3/p
  double delta0 = 0.0;
  std::vector<double> deltas;
  std::vector<double> m_values;
  double fitted_slope = 0.0;
  double empirical_constant = 0.0;
  double hypothesis_min = 0.0;
  double w2p = 0.0;
  bool inequality_pass = false;
  bool slope_within_tolerance = false;
  bool pass = false;
};

inline constexpr double kSlopeTolerance = 0.2;
inline constexpr double kSlopeFloor = 1e-14;

/// Sweeps delta over a dyadic ladder below delta(eps) and records
/// m(delta) = min over U^delta of -Delta_{tau(phi)}(v * theta_delta). `pass` is
/// the inequality m(delta) >= -eps at every delta; the slope of
/// log max(-m, 1e-14) against log delta is reported next to alpha - 3/p.
template <class Model>
CertificateReport sign_certificate(const Model& model, const CertificateParams& cp) {
  if (!(cp.p > 3.0)) throw ParameterError("sign_certificate: need p > 3");
  if (!(cp.alpha > 3.0 / cp.p && cp.alpha < 1.0)) throw ParameterError("sign_certificate: need alpha in (3/p, 1)");
  if (!(cp.epsilon > 0.0)) throw ParameterError("sign_certificate: eps must be > 0");
  if (cp.sweep < 5) throw ParameterError("sign_certificate: the fit needs at least 5 deltas");
  CertificateReport r;
  r.epsilon = cp.epsilon;
  r.alpha = cp.alpha;
  r.p = cp.p;
  r.rate = cp.alpha - 3.0 / cp.p;
  r.hypothesis_min = model.hypothesis_min();
  if (r.hypothesis_min < -1e-9) {
    throw HypothesisError("sign_certificate: -Delta_tau(phi) v < 0 away from declared kinks");
  }
  r.delta0 = std::pow(cp.epsilon, 1.0 / r.rate);
  std::vector<double> lx, ly;
  r.inequality_pass = true;
  for (int k = 0; k < cp.sweep; ++k) {
    const double d = std::ldexp(r.delta0, -k);
    const double m = model.min_mollified(d);
    r.deltas.push_back(d);
    r.m_values.push_back(m);
    if (m < -cp.epsilon) r.inequality_pass = false;
    lx.push_back(std::log(d));
    ly.push_back(std::log(std::max(-m, kSlopeFloor)));
    if (m < 0.0) r.empirical_constant = std::max(r.empirical_constant, -m / std::pow(d, r.rate));
  }
  r.fitted_slope = fit_line(lx, ly).slope;
  r.slope_within_tolerance = std::abs(r.fitted_slope - r.rate) <= kSlopeTolerance;
  r.w2p = model.w2p(cp.p);
  r.pass = r.inequality_pass;
  return r;
}

inline Json to_json(const CertificateReport& r) {
  return {{"epsilon", r.epsilon},
          {"alpha", r.alpha},
          {"p", r.p},
          {"rate", r.rate},
          {"delta0", r.delta0},
          {"deltas", r.deltas},
          {"m_values", r.m_values},
          {"fitted_slope", r.fitted_slope},
          {"slope_within_tolerance", r.slope_within_tolerance},
          {"empirical_constant", r.empirical_constant},
          {"hypothesis_min", r.hypothesis_min},
          {"w2p_estimate", r.w2p},
          {"pass", r.pass}};
}

/// Box used for the lifted staircase: xi1 in [-1/8, 9/8], |xi2|, |xi3| <= 1/4.
inline Grid3 lifted_staircase_box(double h) { return Grid3::box({-0.125, -0.25, -0.25}, {1.125, 0.25, 0.25}, h); }

}  // namespace levikit
