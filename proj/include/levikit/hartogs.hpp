#pragma once

// Hartogs domains {|z| < 1, log|w| < phi(z)} over the unit disc. The domain is
// pseudoconvex exactly when -phi is subharmonic, so the scan below looks for
// nodes where phi fails to be superharmonic.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levikit/errors.hpp"
#include "levikit/field.hpp"
#include "levikit/field_io.hpp"
#include "levikit/levi.hpp"
#include "levikit/numeric.hpp"
#include "levikit/parallel.hpp"
#include "levikit/staircase.hpp"

namespace levikit {

// ---------------------------------------------------------------------------
// Cut-off chi: even, 0 <= chi <= 1, chi = 1 on [-1, 1], support in (-1.9, 1.9).

namespace detail {
inline Jet smoothstep(Jet t) {
  // e(t) / (e(t) + e(1 - t)) with e(t) = exp(-1/t).
  if (t.v <= 0.0) return Jet::constant(0.0);
  if (t.v >= 1.0) return Jet::constant(1.0);
  const Jet a = exp(-1.0 * reciprocal(t));
  const Jet b = exp(-1.0 * reciprocal(1.0 - t));
  return a / (a + b);
}
inline constexpr double kChiFlat = 1.0;
inline constexpr double kChiWidth = 0.9;
}  // namespace detail

/// chi and its first two derivatives at u.
inline Jet chi_jet(double u) {
  const double s = u < 0 ? -1.0 : 1.0;
  const Jet t = (1.0 / detail::kChiWidth) * (Jet{std::abs(u), 1.0, 0.0} - Jet::constant(detail::kChiFlat));
  Jet c = 1.0 - detail::smoothstep(t);
  c.d *= s;  // even function
  return c;
}

inline double chi(double u) { return chi_jet(u).v; }

/// sup |chi''|, sampled once on a fine grid of the transition band.
inline double chi_second_derivative_sup() {
  static const double sup = [] {
    double m = 0.0;
    const int n = 200000;
    for (int k = 0; k <= n; ++k) {
      const double u = detail::kChiFlat + detail::kChiWidth * k / n;
      m = std::max(m, std::abs(chi_jet(u).dd));
    }
    return m;
  }();
  return sup;
}

/// c1 = 1 / (32 sup|chi''|), so that 16 c1 |F chi''| <= 1/2 whenever |F| <= 1.
inline double staircase_c1() { return 1.0 / (32.0 * chi_second_derivative_sup()); }

// ---------------------------------------------------------------------------

/// Ball cap 1/2 log(1 - |z|^2).
inline double ball_cap(Complex z) { return 0.5 * std::log1p(-std::norm(z)); }

struct HartogsDomain {
  DiscField cap;
  std::function<double(Complex)> phi;              // exact evaluator of the cap
  std::string provenance;                          // ball | staircase | zygmund
  Json parameters = Json::object();
  std::function<double(Complex)> singular_distance;  // distance to the suspected singular set
  std::vector<Complex> probes;                     // points for circle-mean sweeps
};

inline HartogsDomain hartogs_ball(double h) {
  HartogsDomain d{DiscField::sample(1.0, h, ball_cap), ball_cap, "ball", Json::object(),
                  [](Complex) { return std::numeric_limits<double>::infinity(); }, {}};
  d.parameters["h"] = h;
  return d;
}

/// Distance from t to a sorted union of disjoint closed intervals.
inline double distance_to_intervals(const std::vector<Interval<double>>& ivs, double t) {
  const auto it = std::upper_bound(ivs.begin(), ivs.end(), t, [](double v, const Interval<double>& iv) { return v < iv.a; });
  double d = std::numeric_limits<double>::infinity();
  if (it != ivs.end()) d = std::min(d, it->a - t);
  if (it != ivs.begin()) {
    const auto& p = *(it - 1);
    d = std::min(d, t <= p.b ? 0.0 : t - p.b);
  }
  return d;
}

/// phi(z) = 1/2 log(1 - |z|^2) + c1 F(x + 1/2) chi(4y), alpha1 chosen so that
/// ((1 - alpha1)^{-1} - 1) / 2 = L_target. The singular set is the segment
/// {y = 0, x + 1/2 in E_0}, with E_0 approximated by the generation-N intervals.
struct StaircaseCap {
  std::shared_ptr<const CantorSystem<double>> system;
  std::shared_ptr<const FatF> F;
  double c1 = 0.0;
  X0Result x0;

  [[nodiscard]] double bump(Complex z) const { return c1 * (*F)(z.real() + 0.5) * chi(4.0 * z.imag()); }
  [[nodiscard]] double operator()(Complex z) const { return ball_cap(z) + bump(z); }
  [[nodiscard]] double segment_distance(Complex z) const {
    const double dx = distance_to_intervals(system->I(system->generations()), z.real() + 0.5);
    return std::hypot(dx, z.imag());
  }
  [[nodiscard]] Complex z0() const { return {x0.x0 - 0.5, 0.0}; }
};

inline double alpha1_for_L(double L_target) {
  if (!(L_target > 0.0)) throw ParameterError("hartogs_staircase: L must be > 0");
  return 1.0 - 1.0 / (2.0 * L_target + 1.0);
}

/// c1 <= 0 selects the default staircase_c1().
inline StaircaseCap make_staircase_cap(double alpha1, int N, double c1 = 0.0) {
  StaircaseCap s;
  s.system = std::make_shared<CantorSystem<double>>(default_alphas(alpha1, N), N);
  s.F = std::make_shared<FatF>(*s.system);
  s.c1 = c1 > 0.0 ? c1 : staircase_c1();
  s.x0 = find_x0(*s.F);
  return s;
}

inline HartogsDomain hartogs_staircase_alpha(double alpha1, int N, double h, double c1 = 0.0) {
  const StaircaseCap s = make_staircase_cap(alpha1, N, c1);
  HartogsDomain d{DiscField::sample(1.0, h, [&](Complex z) { return s(z); }),
                  [s](Complex z) { return s(z); },
                  "staircase",
                  Json::object(),
                  [s](Complex z) { return s.segment_distance(z); },
                  {s.z0()}};
  d.parameters = {{"alpha1", alpha1}, {"N", N}, {"h", h}, {"c1", s.c1}, {"L", s.x0.L}, {"x0", s.x0.x0},
                  {"z0", {s.z0().real(), s.z0().imag()}}, {"chi_second_derivative_sup", chi_second_derivative_sup()}};
  return d;
}

inline HartogsDomain hartogs_staircase(double L_target, int N, double h, double c1 = 0.0) {
  return hartogs_staircase_alpha(alpha1_for_L(L_target), N, h, c1);
}

// ---------------------------------------------------------------------------

struct ScanOptions {
  std::vector<double> radii{0.02, 0.01, 0.005};
  double near_band_cells = 2.0;  // circle tests within this many cells of the singular set
  double far_distance = 0.1;
  double laplacian_tol = 1e-9;
  double circle_tol = 1e-12;
};

struct HartogsSample {
  int i = 0;
  int j = 0;
  double laplacian = 0.0;
  double distance = 0.0;
  double circle_excess = -std::numeric_limits<double>::infinity();  // max_r mean_r(phi) - phi
  bool circle_tested = false;
  LeviClass classification = LeviClass::pseudoconvex_ok;
};

struct HartogsScan {
  std::vector<HartogsSample> samples;
  std::size_t nodes = 0;
  std::size_t violating = 0;
  std::size_t laplacian_violations = 0;
  std::size_t circle_violations = 0;
  std::size_t circle_tests = 0;
  double max_violating_distance = 0.0;  // over violating nodes
  double far_max_laplacian = -std::numeric_limits<double>::infinity();
  std::size_t far_nodes = 0;
  double max_laplacian = -std::numeric_limits<double>::infinity();
  Json probes = Json::array();
};

/// Classifies each node with a full 5-point stencil by the sign of the fd
/// Laplacian of phi, and adds circle-mean tests mean_r(phi, z) - phi(z) at
/// nodes within `near_band_cells` cells of the singular set. A node violates
/// when either test shows phi is not superharmonic there.
inline HartogsScan subharmonicity_scan(const HartogsDomain& d, const ScanOptions& opt = {}) {
  const DiscField& u = d.cap;
  const double h = u.spacing();
  const int half = u.half();
  const std::size_t side = static_cast<std::size_t>(2 * half + 1);
  std::vector<HartogsSample> slots(side * side);
  std::vector<char> used(side * side, 0);
  parallel_for(slots.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx / side) - half;
    const int j = static_cast<int>(idx % side) - half;
    if (!u.has_laplacian_stencil(i, j)) return;
    HartogsSample s;
    s.i = i;
    s.j = j;
    const Complex z = u.coord(i, j);
    s.laplacian = u.laplacian(i, j);
    s.distance = d.singular_distance(z);
    if (s.distance <= opt.near_band_cells * h) {
      s.circle_tested = true;
      for (double r : opt.radii) {
        if (std::abs(z) + r >= 1.0) continue;
        const double m = circle_mean(d.phi, z, r, std::max(1024, circle_nodes_for(r, h)));
        s.circle_excess = std::max(s.circle_excess, m - d.phi(z));
      }
    }
    const bool lap_bad = s.laplacian > opt.laplacian_tol;
    const bool circ_bad = s.circle_tested && s.circle_excess > opt.circle_tol;
    s.classification = (lap_bad || circ_bad) ? LeviClass::violating
                       : s.laplacian >= -opt.laplacian_tol ? LeviClass::near_zero
                                                           : LeviClass::pseudoconvex_ok;
    slots[idx] = s;
    used[idx] = 1;
  });
  HartogsScan out;
  for (std::size_t idx = 0; idx < slots.size(); ++idx) {
    if (!used[idx]) continue;
    const HartogsSample& s = slots[idx];
    ++out.nodes;
    out.max_laplacian = std::max(out.max_laplacian, s.laplacian);
    if (s.circle_tested) ++out.circle_tests;
    if (s.laplacian > opt.laplacian_tol) ++out.laplacian_violations;
    if (s.circle_tested && s.circle_excess > opt.circle_tol) ++out.circle_violations;
    if (s.classification == LeviClass::violating) {
      ++out.violating;
      out.max_violating_distance = std::max(out.max_violating_distance, s.distance);
    }
    if (s.distance > opt.far_distance) {
      ++out.far_nodes;
      out.far_max_laplacian = std::max(out.far_max_laplacian, s.laplacian);
    }
    out.samples.push_back(s);
  }
  for (Complex p : d.probes) {
    Json row = {{"z", {p.real(), p.imag()}}, {"phi", d.phi(p)}};
    Json ex = Json::array();
    for (double r : opt.radii) {
      if (std::abs(p) + r >= 1.0) continue;
      ex.push_back({{"r", r}, {"excess", circle_mean(d.phi, p, r, std::max(1024, circle_nodes_for(r, h))) - d.phi(p)}});
    }
    row["circle_excess"] = std::move(ex);
    out.probes.push_back(std::move(row));
  }
  return out;
}

/// Empirical c3: half the largest |second difference| of the ball cap over
/// eight directions at step h, on the disc of radius `radius` around z0.
inline double empirical_c3(Complex z0, double radius, double h) {
  double m = 0.0;
  const int n = 16;
  for (int a = -n; a <= n; ++a) {
    for (int b = -n; b <= n; ++b) {
      const Complex z = z0 + Complex(radius * a / n, radius * b / n);
      if (std::abs(z - z0) > radius) continue;
      for (int k = 0; k < 8; ++k) {
        const Complex e = std::polar(h, kPi * k / 8.0);
        m = std::max(m, std::abs(ball_cap(z + e) + ball_cap(z - e) - 2.0 * ball_cap(z)) / (h * h));
      }
    }
  }
  return 0.5 * m;
}

/// Circle means at z0 exceed phi(z0) only once c1 L / 2 beats c3, i.e. L > 2 c3 / c1.
/// c3 is measured on the disc of radius `radius` around z0.
inline Json staircase_threshold_report(const HartogsDomain& d, double radius = 0.02) {
  if (d.provenance != "staircase") throw ParameterError("staircase_threshold_report: not a staircase domain");
  const Json& p = d.parameters;
  const Complex z0(p.at("z0").at(0).get<double>(), p.at("z0").at(1).get<double>());
  const double c1 = p.at("c1").get<double>();
  const double L = p.at("L").get<double>();
  const double c3 = empirical_c3(z0, radius, p.at("h").get<double>());
  const double threshold = 2.0 * c3 / c1;
  return {{"L", L}, {"c1", c1}, {"c3", c3}, {"L_threshold", threshold}, {"L_below_threshold", L < threshold}};
}

inline Json to_json(const HartogsScan& s) {
  return {{"nodes", s.nodes},
          {"violating", s.violating},
          {"laplacian_violations", s.laplacian_violations},
          {"circle_violations", s.circle_violations},
          {"circle_tests", s.circle_tests},
          {"max_violating_distance", s.max_violating_distance},
          {"max_laplacian", s.max_laplacian},
          {"far_nodes", s.far_nodes},
          {"far_max_laplacian", s.far_max_laplacian},
          {"probes", s.probes}};
}

inline void write_csv(std::ostream& os, const HartogsScan& s, const DiscField& grid) {
  os << "x,y,laplacian,circle_excess,distance,classification\n";
  for (const HartogsSample& x : s.samples) {
    const Complex z = grid.coord(x.i, x.j);
    os << format_double(z.real()) << ',' << format_double(z.imag()) << ',' << format_double(x.laplacian) << ','
       << (x.circle_tested ? format_double(x.circle_excess) : std::string()) << ','
       << (std::isfinite(x.distance) ? format_double(x.distance) : std::string("inf")) << ','
       << to_string(x.classification) << '\n';
  }
}

}  // namespace levikit
