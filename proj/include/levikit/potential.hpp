#pragma once

// Square Cantor sets with contraction a = 4^{-1/alpha}, their self-similar
// measures, Green potentials on the unit disc, flux-based mass recovery,
// Zygmund second differences, box-counting dimension estimates, and the
// Hartogs caps 1/2 log(1 - |z|^2) - u.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "levikit/errors.hpp"
#include "levikit/field.hpp"
#include "levikit/field_io.hpp"
#include "levikit/hartogs.hpp"
#include "levikit/numeric.hpp"
#include "levikit/parallel.hpp"

namespace levikit {

struct Square {
  Complex corner;  // lower-left
  double side = 0.0;
  [[nodiscard]] Complex center() const { return corner + Complex(0.5 * side, 0.5 * side); }
  [[nodiscard]] bool contains(Complex z) const {
    return z.real() >= corner.real() && z.real() <= corner.real() + side && z.imag() >= corner.imag() &&
           z.imag() <= corner.imag() + side;
  }
  [[nodiscard]] double distance(Complex z) const {
    const double dx = std::max({corner.real() - z.real(), 0.0, z.real() - corner.real() - side});
    const double dy = std::max({corner.imag() - z.imag(), 0.0, z.imag() - corner.imag() - side});
    return std::hypot(dx, dy);
  }
};

inline constexpr int kMaxCantorGeneration = 11;

/// Four-corner subdivision of the square of side 1/sqrt(2) centred at 0, so
/// the whole construction lies in the closed disc of radius 1/2. Squares of
/// generation n are listed in tree order: children of square q are 4q..4q+3.
class SquareCantor {
 public:
  SquareCantor(double alpha, int n) : alpha_(alpha), n_(n) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw ParameterError("build_square_cantor: alpha must lie in (0, 2)");
    if (n < 0 || n > kMaxCantorGeneration) throw ParameterError("build_square_cantor: generation out of range");
    a_ = std::pow(4.0, -1.0 / alpha);
    const double s0 = 1.0 / std::sqrt(2.0);
    squares_.push_back({Complex(-0.5 * s0, -0.5 * s0), s0});
    for (int g = 0; g < n; ++g) {
      std::vector<Square> next;
      next.reserve(squares_.size() * 4);
      for (const Square& q : squares_) {
        const double s = a_ * q.side;
        const double far = q.side - s;
        for (const Complex off : {Complex(0, 0), Complex(far, 0), Complex(0, far), Complex(far, far)}) {
          next.push_back({q.corner + off, s});
        }
      }
      squares_ = std::move(next);
    }
  }

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] int generation() const { return n_; }
  [[nodiscard]] double ratio() const { return a_; }
  [[nodiscard]] double initial_side() const { return 1.0 / std::sqrt(2.0); }
  [[nodiscard]] double side() const { return squares_.front().side; }
  [[nodiscard]] const std::vector<Square>& squares() const { return squares_; }
  /// Smallest gap between two squares of the last generation (siblings).
  [[nodiscard]] double gap() const { return n_ == 0 ? std::numeric_limits<double>::infinity() : side() / a_ * (1.0 - 2.0 * a_); }

  /// Distance from z to the union of the squares (brute force).
  [[nodiscard]] double distance(Complex z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const Square& q : squares_) d = std::min(d, q.distance(z));
    return d;
  }

 private:
  double alpha_;
  int n_;
  double a_ = 0.0;
  std::vector<Square> squares_;
};

inline SquareCantor build_square_cantor(double alpha, int n) { return SquareCantor(alpha, n); }

struct Atom {
  Complex location;
  double mass = 0.0;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;
  int generation = 0;

  [[nodiscard]] double total_mass() const {
    CompensatedSum s;
    for (const Atom& a : atoms) s.add(a.mass);
    return s.value();
  }
  /// mu(D(z, r)), closed disc.
  [[nodiscard]] double disc_mass(Complex z, double r) const {
    CompensatedSum s;
    for (const Atom& a : atoms) {
      if (std::abs(a.location - z) <= r) s.add(a.mass);
    }
    return s.value();
  }
  [[nodiscard]] double square_mass(const Square& q) const {
    CompensatedSum s;
    for (const Atom& a : atoms) {
      if (q.contains(a.location)) s.add(a.mass);
    }
    return s.value();
  }
};

/// Uniform self-similar measure: one atom of mass 4^{-n} at each square centre.
inline AtomicMeasure frostman_measure(const SquareCantor& set) {
  AtomicMeasure mu;
  mu.generation = set.generation();
  const double m = std::ldexp(1.0, -2 * set.generation());
  mu.atoms.reserve(set.squares().size());
  for (const Square& q : set.squares()) mu.atoms.push_back({q.center(), m});
  return mu;
}

/// sup over sampled centres z and dyadic radii r of mu(D(z, r)) / r^alpha.
/// Centres: every square centre of generation min(n, 3) and `random_centres`
/// uniform points of D(0, 1/2). Radii 2^{-k} run from 1 down to twice the
/// diameter of the last-generation squares, where the atomic measure stops
/// resolving the set.
struct GrowthCertificate {
  double alpha = 0.0;
  int n = 0;
  double C = 0.0;
  std::size_t samples = 0;
  Complex argmax_center;
  double argmax_radius = 0.0;
};

inline GrowthCertificate growth_certificate(const SquareCantor& set, std::size_t random_centres = 64,
                                            std::uint64_t seed = 7) {
  const AtomicMeasure mu = frostman_measure(set);
  std::vector<Complex> centres;
  for (const Square& q : build_square_cantor(set.alpha(), std::min(set.generation(), 3)).squares()) {
    centres.push_back(q.center());
  }
  Rng rng(seed);
  while (centres.size() < std::size_t{64} + random_centres) {
    const Complex z(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    if (std::abs(z) <= 0.5) centres.push_back(z);
  }
  std::vector<double> radii;
  const double floor_r = 2.0 * std::sqrt(2.0) * set.side();
  for (int k = 0; std::ldexp(1.0, -k) >= floor_r; ++k) radii.push_back(std::ldexp(1.0, -k));
  std::vector<double> best(centres.size(), 0.0);
  std::vector<double> best_r(centres.size(), 0.0);
  parallel_for(centres.size(), [&](std::size_t c) {
    for (double r : radii) {
      const double q = mu.disc_mass(centres[c], r) / std::pow(r, set.alpha());
      if (q > best[c]) {
        best[c] = q;
        best_r[c] = r;
      }
    }
  });
  GrowthCertificate g;
  g.alpha = set.alpha();
  g.n = set.generation();
  g.samples = centres.size() * radii.size();
  for (std::size_t c = 0; c < centres.size(); ++c) {
    if (best[c] > g.C) {
      g.C = best[c];
      g.argmax_center = centres[c];
      g.argmax_radius = best_r[c];
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

/// Green kernel of the unit disc, -log|(z - w) / (1 - z conj(w))|.
inline double green_kernel(Complex z, Complex w) {
  return 0.5 * std::log(std::norm(1.0 - z * std::conj(w)) / std::norm(z - w));
}

struct PotentialValue {
  double value = 0.0;
  bool at_atom = false;  // value is +inf
};

/// u(z) = sum_j m_j G(z, w_j), summed in atom order.
class GreenPotential {
 public:
  explicit GreenPotential(AtomicMeasure mu) : mu_(std::make_shared<const AtomicMeasure>(std::move(mu))) {}

  [[nodiscard]] const AtomicMeasure& measure() const { return *mu_; }

  [[nodiscard]] PotentialValue evaluate(Complex z) const {
    if (std::abs(z) > 1.0 + 1e-12) throw DomainError("green_potential: |z| > 1");
    CompensatedSum s;
    for (const Atom& a : mu_->atoms) {
      if (z == a.location) return {std::numeric_limits<double>::infinity(), true};
      s.add(a.mass * green_kernel(z, a.location));
    }
    return {s.value(), false};
  }
  [[nodiscard]] double operator()(Complex z) const { return evaluate(z).value; }

  /// u at an atom with that atom's own term replaced by m log(1/side): the
  /// potential of a mass spread over a square of that side, up to O(m).
  [[nodiscard]] double regularised_at_atom(std::size_t j, double side) const {
    const Complex z = mu_->atoms[j].location;
    CompensatedSum s;
    for (std::size_t k = 0; k < mu_->atoms.size(); ++k) {
      const Atom& a = mu_->atoms[k];
      if (k == j) {
        s.add(a.mass * (std::log(std::abs(1.0 - z * std::conj(a.location))) - std::log(side)));
      } else {
        s.add(a.mass * green_kernel(z, a.location));
      }
    }
    return s.value();
  }

 private:
  std::shared_ptr<const AtomicMeasure> mu_;
};

inline GreenPotential green_potential(const AtomicMeasure& mu) { return GreenPotential(mu); }

// ---------------------------------------------------------------------------
// Mass recovery: Delta u = -2 pi mu, so mu(cell) = -(1/2pi) * flux of grad u.

struct RectCell {
  double x0, y0, x1, y1;
};
struct DiscCell {
  Complex center;
  double radius;
};
using Cell = std::variant<RectCell, DiscCell>;

struct MassRecovery {
  double recovered = 0.0;
  double expected = 0.0;      // mu(cell)
  double relative_error = 0.0;  // |recovered - expected| / expected, or / total mass for empty cells
  std::size_t quadrature_nodes = 0;
};

namespace detail {
// Normal derivative by a central difference of step h.
inline double normal_derivative(const GreenPotential& u, Complex p, Complex n, double h) {
  return (u(p + h * n) - u(p - h * n)) / (2.0 * h);
}
}  // namespace detail

/// Flux of grad u through the cell boundary by midpoint quadrature with spacing
/// at most h (each side split into ceil(length/h) equal parts; circles into
/// ceil(2 pi R / h) arcs) and fd normal derivatives of step h. Atoms within h of
/// the boundary make the cell ambiguous.
inline MassRecovery laplacian_mass_recovery(const GreenPotential& u, const Cell& cell, double h) {
  if (!(h > 0.0)) throw ParameterError("laplacian_mass_recovery: h must be > 0");
  const AtomicMeasure& mu = u.measure();
  std::vector<Complex> pts, normals;
  std::vector<double> weights;
  double expected = 0.0;
  if (const auto* r = std::get_if<RectCell>(&cell)) {
    if (!(r->x1 > r->x0 && r->y1 > r->y0)) throw ParameterError("laplacian_mass_recovery: empty rectangle");
    const double width = std::max(r->x1 - r->x0, r->y1 - r->y0);
    for (Complex c : {Complex(r->x0, r->y0), Complex(r->x1, r->y0), Complex(r->x0, r->y1), Complex(r->x1, r->y1)}) {
      if (std::abs(c) + h + width > 1.0) throw ParameterError("laplacian_mass_recovery: cell too close to the unit circle");
    }
    auto side = [&](Complex a, Complex b, Complex n) {
      const double len = std::abs(b - a);
      const auto m = static_cast<std::size_t>(std::ceil(len / h - 1e-9));
      for (std::size_t k = 0; k < m; ++k) {
        pts.push_back(a + (b - a) * ((k + 0.5) / static_cast<double>(m)));
        normals.push_back(n);
        weights.push_back(len / static_cast<double>(m));
      }
    };
    side({r->x0, r->y0}, {r->x1, r->y0}, {0, -1});
    side({r->x1, r->y0}, {r->x1, r->y1}, {1, 0});
    side({r->x1, r->y1}, {r->x0, r->y1}, {0, 1});
    side({r->x0, r->y1}, {r->x0, r->y0}, {-1, 0});
    CompensatedSum e;
    for (const Atom& a : mu.atoms) {
      const double x = a.location.real(), y = a.location.imag();
      const bool in_x = x > r->x0 - h && x < r->x1 + h, in_y = y > r->y0 - h && y < r->y1 + h;
      const bool near = in_x && in_y &&
                        (std::abs(x - r->x0) < h || std::abs(x - r->x1) < h || std::abs(y - r->y0) < h ||
                         std::abs(y - r->y1) < h);
      if (near) throw AmbiguousCellError("laplacian_mass_recovery: atom within h of the cell boundary; shift the cell by h/2");
      if (x > r->x0 && x < r->x1 && y > r->y0 && y < r->y1) e.add(a.mass);
    }
    expected = e.value();
  } else {
    const auto& d = std::get<DiscCell>(cell);
    if (!(d.radius > 0.0)) throw ParameterError("laplacian_mass_recovery: disc radius must be > 0");
    if (std::abs(d.center) + d.radius + h >= 1.0) throw ParameterError("laplacian_mass_recovery: cell too close to the unit circle");
    const auto m = static_cast<std::size_t>(std::ceil(2.0 * kPi * d.radius / h));
    for (std::size_t k = 0; k < m; ++k) {
      const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
      const Complex n(std::cos(t), std::sin(t));
      pts.push_back(d.center + d.radius * n);
      normals.push_back(n);
      weights.push_back(2.0 * kPi * d.radius / static_cast<double>(m));
    }
    CompensatedSum e;
    for (const Atom& a : mu.atoms) {
      const double dist = std::abs(a.location - d.center);
      if (std::abs(dist - d.radius) < h) throw AmbiguousCellError("laplacian_mass_recovery: atom within h of the cell boundary; shift the cell by h/2");
      if (dist < d.radius) e.add(a.mass);
    }
    expected = e.value();
  }
  std::vector<double> terms(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) { terms[k] = weights[k] * detail::normal_derivative(u, pts[k], normals[k], h); });
  MassRecovery out;
  out.recovered = -compensated_sum(terms) / (2.0 * kPi);
  out.expected = expected;
  const double scale = expected > 0.0 ? expected : mu.total_mass();
  out.relative_error = std::abs(out.recovered - expected) / scale;
  out.quadrature_nodes = pts.size();
  return out;
}

/// Cells around the last-generation squares: each square grown by half the
/// sibling gap on every side, so each cell holds exactly one atom.
inline std::vector<RectCell> occupied_cells(const SquareCantor& set) {
  std::vector<RectCell> out;
  const double grow = 0.5 * std::min(set.gap(), set.side());
  for (const Square& q : set.squares()) {
    out.push_back({q.corner.real() - grow, q.corner.imag() - grow, q.corner.real() + q.side + grow,
                   q.corner.imag() + q.side + grow});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zygmund seminorm.

struct ZygmundEstimate {
  double M = 0.0;
  std::size_t samples = 0;
  double step_at_max = 0.0;  // |h| of the maximising sample
  double largest_step = 0.0;
};

/// max |u(x+t) + u(x-t) - 2u(x)| / |t|^alpha over random node pairs with
/// x, x +- t nodes of the disc field and |t| in [4 grid h, 0.1].
inline ZygmundEstimate zygmund_seminorm(const DiscField& u, double alpha, std::size_t budget, std::uint64_t seed = 3) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("zygmund_seminorm: alpha must lie in (0, 2]");
  const double h = u.spacing();
  const int half = u.half();
  const int tmin = static_cast<int>(std::ceil(4.0 - 1e-12));
  const int tmax = static_cast<int>(std::floor(0.1 / h + 1e-12));
  if (tmax < tmin) throw ParameterError("zygmund_seminorm: grid too coarse for steps in [4h, 0.1]");
  // Draw all candidate tuples serially so the sample set is thread-independent.
  struct Tuple {
    int i, j, a, b;
  };
  std::vector<Tuple> tuples;
  tuples.reserve(budget);
  Rng rng(seed);
  std::size_t attempts = 0;
  while (tuples.size() < budget && attempts < 50 * budget + 1000) {
    ++attempts;
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * half + 1))) - half;
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * half + 1))) - half;
    const double len = rng.uniform(tmin, tmax);
    const double ang = rng.uniform(0.0, kPi);
    const int a = static_cast<int>(std::lround(len * std::cos(ang)));
    const int b = static_cast<int>(std::lround(len * std::sin(ang)));
    const double t = std::hypot(a, b);
    if (t < tmin || t > tmax) continue;
    if (!u.inside(i, j) || !u.inside(i + a, j + b) || !u.inside(i - a, j - b)) continue;
    tuples.push_back({i, j, a, b});
  }
  std::vector<double> ratio(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t k) {
    const Tuple& q = tuples[k];
    const double d2 = u(q.i + q.a, q.j + q.b) + u(q.i - q.a, q.j - q.b) - 2.0 * u(q.i, q.j);
    ratio[k] = std::abs(d2) / std::pow(h * std::hypot(q.a, q.b), alpha);
  });
  ZygmundEstimate z;
  z.samples = tuples.size();
  for (std::size_t k = 0; k < tuples.size(); ++k) {
    const double t = h * std::hypot(tuples[k].a, tuples[k].b);
    z.largest_step = std::max(z.largest_step, t);
    if (ratio[k] > z.M) {
      z.M = ratio[k];
      z.step_at_max = t;
    }
  }
  return z;
}

// ---------------------------------------------------------------------------
// Box counting.

struct BoxCountFit {
  std::vector<double> scales;
  std::vector<double> counts;
  double dimension = 0.0;  // minus the slope of log count against log scale
  double intercept = 0.0;
};

inline BoxCountFit fit_box_counts(std::vector<double> scales, std::vector<double> counts) {
  if (scales.size() < 5) throw ParameterError("box counting: need at least 5 scales");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    lx.push_back(std::log(scales[k]));
    ly.push_back(std::log(counts[k]));
  }
  const LineFit f = fit_line(lx, ly);
  return {std::move(scales), std::move(counts), -f.slope, f.intercept};
}

namespace detail {
inline std::int64_t cell_index(double x, double r) { return static_cast<std::int64_t>(std::floor(x / r)); }
inline std::uint64_t pack2(std::int64_t i, std::int64_t j) {
  return (static_cast<std::uint64_t>(i + (1 << 30)) << 32) | static_cast<std::uint64_t>(j + (1 << 30));
}
inline std::size_t count_unique(std::vector<std::uint64_t>& keys) {
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}
}  // namespace detail

/// Scales 2^{-k} between 1/4 and four times the last-generation side.
inline std::vector<double> box_scales(const SquareCantor& set, double finest_factor = 4.0) {
  std::vector<double> s;
  for (int k = 2; std::ldexp(1.0, -k) >= finest_factor * set.side(); ++k) s.push_back(std::ldexp(1.0, -k));
  return s;
}

/// Number of r-boxes of the dyadic lattice meeting the union of the squares.
inline BoxCountFit box_dimension_planar(const SquareCantor& set, std::vector<double> scales = {}) {
  if (scales.empty()) scales = box_scales(set);
  std::vector<double> counts;
  for (double r : scales) {
    std::vector<std::uint64_t> keys;
    for (const Square& q : set.squares()) {
      const auto i0 = detail::cell_index(q.corner.real(), r), i1 = detail::cell_index(q.corner.real() + q.side, r);
      const auto j0 = detail::cell_index(q.corner.imag(), r), j1 = detail::cell_index(q.corner.imag() + q.side, r);
      for (auto i = i0; i <= i1; ++i) {
        for (auto j = j0; j <= j1; ++j) keys.push_back(detail::pack2(i, j));
      }
    }
    counts.push_back(static_cast<double>(detail::count_unique(keys)));
  }
  return fit_box_counts(std::move(scales), std::move(counts));
}

/// phi = 1/2 log(1 - |z|^2) - u at the atoms, with each atom's self term
/// regularised by the square side.
inline std::vector<double> cap_at_atoms(const SquareCantor& set, const GreenPotential& u) {
  const auto& atoms = u.measure().atoms;
  std::vector<double> out(atoms.size());
  parallel_for(atoms.size(), [&](std::size_t j) {
    out[j] = ball_cap(atoms[j].location) - u.regularised_at_atom(j, set.side());
  });
  return out;
}

/// Boxes of R^4 = C_z x C_w meeting F = {(z, w): z in E, |w| = exp(phi(z))}.
/// Over each occupied r-box of E, the fibres are circles with radii between
/// the smallest and largest exp(phi) at the atoms in that box; the annulus is
/// sampled in radius and angle at spacing r/4 and the w-boxes counted.
inline BoxCountFit box_dimension_graph(const SquareCantor& set, const GreenPotential& u, std::vector<double> scales = {}) {
  if (scales.empty()) scales = box_scales(set);
  const std::vector<double> phi = cap_at_atoms(set, u);
  const auto& atoms = u.measure().atoms;
  std::vector<double> counts;
  for (double r : scales) {
    // Group atoms by their E-box.
    std::vector<std::pair<std::uint64_t, std::size_t>> tagged;
    tagged.reserve(atoms.size());
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      tagged.push_back({detail::pack2(detail::cell_index(atoms[j].location.real(), r),
                                      detail::cell_index(atoms[j].location.imag(), r)),
                        j});
    }
    std::sort(tagged.begin(), tagged.end());
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end) in tagged
    for (std::size_t k = 0; k < tagged.size();) {
      std::size_t e = k;
      while (e < tagged.size() && tagged[e].first == tagged[k].first) ++e;
      groups.push_back({k, e});
      k = e;
    }
    std::vector<double> per_group(groups.size());
    parallel_for(groups.size(), [&](std::size_t g) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (std::size_t k = groups[g].first; k < groups[g].second; ++k) {
        const double rho = std::exp(phi[tagged[k].second]);
        lo = std::min(lo, rho);
        hi = std::max(hi, rho);
      }
      std::vector<std::uint64_t> keys;
      const double step = 0.25 * r;
      const auto nr = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
      for (std::size_t a = 0; a < nr; ++a) {
        const double rho = nr == 1 ? lo : lo + (hi - lo) * static_cast<double>(a) / static_cast<double>(nr - 1);
        const auto nt = static_cast<std::size_t>(std::ceil(2.0 * kPi * rho / step)) + 1;
        for (std::size_t t = 0; t < nt; ++t) {
          const double th = 2.0 * kPi * static_cast<double>(t) / static_cast<double>(nt);
          keys.push_back(detail::pack2(detail::cell_index(rho * std::cos(th), r), detail::cell_index(rho * std::sin(th), r)));
        }
      }
      per_group[g] = static_cast<double>(detail::count_unique(keys));
    });
    counts.push_back(compensated_sum(per_group));
  }
  return fit_box_counts(std::move(scales), std::move(counts));
}

// ---------------------------------------------------------------------------

/// phi = 1/2 log(1 - |z|^2) - u with u the Green potential of the
/// generation-n Frostman measure.
inline HartogsDomain zygmund_domain(double alpha, int n, double h) {
  auto set = std::make_shared<const SquareCantor>(alpha, n);
  auto u = std::make_shared<const GreenPotential>(frostman_measure(*set));
  auto phi = [u](Complex z) { return ball_cap(z) - (*u)(z); };
  HartogsDomain d{DiscField::sample(1.0, h, phi), phi, "zygmund", Json::object(),
                  [set](Complex z) { return set->distance(z); }, {}};
  d.parameters = {{"alpha", alpha}, {"n", n}, {"h", h}, {"a", set->ratio()}};
  const Square& q = set->squares().front();
  d.probes.push_back(q.center() + Complex(0.25 * q.side, 0.0));
  return d;
}

// ---------------------------------------------------------------------------

inline Json to_json(const SquareCantor& s) {
  Json sq = Json::array();
  for (const Square& q : s.squares()) sq.push_back({q.corner.real(), q.corner.imag()});
  return {{"kind", "SquareCantor"}, {"alpha", s.alpha()}, {"n", s.generation()}, {"a", s.ratio()},
          {"side", s.side()}, {"corners", sq}};
}

inline Json to_json(const AtomicMeasure& m) {
  Json at = Json::array();
  for (const Atom& a : m.atoms) at.push_back({a.location.real(), a.location.imag(), a.mass});
  return {{"kind", "AtomicMeasure"}, {"generation", m.generation}, {"atoms", at}};
}

inline Json to_json(const GrowthCertificate& g) {
  return {{"alpha", g.alpha}, {"n", g.n}, {"C", g.C}, {"samples", g.samples},
          {"argmax_center", {g.argmax_center.real(), g.argmax_center.imag()}}, {"argmax_radius", g.argmax_radius}};
}

inline Json to_json(const BoxCountFit& f) {
  return {{"scales", f.scales}, {"counts", f.counts}, {"dimension", f.dimension}};
}

inline Json to_json(const MassRecovery& m) {
  return {{"recovered", m.recovered}, {"expected", m.expected}, {"relative_error", m.relative_error},
          {"quadrature_nodes", m.quadrature_nodes}};
}

}  // namespace levikit
