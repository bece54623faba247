#pragma once

// Structured grids, gridded scalar fields and the finite-difference,
// interpolation and quadrature primitives shared by the analysis modules.
//
// Coordinates in the 3-D parameter space are xi = (y1, Re z2, Im z2).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "levikit/errors.hpp"
#include "levikit/numeric.hpp"
#include "levikit/parallel.hpp"

namespace levikit {

using Point3 = std::array<double, 3>;
using Vector3 = std::array<double, 3>;
using Matrix3 = std::array<std::array<double, 3>, 3>;
using Complex = std::complex<double>;

struct Node {
  int i = 0;
  int j = 0;
  int k = 0;
  friend bool operator==(const Node&, const Node&) = default;
};

/// Uniform grid with the same spacing on all three axes.
class Grid3 {
 public:
  Grid3(Point3 origin, double spacing, std::array<int, 3> extents)
      : origin_(origin), h_(spacing), extents_(extents) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ParameterError("Grid3: spacing must be > 0");
    for (int e : extents) {
      if (e < 5) throw ParameterError("Grid3: every extent must be >= 5");
    }
  }

  /// Grid covering the box [lo, hi] per axis with spacing h (hi snapped down).
  static Grid3 box(Point3 lo, Point3 hi, double spacing) {
    std::array<int, 3> ext{};
    for (int a = 0; a < 3; ++a) {
      ext[a] = static_cast<int>(std::floor((hi[a] - lo[a]) / spacing + 1e-9)) + 1;
    }
    return Grid3(lo, spacing, ext);
  }

  [[nodiscard]] const Point3& origin() const { return origin_; }
  [[nodiscard]] double spacing() const { return h_; }
  [[nodiscard]] const std::array<int, 3>& extents() const { return extents_; }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(extents_[0]) * extents_[1] * extents_[2];
  }

  [[nodiscard]] Point3 coord(Node n) const {
    return {origin_[0] + n.i * h_, origin_[1] + n.j * h_, origin_[2] + n.k * h_};
  }
  [[nodiscard]] std::size_t index(Node n) const {
    return (static_cast<std::size_t>(n.i) * extents_[1] + n.j) * extents_[2] + n.k;
  }
  [[nodiscard]] Node node(std::size_t idx) const {
    const int k = static_cast<int>(idx % extents_[2]);
    idx /= extents_[2];
    const int j = static_cast<int>(idx % extents_[1]);
    const int i = static_cast<int>(idx / extents_[1]);
    return {i, j, k};
  }
  [[nodiscard]] bool contains(Node n) const {
    return n.i >= 0 && n.j >= 0 && n.k >= 0 && n.i < extents_[0] && n.j < extents_[1] && n.k < extents_[2];
  }
  /// True when the node is at least `margin` cells from every face.
  [[nodiscard]] bool interior(Node n, int margin = 1) const {
    return n.i >= margin && n.j >= margin && n.k >= margin && n.i < extents_[0] - margin &&
           n.j < extents_[1] - margin && n.k < extents_[2] - margin;
  }
  /// Nearest node to a point (not range-checked).
  [[nodiscard]] Node nearest(const Point3& p) const {
    return {static_cast<int>(std::lround((p[0] - origin_[0]) / h_)),
            static_cast<int>(std::lround((p[1] - origin_[1]) / h_)),
            static_cast<int>(std::lround((p[2] - origin_[2]) / h_))};
  }

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  Point3 origin_;
  double h_;
  std::array<int, 3> extents_;
};

/// Regularity class of a field with an estimate of its constant.
struct Regularity {
  enum class Kind { smooth, c1alpha, c11, lipschitz };
  Kind kind = Kind::smooth;
  double alpha = 1.0;     // meaningful for c1alpha only
  double constant = 0.0;  // Hoelder / Lipschitz constant estimate

  static Regularity smooth(double c = 0.0) { return {Kind::smooth, 1.0, c}; }
  static Regularity c1alpha(double a, double c = 0.0) { return {Kind::c1alpha, a, c}; }
  static Regularity c11(double c = 0.0) { return {Kind::c11, 1.0, c}; }
  static Regularity lipschitz(double c = 0.0) { return {Kind::lipschitz, 1.0, c}; }

  friend bool operator==(const Regularity&, const Regularity&) = default;
};

inline std::string to_string(Regularity::Kind k) {
  switch (k) {
    case Regularity::Kind::smooth: return "smooth";
    case Regularity::Kind::c1alpha: return "c1alpha";
    case Regularity::Kind::c11: return "c11";
    case Regularity::Kind::lipschitz: return "lipschitz";
  }
  return "smooth";
}

inline Regularity::Kind regularity_kind_from_string(const std::string& s) {
  if (s == "smooth") return Regularity::Kind::smooth;
  if (s == "c1alpha") return Regularity::Kind::c1alpha;
  if (s == "c11") return Regularity::Kind::c11;
  if (s == "lipschitz") return Regularity::Kind::lipschitz;
  throw ParameterError("unknown regularity tag '" + s + "'");
}

/// Real-valued field on a Grid3, stored row-major (k fastest).
class ScalarField3 {
 public:
  ScalarField3(Grid3 grid, std::vector<double> values, Regularity reg = {})
      : grid_(std::move(grid)), values_(std::move(values)), reg_(reg) {
    if (values_.size() != grid_.size()) throw ParameterError("ScalarField3: value count does not match grid");
    if (!(reg_.constant >= 0.0)) throw ParameterError("ScalarField3: regularity constant must be >= 0");
    for (double v : values_) {
      if (!std::isfinite(v)) throw ParameterError("ScalarField3: non-finite value");
    }
  }

  /// Samples fn(Point3) at every node.
  template <class Fn>
  static ScalarField3 sample(const Grid3& grid, Fn&& fn, Regularity reg = {}) {
    std::vector<double> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t idx) { vals[idx] = fn(grid.coord(grid.node(idx))); });
    return ScalarField3(grid, std::move(vals), reg);
  }

  [[nodiscard]] const Grid3& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] const Regularity& regularity() const { return reg_; }

  [[nodiscard]] double operator()(Node n) const { return values_[grid_.index(n)]; }
  [[nodiscard]] double at(Node n) const {
    if (!grid_.contains(n)) throw DomainError("ScalarField3: node outside grid");
    return (*this)(n);
  }

  /// Trilinear interpolation; the enclosing cell must lie in the grid.
  [[nodiscard]] double interpolate(const Point3& p) const {
    const double h = grid_.spacing();
    std::array<int, 3> base{};
    std::array<double, 3> frac{};
    for (int a = 0; a < 3; ++a) {
      const double s = (p[a] - grid_.origin()[a]) / h;
      int b = static_cast<int>(std::floor(s));
      if (b == grid_.extents()[a] - 1 && s - b < 1e-12) b -= 1;
      if (b < 0 || b + 1 >= grid_.extents()[a]) throw DomainError("ScalarField3: interpolation point outside grid");
      base[a] = b;
      frac[a] = s - b;
    }
    double out = 0.0;
    for (int di = 0; di < 2; ++di) {
      for (int dj = 0; dj < 2; ++dj) {
        for (int dk = 0; dk < 2; ++dk) {
          const double w = (di ? frac[0] : 1 - frac[0]) * (dj ? frac[1] : 1 - frac[1]) * (dk ? frac[2] : 1 - frac[2]);
          out += w * (*this)({base[0] + di, base[1] + dj, base[2] + dk});
        }
      }
    }
    return out;
  }

 private:
  Grid3 grid_;
  std::vector<double> values_;
  Regularity reg_;
};

namespace detail {
inline void require_stencil(const ScalarField3& f, Node n) {
  if (!f.grid().interior(n, 1)) throw StencilError("node is within one cell of the grid boundary");
}
inline Node shift(Node n, int axis, int d) {
  if (axis == 0) n.i += d;
  else if (axis == 1) n.j += d;
  else n.k += d;
  return n;
}
}  // namespace detail

/// Central-difference gradient (3-point stencil per axis).
inline Vector3 fd_gradient(const ScalarField3& f, Node n) {
  detail::require_stencil(f, n);
  const double inv2h = 0.5 / f.grid().spacing();
  Vector3 g{};
  for (int a = 0; a < 3; ++a) g[a] = (f(detail::shift(n, a, 1)) - f(detail::shift(n, a, -1))) * inv2h;
  return g;
}

/// Second-difference Hessian: 3-point pure second derivatives and the
/// 4-point cross stencil for mixed ones. Symmetric by construction.
inline Matrix3 fd_hessian(const ScalarField3& f, Node n) {
  detail::require_stencil(f, n);
  const double h = f.grid().spacing();
  const double inv_h2 = 1.0 / (h * h);
  Matrix3 H{};
  const double c = f(n);
  for (int a = 0; a < 3; ++a) {
    H[a][a] = (f(detail::shift(n, a, 1)) - 2.0 * c + f(detail::shift(n, a, -1))) * inv_h2;
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const Node pp = detail::shift(detail::shift(n, a, 1), b, 1);
      const Node pm = detail::shift(detail::shift(n, a, 1), b, -1);
      const Node mp = detail::shift(detail::shift(n, a, -1), b, 1);
      const Node mm = detail::shift(detail::shift(n, a, -1), b, -1);
      H[a][b] = H[b][a] = (f(pp) - f(pm) - f(mp) + f(mm)) * 0.25 * inv_h2;
    }
  }
  return H;
}

/// Wirtinger derivatives in the (y1, z2) variables.
struct Wirtinger {
  Complex dz2;         // d/dz2
  double dz2dz2bar;    // d^2/dz2 dz2bar (real)
  Complex dy1dz2bar;   // d^2/dy1 dz2bar
};

/// Converts real partials in xi = (y1, Re z2, Im z2) to Wirtinger form.
inline Wirtinger wirtinger_from_real(const Vector3& g, const Matrix3& H) {
  return {Complex(0.5 * g[1], -0.5 * g[2]), 0.25 * (H[1][1] + H[2][2]), Complex(0.5 * H[0][1], 0.5 * H[0][2])};
}

inline Wirtinger complex_wirtinger(const ScalarField3& f, Node n) {
  return wirtinger_from_real(fd_gradient(f, n), fd_hessian(f, n));
}

// ---------------------------------------------------------------------------
// Planar fields on a disc.

/// Field on the nodes (i h, j h) of a square lattice centred at 0, defined at
/// the nodes with |z| < radius. The origin is always a node.
class DiscField {
 public:
  DiscField(double radius, double spacing) : radius_(radius), h_(spacing) {
    if (!(radius > 0.0)) throw ParameterError("DiscField: radius must be > 0");
    if (!(spacing > 0.0) || spacing >= radius) throw ParameterError("DiscField: spacing must be in (0, radius)");
    half_ = static_cast<int>(std::ceil(radius / spacing));
    side_ = 2 * half_ + 1;
    values_.assign(static_cast<std::size_t>(side_) * side_, std::numeric_limits<double>::quiet_NaN());
  }

  template <class Fn>
  static DiscField sample(double radius, double spacing, Fn&& fn) {
    DiscField d(radius, spacing);
    parallel_for(d.values_.size(), [&](std::size_t idx) {
      const int i = static_cast<int>(idx / d.side_) - d.half_;
      const int j = static_cast<int>(idx % d.side_) - d.half_;
      if (d.inside(i, j)) d.values_[idx] = fn(Complex(i * d.h_, j * d.h_));
    });
    return d;
  }

  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] double spacing() const { return h_; }
  /// Nodes run over i, j in [-half(), half()].
  [[nodiscard]] int half() const { return half_; }
  [[nodiscard]] Complex coord(int i, int j) const { return {i * h_, j * h_}; }
  [[nodiscard]] bool inside(int i, int j) const {
    if (std::abs(i) > half_ || std::abs(j) > half_) return false;
    const double x = i * h_;
    const double y = j * h_;
    return std::hypot(x, y) < radius_;
  }

  [[nodiscard]] double operator()(int i, int j) const { return values_[slot(i, j)]; }
  [[nodiscard]] double at(int i, int j) const {
    if (!inside(i, j)) throw DomainError("DiscField: node outside the disc");
    return values_[slot(i, j)];
  }
  void set(int i, int j, double v) {
    if (!inside(i, j)) throw DomainError("DiscField: node outside the disc");
    values_[slot(i, j)] = v;
  }

  /// Bilinear interpolation; all four cell corners must be defined.
  [[nodiscard]] double interpolate(Complex z) const {
    const double sx = z.real() / h_;
    const double sy = z.imag() / h_;
    const int i0 = static_cast<int>(std::floor(sx));
    const int j0 = static_cast<int>(std::floor(sy));
    const double fx = sx - i0;
    const double fy = sy - j0;
    for (int di = 0; di < 2; ++di) {
      for (int dj = 0; dj < 2; ++dj) {
        if (!inside(i0 + di, j0 + dj)) throw DomainError("DiscField: interpolation cell leaves the disc");
      }
    }
    return (1 - fx) * (1 - fy) * (*this)(i0, j0) + fx * (1 - fy) * (*this)(i0 + 1, j0) +
           (1 - fx) * fy * (*this)(i0, j0 + 1) + fx * fy * (*this)(i0 + 1, j0 + 1);
  }

  /// 5-point Laplacian at a node whose four neighbours are defined.
  [[nodiscard]] double laplacian(int i, int j) const {
    if (!inside(i, j) || !inside(i + 1, j) || !inside(i - 1, j) || !inside(i, j + 1) || !inside(i, j - 1)) {
      throw StencilError("DiscField: Laplacian stencil leaves the disc");
    }
    return ((*this)(i + 1, j) + (*this)(i - 1, j) + (*this)(i, j + 1) + (*this)(i, j - 1) - 4.0 * (*this)(i, j)) /
           (h_ * h_);
  }
  [[nodiscard]] bool has_laplacian_stencil(int i, int j) const {
    return inside(i, j) && inside(i + 1, j) && inside(i - 1, j) && inside(i, j + 1) && inside(i, j - 1);
  }

  /// Same field with the two axes swapped (z -> i conj(z) reflection).
  [[nodiscard]] DiscField transposed() const {
    DiscField t(radius_, h_);
    for (int i = -half_; i <= half_; ++i) {
      for (int j = -half_; j <= half_; ++j) t.values_[t.slot(i, j)] = values_[slot(j, i)];
    }
    return t;
  }

 private:
  [[nodiscard]] std::size_t slot(int i, int j) const {
    return static_cast<std::size_t>(i + half_) * side_ + static_cast<std::size_t>(j + half_);
  }

  double radius_;
  double h_;
  int half_ = 0;
  int side_ = 0;
  std::vector<double> values_;
};

/// Trapezoidal mean of g over the circle |z - center| = r.
template <class Fn>
double circle_mean(Fn&& g, Complex center, double r, int n_theta = 512) {
  if (n_theta < 256) throw ParameterError("circle_mean: need at least 256 angular nodes");
  if (!(r > 0.0)) throw ParameterError("circle_mean: radius must be > 0");
  CompensatedSum s;
  for (int k = 0; k < n_theta; ++k) {
    const double theta = 2.0 * kPi * k / n_theta;
    s.add(g(center + std::polar(r, theta)));
  }
  return s.value() / n_theta;
}

/// Angular node count used for gridded circle means: >= 256 and about
/// eight samples per grid cell of arc length.
inline int circle_nodes_for(double r, double h) {
  const int n = static_cast<int>(std::ceil(8.0 * 2.0 * kPi * r / h));
  return std::max(256, (n + 3) / 4 * 4);
}

inline double circle_mean(const DiscField& g, Complex center, double r) {
  if (std::abs(center) + r + 2.0 * g.spacing() >= g.radius()) {
    throw DomainError("circle_mean: circle leaves the field's disc");
  }
  return circle_mean([&](Complex z) { return g.interpolate(z); }, center, r, circle_nodes_for(r, g.spacing()));
}

}  // namespace levikit
