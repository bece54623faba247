#pragma once

// Levi condition for domains in C^2: the ambient form on a defining function
// rho(z1, z2), the graph form on x1 - phi(y1, z2), the tangential operator
// Delta_tau and its real coefficient form, slices of graphs over
// R x C^{n-1}, and the Green mean-value identity on discs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levikit/errors.hpp"
#include "levikit/field.hpp"
#include "levikit/field_io.hpp"
#include "levikit/numeric.hpp"
#include "levikit/parallel.hpp"
#include "levikit/polynomial.hpp"

namespace levikit {

/// Coefficient pair tau = (tau1, tau2) of the tangential operator.
struct TangentPair {
  Complex t1;
  Complex t2;
};

/// tau(phi) = (-1/2 dphi/dz2, 1/2 (1 + i dphi/dy1)) from the real gradient.
inline TangentPair tau_from_gradient(const Vector3& g) {
  const Complex dz2(0.5 * g[1], -0.5 * g[2]);
  return {-0.5 * dz2, Complex(0.5, 0.5 * g[0])};
}

inline TangentPair tau_of_phi(const ScalarField3& phi, Node n) { return tau_from_gradient(fd_gradient(phi, n)); }

/// Coefficients T_jk (j <= k) of Delta_tau in the real variables xi.
struct TangentialCoefficients {
  double t11, t22, t33, t12, t13, t23;
};

inline TangentialCoefficients tangential_coefficients(const TangentPair& tau) {
  const Complex c = std::conj(tau.t1) * tau.t2;
  const double quarter_t2 = 0.25 * std::norm(tau.t2);
  return {std::norm(tau.t1), quarter_t2, quarter_t2, c.imag(), -c.real(), 0.0};
}

/// |tau1|^2 v_{y1y1} + 2 Re(i tau1 conj(tau2) v_{y1 z2bar}) + |tau2|^2 v_{z2 z2bar}.
inline double delta_tau_complex_form(const Matrix3& H, const TangentPair& tau) {
  const Complex v_y1_z2bar(0.5 * H[0][1], 0.5 * H[0][2]);
  const double v_z2_z2bar = 0.25 * (H[1][1] + H[2][2]);
  const Complex i(0.0, 1.0);
  return std::norm(tau.t1) * H[0][0] + 2.0 * (i * tau.t1 * std::conj(tau.t2) * v_y1_z2bar).real() +
         std::norm(tau.t2) * v_z2_z2bar;
}

/// sum_{j <= k} T_jk d^2 v / dxi_j dxi_k.
inline double delta_tau_real_form(const Matrix3& H, const TangentPair& tau) {
  const TangentialCoefficients T = tangential_coefficients(tau);
  return T.t11 * H[0][0] + T.t22 * H[1][1] + T.t33 * H[2][2] + T.t12 * H[0][1] + T.t13 * H[0][2] +
         T.t23 * H[1][2];
}

inline constexpr double kDualFormTolerance = 1e-9;

/// Delta_tau evaluated through both forms; throws when they disagree.
inline double delta_tau_from_hessian(const Matrix3& H, const TangentPair& tau) {
  const double a = delta_tau_complex_form(H, tau);
  const double b = delta_tau_real_form(H, tau);
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(a - b) > kDualFormTolerance * scale) {
    throw ConsistencyError("delta_tau: complex and real coefficient forms disagree");
  }
  return a;
}

inline double delta_tau(const ScalarField3& v, const TangentPair& tau, Node n) {
  return delta_tau_from_hessian(fd_hessian(v, n), tau);
}

/// Variable coefficients: tau is a function of the node.
template <class TauField>
  requires std::is_invocable_r_v<TangentPair, TauField, Node>
double delta_tau(const ScalarField3& v, TauField&& tau, Node n) {
  return delta_tau_from_hessian(fd_hessian(v, n), tau(n));
}

/// Graph-form Levi expression for the hypersurface x1 = phi(y1, z2):
///   -1/4 phi_{y1y1} |phi_{z2}|^2 + 1/2 Re(i (1 - i phi_{y1}) phi_{z2} phi_{y1 z2bar})
///   - 1/4 phi_{z2z2bar} |1 + i phi_{y1}|^2.
/// Non-negative exactly where the side {x1 < phi} is Levi pseudoconvex.
inline double graph_levi_expression(const Vector3& g, const Matrix3& H) {
  const Wirtinger w = wirtinger_from_real(g, H);
  const Complex i(0.0, 1.0);
  const Complex one_minus = Complex(1.0, 0.0) - i * g[0];
  return -0.25 * H[0][0] * std::norm(w.dz2) + 0.5 * (i * one_minus * w.dz2 * w.dy1dz2bar).real() -
         0.25 * w.dz2dz2bar * std::norm(Complex(1.0, g[0]));
}

/// Graph-form Levi value, cross-checked against -Delta_{tau(phi)} phi.
inline double graph_levi_from_jet(const Vector3& g, const Matrix3& H) {
  const double direct = graph_levi_expression(g, H);
  const double via_tau = -delta_tau_from_hessian(H, tau_from_gradient(g));
  const double scale = std::max({1.0, std::abs(direct), std::abs(via_tau)});
  if (std::abs(direct - via_tau) > kDualFormTolerance * scale) {
    throw ConsistencyError("graph_levi: graph expression and -Delta_tau(phi) disagree");
  }
  return direct;
}

inline double graph_levi(const ScalarField3& phi, Node n) {
  return graph_levi_from_jet(fd_gradient(phi, n), fd_hessian(phi, n));
}

// ---------------------------------------------------------------------------
// Defining functions of two complex variables.

/// First and second Wirtinger derivatives of rho(z1, z2) at a point.
struct LeviJet {
  double value = 0.0;
  Complex r1;       // d rho / dz1
  Complex r2;       // d rho / dz2
  double r11 = 0;   // d^2 rho / dz1 dz1bar
  double r22 = 0;   // d^2 rho / dz2 dz2bar
  Complex r12;      // d^2 rho / dz1 dz2bar
};

/// Defining function rho with its Wirtinger jet. Either symbolic (exact
/// derivatives) or numeric (central differences on R^4).
class Defining2 {
 public:
  using JetFn = std::function<LeviJet(Complex, Complex)>;

  Defining2(std::string name, JetFn jet, double c0 = 1e-8) : name_(std::move(name)), jet_(std::move(jet)), c0_(c0) {}

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] double gradient_floor() const { return c0_; }
  [[nodiscard]] LeviJet jet(Complex z1, Complex z2) const { return jet_(z1, z2); }
  [[nodiscard]] double operator()(Complex z1, Complex z2) const { return jet_(z1, z2).value; }

  /// |z1|^2 + |z2|^2 - 1.
  static Defining2 ball() {
    return {"ball", [](Complex z1, Complex z2) {
              LeviJet j;
              j.value = std::norm(z1) + std::norm(z2) - 1.0;
              j.r1 = std::conj(z1);
              j.r2 = std::conj(z2);
              j.r11 = 1.0;
              j.r22 = 1.0;
              return j;
            }};
  }

  /// Re z1 - |z2|^2, the model of a non-pseudoconvex point.
  static Defining2 g2_model() {
    return {"g2", [](Complex z1, Complex z2) {
              LeviJet j;
              j.value = z1.real() - std::norm(z2);
              j.r1 = 0.5;
              j.r2 = -std::conj(z2);
              j.r22 = -1.0;
              return j;
            }};
  }

  /// Re z1.
  static Defining2 hyperplane() {
    return {"hyperplane", [](Complex z1, Complex) {
              LeviJet j;
              j.value = z1.real();
              j.r1 = 0.5;
              return j;
            }};
  }

  /// x1 - phi(y1, z2) for phi given by its real jet in xi = (y1, Re z2, Im z2).
  static Defining2 graph(std::string name, std::function<FieldJet(const Point3&)> phi) {
    return {std::move(name), [phi = std::move(phi)](Complex z1, Complex z2) {
              const FieldJet f = phi({z1.imag(), z2.real(), z2.imag()});
              const Wirtinger w = wirtinger_from_real(f.grad, f.hess);
              LeviJet j;
              j.value = z1.real() - f.value;
              j.r1 = Complex(0.5, 0.5 * f.grad[0]);
              j.r2 = -w.dz2;
              j.r11 = -0.25 * f.hess[0][0];
              j.r22 = -w.dz2dz2bar;
              j.r12 = Complex(0.0, 0.5) * w.dy1dz2bar;
              return j;
            }};
  }

  /// log|w| - cap(z) for a Hartogs domain {log|w| < cap(z)}. The cap jet
  /// supplies (value, d cap/dz, d^2 cap/dz dzbar) at z.
  struct CapJet {
    double value = 0.0;
    Complex dz;
    double dzdzbar = 0.0;
  };
  static Defining2 hartogs_lifted(std::string name, std::function<CapJet(Complex)> cap) {
    return {std::move(name), [cap = std::move(cap)](Complex z, Complex w) {
              if (w == Complex(0.0, 0.0)) throw DomainError("hartogs_lifted: w = 0 is not on the boundary");
              const CapJet c = cap(z);
              LeviJet j;
              j.value = std::log(std::abs(w)) - c.value;
              j.r1 = -c.dz;
              j.r2 = 0.5 / w;
              j.r11 = -c.dzdzbar;
              j.r22 = 0.0;
              j.r12 = 0.0;
              return j;
            }};
  }

  /// Numeric route: central differences with step h on (x1, y1, x2, y2).
  static Defining2 numeric(std::string name, std::function<double(Complex, Complex)> rho, double h) {
    if (!(h > 0.0)) throw ParameterError("Defining2::numeric: step must be > 0");
    return {std::move(name), [rho = std::move(rho), h](Complex z1, Complex z2) {
              auto f = [&](const std::array<double, 4>& x) {
                return rho(Complex(x[0], x[1]), Complex(x[2], x[3]));
              };
              const std::array<double, 4> x0{z1.real(), z1.imag(), z2.real(), z2.imag()};
              const double c = f(x0);
              std::array<double, 4> g{};
              std::array<std::array<double, 4>, 4> H{};
              auto shifted = [&](int a, double da, int b, double db) {
                auto x = x0;
                x[a] += da;
                x[b] += db;
                return f(x);
              };
              for (int a = 0; a < 4; ++a) {
                const double p = shifted(a, h, a, 0.0);
                const double m = shifted(a, -h, a, 0.0);
                g[a] = (p - m) / (2 * h);
                H[a][a] = (p - 2 * c + m) / (h * h);
                for (int b = a + 1; b < 4; ++b) {
                  H[a][b] = H[b][a] =
                      (shifted(a, h, b, h) - shifted(a, h, b, -h) - shifted(a, -h, b, h) + shifted(a, -h, b, -h)) /
                      (4 * h * h);
                }
              }
              LeviJet j;
              j.value = c;
              j.r1 = Complex(0.5 * g[0], -0.5 * g[1]);
              j.r2 = Complex(0.5 * g[2], -0.5 * g[3]);
              j.r11 = 0.25 * (H[0][0] + H[1][1]);
              j.r22 = 0.25 * (H[2][2] + H[3][3]);
              j.r12 = 0.25 * Complex(H[0][2] + H[1][3], H[0][3] - H[1][2]);
              return j;
            }};
  }

 private:
  std::string name_;
  JetFn jet_;
  double c0_;
};

/// Levi form of rho on the complex tangent line:
///   rho_{11} |rho_2|^2 + rho_{22} |rho_1|^2 - 2 Re(rho_{12} conj(rho_1) rho_2).
inline double levi_from_jet(const LeviJet& j, double c0 = 0.0) {
  const double grad_norm = 2.0 * std::sqrt(std::norm(j.r1) + std::norm(j.r2));
  if (!(grad_norm >= c0) || grad_norm == 0.0) {
    throw DegeneratePointError("levi_condition_2d: gradient of the defining function vanishes");
  }
  return j.r11 * std::norm(j.r2) + j.r22 * std::norm(j.r1) - 2.0 * (j.r12 * std::conj(j.r1) * j.r2).real();
}

inline double levi_condition_2d(const Defining2& rho, Complex z1, Complex z2) {
  return levi_from_jet(rho.jet(z1, z2), rho.gradient_floor());
}

// ---------------------------------------------------------------------------
// Samples, classification and reports.

enum class LeviClass { pseudoconvex_ok, violating, near_zero };

inline std::string to_string(LeviClass c) {
  switch (c) {
    case LeviClass::pseudoconvex_ok: return "pseudoconvex_ok";
    case LeviClass::violating: return "violating";
    case LeviClass::near_zero: return "near_zero";
  }
  return "near_zero";
}

inline LeviClass classify_levi(double value, double tol) {
  if (value > tol) return LeviClass::pseudoconvex_ok;
  if (value < -tol) return LeviClass::violating;
  return LeviClass::near_zero;
}

struct LeviSample {
  Point3 xi{};
  double levi_value = 0.0;
  double delta_tau_value = 0.0;
  LeviClass classification = LeviClass::near_zero;
};

/// Default near-zero band: 10 h times the Lipschitz constant of grad phi.
inline double default_levi_tolerance(const ScalarField3& phi) {
  return 10.0 * phi.grid().spacing() * phi.regularity().constant;
}

/// Graph-form Levi values at every node one cell inside the grid.
inline std::vector<LeviSample> scan_graph_levi(const ScalarField3& phi, double tol) {
  const Grid3& g = phi.grid();
  const auto& e = g.extents();
  const Grid3 inner(g.coord({1, 1, 1}), g.spacing(), {e[0] - 2, e[1] - 2, e[2] - 2});
  std::vector<LeviSample> out(inner.size());
  parallel_for(inner.size(), [&](std::size_t idx) {
    Node n = inner.node(idx);
    n = {n.i + 1, n.j + 1, n.k + 1};
    const Vector3 grad = fd_gradient(phi, n);
    const Matrix3 H = fd_hessian(phi, n);
    LeviSample s;
    s.xi = g.coord(n);
    s.levi_value = graph_levi_from_jet(grad, H);
    s.delta_tau_value = delta_tau_from_hessian(H, tau_from_gradient(grad));
    s.classification = classify_levi(s.levi_value, tol);
    out[idx] = s;
  });
  return out;
}

inline std::vector<LeviSample> scan_graph_levi(const ScalarField3& phi) {
  return scan_graph_levi(phi, default_levi_tolerance(phi));
}

struct LeviSummary {
  std::size_t count = 0;
  double min = std::numeric_limits<double>::infinity();
  Point3 argmin{};
  std::size_t violating = 0;
  std::size_t near_zero = 0;
  std::size_t ok = 0;
};

inline LeviSummary summarize(std::span<const LeviSample> samples) {
  LeviSummary s;
  s.count = samples.size();
  for (const LeviSample& x : samples) {
    if (x.levi_value < s.min) {
      s.min = x.levi_value;
      s.argmin = x.xi;
    }
    switch (x.classification) {
      case LeviClass::violating: ++s.violating; break;
      case LeviClass::near_zero: ++s.near_zero; break;
      case LeviClass::pseudoconvex_ok: ++s.ok; break;
    }
  }
  return s;
}

inline Json to_json(const LeviSummary& s) {
  return {{"count", s.count}, {"min", s.min},        {"argmin", s.argmin},
          {"violating", s.violating}, {"near_zero", s.near_zero}, {"pseudoconvex_ok", s.ok}};
}

inline void write_csv(std::ostream& os, std::span<const LeviSample> samples) {
  os << "xi1,xi2,xi3,levi_value,classification\n";
  for (const LeviSample& s : samples) {
    os << format_double(s.xi[0]) << ',' << format_double(s.xi[1]) << ',' << format_double(s.xi[2]) << ','
       << format_double(s.levi_value) << ',' << to_string(s.classification) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Slices p_t(z1, z2) = (z1, z2, z2 t) of graphs over R x C^{n-1}.

/// phi(y1, z2, z3, ..., zn) on the polydisc max(|y1|, |z_j|) < radius.
struct GraphSource {
  std::function<double(double, Complex, std::span<const Complex>)> phi;
  double radius = 1.0;
};

/// phi^t(y1, z2) = phi(y1, z2, z2 t) sampled on `grid`.
inline ScalarField3 slice_graph(const GraphSource& src, std::span<const Complex> t, const Grid3& grid,
                                Regularity reg = {}) {
  if (t.empty()) throw ParameterError("slice_graph: need n >= 3 (t must have at least one component)");
  std::vector<double> vals(grid.size());
  parallel_for(grid.size(), [&](std::size_t idx) {
    const Point3 xi = grid.coord(grid.node(idx));
    const Complex z2(xi[1], xi[2]);
    std::vector<Complex> rest(t.size());
    double sup = std::max(std::abs(xi[0]), std::abs(z2));
    for (std::size_t a = 0; a < t.size(); ++a) {
      rest[a] = z2 * t[a];
      sup = std::max(sup, std::abs(rest[a]));
    }
    if (!(sup < src.radius)) throw DomainError("slice_graph: slice leaves the domain of phi");
    vals[idx] = src.phi(xi[0], z2, rest);
  });
  return ScalarField3(grid, std::move(vals), reg);
}

// ---------------------------------------------------------------------------
// Green mean-value identity on D(0, r), normalised so that
//   mean_{|zeta| = r} u = u(0) + (1/2pi) int_{D(0,r)} log(r/|zeta|) Lap u.

struct GreenIdentity {
  double circle_mean = 0.0;      // (1/2pi) int_0^{2pi} u(r e^{it}) dt
  double center_value = 0.0;     // u(0)
  double weighted_laplacian = 0; // int_{D(0,r)} log(r/|zeta|) Lap u dlambda_2
  double raw_lhs = 0.0;          // (1/r) int_{|zeta|=r} u dlambda_1 = 2 pi circle_mean
  double raw_rhs = 0.0;          // u(0) + weighted_laplacian
  double residual = 0.0;         // |circle_mean - u(0) - weighted_laplacian / 2pi|
};

inline GreenIdentity green_identity_residual(const DiscField& u, double r) {
  const double h = u.spacing();
  if (r < 4.0 * h) throw ResolutionError("green_identity_residual: radius spans fewer than 4 cells");
  GreenIdentity out;
  out.circle_mean = circle_mean(u, Complex(0.0, 0.0), r);
  out.center_value = u.at(0, 0);

  // Node-centred cells; the cell at the origin uses the exact cell average
  // of log(r/|zeta|): mean of log|zeta| over [-a, a]^2 is log a + (ln 2 - 3 + pi/2) / 2.
  const int m = static_cast<int>(std::ceil(r / h));
  const double origin_weight = std::log(r) - (std::log(0.5 * h) + 0.5 * (std::log(2.0) - 3.0 + 0.5 * kPi));
  std::vector<double> rows(static_cast<std::size_t>(2 * m + 1), 0.0);
  parallel_for(rows.size(), [&](std::size_t row) {
    const int i = static_cast<int>(row) - m;
    CompensatedSum s;
    for (int j = -m; j <= m; ++j) {
      const double rho = std::abs(u.coord(i, j));
      if (!(rho < r)) continue;
      const double w = (i == 0 && j == 0) ? origin_weight : std::log(r / rho);
      s.add(w * u.laplacian(i, j));
    }
    rows[row] = s.value();
  });
  out.weighted_laplacian = compensated_sum(rows) * h * h;
  out.raw_lhs = 2.0 * kPi * out.circle_mean;
  out.raw_rhs = out.center_value + out.weighted_laplacian;
  out.residual = std::abs(out.circle_mean - out.center_value - out.weighted_laplacian / (2.0 * kPi));
  return out;
}

}  // namespace levikit
