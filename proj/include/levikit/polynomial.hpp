#pragma once

#include <array>
#include <vector>

#include "levikit/field.hpp"
#include "levikit/numeric.hpp"

namespace levikit {

/// Value, gradient and Hessian of a function of xi = (y1, Re z2, Im z2).
struct FieldJet {
  double value = 0.0;
  Vector3 grad{};
  Matrix3 hess{};
};

/// Polynomial of total degree <= 3 in three real variables with exact
/// derivatives.
class Poly3 {
 public:
  struct Term {
    std::array<int, 3> power{};
    double coeff = 0.0;
  };

  Poly3() = default;
  explicit Poly3(std::vector<Term> terms) : terms_(std::move(terms)) {}

  /// Random coefficients in [-1, 1] for every monomial of degree <= max_degree,
  /// optionally with zero constant and linear parts (so grad(0) = 0).
  static Poly3 random(Rng& rng, int max_degree, bool critical_at_origin) {
    std::vector<Term> terms;
    for (int a = 0; a <= max_degree; ++a) {
      for (int b = 0; a + b <= max_degree; ++b) {
        for (int c = 0; a + b + c <= max_degree; ++c) {
          const int deg = a + b + c;
          const double coeff = rng.uniform(-1.0, 1.0);
          if (critical_at_origin && deg <= 1) continue;
          terms.push_back({{a, b, c}, coeff});
        }
      }
    }
    return Poly3(std::move(terms));
  }

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }

  [[nodiscard]] double operator()(const Point3& x) const { return jet(x).value; }

  [[nodiscard]] FieldJet jet(const Point3& x) const {
    FieldJet out;
    for (const Term& t : terms_) {
      std::array<std::array<double, 3>, 3> d{};  // d[axis][order] = order-th derivative of x^p
      for (int a = 0; a < 3; ++a) {
        const int p = t.power[a];
        d[a][0] = ipow(x[a], p);
        d[a][1] = p >= 1 ? p * ipow(x[a], p - 1) : 0.0;
        d[a][2] = p >= 2 ? p * (p - 1) * ipow(x[a], p - 2) : 0.0;
      }
      out.value += t.coeff * d[0][0] * d[1][0] * d[2][0];
      for (int a = 0; a < 3; ++a) {
        double g = t.coeff;
        for (int b = 0; b < 3; ++b) g *= d[b][b == a ? 1 : 0];
        out.grad[a] += g;
        for (int b = 0; b < 3; ++b) {
          double hv = t.coeff;
          for (int c = 0; c < 3; ++c) {
            const int order = (c == a) + (c == b);
            hv *= d[c][order];
          }
          out.hess[a][b] += hv;
        }
      }
    }
    return out;
  }

 private:
  static double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
  }

  std::vector<Term> terms_;
};

}  // namespace levikit
