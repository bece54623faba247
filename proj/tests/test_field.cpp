#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "levikit/field.hpp"
#include "levikit/field_io.hpp"

using namespace levikit;

namespace {

Grid3 centered_grid(double h, int half) {
  return Grid3({-half * h, -half * h, -half * h}, h, {2 * half + 1, 2 * half + 1, 2 * half + 1});
}

}  // namespace

TEST(Grid3, RejectsBadSpacingAndSmallExtents) {
  EXPECT_THROW(Grid3({0, 0, 0}, 0.0, {5, 5, 5}), ParameterError);
  EXPECT_THROW(Grid3({0, 0, 0}, -1.0, {5, 5, 5}), ParameterError);
  EXPECT_THROW(Grid3({0, 0, 0}, 0.1, {5, 4, 5}), ParameterError);
}

TEST(Grid3, IndexRoundTrip) {
  const Grid3 g({0, 0, 0}, 0.5, {5, 6, 7});
  for (std::size_t idx = 0; idx < g.size(); ++idx) EXPECT_EQ(g.index(g.node(idx)), idx);
}

TEST(ScalarField3, RejectsNonFiniteValues) {
  const Grid3 g({0, 0, 0}, 1.0, {5, 5, 5});
  std::vector<double> v(g.size(), 0.0);
  v[7] = std::nan("");
  EXPECT_THROW(ScalarField3(g, v), ParameterError);
  EXPECT_THROW(ScalarField3(g, std::vector<double>(3, 0.0)), ParameterError);
}

TEST(FdGradient, AffineIsExact) {
  const Grid3 g = centered_grid(0.1, 4);
  const auto f = ScalarField3::sample(g, [](const Point3& p) { return p[0]; });
  const Vector3 d = fd_gradient(f, {4, 4, 4});
  EXPECT_NEAR(d[0], 1.0, 1e-12);
  EXPECT_NEAR(d[1], 0.0, 1e-12);
  EXPECT_NEAR(d[2], 0.0, 1e-12);
}

TEST(FdGradient, QuadraticIsExact) {
  const double h = 0.01;
  const Grid3 g({0, 0.45, 0}, h, {5, 11, 5});
  const auto f = ScalarField3::sample(g, [](const Point3& p) { return p[1] * p[1]; });
  EXPECT_NEAR(fd_gradient(f, {2, 5, 2})[1], 1.0, 1e-10);
}

TEST(FdGradient, SineRemainderWithinTaylorBound) {
  const double h = 0.05;
  const Grid3 g = centered_grid(h, 3);
  const auto f = ScalarField3::sample(g, [](const Point3& p) { return std::sin(p[0]); });
  const double d = fd_gradient(f, {3, 3, 3})[0];
  // (sin h - sin(-h)) / 2h = sin(h)/h = 1 - h^2/6 + h^4/120 - h^6/5040 ...
  const double defect = 1.0 - d;
  EXPECT_GE(defect, 0.0);
  EXPECT_LE(defect, h * h / 6.0);
  EXPECT_NEAR(defect, h * h / 6.0 - std::pow(h, 4) / 120.0 + std::pow(h, 6) / 5040.0, 1e-13);
}

TEST(FdGradient, BoundaryNodeThrows) {
  const Grid3 g = centered_grid(0.1, 3);
  const auto f = ScalarField3::sample(g, [](const Point3& p) { return p[0]; });
  EXPECT_THROW(fd_gradient(f, {0, 3, 3}), StencilError);
  EXPECT_THROW(fd_hessian(f, {3, 6, 3}), StencilError);
}

TEST(FdHessian, BilinearAndPureQuadratic) {
  const Grid3 g = centered_grid(0.1, 3);
  const auto f = ScalarField3::sample(g, [](const Point3& p) { return p[0] * p[1]; });
  const Matrix3 H = fd_hessian(f, {3, 2, 4});
  EXPECT_NEAR(H[0][1], 1.0, 1e-12);
  EXPECT_NEAR(H[1][0], 1.0, 1e-12);
  const auto q = ScalarField3::sample(g, [](const Point3& p) { return p[2] * p[2]; });
  EXPECT_NEAR(fd_hessian(q, {3, 3, 3})[2][2], 2.0, 1e-10);
}

TEST(FdHessian, KinkOffsetAndOnNode) {
  const double h = 0.125;
  // Nodes at xi1 = (m + 1/2) h: kink midway between two nodes.
  const Grid3 off({-3.5 * h, 0, 0}, h, {8, 5, 5});
  const auto a = ScalarField3::sample(off, [](const Point3& p) { return std::abs(p[0]); });
  // Node at xi1 = -3h/2 has all stencil points on one side: exactly affine.
  EXPECT_DOUBLE_EQ(fd_hessian(a, {2, 2, 2})[0][0], 0.0);
  // Node at -h/2: stencil (-3h/2, -h/2, h/2), second difference (3/2 - 1 + 1/2) h / h^2 = 1/h.
  EXPECT_NEAR(fd_hessian(a, {3, 2, 2})[0][0], 1.0 / h, 1e-12);

  const Grid3 on({-3 * h, 0, 0}, h, {7, 5, 5});
  const auto b = ScalarField3::sample(on, [](const Point3& p) { return std::abs(p[0]); });
  EXPECT_NEAR(fd_hessian(b, {3, 2, 2})[0][0], 2.0 / h, 1e-12);
}

TEST(FdHessian, SecondOrderConvergence) {
  auto fn = [](const Point3& p) { return std::sin(p[0] + 0.3) * std::exp(p[1]) * std::cos(p[2] - 0.2); };
  // Exact Hessian at 0.
  const double s = std::sin(0.3), c = std::cos(0.3), cz = std::cos(-0.2), sz = std::sin(-0.2);
  const Matrix3 ex{{{-s * cz, c * cz, -c * sz}, {c * cz, s * cz, -s * sz}, {-c * sz, -s * sz, -s * cz}}};
  double prev = 0.0;
  for (int level = 0; level < 4; ++level) {
    const double h = 0.1 / (1 << level);
    const auto f = ScalarField3::sample(centered_grid(h, 2), fn);
    const Matrix3 H = fd_hessian(f, {2, 2, 2});
    double err = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) err = std::max(err, std::abs(H[a][b] - ex[a][b]));
    if (level > 0) {
      EXPECT_GE(std::log2(prev / err), 1.9);
    }
    prev = err;
  }
}

TEST(FdGradient, SecondOrderConvergence) {
  auto fn = [](const Point3& p) { return std::exp(0.5 * p[0]) * std::sin(p[1] + 1.0) + p[2] * p[2] * p[2]; };
  const Vector3 exact{0.5 * std::sin(1.0), std::cos(1.0), 0.0};
  double prev = 0.0;
  for (int level = 0; level < 4; ++level) {
    const double h = 0.2 / (1 << level);
    const auto f = ScalarField3::sample(centered_grid(h, 2), fn);
    const Vector3 d = fd_gradient(f, {2, 2, 2});
    double err = 0.0;
    for (int a = 0; a < 2; ++a) err = std::max(err, std::abs(d[a] - exact[a]));
    if (level > 0) {
      EXPECT_GE(std::log2(prev / err), 1.9);
    }
    prev = err;
  }
}

TEST(ComplexWirtinger, Examples) {
  const Grid3 g = centered_grid(0.1, 3);
  const Node c{3, 3, 3};
  const auto r2 = ScalarField3::sample(g, [](const Point3& p) { return p[1] * p[1] + p[2] * p[2]; });
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Node n = g.node(idx);
    if (g.interior(n)) {
      EXPECT_NEAR(complex_wirtinger(r2, n).dz2dz2bar, 1.0, 1e-10);
    }
  }
  const auto re = ScalarField3::sample(g, [](const Point3& p) { return p[1]; });
  const Complex dz = complex_wirtinger(re, c).dz2;
  EXPECT_NEAR(dz.real(), 0.5, 1e-12);
  EXPECT_NEAR(dz.imag(), 0.0, 1e-12);
  const auto mix = ScalarField3::sample(g, [](const Point3& p) { return p[0] * p[2]; });
  const Complex m = complex_wirtinger(mix, c).dy1dz2bar;
  EXPECT_NEAR(m.real(), 0.0, 1e-12);
  EXPECT_NEAR(m.imag(), 0.5, 1e-12);
}

TEST(Interpolation, TrilinearReproducesAffine) {
  const Grid3 g = centered_grid(0.1, 3);
  auto fn = [](const Point3& p) { return 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[2]; };
  const auto f = ScalarField3::sample(g, fn);
  const Point3 q{0.013, -0.171, 0.22};
  EXPECT_NEAR(f.interpolate(q), fn(q), 1e-13);
  EXPECT_THROW((void)f.interpolate({0.5, 0, 0}), DomainError);
}

TEST(CircleMean, Examples) {
  const DiscField c = DiscField::sample(1.0, 0.01, [](Complex) { return 3.25; });
  EXPECT_DOUBLE_EQ(circle_mean(c, {0, 0}, 0.4), 3.25);
  const DiscField re = DiscField::sample(1.0, 0.01, [](Complex z) { return z.real(); });
  EXPECT_NEAR(circle_mean(re, {0, 0}, 0.4), 0.0, 1e-10);
  const DiscField sq = DiscField::sample(1.0, 0.001, [](Complex z) { return std::norm(z); });
  EXPECT_NEAR(circle_mean(sq, {0, 0}, 0.3), 0.09, 1e-6);
}

TEST(CircleMean, ExitingCircleThrows) {
  const DiscField d = DiscField::sample(0.5, 0.01, [](Complex) { return 1.0; });
  EXPECT_THROW(circle_mean(d, {0.2, 0}, 0.3), DomainError);
  EXPECT_THROW(circle_mean([](Complex) { return 1.0; }, {0, 0}, 0.1, 128), ParameterError);
}

TEST(CircleMean, RotationInvariantForRadialField) {
  auto radial = [](Complex z) { return std::exp(-3.0 * std::norm(z)) + std::abs(z); };
  const DiscField d = DiscField::sample(1.0, 0.004, radial);
  const DiscField t = d.transposed();
  for (double r : {0.1, 0.37, 0.8}) EXPECT_NEAR(circle_mean(d, {0, 0}, r), circle_mean(t, {0, 0}, r), 1e-8);
}

TEST(DiscField, DefinedOnlyInsideDisc) {
  const DiscField d = DiscField::sample(0.5, 0.1, [](Complex) { return 1.0; });
  EXPECT_TRUE(d.inside(4, 0));
  EXPECT_FALSE(d.inside(5, 0));
  EXPECT_TRUE(std::isnan(d(5, 0)));
  EXPECT_THROW((void)d.at(5, 0), DomainError);
  EXPECT_THROW(DiscField(0.5, 0.6), ParameterError);
}

TEST(DiscField, LaplacianOfQuadratic) {
  const DiscField d = DiscField::sample(1.0, 0.05, [](Complex z) { return std::norm(z); });
  EXPECT_NEAR(d.laplacian(3, -2), 4.0, 1e-10);
  EXPECT_THROW((void)d.laplacian(19, 0), StencilError);
}

TEST(FieldIo, JsonRoundTripIsExact) {
  const Grid3 g({0.1, -0.2, 0.3}, 1.0 / 3.0, {5, 6, 5});
  const auto f = ScalarField3::sample(g, [](const Point3& p) { return std::sin(p[0]) + p[1] * p[2]; },
                                      Regularity::c1alpha(0.4, 2.5));
  const Json j = to_json(f);
  const ScalarField3 back = scalar_field_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.grid(), f.grid());
  EXPECT_EQ(back.values(), f.values());
  EXPECT_EQ(back.regularity(), f.regularity());

  const DiscField d = DiscField::sample(0.5, 0.1, [](Complex z) { return z.real() / 3.0; });
  const DiscField dd = disc_field_from_json(Json::parse(to_json(d).dump()));
  for (int i = -d.half(); i <= d.half(); ++i) {
    for (int j = -d.half(); j <= d.half(); ++j) {
      if (d.inside(i, j)) {
        EXPECT_EQ(dd(i, j), d(i, j));
      }
    }
  }
}

TEST(FieldIo, CsvHasOneRowPerNode) {
  const Grid3 g({0, 0, 0}, 0.5, {5, 5, 5});
  const auto f = ScalarField3::sample(g, [](const Point3& p) { return p[0]; });
  std::ostringstream os;
  write_csv(os, f);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("xi1,xi2,xi3,value\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), g.size() + 1);
}

TEST(CompensatedSum, RecoversCancelledTerms) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-13, 1e-25);
}

TEST(ParallelFor, ThreadCountDoesNotChangeResults) {
  const Grid3 g = centered_grid(0.05, 6);
  auto fn = [](const Point3& p) { return std::sin(7 * p[0]) * std::cos(3 * p[1] + p[2]); };
  set_thread_count(1);
  const auto a = ScalarField3::sample(g, fn);
  set_thread_count(4);
  const auto b = ScalarField3::sample(g, fn);
  set_thread_count(1);
  EXPECT_EQ(a.values(), b.values());
}
