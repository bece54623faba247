#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "levikit/levi.hpp"
#include "levikit/polynomial.hpp"

using namespace levikit;

namespace {

Grid3 centered_grid(double h, int half) {
  return Grid3({-half * h, -half * h, -half * h}, h, {2 * half + 1, 2 * half + 1, 2 * half + 1});
}

const Node kCenter2{2, 2, 2};

ScalarField3 local_field(double h, const std::function<double(const Point3&)>& fn) {
  return ScalarField3::sample(centered_grid(h, 2), fn);
}

// Third route: the complex form expanded into real and imaginary parts by hand.
double delta_tau_bruteforce(const Matrix3& H, const TangentPair& tau) {
  const double vzz = (H[1][1] + H[2][2]) / 4.0;
  const double re_mix = H[0][1] / 2.0;
  const double im_mix = H[0][2] / 2.0;
  const Complex p = tau.t1 * std::conj(tau.t2);
  // Re(i p (re + i im)) = -Im(p) re - Re(p) im
  return std::norm(tau.t1) * H[0][0] + std::norm(tau.t2) * vzz + 2.0 * (-p.imag() * re_mix - p.real() * im_mix);
}

}  // namespace

TEST(TauOfPhi, Examples) {
  const double h = 0.1;
  const auto zero = local_field(h, [](const Point3&) { return 0.0; });
  TangentPair t = tau_of_phi(zero, kCenter2);
  EXPECT_EQ(t.t1, Complex(0, 0));
  EXPECT_EQ(t.t2, Complex(0.5, 0));
  const auto y1 = local_field(h, [](const Point3& p) { return p[0]; });
  t = tau_of_phi(y1, kCenter2);
  EXPECT_NEAR(std::abs(t.t1), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(t.t2 - Complex(0.5, 0.5)), 0.0, 1e-12);
  const auto re = local_field(h, [](const Point3& p) { return p[1]; });
  t = tau_of_phi(re, kCenter2);
  EXPECT_NEAR(std::abs(t.t1 - Complex(-0.25, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(t.t2 - Complex(0.5, 0)), 0.0, 1e-12);
}

TEST(DeltaTau, Examples) {
  const double h = 0.1;
  const auto y2 = local_field(h, [](const Point3& p) { return p[0] * p[0]; });
  EXPECT_NEAR(delta_tau(y2, TangentPair{1.0, 0.0}, kCenter2), 2.0, 1e-10);
  const auto r2 = local_field(h, [](const Point3& p) { return p[1] * p[1] + p[2] * p[2]; });
  EXPECT_NEAR(delta_tau(r2, TangentPair{0.0, 1.0}, kCenter2), 1.0, 1e-10);
  const auto yre = local_field(h, [](const Point3& p) { return p[0] * p[1]; });
  EXPECT_NEAR(delta_tau(yre, TangentPair{1.0, 1.0}, kCenter2), 0.0, 1e-10);
  // v = y1 Im z2: v_{y1 z2bar} = i/2, so 2 Re(i * 1 * 1 * i/2) = -1.
  const auto yim = local_field(h, [](const Point3& p) { return p[0] * p[2]; });
  EXPECT_NEAR(delta_tau(yim, TangentPair{1.0, 1.0}, kCenter2), -1.0, 1e-10);
}

TEST(DeltaTau, VariableCoefficients) {
  const auto f = local_field(0.1, [](const Point3& p) { return p[0] * p[0] + p[1] * p[1]; });
  const double v = delta_tau(f, [](Node) { return TangentPair{Complex(0, 1), 2.0}; }, kCenter2);
  // |i|^2 * 2 + 4 * (2 + 0) / 4
  EXPECT_NEAR(v, 4.0, 1e-10);
}

TEST(DeltaTau, DualFormsAgreeOnRandomPolynomials) {
  Rng rng(20260101);
  for (int trial = 0; trial < 1000; ++trial) {
    const Poly3 v = Poly3::random(rng, 3, false);
    const TangentPair tau{Complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                          Complex(rng.uniform(-2, 2), rng.uniform(-2, 2))};
    const Point3 x{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const Matrix3 H = v.jet(x).hess;
    const double c = delta_tau_complex_form(H, tau);
    const double r = delta_tau_real_form(H, tau);
    EXPECT_NEAR(c, r, 1e-9 * std::max(1.0, std::abs(c)));
    EXPECT_NEAR(c, delta_tau_bruteforce(H, tau), 1e-9 * std::max(1.0, std::abs(c)));
  }
}

TEST(GraphLevi, Examples) {
  const double h = 0.05;
  const auto r2 = local_field(h, [](const Point3& p) { return p[1] * p[1] + p[2] * p[2]; });
  EXPECT_NEAR(graph_levi(r2, kCenter2), -0.25, 1e-10);
  const auto zero = local_field(h, [](const Point3&) { return 0.0; });
  EXPECT_EQ(graph_levi(zero, kCenter2), 0.0);
  const auto neg = local_field(h, [](const Point3& p) { return -(p[1] * p[1] + p[2] * p[2]); });
  EXPECT_NEAR(graph_levi(neg, kCenter2), 0.25, 1e-10);
}

TEST(GraphLevi, EqualsMinusDeltaTauOfPhi) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Poly3 p = Poly3::random(rng, 3, false);
    const auto f = local_field(0.01, [&](const Point3& x) { return p(x); });
    const Node n = kCenter2;
    const double g = graph_levi(f, n);
    const double d = -delta_tau(f, tau_of_phi(f, n), n);
    EXPECT_NEAR(g, d, 1e-9 * std::max(1.0, std::abs(g)));
  }
}

TEST(GraphLevi, MatchesAmbientRouteOnGraphs) {
  Rng rng(11);
  // Central gradients of cubics carry an O(h^2) defect; keep it below 1e-9.
  const double h = 2e-5;
  for (int trial = 0; trial < 200; ++trial) {
    const Poly3 p = Poly3::random(rng, 3, true);
    const auto f = local_field(h, [&](const Point3& x) { return p(x); });
    const double fd = graph_levi(f, kCenter2);
    const Defining2 rho = Defining2::graph("poly", [&](const Point3& x) { return p.jet(x); });
    const double symbolic = levi_condition_2d(rho, {0, 0}, {0, 0});
    EXPECT_NEAR(fd, symbolic, 1e-8);
  }
}

TEST(LeviCondition2d, Examples) {
  EXPECT_DOUBLE_EQ(levi_condition_2d(Defining2::ball(), {1, 0}, {0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(levi_condition_2d(Defining2::hyperplane(), {0.3, 0.1}, {-0.2, 0.7}), 0.0);
  EXPECT_DOUBLE_EQ(levi_condition_2d(Defining2::g2_model(), {0, 0}, {0, 0}), -0.25);
}

TEST(LeviCondition2d, NumericRouteMatchesSymbolic) {
  const Defining2 g2 = Defining2::numeric("g2-fd", [](Complex z1, Complex z2) { return z1.real() - std::norm(z2); },
                                          1e-3);
  EXPECT_NEAR(levi_condition_2d(g2, {0, 0}, {0, 0}), -0.25, 1e-6);
  const Defining2 ball = Defining2::numeric(
      "ball-fd", [](Complex z1, Complex z2) { return std::norm(z1) + std::norm(z2) - 1.0; }, 1e-3);
  const Complex z1 = std::polar(0.6, 0.3), z2 = std::polar(0.8, -1.1);
  EXPECT_NEAR(levi_condition_2d(ball, z1, z2), levi_condition_2d(Defining2::ball(), z1, z2), 1e-6);
}

TEST(LeviCondition2d, BallLeviFormIsOneOnSphere) {
  // For |z|^2 - 1: rho_1 = conj z1, rho_2 = conj z2, Levi value |z1|^2 + |z2|^2 = 1.
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double t = rng.uniform(0, kPi / 2), a = rng.uniform(0, 2 * kPi), b = rng.uniform(0, 2 * kPi);
    EXPECT_NEAR(levi_condition_2d(Defining2::ball(), std::polar(std::cos(t), a), std::polar(std::sin(t), b)), 1.0,
                1e-12);
  }
}

TEST(LeviCondition2d, DegenerateGradientThrows) {
  EXPECT_THROW(levi_condition_2d(Defining2::ball(), {0, 0}, {0, 0}), DegeneratePointError);
}

TEST(LeviCondition2d, HartogsLiftedBallCap) {
  // cap(z) = 1/2 log(1 - |z|^2): the lifted domain is the unit ball.
  const Defining2 rho = Defining2::hartogs_lifted("ball-cap", [](Complex z) {
    const double s = 1.0 - std::norm(z);
    return Defining2::CapJet{0.5 * std::log(s), -0.5 * std::conj(z) / s, -0.5 / (s * s)};
  });
  const Complex z = std::polar(0.6, 0.4);
  const Complex w = std::polar(0.8, 1.3);
  const double lifted = levi_condition_2d(rho, z, w);
  const double ball = levi_condition_2d(Defining2::ball(), z, w);
  EXPECT_GT(lifted, 0.0);
  EXPECT_GT(ball, 0.0);
  EXPECT_THROW(levi_condition_2d(rho, z, {0, 0}), DomainError);
}

TEST(Classification, ToleranceBand) {
  EXPECT_EQ(classify_levi(0.1, 0.01), LeviClass::pseudoconvex_ok);
  EXPECT_EQ(classify_levi(-0.1, 0.01), LeviClass::violating);
  EXPECT_EQ(classify_levi(0.005, 0.01), LeviClass::near_zero);
}

TEST(ScanGraphLevi, BallCapIsPseudoconvexNearZero) {
  const double h = 0.02;
  const auto cap = ScalarField3::sample(
      centered_grid(h, 10), [](const Point3& p) { return 0.5 * (1 - p[0] * p[0] - p[1] * p[1] - p[2] * p[2]) - 0.5; },
      Regularity::smooth(1.0));
  const auto samples = scan_graph_levi(cap);
  const LeviSummary s = summarize(samples);
  EXPECT_EQ(s.count, 19u * 19u * 19u);
  EXPECT_EQ(s.violating, 0u);
  EXPECT_GE(s.min, 0.0);
  std::ostringstream os;
  write_csv(os, samples);
  EXPECT_EQ(os.str().rfind("xi1,xi2,xi3,levi_value,classification\n", 0), 0u);
  EXPECT_EQ(to_json(s).at("violating"), 0);
}

TEST(ScanGraphLevi, ParaboloidViolatesAtEveryNode) {
  const auto phi = ScalarField3::sample(centered_grid(0.05, 4), [](const Point3& p) { return p[1] * p[1] + p[2] * p[2]; },
                                        Regularity::smooth(2.0));
  // The default band 10 h Lip = 1 swallows -1/4 at this resolution.
  EXPECT_EQ(summarize(scan_graph_levi(phi)).near_zero, 343u);
  const LeviSummary s = summarize(scan_graph_levi(phi, 1e-6));
  EXPECT_EQ(s.violating, s.count);
  EXPECT_NEAR(s.min, -0.25, 1e-10);
}

TEST(SliceGraph, IdentitySliceAndSubstitution) {
  const GraphSource src{[](double y, Complex z2, std::span<const Complex> rest) {
                          double s = y * y + std::norm(z2);
                          for (Complex z : rest) s += std::norm(z);
                          return s;
                        },
                        1.0};
  const Grid3 g = centered_grid(0.05, 4);
  const std::vector<Complex> t0{0.0};
  const ScalarField3 s0 = slice_graph(src, t0, g);
  const std::vector<Complex> t{Complex(0.3, -0.4)};
  const ScalarField3 st = slice_graph(src, t, g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Point3 p = g.coord(g.node(idx));
    const double r2 = p[1] * p[1] + p[2] * p[2];
    EXPECT_DOUBLE_EQ(s0.values()[idx], p[0] * p[0] + r2);
    EXPECT_NEAR(st.values()[idx], p[0] * p[0] + (1.0 + 0.25) * r2, 1e-14);
  }
  const std::vector<Complex> big{Complex(20.0, 0.0)};
  EXPECT_THROW(slice_graph(src, big, g), DomainError);
  EXPECT_THROW(slice_graph(src, std::span<const Complex>{}, g), ParameterError);
}

TEST(SliceGraph, TransversalityLowerBound) {
  // phi = |z2|^2 - (C/2)|z3|^2 has phi(0, z2, 0) = |z2|^2 and Hessian bound C.
  const double C = 1.5;
  const GraphSource src{[C](double, Complex z2, std::span<const Complex> rest) {
                          return std::norm(z2) - 0.5 * C * std::norm(rest[0]);
                        },
                        1.0};
  const double h = 0.02;
  const Grid3 g({0.0, -0.4, -0.4}, h, {5, 41, 41});
  for (double tr : {0.0, 0.05, 0.1}) {
    const std::vector<Complex> t{std::polar(tr, 0.7)};
    const ScalarField3 s = slice_graph(src, t, g);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const Point3 p = g.coord(g.node(idx));
      const double r2 = p[1] * p[1] + p[2] * p[2];
      if (p[0] != 0.0 || r2 == 0.0) continue;
      m = std::min(m, s.values()[idx] / r2);
    }
    EXPECT_GE(m, 1.0 - C * tr * tr - 10 * h);
  }
}

TEST(GreenIdentity, NormalizedConvention) {
  const double h = 1e-3;
  const std::vector<std::pair<const char*, std::function<double(Complex)>>> fields{
      {"re", [](Complex z) { return z.real(); }},
      {"r2", [](Complex z) { return std::norm(z); }},
      {"r4", [](Complex z) { return std::norm(z) * std::norm(z); }}};
  for (const auto& [name, fn] : fields) {
    const DiscField u = DiscField::sample(1.0 + 8 * h, h, fn);
    for (double r : {0.25, 0.5, 1.0}) {
      const GreenIdentity g = green_identity_residual(u, r);
      EXPECT_LE(g.residual, 1e-5) << name << " r=" << r;
    }
  }
}

TEST(GreenIdentity, ClosedFormsAndRawValues) {
  const double h = 2e-3;
  const DiscField c = DiscField::sample(0.6, h, [](Complex) { return 2.0; });
  const GreenIdentity gc = green_identity_residual(c, 0.5);
  EXPECT_NEAR(gc.residual, 0.0, 1e-13);
  EXPECT_NEAR(gc.raw_lhs, 4.0 * kPi, 1e-12);
  EXPECT_NEAR(gc.raw_rhs, 2.0, 1e-12);
  // |zeta|^2 at r: int log(r/s) 4 s ds dtheta = 2 pi r^2.
  const DiscField q = DiscField::sample(0.6, h, [](Complex z) { return std::norm(z); });
  const GreenIdentity gq = green_identity_residual(q, 0.5);
  EXPECT_NEAR(gq.weighted_laplacian, 2.0 * kPi * 0.25, 1e-4);
  EXPECT_NEAR(gq.circle_mean, 0.25, 1e-5);
}

TEST(GreenIdentity, TooFewCellsThrows) {
  const DiscField u = DiscField::sample(0.5, 0.05, [](Complex) { return 1.0; });
  EXPECT_THROW(green_identity_residual(u, 0.15), ResolutionError);
}
