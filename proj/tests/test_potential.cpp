#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "levikit/potential.hpp"

using namespace levikit;

namespace {

// Plain Green kernel written from the definition, for cross-checks.
double green_direct(Complex z, Complex w) { return -std::log(std::abs((z - w) / (1.0 - z * std::conj(w)))); }

}  // namespace

TEST(SquareCantor, RatioAndCounts) {
  EXPECT_DOUBLE_EQ(build_square_cantor(1.0, 1).ratio(), 0.25);
  EXPECT_NEAR(build_square_cantor(1.5, 1).ratio(), 0.39685, 1e-5);
  for (int n = 0; n <= 5; ++n) {
    const SquareCantor s = build_square_cantor(0.8, n);
    EXPECT_EQ(s.squares().size(), std::size_t{1} << (2 * n));
    for (const Square& q : s.squares()) {
      EXPECT_DOUBLE_EQ(q.side, s.initial_side() * std::pow(s.ratio(), n));
      for (Complex c : {q.corner, q.corner + q.side, q.corner + Complex(0, q.side), q.corner + Complex(q.side, q.side)}) {
        EXPECT_LE(std::abs(c), 0.5 + 1e-15);
      }
    }
  }
  EXPECT_THROW((void)build_square_cantor(2.0, 3), ParameterError);
  EXPECT_THROW((void)build_square_cantor(0.0, 3), ParameterError);
  EXPECT_THROW((void)build_square_cantor(1.0, 12), ParameterError);
}

TEST(SquareCantor, PairwiseDisjoint) {
  const SquareCantor s = build_square_cantor(1.9, 3);
  const auto& q = s.squares();
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      const bool sep_x = q[i].corner.real() + q[i].side < q[j].corner.real() || q[j].corner.real() + q[j].side < q[i].corner.real();
      const bool sep_y = q[i].corner.imag() + q[i].side < q[j].corner.imag() || q[j].corner.imag() + q[j].side < q[i].corner.imag();
      ASSERT_TRUE(sep_x || sep_y) << i << " " << j;
    }
  }
}

TEST(SquareCantor, PlanarBoxDimension) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const BoxCountFit f = box_dimension_planar(build_square_cantor(alpha, 8));
    EXPECT_GE(f.scales.size(), 5u);
    EXPECT_NEAR(f.dimension, alpha, 0.1) << alpha;
  }
}

TEST(Frostman, MassesAndRefinement) {
  const SquareCantor s5 = build_square_cantor(1.0, 5);
  const AtomicMeasure mu = frostman_measure(s5);
  EXPECT_NEAR(mu.total_mass(), 1.0, 1e-12);
  for (const Atom& a : mu.atoms) EXPECT_EQ(a.mass, std::ldexp(1.0, -10));
  const AtomicMeasure fine = frostman_measure(build_square_cantor(1.0, 6));
  for (const Square& q : s5.squares()) EXPECT_EQ(fine.square_mass(q), std::ldexp(1.0, -10));
  // Large discs hold everything.
  for (double r : {1.0, 2.0}) EXPECT_LE(mu.disc_mass(0.3, r) / std::pow(r, 1.0), 1.0 / r + 1e-15);
}

TEST(Frostman, GrowthStable) {
  std::vector<double> C;
  for (int n : {4, 5, 6}) {
    const GrowthCertificate g = growth_certificate(build_square_cantor(1.0, n));
    EXPECT_GT(g.C, 0.0);
    EXPECT_TRUE(std::isfinite(g.C));
    C.push_back(g.C);
    const Json j = to_json(g);
    for (const char* key : {"alpha", "n", "C", "samples"}) EXPECT_TRUE(j.contains(key));
  }
  for (std::size_t k = 0; k + 1 < C.size(); ++k) {
    EXPECT_GE(C[k + 1] / C[k], 0.5);
    EXPECT_LE(C[k + 1] / C[k], 2.0);
  }
}

TEST(GreenPotential, KernelSymmetryAndBoundary) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> U(-0.7, 0.7);
  for (int k = 0; k < 100; ++k) {
    const Complex z(U(gen), U(gen)), w(U(gen), U(gen));
    EXPECT_NEAR(green_kernel(z, w), green_kernel(w, z), 1e-12);
    EXPECT_NEAR(green_kernel(z, w), green_direct(z, w), 1e-12);
  }
  const GreenPotential u(frostman_measure(build_square_cantor(1.0, 4)));
  double worst = 0.0;
  for (int k = 0; k < 512; ++k) {
    const double t = 2.0 * kPi * k / 512.0;
    worst = std::max(worst, std::abs(u(Complex(std::cos(t), std::sin(t)))));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(GreenPotential, Anchors) {
  const GreenPotential single(AtomicMeasure{{{Complex(0, 0), 1.0}}, 0});
  EXPECT_NEAR(single(0.5), std::log(2.0), 1e-12);
  const PotentialValue at = single.evaluate(0.0);
  EXPECT_TRUE(at.at_atom);
  EXPECT_TRUE(std::isinf(at.value));
  EXPECT_THROW((void)single.evaluate(Complex(1.1, 0)), DomainError);

  const AtomicMeasure mu = frostman_measure(build_square_cantor(1.0, 5));
  double expected = 0.0;
  for (const Atom& a : mu.atoms) expected -= a.mass * std::log(std::abs(a.location));
  const GreenPotential u(mu);
  EXPECT_NEAR(u(0.0), expected, 1e-12);
  EXPECT_GT(u(0.0), 0.0);
}

TEST(GreenPotential, NonnegativeOnGrid) {
  const GreenPotential u(frostman_measure(build_square_cantor(1.0, 3)));
  const DiscField f = DiscField::sample(1.0, 1.0 / 64, [&](Complex z) { return u(z); });
  for (int i = -f.half(); i <= f.half(); ++i) {
    for (int j = -f.half(); j <= f.half(); ++j) {
      if (f.inside(i, j)) {
        EXPECT_GE(f(i, j), -1e-12);
      }
    }
  }
}

TEST(MassRecovery, DiscAndCells) {
  const SquareCantor s = build_square_cantor(1.0, 5);
  const GreenPotential u(frostman_measure(s));
  const double spacing = s.side() + s.gap();  // nearest centre-to-centre distance
  const MassRecovery all = laplacian_mass_recovery(u, DiscCell{0.0, 0.9}, spacing / 8);
  EXPECT_EQ(all.expected, 1.0);
  EXPECT_LE(all.relative_error, 0.02);
  const auto cells = occupied_cells(s);
  ASSERT_EQ(cells.size(), 1024u);
  for (std::size_t k = 0; k < cells.size(); k += 37) {
    const MassRecovery r = laplacian_mass_recovery(u, cells[k], (cells[k].x1 - cells[k].x0) / 32);
    EXPECT_EQ(r.expected, std::ldexp(1.0, -10));
    EXPECT_LE(r.relative_error, 0.05);
  }
}

TEST(MassRecovery, EmptyCellAndAdditivity) {
  const SquareCantor s = build_square_cantor(1.0, 3);
  const GreenPotential u(frostman_measure(s));
  const MassRecovery empty = laplacian_mass_recovery(u, RectCell{0.55, -0.1, 0.65, 0.1}, 1.0 / 256);
  EXPECT_EQ(empty.expected, 0.0);
  EXPECT_LE(std::abs(empty.recovered), 1e-3);
  // Split a rectangle into two; shared edges carry identical nodes.
  const double h = 1.0 / 512;
  const RectCell whole{-0.25, -0.25, 0.25, 0.0};
  const RectCell left{-0.25, -0.25, 0.0, 0.0};
  const RectCell right{0.0, -0.25, 0.25, 0.0};
  const double a = laplacian_mass_recovery(u, whole, h).recovered;
  const double b = laplacian_mass_recovery(u, left, h).recovered + laplacian_mass_recovery(u, right, h).recovered;
  EXPECT_NEAR(a, b, 1e-10);
}

TEST(MassRecovery, Errors) {
  const GreenPotential u(AtomicMeasure{{{Complex(0.1, 0.1), 1.0}}, 0});
  EXPECT_THROW((void)laplacian_mass_recovery(u, RectCell{0.1, 0.0, 0.2, 0.2}, 0.01), AmbiguousCellError);
  EXPECT_NO_THROW((void)laplacian_mass_recovery(u, RectCell{0.1 + 0.005, 0.0, 0.2, 0.2}, 0.001));
  EXPECT_THROW((void)laplacian_mass_recovery(u, DiscCell{0.0, 0.99}, 0.02), ParameterError);
  EXPECT_THROW((void)laplacian_mass_recovery(u, RectCell{0.2, 0.0, 0.1, 0.2}, 0.01), ParameterError);
}

TEST(Zygmund, QuadraticAndAffine) {
  const double h = 1.0 / 128;
  const DiscField q = DiscField::sample(1.0, h, [](Complex z) { return std::norm(z); });
  const ZygmundEstimate zq = zygmund_seminorm(q, 1.0, 4000);
  EXPECT_GT(zq.samples, 3000u);
  // Second difference of |x|^2 is exactly 2|t|^2, so the ratio grows with |t|.
  EXPECT_NEAR(zq.M, 2.0 * zq.largest_step, 1e-9);
  EXPECT_DOUBLE_EQ(zq.step_at_max, zq.largest_step);
  const DiscField a = DiscField::sample(1.0, h, [](Complex z) { return 3.0 * z.real() - z.imag() + 1.0; });
  EXPECT_NEAR(zygmund_seminorm(a, 1.0, 4000).M, 0.0, 1e-12);
}

TEST(Zygmund, GreenPotentialStable) {
  const GreenPotential u(frostman_measure(build_square_cantor(1.0, 4)));
  const DiscField f = DiscField::sample(1.0, 1.0 / 512, [&](Complex z) { return u(z); });
  const double m1 = zygmund_seminorm(f, 1.0, 40000).M;
  const double m2 = zygmund_seminorm(f, 1.0, 80000).M;
  EXPECT_TRUE(std::isfinite(m1));
  EXPECT_NEAR(m2 / m1, 1.0, 0.2);
}

TEST(ZygmundDomain, GraphDimensionAndFarField) {
  const SquareCantor s = build_square_cantor(1.0, 6);
  const GreenPotential u(frostman_measure(s));
  const BoxCountFit f = box_dimension_graph(s, u);
  EXPECT_NEAR(f.dimension, 2.0, 0.15);

  const HartogsDomain d = zygmund_domain(0.5, 3, 1.0 / 128);
  EXPECT_EQ(d.provenance, "zygmund");
  const HartogsScan scan = subharmonicity_scan(d);
  EXPECT_GT(scan.violating, 0u);
  EXPECT_GT(scan.circle_violations, 0u);
  // Exact value there is -2 (1 - |z|^2)^{-2}; the 5-point stencil adds O(h^2).
  EXPECT_LE(scan.far_max_laplacian, -1.99);
}
