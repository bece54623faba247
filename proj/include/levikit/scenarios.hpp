#pragma once

// Scenario registry behind the command-line runner. A config is one JSON
// document {scenario, seed, expect, output_dir, params}; each scenario
// resolves its parameters against a schema, runs, and returns a report with
// named assertions plus CSV exports. Runtime is kept out of the report so that
// reports are byte-identical across runs and thread counts.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "levikit/errors.hpp"
#include "levikit/field.hpp"
#include "levikit/field_io.hpp"
#include "levikit/hartogs.hpp"
#include "levikit/levi.hpp"
#include "levikit/mollify.hpp"
#include "levikit/parallel.hpp"
#include "levikit/potential.hpp"
#include "levikit/staircase.hpp"

namespace levikit {

/// Invalid configuration or command line (exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct ParamSpec {
  std::string name;
  std::string type;  // number | integer | string | boolean | array
  Json default_value;
  std::string description;
};

struct Assertion {
  std::string name;
  std::string invariant;  // module invariant the check stands for
  bool outcome = false;   // raw result of the check
  bool counterexample = false;  // inverted under expect = "violation"
  Json detail = Json::object();
};

struct ScenarioOutput {
  std::vector<Assertion> assertions;
  Json results = Json::object();
  std::map<std::string, std::string> csv;  // file name -> contents
};

struct ScenarioContext {
  Json params;
  std::uint64_t seed = 1;
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  std::function<ScenarioOutput(const ScenarioContext&)> run;
};

namespace detail {

inline std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const std::string& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s + '\n';
}
inline std::string num(double x) { return format_double(x); }

inline Assertion check(std::string name, std::string invariant, bool outcome, Json detail = Json::object(),
                       bool counterexample = false) {
  return {std::move(name), std::move(invariant), outcome, counterexample, std::move(detail)};
}

// ---------------------------------------------------------------------------

struct LeviDomain {
  Defining2 rho;
  std::function<double(Complex, Complex)> scalar;
};

inline LeviDomain levi_domain(const std::string& name) {
  if (name == "ball") return {Defining2::ball(), [](Complex a, Complex b) { return std::norm(a) + std::norm(b) - 1.0; }};
  if (name == "g2") return {Defining2::g2_model(), [](Complex a, Complex b) { return a.real() - std::norm(b); }};
  if (name == "hyperplane") return {Defining2::hyperplane(), [](Complex a, Complex) { return a.real(); }};
  throw UsageError("levi-check: unknown domain '" + name + "' (ball | g2 | hyperplane)");
}

inline ScenarioOutput run_levi_check(const ScenarioContext& ctx) {
  const std::string domain = ctx.params["domain"];
  const int samples = ctx.params["samples"];
  const double fd_h = ctx.params["fd_h"];
  const double tol = ctx.params["tol"];
  if (samples < 1) throw UsageError("levi-check: samples must be >= 1");
  const LeviDomain d = levi_domain(domain);
  const Defining2 fd = Defining2::numeric(domain + "-fd", d.scalar, fd_h);
  // Boundary points: a fixed anchor, then seeded samples.
  std::vector<std::pair<Complex, Complex>> pts;
  Rng rng(ctx.seed);
  if (domain == "ball") {
    pts.push_back({Complex(1, 0), Complex(0, 0)});
    for (int k = 1; k < samples; ++k) {
      const double a = rng.uniform(0.0, kPi / 2), t1 = rng.uniform(0.0, 2 * kPi), t2 = rng.uniform(0.0, 2 * kPi);
      pts.push_back({std::polar(std::cos(a), t1), std::polar(std::sin(a), t2)});
    }
  } else {
    pts.push_back({Complex(0, 0), Complex(0, 0)});
    for (int k = 1; k < samples; ++k) {
      const Complex z2 = std::polar(rng.uniform(0.0, 0.5), rng.uniform(0.0, 2 * kPi));
      const double y = rng.uniform(-0.5, 0.5);
      pts.push_back({Complex(domain == "g2" ? std::norm(z2) : 0.0, y), z2});
    }
  }
  std::vector<double> sym(pts.size()), num_v(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    sym[k] = levi_condition_2d(d.rho, pts[k].first, pts[k].second);
    num_v[k] = levi_condition_2d(fd, pts[k].first, pts[k].second);
  });
  ScenarioOutput out;
  std::size_t ok = 0, violating = 0, flat = 0;
  double max_gap = 0.0;
  std::string csv = csv_row({"re_z1", "im_z1", "re_z2", "im_z2", "levi_value", "levi_fd", "classification"});
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const LeviClass c = classify_levi(sym[k], tol);
    ok += c == LeviClass::pseudoconvex_ok;
    violating += c == LeviClass::violating;
    flat += c == LeviClass::near_zero;
    max_gap = std::max(max_gap, std::abs(sym[k] - num_v[k]));
    csv += csv_row({num(pts[k].first.real()), num(pts[k].first.imag()), num(pts[k].second.real()),
                    num(pts[k].second.imag()), num(sym[k]), num(num_v[k]), to_string(c)});
  }
  out.csv["levi_samples.csv"] = csv;
  out.results = {{"domain", domain},     {"nodes", pts.size()},          {"pseudoconvex_ok", ok},
                 {"violating", violating}, {"near_zero", flat},           {"anchor_value", sym[0]},
                 {"anchor_value_fd", num_v[0]}, {"max_symbolic_fd_gap", max_gap}};
  out.assertions.push_back(check("levi_sign", "levi: pseudoconvexity is nonnegativity of the Levi condition on the boundary",
                                 violating == 0, {{"violating", violating}, {"anchor_value", sym[0]}}, true));
  out.assertions.push_back(check("symbolic_fd_agreement", "levi: symbolic and finite-difference routes agree to 1e-6",
                                 max_gap <= 1e-6, {{"max_gap", max_gap}}));
  return out;
}

// ---------------------------------------------------------------------------

inline ScenarioOutput run_mollify_sweep(const ScenarioContext& ctx) {
  const std::string model = ctx.params["model"];
  CertificateParams cp;
  cp.epsilon = ctx.params["epsilon"];
  cp.alpha = ctx.params["alpha"];
  cp.p = ctx.params["p"];
  cp.sweep = ctx.params["sweep"];
  const double h = ctx.params["h"];
  CertificateReport r;
  if (model == "lifted-staircase") {
    const double alpha1 = ctx.params["alpha1"];
    const int N = ctx.params["N"];
    const auto sys = build_cantor(default_alphas(alpha1, N), N);
    const LiftedStaircase m(std::make_shared<const FatF>(sys), lifted_staircase_box(h));
    r = sign_certificate(m, cp);
  } else if (model == "constant-hessian") {
    const Grid3 g = Grid3::box({-0.7, -0.7, -0.7}, {0.7, 0.7, 0.7}, h);
    const auto v = ScalarField3::sample(g, [](const Point3& x) { return -(x[1] * x[1] + x[2] * x[2]); });
    const auto phi = ScalarField3::sample(g, [](const Point3& x) { return 0.3 * x[0] * x[0] + x[0] * x[1] - 0.2 * x[2]; });
    r = sign_certificate(GridPair(v, phi), cp);
  } else {
    throw UsageError("mollify-sweep: unknown model '" + model + "' (lifted-staircase | constant-hessian)");
  }
  ScenarioOutput out;
  out.results = to_json(r);
  std::string csv = csv_row({"delta", "m_value", "bound"});
  for (std::size_t k = 0; k < r.deltas.size(); ++k) csv += csv_row({num(r.deltas[k]), num(r.m_values[k]), num(-r.epsilon)});
  out.csv["mollify_sweep.csv"] = csv;
  out.assertions.push_back(check("mollified_sign_inequality",
                                 "mollify: m(delta) >= -eps for every delta <= eps^{1/(alpha-3/p)} in the sweep",
                                 r.inequality_pass, {{"min_m", *std::min_element(r.m_values.begin(), r.m_values.end())}}));
  return out;
}

// ---------------------------------------------------------------------------

inline ScenarioOutput run_staircase_build(const ScenarioContext& ctx) {
  using Rational = boost::multiprecision::cpp_rational;
  const double alpha1 = ctx.params["alpha1"];
  const int N = ctx.params["N"];
  const int samples = ctx.params["samples"];
  const int fsamples = ctx.params["f_samples"];
  const auto sys = build_cantor(default_alphas(alpha1, N), N);
  const FatF F(sys);
  ScenarioOutput out;

  // Exact interval-length identity on a rational copy, up to generation 10.
  const int nr = std::min(N, 10);
  const auto rsys = build_cantor(default_alphas(Rational(alpha1), nr), nr);
  bool exact = true;
  Rational prod = 1;
  for (int n = 0; n <= nr && exact; ++n) {
    if (n > 0) prod *= Rational(1) - rsys.alphas()[static_cast<std::size_t>(n - 1)];
    const Rational expected = prod / Rational(boost::multiprecision::cpp_int(1) << n);
    for (const auto& iv : rsys.I(n)) exact = exact && iv.length() == expected;
  }
  out.assertions.push_back(check("interval_measure_identity",
                                 "staircase: |I[n][i]| = 2^{-n} prod(1 - alpha_k) in rational arithmetic",
                                 exact, {{"generations_checked", nr}}));

  const double f0 = F(0.0), f1 = F(1.0);
  out.assertions.push_back(check("F_support", "staircase: F(0) = F(1) = 0 and F = 0 outside [0, 1]",
                                 std::abs(f0) <= 1e-12 && std::abs(f1) <= 1e-12, {{"F0", f0}, {"F1", f1}}));

  // fd second derivative at the midpoints of J intervals wide enough for the stencil.
  double worst = 0.0;
  std::size_t jchecked = 0;
  const double e = 1e-6;
  for (int n = 0; n < N; ++n) {
    for (const auto& j : sys.J(n)) {
      if (j.b - j.a < 4 * e) continue;
      const double m = 0.5 * (j.a + j.b);
      worst = std::max(worst, std::abs((F(m + e) - 2 * F(m) + F(m - e)) / (e * e) + 1.0));
      ++jchecked;
    }
  }
  out.assertions.push_back(check("concavity_on_U", "staircase: F'' = -1 +- 1e-4 on sampled open J intervals",
                                 worst <= 1e-4 && jchecked > 0, {{"max_deviation", worst}, {"intervals", jchecked}}));

  double cauchy = 0.0;
  std::vector<StaircaseIterate<double>> fs;
  for (int n = 0; n <= N; ++n) fs.push_back(staircase_f(sys, n));
  bool monotone = true;
  for (int n = 0; n < N; ++n) {
    double gap = 0.0;
    for (double x : fs[static_cast<std::size_t>(n + 1)].xs) gap = std::max(gap, std::abs(fs[n + 1](x) - fs[n](x)));
    cauchy = std::max(cauchy, gap * std::ldexp(1.0, n));
    for (std::size_t k = 1; k < fs[n].ys.size(); ++k) monotone = monotone && fs[n].ys[k - 1] <= fs[n].ys[k];
  }
  out.assertions.push_back(check("monotone_cauchy", "staircase: f_n increasing and max|f_{n+1} - f_n| <= 2^{-n}",
                                 monotone && cauchy <= 1.0 + 1e-12, {{"max_scaled_gap", cauchy}}));

  bool bound_ok = true;
  Json x0j;
  try {
    const X0Result r = find_x0(F, static_cast<std::size_t>(samples), ctx.seed);
    x0j = to_json(r);
  } catch (const ConstructionError& err) {
    bound_ok = false;
    x0j = {{"error", err.what()}};
  }
  out.assertions.push_back(check("quadratic_lower_bound",
                                 "staircase: F(x0+s) >= F(x0) + sF'(x0) + Ls^2 at all sampled offsets", bound_ok,
                                 {{"samples", samples}}));
  out.results = {{"alpha1", alpha1},
                 {"N", N},
                 {"L", quadratic_constant(alpha1)},
                 {"limit_measure", sys.limit_measure()},
                 {"limit_error_bound", F.limit_error_bound()},
                 {"second_derivative_bound", F.second_derivative_bound()},
                 {"x0", x0j},
                 {"cantor", to_json(build_cantor(default_alphas(alpha1, std::min(N, 4)), std::min(N, 4)))}};
  std::string csv = csv_row({"x", "F", "dF", "d2F"});
  for (int k = 0; k <= fsamples; ++k) {
    const double x = -0.125 + 1.25 * k / fsamples;
    csv += csv_row({num(x), num(F(x)), num(F.d1(x)), num(F.d2(x))});
  }
  out.csv["staircase_F.csv"] = csv;
  return out;
}

// ---------------------------------------------------------------------------

inline ScenarioOutput run_hartogs_scan(const ScenarioContext& ctx) {
  const std::string cap = ctx.params["cap"];
  const double h = ctx.params["h"];
  HartogsDomain d = [&] {
    if (cap == "ball") return hartogs_ball(h);
    if (cap == "staircase") return hartogs_staircase_alpha(ctx.params["alpha1"], ctx.params["N"], h, ctx.params["c1"]);
    if (cap == "zygmund") return zygmund_domain(ctx.params["zygmund_alpha"], ctx.params["zygmund_n"], h);
    throw UsageError("hartogs-scan: unknown cap '" + cap + "' (ball | staircase | zygmund)");
  }();
  ScanOptions opt;
  opt.radii = ctx.params["radii"].get<std::vector<double>>();
  opt.far_distance = ctx.params["far_distance"];
  const HartogsScan s = subharmonicity_scan(d, opt);
  ScenarioOutput out;
  out.results = {{"cap", cap}, {"parameters", d.parameters}, {"scan", to_json(s)}};
  if (cap == "staircase") out.results["threshold"] = staircase_threshold_report(d);
  out.assertions.push_back(check("subharmonicity", "staircase: -phi subharmonic, i.e. no violating node",
                                 s.violating == 0, {{"violating", s.violating}}, true));
  if (cap != "ball") {
    out.assertions.push_back(check("violations_localised", "staircase: every violating node lies within 2h of the singular set",
                                   s.max_violating_distance <= 2.0 * h + 1e-15,
                                   {{"max_violating_distance", s.max_violating_distance}, {"two_h", 2.0 * h}}));
    out.assertions.push_back(check("far_field_laplacian", "staircase: Laplacian <= -0.5 beyond distance 0.1 of the singular set",
                                   s.far_nodes > 0 && s.far_max_laplacian <= -0.5,
                                   {{"far_max_laplacian", s.far_max_laplacian}, {"far_nodes", s.far_nodes}}));
  }
  const bool all = ctx.params["csv_all_nodes"];
  std::ostringstream os;
  if (all) {
    write_csv(os, s, d.cap);
  } else {
    HartogsScan flagged = s;
    flagged.samples.clear();
    for (const HartogsSample& x : s.samples) {
      if (x.circle_tested || x.classification == LeviClass::violating) flagged.samples.push_back(x);
    }
    write_csv(os, flagged, d.cap);
  }
  out.csv["hartogs_scan.csv"] = os.str();
  return out;
}

// ---------------------------------------------------------------------------

inline ScenarioOutput run_cantor_potential(const ScenarioContext& ctx) {
  const double alpha = ctx.params["alpha"];
  const int n = ctx.params["n"];
  ScenarioOutput out;
  const SquareCantor set = build_square_cantor(alpha, n);
  const GreenPotential u(frostman_measure(set));

  double boundary = 0.0;
  const int nb = ctx.params["boundary_samples"];
  for (int k = 0; k < nb; ++k) boundary = std::max(boundary, std::abs(u(std::polar(1.0, 2.0 * kPi * k / nb))));
  out.assertions.push_back(check("boundary_vanishing", "potential: max |u| over boundary samples <= 1e-10",
                                 boundary <= 1e-10, {{"max_abs", boundary}, {"samples", nb}}));

  const GreenPotential single(AtomicMeasure{{{Complex(0, 0), 1.0}}, 0});
  const double half = single(0.5);
  out.assertions.push_back(check("single_atom_anchor", "potential: single atom at 0 gives u(1/2) = log 2 +- 1e-12",
                                 std::abs(half - std::log(2.0)) <= 1e-12, {{"u_half", half}}));

  Rng rng(ctx.seed);
  double sym = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Complex z(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)), w(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7));
    sym = std::max(sym, std::abs(green_kernel(z, w) - green_kernel(w, z)));
  }
  out.assertions.push_back(check("kernel_symmetry", "potential: G(z, w) = G(w, z) on 100 random pairs to 1e-12",
                                 sym <= 1e-12, {{"max_gap", sym}}));

  const double spacing = set.side() + set.gap();
  const MassRecovery disc = laplacian_mass_recovery(u, DiscCell{0.0, 0.9}, spacing / 8.0);
  out.assertions.push_back(check("disc_mass_recovery", "potential: flux mass over D(0, 0.9) within 2% of 1",
                                 disc.relative_error <= 0.02, to_json(disc)));

  const auto cells = occupied_cells(set);
  std::vector<MassRecovery> rec(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) rec[k] = laplacian_mass_recovery(u, cells[k], (cells[k].x1 - cells[k].x0) / 32.0);
  double worst = 0.0;
  std::string cells_csv = csv_row({"x0", "y0", "x1", "y1", "recovered", "expected", "relative_error"});
  for (std::size_t k = 0; k < cells.size(); ++k) {
    worst = std::max(worst, rec[k].relative_error);
    cells_csv += csv_row({num(cells[k].x0), num(cells[k].y0), num(cells[k].x1), num(cells[k].y1), num(rec[k].recovered),
                          num(rec[k].expected), num(rec[k].relative_error)});
  }
  out.csv["mass_recovery_cells.csv"] = cells_csv;
  out.assertions.push_back(check("cell_mass_recovery", "potential: per occupied cell, flux mass within 5% of 4^{-n}",
                                 worst <= 0.05, {{"worst_relative_error", worst}, {"cells", cells.size()}}));

  Json growth = Json::array();
  std::vector<double> C;
  for (int g : ctx.params["growth_generations"].get<std::vector<int>>()) {
    const GrowthCertificate gc = growth_certificate(build_square_cantor(alpha, g));
    growth.push_back(to_json(gc));
    C.push_back(gc.C);
  }
  bool stable = !C.empty();
  for (std::size_t k = 0; k + 1 < C.size(); ++k) stable = stable && C[k + 1] / C[k] >= 0.5 && C[k + 1] / C[k] <= 2.0;
  out.assertions.push_back(check("growth_stability", "potential: C(n+1)/C(n) in [1/2, 2]", stable, {{"C", C}}));

  const BoxCountFit planar = box_dimension_planar(build_square_cantor(alpha, ctx.params["box_generation"]));
  out.assertions.push_back(check("planar_box_dimension", "potential: box dimension of E within 0.1 of alpha",
                                 std::abs(planar.dimension - alpha) <= 0.1, to_json(planar)));
  const SquareCantor gset = build_square_cantor(alpha, ctx.params["graph_generation"]);
  const BoxCountFit graph = box_dimension_graph(gset, GreenPotential(frostman_measure(gset)));
  out.assertions.push_back(check("graph_box_dimension", "potential: box dimension of the boundary graph set within 0.15 of 1 + alpha",
                                 std::abs(graph.dimension - (1.0 + alpha)) <= 0.15, to_json(graph)));

  Json zyg = nullptr;
  const int budget = ctx.params["zygmund_budget"];
  if (budget > 0) {
    const double zh = ctx.params["zygmund_h"];
    const GreenPotential uz(frostman_measure(build_square_cantor(alpha, ctx.params["zygmund_n"])));
    const DiscField f = DiscField::sample(1.0, zh, [&](Complex z) { return uz(z); });
    const ZygmundEstimate a = zygmund_seminorm(f, alpha, static_cast<std::size_t>(budget), ctx.seed);
    const ZygmundEstimate b = zygmund_seminorm(f, alpha, 2 * static_cast<std::size_t>(budget), ctx.seed);
    zyg = {{"M", a.M}, {"M_double_budget", b.M}, {"samples", a.samples}};
    out.assertions.push_back(check("zygmund_stability", "potential: empirical Zygmund M stable within 20% as the budget doubles",
                                   std::isfinite(a.M) && a.M > 0.0 && std::abs(b.M / a.M - 1.0) <= 0.2, zyg));
  }
  out.results = {{"alpha", alpha}, {"n", n}, {"a", set.ratio()}, {"u0", u(0.0)}, {"growth", growth}, {"zygmund", zyg}};
  return out;
}

// ---------------------------------------------------------------------------

inline ScenarioOutput run_green_identity(const ScenarioContext& ctx) {
  const double h = ctx.params["h"];
  const double tol = ctx.params["tol"];
  const auto radii = ctx.params["radii"].get<std::vector<double>>();
  const std::vector<std::pair<std::string, std::function<double(Complex)>>> fields{
      {"re", [](Complex z) { return z.real(); }},
      {"abs2", [](Complex z) { return std::norm(z); }},
      {"abs4", [](Complex z) { return std::norm(z) * std::norm(z); }}};
  double rmax = 0.0;
  for (double r : radii) rmax = std::max(rmax, r);
  ScenarioOutput out;
  std::string csv = csv_row({"function", "r", "circle_mean", "center_value", "weighted_laplacian", "residual"});
  double worst = 0.0;
  Json rows = Json::array();
  for (const auto& [name, fn] : fields) {
    const DiscField u = DiscField::sample(rmax + 8.0 * h, h, fn);
    for (double r : radii) {
      const GreenIdentity g = green_identity_residual(u, r);
      worst = std::max(worst, g.residual);
      csv += csv_row({name, num(r), num(g.circle_mean), num(g.center_value), num(g.weighted_laplacian), num(g.residual)});
      rows.push_back({{"function", name}, {"r", r}, {"residual", g.residual}, {"raw_lhs", g.raw_lhs}, {"raw_rhs", g.raw_rhs}});
    }
  }
  out.csv["green_identity.csv"] = csv;
  out.results = {{"rows", rows}, {"max_residual", worst}};
  out.assertions.push_back(check("green_identity", "levi: mean_r u = u(0) + (1/2pi) int log(r/|z|) Lap u within tolerance",
                                 worst <= tol, {{"max_residual", worst}, {"tol", tol}}));
  return out;
}

// ---------------------------------------------------------------------------

inline ScenarioOutput run_slice_check(const ScenarioContext& ctx) {
  const double C = ctx.params["C"];
  const double h = ctx.params["h"];
  const double angle = ctx.params["angle"];
  const auto radii = ctx.params["t_radii"].get<std::vector<double>>();
  // phi = |z2|^2 - (C/2)|z3|^2: phi(0, z2, 0) = |z2|^2, Hessian bounded by C.
  const GraphSource src{[C](double, Complex z2, std::span<const Complex> rest) {
                          return std::norm(z2) - 0.5 * C * std::norm(rest[0]);
                        },
                        1.0};
  const int m = static_cast<int>(std::lround(0.4 / h));
  const Grid3 g({0.0, -m * h, -m * h}, h, {5, 2 * m + 1, 2 * m + 1});
  ScenarioOutput out;
  std::string csv = csv_row({"t_abs", "min_ratio", "bound"});
  bool ok = true;
  Json rows = Json::array();
  for (double tr : radii) {
    const std::vector<Complex> t{std::polar(tr, angle)};
    const ScalarField3 s = slice_graph(src, t, g);
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const Point3 p = g.coord(g.node(idx));
      const double r2 = p[1] * p[1] + p[2] * p[2];
      if (p[0] != 0.0 || r2 == 0.0) continue;
      mn = std::min(mn, s.values()[idx] / r2);
    }
    const double bound = 1.0 - C * tr * tr - 10.0 * h;
    ok = ok && mn >= bound;
    csv += csv_row({num(tr), num(mn), num(bound)});
    rows.push_back({{"t_abs", tr}, {"min_ratio", mn}, {"bound", bound}});
  }
  // Identity slice.
  const std::vector<Complex> zero{Complex(0.0, 0.0)};
  const ScalarField3 s0 = slice_graph(src, zero, g);
  double id_gap = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Point3 p = g.coord(g.node(idx));
    id_gap = std::max(id_gap, std::abs(s0.values()[idx] - (p[1] * p[1] + p[2] * p[2])));
  }
  out.csv["slice_check.csv"] = csv;
  out.results = {{"rows", rows}, {"identity_gap", id_gap}};
  out.assertions.push_back(check("slice_transversality", "levi: min phi^t(0, z2)/|z2|^2 >= 1 - C|t|^2 - 10h for |t| <= 0.1",
                                 ok, {{"rows", rows}}));
  out.assertions.push_back(check("identity_slice", "levi: t = 0 reproduces phi(y1, z2, 0)", id_gap == 0.0, {{"gap", id_gap}}));
  return out;
}

}  // namespace detail

inline const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> reg{
      {"levi-check",
       "Levi condition on boundary samples of a model domain, symbolic and finite-difference routes",
       {{"domain", "string", "ball", "ball | g2 | hyperplane"},
        {"samples", "integer", 64, "boundary points (the first is a fixed anchor)"},
        {"fd_h", "number", 1e-3, "finite-difference step of the numeric route"},
        {"tol", "number", 1e-9, "classification band around zero"}},
       detail::run_levi_check},
      {"mollify-sweep",
       "Sign preservation of -Delta_tau(v * theta_delta) over a dyadic delta sweep",
       {{"model", "string", "lifted-staircase", "lifted-staircase | constant-hessian"},
        {"epsilon", "number", 1e-2, "tolerance eps"},
        {"alpha", "number", 0.9, "Hoelder exponent"},
        {"p", "number", 6.0, "Sobolev exponent"},
        {"sweep", "integer", 7, "number of dyadic deltas"},
        {"h", "number", 0.0078125, "grid spacing"},
        {"alpha1", "number", 0.5, "first Cantor ratio of the staircase"},
        {"N", "integer", 12, "staircase generations"}},
       detail::run_mollify_sweep},
      {"staircase-build",
       "Cantor intervals, staircase iterates, F and the quadratic lower bound at x0",
       {{"alpha1", "number", 0.9, "first Cantor ratio"},
        {"N", "integer", 12, "generations"},
        {"samples", "integer", 1000, "sampled offsets for the quadratic bound"},
        {"f_samples", "integer", 1024, "rows of the F export"}},
       detail::run_staircase_build},
      {"hartogs-scan",
       "Subharmonicity scan of a Hartogs cap (ball, staircase or Zygmund)",
       {{"cap", "string", "ball", "ball | staircase | zygmund"},
        {"h", "number", 0.001953125, "disc grid spacing"},
        {"alpha1", "number", 0.99, "staircase: first Cantor ratio"},
        {"N", "integer", 12, "staircase: generations"},
        {"c1", "number", 0.0, "staircase: bump weight, 0 selects 1/(32 sup|chi''|)"},
        {"zygmund_alpha", "number", 1.0, "zygmund: alpha"},
        {"zygmund_n", "integer", 4, "zygmund: generation"},
        {"radii", "array", Json::array({0.02, 0.01, 0.005}), "circle-mean radii"},
        {"far_distance", "number", 0.1, "far-field distance"},
        {"csv_all_nodes", "boolean", false, "export every node instead of flagged ones"}},
       detail::run_hartogs_scan},
      {"cantor-potential",
       "Square Cantor set, Frostman measure, Green potential anchors, mass recovery and dimensions",
       {{"alpha", "number", 1.0, "dimension parameter in (0, 2)"},
        {"n", "integer", 5, "generation of the measure"},
        {"boundary_samples", "integer", 512, "points on the unit circle"},
        {"growth_generations", "array", Json::array({4, 5, 6}), "generations for the growth certificate"},
        {"box_generation", "integer", 8, "generation for the planar box count"},
        {"graph_generation", "integer", 6, "generation for the graph box count"},
        {"zygmund_budget", "integer", 40000, "Zygmund samples (0 disables)"},
        {"zygmund_n", "integer", 4, "generation for the Zygmund estimate"},
        {"zygmund_h", "number", 0.001953125, "grid spacing for the Zygmund estimate"}},
       detail::run_cantor_potential},
      {"green-identity",
       "Normalised Green identity for Re z, |z|^2, |z|^4 on discs",
       {{"h", "number", 1e-3, "disc grid spacing"},
        {"radii", "array", Json::array({0.25, 0.5, 1.0}), "radii"},
        {"tol", "number", 1e-5, "residual tolerance"}},
       detail::run_green_identity},
      {"slice-check",
       "Slices (z1, z2, z2 t) of a Hessian-bounded graph and the transversality bound",
       {{"C", "number", 1.5, "Hessian bound of the test graph"},
        {"h", "number", 0.02, "grid spacing"},
        {"angle", "number", 0.7, "argument of t"},
        {"t_radii", "array", Json::array({0.0, 0.05, 0.1}), "values of |t|"}},
       detail::run_slice_check},
  };
  return reg;
}

inline const Scenario& find_scenario(const std::string& name) {
  for (const Scenario& s : scenario_registry()) {
    if (s.name == name) return s;
  }
  std::string valid;
  for (const Scenario& s : scenario_registry()) valid += (valid.empty() ? "" : ", ") + s.name;
  throw UsageError("unknown scenario '" + name + "'; valid scenarios: " + valid);
}

inline Json scenario_schema(const Scenario& s) {
  Json props = Json::object();
  for (const ParamSpec& p : s.params) {
    props[p.name] = {{"type", p.type}, {"default", p.default_value}, {"description", p.description}};
  }
  return {{"name", s.name}, {"description", s.description}, {"params", props}};
}

inline std::string list_scenarios_text() {
  std::ostringstream os;
  for (const Scenario& s : scenario_registry()) {
    os << s.name << "  " << s.description << '\n';
    for (const ParamSpec& p : s.params) os << "    " << p.name << " (" << p.type << ", default " << p.default_value.dump() << ")  " << p.description << '\n';
  }
  return os.str();
}

inline Json list_scenarios_json() {
  Json a = Json::array();
  for (const Scenario& s : scenario_registry()) a.push_back(scenario_schema(s));
  return a;
}

namespace detail {
inline bool type_matches(const std::string& type, const Json& v) {
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "array") return v.is_array();
  return false;
}
}  // namespace detail

/// Sets `value` at a dotted path (e.g. "params.h"); the text is parsed as JSON
/// when possible and kept as a string otherwise.
inline void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  Json* node = &config;
  std::string::size_type start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw UsageError("--set: malformed key '" + key + "'");
    if (!node->is_object()) throw UsageError("--set: '" + key + "' does not name an object field");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

struct RunResult {
  int exit_code = 0;
  Json report;
  std::map<std::string, std::string> csv;
  double runtime_seconds = 0.0;
  std::string failure;  // names of failing assertions
};

/// Validates the config, runs the scenario, and assembles the report.
inline RunResult run_scenario(const Json& config) {
  if (!config.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [k, v] : config.items()) {
    if (k != "scenario" && k != "seed" && k != "expect" && k != "output_dir" && k != "params" && k != "threads") {
      throw UsageError("unknown config field '" + k + "'");
    }
  }
  if (!config.contains("scenario") || !config["scenario"].is_string()) throw UsageError("config needs a string field 'scenario'");
  const Scenario& sc = find_scenario(config["scenario"]);
  const std::string expect = config.value("expect", std::string("pass"));
  if (expect != "pass" && expect != "violation") throw UsageError("expect must be 'pass' or 'violation'");
  if (config.contains("seed") && !(config["seed"].is_number_integer() && config["seed"].get<std::int64_t>() >= 0)) throw UsageError("seed must be a non-negative integer");
  ScenarioContext ctx;
  ctx.seed = config.value("seed", std::uint64_t{1});
  ctx.params = Json::object();
  for (const ParamSpec& p : sc.params) ctx.params[p.name] = p.default_value;
  if (config.contains("params")) {
    if (!config["params"].is_object()) throw UsageError("params must be an object");
    for (const auto& [k, v] : config["params"].items()) {
      const auto it = std::find_if(sc.params.begin(), sc.params.end(), [&](const ParamSpec& p) { return p.name == k; });
      if (it == sc.params.end()) throw UsageError(sc.name + ": unknown parameter '" + k + "'");
      if (!detail::type_matches(it->type, v)) throw UsageError(sc.name + ": parameter '" + k + "' must be of type " + it->type);
      ctx.params[k] = v;
    }
  }

  RunResult rr;
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioOutput out;
  try {
    out = sc.run(ctx);
  } catch (const UsageError&) {
    throw;
  } catch (const ParameterError& e) {
    throw UsageError(sc.name + ": " + e.what());
  } catch (const ResolutionError& e) {
    throw UsageError(sc.name + ": " + e.what());
  } catch (const Error& e) {
    out = {};
    out.assertions.push_back(detail::check("construction", "scenario ran to completion", false, {{"error", e.what()}}));
  }
  rr.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json assertions = Json::array();
  bool pass = true;
  for (const Assertion& a : out.assertions) {
    const bool inverted = expect == "violation" && a.counterexample;
    const bool ok = inverted ? !a.outcome : a.outcome;
    pass = pass && ok;
    if (!ok) rr.failure += (rr.failure.empty() ? "" : ", ") + a.name;
    assertions.push_back({{"name", a.name},
                          {"invariant", a.invariant},
                          {"outcome", a.outcome},
                          {"expected", inverted ? "violation" : "pass"},
                          {"pass", ok},
                          {"detail", a.detail}});
  }
  rr.report = {{"scenario", sc.name}, {"seed", ctx.seed},         {"expect", expect},
               {"parameters", ctx.params}, {"assertions", assertions}, {"results", out.results},
               {"pass", pass}};
  rr.csv = std::move(out.csv);
  rr.exit_code = pass ? 0 : 1;
  return rr;
}

/// Writes report.json, the CSV exports and timing.json into `dir`.
inline void write_outputs(const RunResult& rr, const std::filesystem::path& dir, unsigned threads) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "report.json");
    f << rr.report.dump(2) << '\n';
  }
  for (const auto& [name, body] : rr.csv) {
    std::ofstream f(dir / name);
    f << body;
  }
  std::ofstream t(dir / "timing.json");
  t << Json{{"runtime_seconds", rr.runtime_seconds}, {"threads", threads}}.dump(2) << '\n';
}

}  // namespace levikit
