#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slipflow/diagnostics.hpp"

using namespace slipflow;

namespace {

constexpr double pi = std::numbers::pi;

Grid box(int n1 = 8, int n2 = 4, int n3 = 4) { return Grid(GeometryConfig{2.0, 1.0, 1.0, n1, n2, n3}); }

VectorField random_vector(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  VectorField v(g);
  for (int c = 0; c < 3; ++c)
    for (std::size_t n = 0; n < g.size(); ++n) v[c][n] = uni(rng);
  return v;
}

ProblemSetup setup_at(int m, double epsilon = 1e-2) {
  BoundaryDataSpec spec;
  spec.epsilon = epsilon;
  return make_setup(GeometryConfig{2.0, 1.0, 1.0, 16 * m, 8 * m, 8 * m}, FlowParams{}, spec);
}

}  // namespace

TEST(Energy, ZeroFieldsBalance) {
  const Grid g = box();
  const auto e = energy_balance(VectorField(g), ScalarField(g), VectorField(g), SlipData(g), FlowParams{});
  EXPECT_EQ(e.lhs, 0.0);
  EXPECT_EQ(e.rhs, 0.0);
  EXPECT_EQ(e.residual, 0.0);
}

TEST(Energy, ShearFlowDissipation) {
  // u = (x2, 0, 0): D:D = 1/2 and div u = 0, so the bulk term is mu |Omega|.
  // With f = 0 the axial face terms cancel and the lateral ones vanish.
  const Grid g = box();
  FlowParams P;
  P.mu = 1.5;
  P.f = 0.0;
  const VectorField u = VectorField::sample(g, [](const Vec3& x) { return Vec3{x[1], 0, 0}; });
  const auto e = energy_balance(u, ScalarField(g, 0.3), VectorField(g), SlipData(g), P);
  EXPECT_NEAR(e.lhs, 1.5 * 2.0, 1e-12);
  EXPECT_EQ(e.rhs, 0.0);
}

TEST(Energy, ForcingWorkOnUniformField) {
  const Grid g = box();
  FlowParams P;
  P.f = 0.0;
  const VectorField u = VectorField::sample(g, [](const Vec3&) { return Vec3{0, 1, 0}; });
  const VectorField F = VectorField::sample(g, [](const Vec3&) { return Vec3{0, 2, 5}; });
  const auto e = energy_balance(u, ScalarField(g), F, SlipData(g), P);
  EXPECT_NEAR(e.rhs, 2.0 * 2.0, 1e-12);
  EXPECT_NEAR(e.lhs, 0.0, 1e-12);
  EXPECT_NEAR(e.residual, 1.0, 1e-12);
}

TEST(Vorticity, ZeroFieldsGiveZero) {
  const Grid g = box();
  const auto r = vorticity_boundary_residual(VectorField(g), SlipData(g), FlowParams{});
  EXPECT_EQ(r.mu_total(), 0.0);
  EXPECT_EQ(r.nu_total(), 0.0);
}

TEST(Vorticity, VariantsCoincideWhenViscositiesMatch) {
  const Grid g = box();
  const VectorField u = random_vector(g, 4);
  const auto r = vorticity_boundary_residual(u, SlipData(g), FlowParams{});
  EXPECT_DOUBLE_EQ(r.mu_total(), r.nu_total());
  EXPECT_LE(r.mu_total(BoundarySet::lateral), r.mu_total());
}

TEST(Helmholtz, SplitsExactly) {
  const Grid g = box();
  const VectorField u = random_vector(g, 8);
  const auto h = helmholtz_decompose(u);
  EXPECT_LE((h.A - (u - gradient(h.pot))).max_abs(), 1e-15);
  EXPECT_LE(h.report.curl_mismatch, 1e-11);
  EXPECT_NEAR(integrate(h.pot), 0.0, 1e-12);
}

TEST(Helmholtz, DivergenceFreeFieldHasNoPotential) {
  const Grid g = box(16, 8, 8);
  const VectorField u = VectorField::sample(g, [](const Vec3& x) {
    return Vec3{std::sin(pi * x[1]), std::sin(pi * x[2]), std::sin(pi * x[0])};
  });
  const auto h = helmholtz_decompose(u);
  EXPECT_LE(h.pot.max_abs(), 1e-9);
  EXPECT_LE((h.A - u).max_abs(), 1e-9);
}

TEST(Helmholtz, GradientFieldIsRecovered) {
  // phi has zero normal derivative on every face, so u = grad phi has A = 0 in the continuum.
  double prev = 0.0;
  for (int m : {1, 2}) {
    const Grid g = box(8 * m, 4 * m, 4 * m);
    const VectorField u = VectorField::sample(g, [](const Vec3& x) {
      return Vec3{-0.5 * pi * std::sin(0.5 * pi * x[0]) * std::cos(pi * x[1]),
                  -pi * std::cos(0.5 * pi * x[0]) * std::sin(pi * x[1]), 0.0};
    });
    const auto h = helmholtz_decompose(u);
    const double a = norm(h.A, NormKind::lp(2.0));
    EXPECT_LE(a, 0.2 * norm(u, NormKind::lp(2.0)));
    if (prev > 0.0) {
      EXPECT_LT(a, 0.5 * prev);
    }
    prev = a;
  }
}

TEST(GradientStructure, ZeroInputs) {
  const Grid g = box();
  EXPECT_EQ(gradient_structure_residual(VectorField(g), ScalarField(g), VectorField(g), FlowParams{}), 0.0);
}

TEST(GradientStructure, PureGradientForcing) {
  const Grid g = box(8, 6, 6);
  const VectorField F = gradient(ScalarField::sample(g, [](const Vec3& x) { return x[0] * x[1] + x[2] * x[2]; }));
  EXPECT_LE(gradient_structure_residual(F, ScalarField(g), VectorField(g), FlowParams{}), 1e-13);
}

TEST(Apriori, DegenerateCases) {
  const Grid g = box();
  const VectorField z(g);
  const ScalarField s(g);
  EXPECT_EQ(apriori_ratio(z, s, z, s, SlipData(g), FaceField(g)), 0.0);
  EXPECT_TRUE(std::isinf(apriori_ratio(random_vector(g, 1), s, z, s, SlipData(g), FaceField(g))));
}

TEST(Reflection, Involution) {
  const Grid g = box(7, 4, 5);
  const VectorField u = random_vector(g, 2);
  EXPECT_EQ((reflect_x1(reflect_x1(u)) - u).max_abs(), 0.0);
}

TEST(Reflection, SlipRowsAreMirrorInvariant) {
  const Grid g = box(9, 5, 6);
  for (std::uint64_t seed : {1u, 2u, 3u})
    EXPECT_LE(reflection_residual(random_vector(g, seed), FlowParams{1.3, 0.2, 4.0, PressureLaw::power(2.0)}), 1e-11);
}

TEST(Reflection, SymmetricFieldHasMatchingFaces) {
  // u1 odd and u2, u3 even about x1 = L/2: the outflow functionals of u equal its inflow ones.
  const Grid g = box();
  const VectorField u = VectorField::sample(g, [](const Vec3& x) {
    const double s = x[0] - 1.0;
    return Vec3{s * x[1], s * s + x[2], std::cos(s) * x[1]};
  });
  ASSERT_LE((reflect_x1(u) - u).max_abs(), 1e-14);
  const FlowParams P;
  const auto a = slip_functionals(u, Face::inflow, P);
  const auto b = slip_functionals(u, Face::outflow, P);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t n = 0; n < a.size(); ++n)
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(a[n][c], b[n][c], 1e-12);
}

TEST(Report, ZeroDataPassesAtRoundingLevel) {
  const ProblemSetup s = setup_at(1, 0.0);
  const auto rep = run_diagnostics(s, VectorField(s.grid), ScalarField(s.grid));
  EXPECT_EQ(rep.entries.size(), 15u);
  EXPECT_TRUE(rep.all_pass());
  for (const auto& e : rep.entries) EXPECT_LE(e.value, 1e-12) << e.key;
}

TEST(Report, DefaultSolutionPassesAndRefines) {
  std::vector<DiagnosticReport> reps;
  for (int m : {1, 2}) {
    const ProblemSetup s = setup_at(m);
    const auto b = picard_solve(s);
    ASSERT_EQ(b.verdict, Verdict::converged);
    reps.push_back(run_diagnostics(s, b.u, b.w));
  }
  for (const auto& e : reps[0].entries) {
    EXPECT_TRUE(e.pass) << e.key << " = " << e.value;
    EXPECT_FALSE(e.norm.empty());
    EXPECT_FALSE(e.basis.empty());
  }
  EXPECT_LT(reps[1].find("vorticity_mu")->value, 0.5 * reps[0].find("vorticity_mu")->value);
  EXPECT_LT(reps[1].find("gradient_structure")->value, 0.75 * reps[0].find("gradient_structure")->value);
  EXPECT_EQ(reps[0].find("no_such_entry"), nullptr);
}
