#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slipflow/lame.hpp"
#include "slipflow/verification/manufactured.hpp"

using namespace slipflow;

namespace {

constexpr double pi = std::numbers::pi;

Grid box(int n1 = 8, int n2 = 4, int n3 = 4) { return Grid(GeometryConfig{2.0, 1.0, 1.0, n1, n2, n3}); }

Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = uni(rng);
  return v;
}

template <class Fn>
void for_interior(const Grid& g, Fn&& fn) {
  const auto& n = g.nodes();
  for (int k = 1; k + 1 < n[2]; ++k)
    for (int j = 1; j + 1 < n[1]; ++j)
      for (int i = 1; i + 1 < n[0]; ++i) fn(g.index(i, j, k), g.point(i, j, k));
}

struct StepProblem {
  Grid grid;
  FlowParams params;
  VectorField convect, F;
  ScalarField G;
  SlipData B;
  FaceField w_in;
};

/// First Picard step of the default small-data problem.
StepProblem first_step(int n1 = 16, int n2 = 8, int n3 = 8) {
  const Grid g = box(n1, n2, n3);
  const FlowParams P;
  const PerturbationData d = assemble_perturbation_data(g, BoundaryDataSpec{}, P);
  return {g, P, d.u0, compute_F(VectorField(g), ScalarField(g), d, P), compute_G(VectorField(g), ScalarField(g), d),
          d.B, d.w_in};
}

}  // namespace

TEST(ApplyLame, ConstantsAreAnnihilatedInside) {
  const Grid g = box();
  const LameOperator op(g, FlowParams{});
  const VectorField Lu = apply_lame(op, VectorField::sample(g, [](const Vec3&) { return Vec3{0.3, -1.0, 2.0}; }));
  for_interior(g, [&](std::size_t n, const Vec3&) {
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(Lu[c][n], 0.0, 1e-12);
  });
}

TEST(ApplyLame, AxialLinearField) {
  const Grid g = box();
  const LameOperator op(g, FlowParams{});
  const VectorField Lu = apply_lame(op, VectorField::sample(g, [](const Vec3& x) { return Vec3{x[0], 0, 0}; }));
  for_interior(g, [&](std::size_t n, const Vec3&) {
    EXPECT_NEAR(Lu[0][n], 1.0, 1e-12);
    EXPECT_NEAR(Lu[1][n], 0.0, 1e-12);
    EXPECT_NEAR(Lu[2][n], 0.0, 1e-12);
  });
}

TEST(ApplyLame, SecondOrderAgainstAnalyticAction) {
  // u = (sin pi x2, sin pi x3, sin pi x1) is divergence free, so
  // Lu = d1 u - mu lap u = (mu pi^2 sin pi x2, mu pi^2 sin pi x3, pi cos pi x1 + mu pi^2 sin pi x1).
  const FlowParams P{1.5, 0.5, 10.0, PressureLaw::power(2.0)};
  double prev = 0.0;
  for (int m : {1, 2, 4}) {
    const Grid g = box(8 * m, 4 * m, 4 * m);
    const LameOperator op(g, P);
    const VectorField Lu = apply_lame(op, VectorField::sample(g, [](const Vec3& x) {
      return Vec3{std::sin(pi * x[1]), std::sin(pi * x[2]), std::sin(pi * x[0])};
    }));
    double err = 0.0;
    for_interior(g, [&](std::size_t n, const Vec3& x) {
      const double mp2 = P.mu * pi * pi;
      err = std::max({err, std::abs(Lu[0][n] - mp2 * std::sin(pi * x[1])),
                      std::abs(Lu[1][n] - mp2 * std::sin(pi * x[2])),
                      std::abs(Lu[2][n] - (pi * std::cos(pi * x[0]) + mp2 * std::sin(pi * x[0])))});
    });
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 3.5) << "refinement " << m;
    }
    prev = err;
  }
}

TEST(Krylov, IdentityConvergesInOneIteration) {
  const Vector b = random_vector(50, 1);
  const auto r = krylov_solve([](const Vector& x, Vector& y) { y = x; }, b, KrylovConfig{});
  EXPECT_EQ(r.iterations, 1);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(r.x[i], b[i], 1e-14);
}

TEST(Krylov, ZeroRhsGivesZero) {
  const auto r = krylov_solve([](const Vector& x, Vector& y) { y = x; }, Vector(20, 0.0), KrylovConfig{});
  EXPECT_EQ(r.iterations, 0);
  for (double v : r.x) EXPECT_EQ(v, 0.0);
}

TEST(Krylov, RecoversKnownVelocity) {
  const Grid g = box();
  const LameOperator op(g, FlowParams{});
  const Vector known = random_vector(op.velocity_size(), 9);
  Vector b(known.size());
  op.apply_velocity(known, b);
  const auto r = krylov_solve([&](const Vector& x, Vector& y) { op.apply_velocity(x, y); }, b, KrylovConfig{},
                              op.velocity_diagonal());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < known.size(); ++i) {
    num += (r.x[i] - known[i]) * (r.x[i] - known[i]);
    den += known[i] * known[i];
  }
  EXPECT_LE(std::sqrt(num / den), 1e-8);
}

TEST(Krylov, ReportsNonConvergence) {
  KrylovConfig cfg;
  cfg.max_iterations = 2;
  cfg.max_restarts = 0;
  const Grid g = box();
  const LameOperator op(g, FlowParams{});
  const Vector b = random_vector(op.velocity_size(), 3);
  EXPECT_THROW(krylov_solve([&](const Vector& x, Vector& y) { op.apply_velocity(x, y); }, b, cfg), ConvergenceError);
}

TEST(Assembly, VelocityMatrixMatchesAction) {
  const Grid g = box(6, 5, 4);
  const LameOperator op(g, FlowParams{1.2, 0.4, 7.0, PressureLaw::power(2.0)});
  const CsrMatrix A = op.velocity_matrix();
  ASSERT_EQ(A.rows, op.velocity_size());
  for (std::uint64_t seed : {1u, 2u}) {
    const Vector x = random_vector(op.velocity_size(), seed);
    Vector y1(x.size()), y2(x.size());
    op.apply_velocity(x, y1);
    A.multiply(x, y2);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y1[i], y2[i], 1e-12 * (1.0 + std::abs(y1[i])));
  }
  const Vector d1 = op.velocity_diagonal(), d2 = A.diagonal();
  for (std::size_t i = 0; i < d1.size(); ++i) EXPECT_NEAR(d1[i], d2[i], 1e-12 * std::abs(d1[i]));
}

TEST(Assembly, CoupledMatrixMatchesAction) {
  const StepProblem sp = first_step(8, 4, 4);
  const LameOperator op(sp.grid, sp.params);
  const TransportField tf = TransportField::from_convect(sp.convect);
  const CoupledSystem sys(op, tf);
  const CsrMatrix A = sys.matrix();
  ASSERT_EQ(A.rows, sys.size());
  const Vector x = random_vector(sys.size(), 42);
  Vector y1(x.size()), y2(x.size());
  sys.apply(x, y1);
  A.multiply(x, y2);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y1[i], y2[i], 1e-12 * (1.0 + std::abs(y1[i])));
  const Vector d1 = sys.diagonal(), d2 = A.diagonal();
  for (std::size_t i = 0; i < d1.size(); ++i) EXPECT_NEAR(d1[i], d2[i], 1e-12 * std::abs(d1[i]));
}

TEST(LinearForm, MergesAndScales) {
  const LinearForm a = 2.0 * LinearForm::unit(3) + LinearForm::unit(1);
  const LinearForm b = LinearForm::unit(3) - 0.5 * LinearForm::unit(7);
  const LinearForm c = (a - b) / 2.0;
  ASSERT_EQ(c.terms().size(), 3u);
  EXPECT_EQ(c.terms()[0], (LinearForm::Term{1, 0.5}));
  EXPECT_EQ(c.terms()[1], (LinearForm::Term{3, 0.5}));
  EXPECT_EQ(c.terms()[2], (LinearForm::Term{7, 0.25}));
}

TEST(SolveLinearStep, ZeroDataGivesZero) {
  const Grid g = box();
  const LameOperator op(g, FlowParams{});
  for (LinearMode mode : {LinearMode::monolithic, LinearMode::split}) {
    const auto r = solve_linear_step(op, VectorField(g), VectorField(g), ScalarField(g), SlipData(g), FaceField(g), mode);
    EXPECT_EQ(r.u.max_abs(), 0.0);
    EXPECT_EQ(r.w.max_abs(), 0.0);
  }
}

TEST(SolveLinearStep, ManufacturedConvergence) {
  const GeometryConfig base;
  const FlowParams P;
  const auto mono = verification::manufactured_study(base, P, LinearMode::monolithic, {8, 16, 32});
  const auto split = verification::manufactured_study(base, P, LinearMode::split, {8, 16, 32});
  EXPECT_GE(mono.min_rate_u(), 1.8);
  EXPECT_GE(split.min_rate_u(), 1.8);
  EXPECT_GE(mono.min_rate_w(), 0.8);
  // frozen reference at n1 = 8, monolithic
  EXPECT_NEAR(mono.levels[0].err_u_l2, 4.870850e-02, 1e-6);
}

TEST(SolveLinearStep, SplitAgreesWithMonolithic) {
  const StepProblem sp = first_step();
  const LameOperator op(sp.grid, sp.params);
  const auto m = solve_linear_step(op, sp.convect, sp.F, sp.G, sp.B, sp.w_in, LinearMode::monolithic);
  const auto s = solve_linear_step(op, sp.convect, sp.F, sp.G, sp.B, sp.w_in, LinearMode::split);
  const double un = norm(m.u, NormKind::h1());
  EXPECT_LE(norm(s.u - m.u, NormKind::h1()), 1e-6 * std::max(1.0, un));
  EXPECT_LE(norm(s.w - m.w, NormKind::linf_l2()), 1e-6 * std::max(1.0, norm(m.w, NormKind::linf_l2())));
}

TEST(SolveLinearStep, NormalComponentVanishesOnFaces) {
  const StepProblem sp = first_step(8, 4, 4);
  const LameOperator op(sp.grid, sp.params);
  const auto r = solve_linear_step(op, sp.convect, sp.F, sp.G, sp.B, sp.w_in, LinearMode::monolithic);
  const double scale = r.u.max_abs();
  for (Face f : kAllFaces) {
    const FaceLayout lay(sp.grid, f);
    const int a = face_axis(f);
    for (int q = 0; q < lay.nodes[1]; ++q)
      for (int p = 0; p < lay.nodes[0]; ++p) {
        const auto c = lay.ijk(sp.grid, p, q);
        EXPECT_LE(std::abs(r.u[a].at(c[0], c[1], c[2])), 1e-9 * scale);
      }
  }
}

TEST(SolveLinearStep, LinearInData) {
  const StepProblem sp = first_step(8, 4, 4);
  const LameOperator op(sp.grid, sp.params);
  const auto r1 = solve_linear_step(op, sp.convect, sp.F, sp.G, sp.B, sp.w_in, LinearMode::monolithic);
  SlipData B2 = sp.B;
  B2.b1 *= 2.0;
  B2.b2 *= 2.0;
  const auto r2 = solve_linear_step(op, sp.convect, 2.0 * sp.F, 2.0 * sp.G, B2, 2.0 * sp.w_in, LinearMode::monolithic);
  EXPECT_LE(norm(r2.u - 2.0 * r1.u, NormKind::h1()), 1e-8 * norm(r1.u, NormKind::h1()));
  EXPECT_LE(norm(r2.w - 2.0 * r1.w, NormKind::linf_l2()), 1e-8 * norm(r1.w, NormKind::linf_l2()));
}

TEST(LinearMode, ParseAndName) {
  EXPECT_EQ(parse_mode("split"), LinearMode::split);
  EXPECT_EQ(parse_mode(mode_name(LinearMode::monolithic)), LinearMode::monolithic);
  EXPECT_THROW(parse_mode("direct"), ConfigError);
}
