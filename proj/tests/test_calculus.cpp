#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slipflow/calculus.hpp"
#include "slipflow/norms.hpp"

using namespace slipflow;

namespace {

constexpr double pi = std::numbers::pi;

Grid box(int n1 = 8, int n2 = 4, int n3 = 4, double L = 2.0) { return Grid(GeometryConfig{L, 1.0, 1.0, n1, n2, n3}); }

ScalarField random_scalar(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ScalarField s(g);
  for (std::size_t n = 0; n < g.size(); ++n) s[n] = uni(rng);
  return s;
}

VectorField random_vector(const Grid& g, std::uint64_t seed) {
  return VectorField(random_scalar(g, seed), random_scalar(g, seed + 1), random_scalar(g, seed + 2));
}

template <class Fn>
void for_interior(const Grid& g, Fn&& fn) {
  const auto& n = g.nodes();
  for (int k = 1; k + 1 < n[2]; ++k)
    for (int j = 1; j + 1 < n[1]; ++j)
      for (int i = 1; i + 1 < n[0]; ++i) fn(g.index(i, j, k));
}

}  // namespace

TEST(Gradient, ConstantGivesZero) {
  const Grid g = box();
  const VectorField d = gradient(ScalarField(g, 3.5));
  EXPECT_LE(d.max_abs(), 1e-13);
}

TEST(Gradient, AffineIsExact) {
  const Grid g = box(8, 5, 6);
  const VectorField d = gradient(ScalarField::sample(g, [](const Vec3& x) { return x[1]; }));
  for (std::size_t n = 0; n < g.size(); ++n) {
    EXPECT_NEAR(d[0][n], 0.0, 1e-13);
    EXPECT_NEAR(d[1][n], 1.0, 1e-13);
    EXPECT_NEAR(d[2][n], 0.0, 1e-13);
  }
}

TEST(Gradient, SecondOrderOnSine) {
  double prev = 0.0;
  for (int n1 : {16, 32, 64, 128}) {
    const Grid g = box(n1, 4, 4);
    const VectorField d = gradient(ScalarField::sample(g, [](const Vec3& x) { return std::sin(pi * x[0]); }));
    double err = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const double x1 = g.point(g.ijk(n)[0], 0, 0)[0];
      err = std::max(err, std::abs(d[0][n] - pi * std::cos(pi * x1)));
    }
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 3.6) << "n1 = " << n1;
    }
    prev = err;
  }
}

TEST(Divergence, AffineIsExact) {
  const Grid g = box(6, 5, 4);
  const ScalarField d = divergence(VectorField::sample(g, [](const Vec3& x) { return x; }));
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_NEAR(d[n], 3.0, 1e-13);
}

TEST(Divergence, ConstantGivesZero) {
  const Grid g = box();
  const ScalarField d = divergence(VectorField::sample(g, [](const Vec3&) { return Vec3{1.0, -2.0, 0.5}; }));
  EXPECT_LE(d.max_abs(), 1e-13);
}

TEST(Divergence, CurlOfSmoothFieldVanishesInside) {
  const Grid g = box(12, 8, 8);
  const VectorField v = VectorField::sample(g, [](const Vec3& x) {
    return Vec3{std::sin(x[1] * x[2]), std::exp(0.3 * x[0]) * x[2], std::cos(x[0] + 2.0 * x[1])};
  });
  const ScalarField dc = divergence(curl(v));
  for_interior(g, [&](std::size_t n) { EXPECT_NEAR(dc[n], 0.0, 1e-13); });
}

TEST(Curl, GradientOfRandomFieldVanishesInside) {
  const Grid g = box(10, 6, 7);
  const VectorField cg = curl(gradient(random_scalar(g, 5)));
  for_interior(g, [&](std::size_t n) {
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(cg[c][n], 0.0, 1e-13);
  });
}

TEST(Curl, AffineIsExact) {
  const Grid g = box();
  const VectorField c = curl(VectorField::sample(g, [](const Vec3& x) { return Vec3{0.0, 0.0, x[1]}; }));
  for (std::size_t n = 0; n < g.size(); ++n) {
    EXPECT_NEAR(c[0][n], 1.0, 1e-13);
    EXPECT_NEAR(c[1][n], 0.0, 1e-13);
    EXPECT_NEAR(c[2][n], 0.0, 1e-13);
  }
}

TEST(Curl, ConstantGivesZero) {
  const Grid g = box();
  EXPECT_LE(curl(VectorField::sample(g, [](const Vec3&) { return Vec3{2, 3, 4}; })).max_abs(), 1e-13);
}

TEST(Curl, DivergenceOfRandomCurlVanishesInside) {
  const Grid g = box(9, 7, 6);
  const ScalarField dc = divergence(curl(random_vector(g, 11)));
  for_interior(g, [&](std::size_t n) { EXPECT_NEAR(dc[n], 0.0, 1e-13); });
}

TEST(Laplacian, QuadraticIsExactIncludingBoundary) {
  const Grid g = box(6, 4, 5);
  const ScalarField s = ScalarField::sample(g, [](const Vec3& x) { return x[0] * x[0] + 2.0 * x[1] * x[1] - x[2] * x[2]; });
  const ScalarField l = laplacian(s);
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_NEAR(l[n], 4.0, 1e-11);
}

TEST(Norm, ConstantOnUnitVolume) {
  const Grid g = box(8, 4, 4, 1.0);
  for (double p : {2.0, 3.0, 4.0}) EXPECT_NEAR(norm(ScalarField(g, -1.7), NormKind::lp(p)), 1.7, 1e-13);
}

TEST(Norm, ZeroFieldHasZeroNorms) {
  const Grid g = box();
  const ScalarField z(g);
  for (const NormKind& k : {NormKind::lp(), NormKind::w1p(), NormKind::w2p(), NormKind::h1(), NormKind::linf_l2(),
                            NormKind::boundary_lp(BoundarySet::all), NormKind::boundary_w1p(BoundarySet::inflow),
                            NormKind::trace_gagliardo(BoundarySet::lateral)})
    EXPECT_EQ(norm(z, k), 0.0);
}

TEST(Norm, L2OfX1MatchesIntegral) {
  const Grid g = box(32, 8, 8);
  const double n = norm(ScalarField::sample(g, [](const Vec3& x) { return x[0]; }), NormKind::lp(2.0));
  EXPECT_NEAR(n, std::sqrt(8.0 / 3.0), 1e-3);
}

TEST(Norm, AbsolutelyHomogeneous) {
  const Grid g = box(8, 5, 4);
  const ScalarField f = random_scalar(g, 3);
  for (const NormKind& k : {NormKind::lp(), NormKind::w1p(), NormKind::w2p(), NormKind::h1(), NormKind::linf_l2(),
                            NormKind::boundary_lp(BoundarySet::all), NormKind::boundary_w1p(BoundarySet::inflow),
                            NormKind::trace_gagliardo(BoundarySet::all)}) {
    const double base = norm(f, k);
    EXPECT_NEAR(norm(-2.5 * f, k), 2.5 * base, 1e-12 * base);
  }
}

TEST(Norm, SobolevMonotone) {
  const Grid g = box(8, 6, 4);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ScalarField f = random_scalar(g, seed);
    for (double p : {2.0, 4.0}) {
      EXPECT_LE(norm(f, NormKind::lp(p)), norm(f, NormKind::w1p(p)));
      EXPECT_LE(norm(f, NormKind::w1p(p)), norm(f, NormKind::w2p(p)));
    }
  }
}

TEST(Norm, TraceSeminormVanishesOnConstants) {
  const Grid g = box();
  const double lp = norm(ScalarField(g, 1.0), NormKind::boundary_lp(BoundarySet::inflow));
  const double tg = norm(ScalarField(g, 1.0), NormKind::trace_gagliardo(BoundarySet::inflow));
  // The trace norm carries the Lp part of the face plus a seminorm that is zero for constants.
  EXPECT_NEAR(tg, lp, 1e-12);
}

TEST(SliceL2, OneOnUnitCrossSection) {
  const Grid g = box();
  const ScalarField one(g, 1.0);
  for (int i = 0; i < g.nodes()[0]; ++i) EXPECT_NEAR(slice_l2(one, i), 1.0, 1e-14);
}

TEST(SliceL2, AxialCoordinate) {
  const Grid g = box();
  const ScalarField s = ScalarField::sample(g, [](const Vec3& x) { return x[0]; });
  for (int i = 0; i < g.nodes()[0]; ++i) EXPECT_NEAR(slice_l2(s, i), g.coord(0, i), 1e-14);
}

TEST(SliceL2, MaximumIsLinfL2) {
  const Grid g = box(7, 5, 6);
  const ScalarField s = random_scalar(g, 17);
  double m = 0.0;
  for (int i = 0; i < g.nodes()[0]; ++i) m = std::max(m, slice_l2(s, i));
  EXPECT_DOUBLE_EQ(norm(s, NormKind::linf_l2()), m);
}

TEST(Integrate, TrapezoidIsExactForTrilinear) {
  const Grid g = box(5, 4, 6, 1.5);
  const double v = integrate(ScalarField::sample(g, [](const Vec3& x) { return 1.0 + x[0] * x[1] * x[2]; }));
  // int_0^1.5 int_0^1 int_0^1 (1 + x y z) = 1.5 + (1.125)(0.5)(0.5)
  EXPECT_NEAR(v, 1.5 + 1.125 * 0.25, 1e-13);
}
