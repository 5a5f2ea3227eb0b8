#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slipflow/material.hpp"

using namespace slipflow;

namespace {

constexpr double pi = std::numbers::pi;

Grid box(int n1 = 16, int n2 = 8, int n3 = 8) { return Grid(GeometryConfig{2.0, 1.0, 1.0, n1, n2, n3}); }

/// Smooth random field: a few low sine/cosine modes with random amplitudes.
ScalarField smooth_random(const Grid& g, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 3);
  const auto& e = g.extent();
  const double a = uni(rng), b = uni(rng);
  const int m1 = mode(rng), m2 = mode(rng), m3 = mode(rng);
  return ScalarField::sample(g, [&](const Vec3& x) {
    return amplitude * (a * std::sin(m1 * pi * x[0] / e[0]) * std::cos(m2 * pi * x[1] / e[1]) +
                        b * std::cos(m3 * pi * x[2] / e[2]) * std::sin(pi * x[1] / e[1]));
  });
}

BoundaryDataSpec inflow_only(double eps) {
  BoundaryDataSpec s;
  s.epsilon = eps;
  s.normal_inflow = Profile::sine;
  s.normal_outflow = Profile::zero;
  return s;
}

}  // namespace

TEST(PressureLaw, PowerFirstDerivativeAtOneIsGamma) {
  EXPECT_DOUBLE_EQ(pressure_eval(PressureLaw::power(2.0), 1.0, 1), 2.0);
  EXPECT_DOUBLE_EQ(PressureLaw::power(2.0).gamma(), 2.0);
}

TEST(PressureLaw, LinearSecondDerivativeVanishes) {
  for (double rho : {0.3, 1.0, 1.7}) EXPECT_EQ(pressure_eval(PressureLaw::linear(1.0), rho, 2), 0.0);
}

TEST(PressureLaw, PowerValueAtOne) { EXPECT_DOUBLE_EQ(pressure_eval(PressureLaw::power(1.4), 1.0, 0), 1.0); }

TEST(PressureLaw, ThirdDerivativeOfPower) {
  // d^3/drho^3 rho^3 = 6
  EXPECT_NEAR(pressure_eval(PressureLaw::power(3.0), 0.8, 3), 6.0, 1e-14);
}

TEST(PressureLaw, RejectsOutsideBand) {
  EXPECT_THROW(pressure_eval(PressureLaw::power(2.0), 2.0, 0), DomainError);
  EXPECT_THROW(pressure_eval(PressureLaw::power(2.0), 0.0, 1), DomainError);
}

TEST(PressureLaw, ValidatesParameters) {
  EXPECT_THROW(PressureLaw::power(0.5).validate(), ConfigError);
  EXPECT_THROW(PressureLaw::linear(0.0).validate(), ConfigError);
}

TEST(DeltaPiPrime, ZeroField) {
  const Grid g = box(8, 4, 4);
  EXPECT_EQ(delta_pi_prime(PressureLaw::power(2.0), ScalarField(g)).max_abs(), 0.0);
}

TEST(DeltaPiPrime, ConstantPerturbation) {
  const Grid g = box(8, 4, 4);
  const ScalarField d = delta_pi_prime(PressureLaw::power(2.0), ScalarField(g, 0.1));
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_NEAR(d[n], 0.2, 1e-14);
}

TEST(DeltaPiPrime, MeanValueBoundAndLipschitz) {
  const Grid g = box(8, 4, 4);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-0.5, 0.5);
  for (double kappa : {1.4, 2.0, 3.0}) {
    const PressureLaw law = PressureLaw::power(kappa);
    // max |pi''| over the values actually visited, rho in [0.5, 1.5]
    const double c = std::max(std::abs(law.raw(0.5, 2)), std::abs(law.raw(1.5, 2)));
    for (int t = 0; t < 10; ++t) {
      ScalarField w1(g), w2(g);
      for (std::size_t n = 0; n < g.size(); ++n) {
        w1[n] = uni(rng);
        w2[n] = uni(rng);
      }
      EXPECT_LE(delta_pi_prime(law, w1).max_abs(), c * w1.max_abs() * (1 + 1e-14));
      const double lhs = norm(delta_pi_prime(law, w1) - delta_pi_prime(law, w2), NormKind::lp(2.0));
      EXPECT_LE(lhs, c * norm(w1 - w2, NormKind::lp(2.0)) * (1 + 1e-14));
    }
  }
}

TEST(CutoffRamp, EndpointsAndSmoothness) {
  EXPECT_EQ(cutoff_ramp(0.0), 1.0);
  EXPECT_EQ(cutoff_ramp(1.0), 0.0);
  EXPECT_NEAR(cutoff_ramp(0.5), 0.5, 1e-15);
  const double h = 1e-4;
  for (double t : {0.0, 1.0}) {
    const double d1 = (cutoff_ramp(t + h) - cutoff_ramp(t - h)) / (2 * h);
    EXPECT_NEAR(d1, 0.0, 1e-7);
  }
}

TEST(ExtendNormalTrace, ZeroEpsilonGivesZero) {
  const Grid g = box(8, 4, 4);
  EXPECT_EQ(extend_normal_trace(g, inflow_only(0.0)).max_abs(), 0.0);
}

TEST(ExtendNormalTrace, InflowProfileAndDecay) {
  const Grid g = box();
  const double eps = 1e-2;
  const VectorField u0 = extend_normal_trace(g, inflow_only(eps));
  const auto& n = g.nodes();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const Vec3 x = g.point(i, j, k);
        const std::size_t idx = g.index(i, j, k);
        if (i == 0) {
          EXPECT_NEAR(u0[0][idx], -eps * std::sin(pi * x[1]) * std::sin(pi * x[2]), 1e-15);
        }
        if (x[0] >= 0.25 * g.extent()[0]) {
          EXPECT_EQ(u0[0][idx], 0.0);
        }
        EXPECT_EQ(u0[1][idx], 0.0);
        EXPECT_EQ(u0[2][idx], 0.0);
      }
}

TEST(ExtendNormalTrace, StrongNormLinearInEpsilon) {
  const Grid g = box();
  const double base = norm(extend_normal_trace(g, inflow_only(1e-3)), NormKind::w2p());
  for (double eps : {1e-2, 1e-1}) {
    const double n = norm(extend_normal_trace(g, inflow_only(eps)), NormKind::w2p());
    EXPECT_NEAR(n / base, eps / 1e-3, 1e-10 * eps / 1e-3);
  }
}

TEST(AssemblePerturbationData, ZeroData) {
  const Grid g = box(8, 4, 4);
  BoundaryDataSpec s;
  s.epsilon = 0.0;
  const PerturbationData d = assemble_perturbation_data(g, s, FlowParams{});
  EXPECT_EQ(d.u0.max_abs(), 0.0);
  for (Face f : kAllFaces) {
    for (double v : d.B.b1.face(f)) EXPECT_EQ(v, 0.0);
    for (double v : d.B.b2.face(f)) EXPECT_EQ(v, 0.0);
    for (double v : d.w_in.face(f)) EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(d.b_measure, 0.0);
}

TEST(AssemblePerturbationData, SlipDataPassesThroughWithoutLifting) {
  const Grid g = box(8, 4, 4);
  BoundaryDataSpec s;
  s.epsilon = 3e-2;
  s.normal_inflow = s.normal_outflow = Profile::zero;
  const PerturbationData d = assemble_perturbation_data(g, s, FlowParams{});
  EXPECT_EQ(d.u0.max_abs(), 0.0);
  for (Face f : kAllFaces) {
    const FaceLayout lay(g, f);
    for (int q = 0; q < lay.nodes[1]; ++q)
      for (int p = 0; p < lay.nodes[0]; ++p) {
        const auto c = lay.ijk(g, p, q);
        const Vec3 x = g.point(c[0], c[1], c[2]);
        EXPECT_EQ(d.B.b1.face(f)[lay.index(p, q)], slip_data(s, g, f, x, 0));
        EXPECT_EQ(d.B.b2.face(f)[lay.index(p, q)], slip_data(s, g, f, x, 1));
      }
  }
}

TEST(AssemblePerturbationData, MeasureMatchesNorms) {
  const Grid g = box();
  const BoundaryDataSpec s;
  const PerturbationData d = assemble_perturbation_data(g, s, FlowParams{});
  const double b = norm(d.u0, NormKind::w2p()) + norm(d.B, NormKind::trace_gagliardo(BoundarySet::all)) +
                   norm(d.w_in, NormKind::boundary_w1p(BoundarySet::inflow));
  EXPECT_NEAR(d.b_measure, b, 1e-12);
  EXPECT_GT(d.b_measure, 0.0);
}

TEST(AssemblePerturbationData, InflowDensityTrace) {
  const Grid g = box();
  BoundaryDataSpec s;
  s.epsilon = 2e-2;
  const PerturbationData d = assemble_perturbation_data(g, s, FlowParams{});
  for (int k = 0; k < g.nodes()[2]; ++k)
    for (int j = 0; j < g.nodes()[1]; ++j) {
      const Vec3 x = g.point(0, j, k);
      EXPECT_NEAR(d.w_in.at(Face::inflow, 0, j, k), 2e-2 * std::sin(pi * x[1]) * std::sin(pi * x[2]), 1e-16);
    }
}

TEST(ComputeF, ZeroEverything) {
  const Grid g = box(8, 4, 4);
  const PerturbationData d = zero_perturbation(g);
  EXPECT_EQ(compute_F(VectorField(g), ScalarField(g), d, FlowParams{}).max_abs(), 0.0);
  EXPECT_EQ(compute_G(VectorField(g), ScalarField(g), d).max_abs(), 0.0);
}

TEST(ComputeF, OnlyLiftingTermsSurvive) {
  const Grid g = box();
  const FlowParams P{1.3, 0.7, 10.0, PressureLaw::power(2.0)};
  const PerturbationData d = assemble_perturbation_data(g, BoundaryDataSpec{}, P);
  const VectorField F = compute_F(VectorField(g), ScalarField(g), d, P);
  VectorField expect = P.mu * laplacian(d.u0);
  expect += (P.nu + P.mu) * gradient(divergence(d.u0));
  expect -= advect(d.u0, d.u0);
  expect -= partial(d.u0, 0);
  EXPECT_LE((F - expect).max_abs(), 1e-12 * expect.max_abs());
}

TEST(ComputeG, ReducesWithoutDensity) {
  const Grid g = box();
  const PerturbationData d = assemble_perturbation_data(g, BoundaryDataSpec{}, FlowParams{});
  std::mt19937_64 rng(4);
  const VectorField u(smooth_random(g, rng, 0.05), smooth_random(g, rng, 0.05), smooth_random(g, rng, 0.05));
  const ScalarField G = compute_G(u, ScalarField(g), d);
  EXPECT_LE((G + divergence(d.u0)).max_abs(), 1e-15);
}

TEST(ComputeG, ReducesWithoutLifting) {
  const Grid g = box();
  const PerturbationData d = zero_perturbation(g);
  std::mt19937_64 rng(5);
  const VectorField u(smooth_random(g, rng, 0.05), smooth_random(g, rng, 0.05), smooth_random(g, rng, 0.05));
  const ScalarField w = smooth_random(g, rng, 0.05);
  const ScalarField G = compute_G(u, w, d);
  EXPECT_LE((G + w * divergence(u)).max_abs(), 1e-16);
}

TEST(ComputeF, QuadraticBoundWithFrozenConstant) {
  const Grid g = box(12, 6, 6);
  const FlowParams P;
  const PerturbationData d = assemble_perturbation_data(g, BoundaryDataSpec{}, P);
  const double u0n = norm(d.u0, NormKind::w2p());
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> amp(0.0, 0.1);
  auto ratio = [&]() {
    const double a = amp(rng);
    const VectorField u(smooth_random(g, rng, a), smooth_random(g, rng, a), smooth_random(g, rng, a));
    const ScalarField w = smooth_random(g, rng, a);
    const double lhs = norm(compute_F(u, w, d, P), NormKind::lp()) + norm(compute_G(u, w, d), NormKind::w1p());
    const double A = norm(u, NormKind::w2p()) + norm(w, NormKind::w1p());
    return lhs / (A * A + u0n);
  };
  double C = 0.0;
  for (int t = 0; t < 20; ++t) C = std::max(C, ratio());
  C *= 2.0;  // frozen
  for (int t = 0; t < 30; ++t) EXPECT_LE(ratio(), C);
}

TEST(Profiles, ParseRoundTrip) {
  for (Profile p : {Profile::zero, Profile::sine, Profile::sine_squared})
    EXPECT_EQ(parse_profile(profile_name(p)), p);
  EXPECT_THROW(parse_profile("cosine"), ConfigError);
}

TEST(FlowParams, ValidationNamesKey) {
  FlowParams P;
  P.mu = -1.0;
  try {
    P.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("physics.mu"), std::string::npos);
  }
}
