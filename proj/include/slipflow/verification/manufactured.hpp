#pragma once

#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "slipflow/lame.hpp"
#include "slipflow/verification/jet.hpp"

namespace slipflow::verification {

/// Smooth exact fields for the linear step. The velocity satisfies n.u = 0 on
/// every face and the convecting field is tangential to the lateral wall.
struct ManufacturedCase {
  double amplitude_u = 1.0;
  double amplitude_w = 1.0;
  double amplitude_c = 0.1;

  template <class T>
  std::array<T, 3> velocity(const std::array<T, 3>& x, const Vec3& e) const {
    const double pi = std::numbers::pi;
    const T a = sin(x[0] * (pi / e[0])) * cos(x[1] * (pi / e[1])) * (x[2] + 1.0);
    const T b = sin(x[1] * (pi / e[1])) * (x[0] * (1.0 / e[0]) + 0.5) * cos(x[2] * (pi / e[2]));
    const T c = sin(x[2] * (pi / e[2])) * cos(x[0] * (pi / e[0])) * (x[1] * 0.5 + 1.0);
    return {a * amplitude_u, b * amplitude_u, c * amplitude_u};
  }

  template <class T>
  T density(const std::array<T, 3>& x, const Vec3& e) const {
    const double pi = std::numbers::pi;
    return (exp(x[0] * (-1.0 / e[0])) * cos(x[1] * (pi / e[1])) * cos(x[2] * (pi / e[2])) +
            sin(x[0] * (pi / e[0])) * 0.3) *
           amplitude_w;
  }

  /// Convecting perturbation (u_bar + u0); zero normal component on the lateral wall.
  template <class T>
  std::array<T, 3> convect(const std::array<T, 3>& x, const Vec3& e) const {
    const double pi = std::numbers::pi;
    const T a = cos(x[0] * (pi / e[0])) * sin(x[1] * (pi / e[1])) * sin(x[2] * (pi / e[2]));
    const T b = sin(x[1] * (pi / e[1])) * sin(x[0] * (pi / e[0])) * 0.5;
    const T c = sin(x[2] * (pi / e[2])) * sin(x[0] * (2.0 * pi / e[0])) * 0.5;
    return {a * amplitude_c, b * amplitude_c, c * amplitude_c};
  }
};

struct ManufacturedData {
  VectorField u_exact;
  ScalarField w_exact;
  VectorField convect;
  VectorField F;
  ScalarField G;
  SlipData B;
  FaceField w_in;
};

inline std::array<Jet, 3> jet_point(const Vec3& x) {
  return {Jet::variable(x[0], 0), Jet::variable(x[1], 1), Jet::variable(x[2], 2)};
}

/// Exact forcings of the linear step for the manufactured pair:
///   F = d1 u - mu lap u - (nu+mu) grad div u + gamma grad w,
///   G = div u + u~.grad w,  B_k = n.2mu D(u).tau_k + f u.tau_k,  w_in = w|inflow.
inline ManufacturedData manufacture(const Grid& g, const FlowParams& P, const ManufacturedCase& mc = {}) {
  const Vec3 e = g.extent();
  const double gamma = P.gamma();
  ManufacturedData d;
  d.u_exact = VectorField::sample(g, [&](const Vec3& x) { return mc.velocity<double>(x, e); });
  d.w_exact = ScalarField::sample(g, [&](const Vec3& x) { return mc.density<double>(x, e); });
  d.convect = VectorField::sample(g, [&](const Vec3& x) { return mc.convect<double>(x, e); });
  d.F = VectorField::sample(g, [&](const Vec3& x) {
    const auto X = jet_point(x);
    const auto u = mc.velocity(X, e);
    const Jet w = mc.density(X, e);
    Vec3 out{};
    for (int c = 0; c < 3; ++c) {
      double lap = 0.0, gd = 0.0;
      for (int b = 0; b < 3; ++b) {
        lap += u[c].h[b][b];
        gd += u[b].h[b][c];
      }
      out[c] = u[c].d[0] - P.mu * lap - (P.nu + P.mu) * gd + gamma * w.d[c];
    }
    return out;
  });
  d.G = ScalarField::sample(g, [&](const Vec3& x) {
    const auto X = jet_point(x);
    const auto u = mc.velocity(X, e);
    const Jet w = mc.density(X, e);
    const auto c = mc.convect<double>(x, e);
    const double div = u[0].d[0] + u[1].d[1] + u[2].d[2];
    return div + (1.0 + c[0]) * w.d[0] + c[1] * w.d[1] + c[2] * w.d[2];
  });
  d.B = SlipData(g);
  for (Face f : kAllFaces) {
    const FaceLayout lay(g, f);
    const Vec3 n = face_normal(f);
    const auto t = face_tangents(f);
    for (int q = 0; q < lay.nodes[1]; ++q)
      for (int p = 0; p < lay.nodes[0]; ++p) {
        const auto ijk = lay.ijk(g, p, q);
        const auto u = mc.velocity(jet_point(g.point(ijk[0], ijk[1], ijk[2])), e);
        for (int k = 0; k < 2; ++k) {
          double acc = 0.0;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) acc += n[a] * t[k][b] * P.mu * (u[b].d[a] + u[a].d[b]);
          for (int b = 0; b < 3; ++b) acc += P.f * u[b].v * t[k][b];
          d.B[k].face(f)[lay.index(p, q)] = acc;
        }
      }
  }
  d.w_in = trace(d.w_exact);
  return d;
}

struct StudyLevel {
  int n1 = 0;
  double err_u_l2 = 0.0;
  double err_u_max = 0.0;
  double err_w_l2 = 0.0;
  double err_w_max = 0.0;
  int iterations = 0;
  double seconds = 0.0;
};

struct StudyResult {
  std::vector<StudyLevel> levels;
  std::vector<double> rate_u;  ///< observed orders between consecutive levels (L2)
  std::vector<double> rate_w;

  double min_rate_u() const { return rate_u.empty() ? 0.0 : *std::min_element(rate_u.begin(), rate_u.end()); }
  double min_rate_w() const { return rate_w.empty() ? 0.0 : *std::min_element(rate_w.begin(), rate_w.end()); }
};

inline double observed_order(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return 0.0;
  return std::log2(coarse / fine);
}

/// Solves the manufactured linear step on a sequence of grids refined in all
/// three directions together (n2 and n3 follow n1 in the ratio of `base`).
inline StudyResult manufactured_study(const GeometryConfig& base, const FlowParams& P, LinearMode mode,
                                      const std::vector<int>& n1_levels, const ManufacturedCase& mc = {},
                                      const LinearSolveConfig& cfg = {}) {
  StudyResult res;
  for (int n1 : n1_levels) {
    GeometryConfig geo = base;
    geo.n2 = std::max(kMinCells, base.n2 * n1 / base.n1);
    geo.n3 = std::max(kMinCells, base.n3 * n1 / base.n1);
    geo.n1 = n1;
    const Grid g(geo);
    const auto t0 = std::chrono::steady_clock::now();
    const auto md = manufacture(g, P, mc);
    const LameOperator op(g, P);
    const auto step = solve_linear_step(op, md.convect, md.F, md.G, md.B, md.w_in, mode, cfg);
    StudyLevel lv;
    lv.n1 = n1;
    lv.err_u_l2 = norm(step.u - md.u_exact, NormKind::lp(2.0));
    lv.err_u_max = (step.u - md.u_exact).max_abs();
    lv.err_w_l2 = norm(step.w - md.w_exact, NormKind::lp(2.0));
    lv.err_w_max = (step.w - md.w_exact).max_abs();
    lv.iterations = step.krylov_iterations;
    lv.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.levels.push_back(lv);
  }
  for (std::size_t l = 1; l < res.levels.size(); ++l) {
    res.rate_u.push_back(observed_order(res.levels[l - 1].err_u_l2, res.levels[l].err_u_l2));
    res.rate_w.push_back(observed_order(res.levels[l - 1].err_w_l2, res.levels[l].err_w_l2));
  }
  return res;
}

}  // namespace slipflow::verification
