#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "slipflow/lame.hpp"

namespace slipflow {

struct SolverConfig {
  LinearMode mode = LinearMode::monolithic;
  double outer_tol = 1e-9;  ///< on |u^{n+1}-u^n|_{H1} + |w^{n+1}-w^n|_{LinfL2}
  int max_outer = 50;
  double relaxation = 1.0;  ///< under-relaxation factor in (0,1]
  double linear_tol = 1e-10;
  double inner_tol = 1e-11;
  int max_sweeps = 200;
  double p = kDefaultP;
  std::uint64_t seed = 20240611;
  double A_limit = 1.0;  ///< divergence threshold on A_n

  void validate() const {
    if (!(outer_tol > 0.0)) throw ConfigError("solver.outer_tol must be > 0");
    if (max_outer < 1) throw ConfigError("solver.max_outer must be >= 1");
    if (!(relaxation > 0.0 && relaxation <= 1.0)) throw ConfigError("solver.relaxation must lie in (0,1]");
    if (!(linear_tol > 0.0 && linear_tol < 1.0)) throw ConfigError("solver.linear_tol must lie in (0,1)");
    if (!(inner_tol > 0.0)) throw ConfigError("solver.inner_tol must be > 0");
    if (max_sweeps < 1) throw ConfigError("solver.max_sweeps must be >= 1");
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("solver.p must be finite and >= 1");
  }

  LinearSolveConfig linear() const {
    LinearSolveConfig c;
    c.krylov.tolerance = linear_tol;
    c.inner_tol = inner_tol;
    c.max_sweeps = max_sweeps;
    return c;
  }
};

struct ProblemSetup {
  Grid grid;
  FlowParams params;
  BoundaryDataSpec spec;
  PerturbationData data;
  SolverConfig solver;
};

inline ProblemSetup make_setup(const GeometryConfig& geo, const FlowParams& params, const BoundaryDataSpec& spec,
                               const SolverConfig& solver = {}) {
  solver.validate();
  spec.validate();
  params.validate();
  ProblemSetup s{build_grid(geo), params, spec, {}, solver};
  s.data = assemble_perturbation_data(s.grid, spec, params, solver.p);
  if (!std::isfinite(s.data.b_measure)) throw ConfigError("boundary data measure is not finite");
  return s;
}

struct IterationRecord {
  int n = 0;
  double A = 0.0;      ///< |u^n|_{W2p} + |w^n|_{W1p}
  double d = 0.0;      ///< |u^{n+1}-u^n|_{H1} + |w^{n+1}-w^n|_{LinfL2}
  double r = 0.0;      ///< d_n / d_{n-1}, 0 for n = 0
  double F_lp = 0.0;   ///< |F(u^n,w^n)|_{Lp}
  double G_w1p = 0.0;  ///< |G(u^n,w^n)|_{W1p}
};

enum class Verdict { converged, max_iter, diverged };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::max_iter: return "max_iter";
    case Verdict::diverged: return "diverged";
  }
  return "unknown";
}

struct SolutionBundle {
  VectorField u;
  ScalarField w;
  VectorField v;    ///< u + (1,0,0) + u0
  ScalarField rho;  ///< w + 1
  std::vector<IterationRecord> history;
  Verdict verdict = Verdict::max_iter;
  std::string reason;
  double final_A = 0.0;
  LinearStepResult last_step;
};

inline double strong_measure(const VectorField& u, const ScalarField& w, double p) {
  return norm(u, NormKind::w2p(p)) + norm(w, NormKind::w1p(p));
}

inline double cauchy_distance(const VectorField& du, const ScalarField& dw) {
  return norm(du, NormKind::h1()) + norm(dw, NormKind::linf_l2());
}

/// Successive approximations: each step solves the linear system with
/// forcings F(u^n,w^n), G(u^n,w^n) and convecting field u^n + u0.
inline SolutionBundle picard_solve(const ProblemSetup& setup, const VectorField& u_start, const ScalarField& w_start) {
  const Grid& g = setup.grid;
  const SolverConfig& sc = setup.solver;
  const LameOperator op(g, setup.params);
  const LinearSolveConfig lc = sc.linear();

  SolutionBundle out;
  VectorField u = u_start;
  ScalarField w = w_start;
  std::optional<LinearStepResult> warm;
  double d_prev = 0.0;

  auto finish = [&](Verdict v, std::string reason) {
    out.verdict = v;
    out.reason = std::move(reason);
    out.u = u;
    out.w = w;
    out.final_A = strong_measure(u, w, sc.p);
    out.v = u + setup.data.u0;
    out.v[0] += ScalarField(g, 1.0);
    out.rho = w;
    out.rho += ScalarField(g, 1.0);
    return out;
  };

  for (int n = 0; n < sc.max_outer; ++n) {
    IterationRecord rec;
    rec.n = n;
    rec.A = strong_measure(u, w, sc.p);
    if (!std::isfinite(rec.A) || rec.A > sc.A_limit) return finish(Verdict::diverged, "A_n exceeds smallness limit");

    LinearStepResult step;
    try {
      const VectorField F = compute_F(u, w, setup.data, setup.params);
      const ScalarField G = compute_G(u, w, setup.data);
      rec.F_lp = norm(F, NormKind::lp(sc.p));
      rec.G_w1p = norm(G, NormKind::w1p(sc.p));
      step = solve_linear_step(op, u + setup.data.u0, F, G, setup.data.B, setup.data.w_in, sc.mode, lc,
                               warm ? &*warm : nullptr);
    } catch (const Error& e) {
      out.history.push_back(rec);
      return finish(Verdict::diverged, e.what());
    }

    VectorField u_next = step.u;
    ScalarField w_next = step.w;
    if (sc.relaxation < 1.0) {
      u_next = sc.relaxation * u_next + (1.0 - sc.relaxation) * u;
      w_next = sc.relaxation * w_next + (1.0 - sc.relaxation) * w;
    }
    rec.d = cauchy_distance(u_next - u, w_next - w);
    rec.r = (n == 0 || d_prev == 0.0) ? 0.0 : rec.d / d_prev;
    d_prev = rec.d;
    out.history.push_back(rec);
    out.last_step = step;
    warm = std::move(step);
    u = std::move(u_next);
    w = std::move(w_next);

    for (std::size_t m = 0; m < w.size(); ++m)
      if (!in_density_band(1.0 + w[m])) return finish(Verdict::diverged, "density left the admissible band (0,2)");
    if (!std::isfinite(rec.d)) return finish(Verdict::diverged, "non-finite iterate");
    if (rec.d <= sc.outer_tol) return finish(Verdict::converged, "");
  }
  return finish(Verdict::max_iter, "outer iteration cap reached");
}

inline SolutionBundle picard_solve(const ProblemSetup& setup) {
  return picard_solve(setup, VectorField(setup.grid), ScalarField(setup.grid));
}

// ---------------------------------------------------------------------------
// Convergence metrics

struct ConvergenceReport {
  double max_A = 0.0;
  double C_b = 0.0;  ///< fitted from the first step: A_1 = A_0^2 + C_b b
  std::vector<double> slack;  ///< s_n = A_{n+1} - (A_n^2 + C_b b)
  std::vector<double> ratios;
  double rate = 0.0;  ///< exp of the least-squares slope of log d_n, n >= 1
};

inline ConvergenceReport convergence_metrics(const std::vector<IterationRecord>& h, double b_measure) {
  if (h.size() < 2) throw ConfigError("convergence metrics need at least two iterations");
  ConvergenceReport rep;
  for (const auto& r : h) {
    rep.max_A = std::max(rep.max_A, r.A);
    rep.ratios.push_back(r.r);
  }
  rep.C_b = b_measure > 0.0 ? (h[1].A - h[0].A * h[0].A) / b_measure : 0.0;
  for (std::size_t n = 0; n + 1 < h.size(); ++n)
    rep.slack.push_back(h[n + 1].A - (h[n].A * h[n].A + rep.C_b * b_measure));

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t n = 1; n < h.size(); ++n) {
    if (!(h[n].d > 0.0)) continue;
    const double x = static_cast<double>(n), y = std::log(h[n].d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.rate = std::exp(slope);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Uniqueness

/// Smooth seeded start (u, w) vanishing on the boundary, scaled so that
/// |u|_{W2p} + |w|_{W1p} = target.
inline std::pair<VectorField, ScalarField> random_start(const Grid& g, std::uint64_t seed, double target,
                                                        double p = kDefaultP) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 2);
  const auto& e = g.extent();
  auto bump = [&]() {
    const int m1 = mode(rng), m2 = mode(rng), m3 = mode(rng);
    const double a = amp(rng);
    return [=](const Vec3& x) {
      return a * std::sin(m1 * std::numbers::pi * x[0] / e[0]) * std::sin(m2 * std::numbers::pi * x[1] / e[1]) *
             std::sin(m3 * std::numbers::pi * x[2] / e[2]);
    };
  };
  VectorField u(g);
  for (int c = 0; c < 3; ++c) u[c] = ScalarField::sample(g, bump());
  ScalarField w = ScalarField::sample(g, bump());
  const double A = strong_measure(u, w, p);
  if (A > 0.0) {
    u *= target / A;
    w *= target / A;
  }
  return {u, w};
}

/// |u1 - u2|_{H1} + |w1 - w2|_{L2} between the limits of two Picard runs.
inline double two_start_uniqueness(const ProblemSetup& setup, const std::pair<VectorField, ScalarField>& s1,
                                   const std::pair<VectorField, ScalarField>& s2) {
  const auto a = picard_solve(setup, s1.first, s1.second);
  if (a.verdict != Verdict::converged) throw ConvergenceError("first uniqueness run did not converge", 0.0, 0);
  const auto b = picard_solve(setup, s2.first, s2.second);
  if (b.verdict != Verdict::converged) throw ConvergenceError("second uniqueness run did not converge", 0.0, 0);
  return norm(a.u - b.u, NormKind::h1()) + norm(a.w - b.w, NormKind::lp(2.0));
}

// ---------------------------------------------------------------------------
// Physical reconstruction

struct PhysicalSolution {
  VectorField v;
  ScalarField rho;
  double momentum_residual = 0.0;    ///< interior L2 of rho v.grad v - mu lap v - (mu+nu) grad div v + grad pi
  double continuity_residual = 0.0;  ///< interior L2 of div(rho v)
  double slip_residual = 0.0;        ///< L2 over faces of n.T.tau_k + f v.tau_k - b_k
  double normal_residual = 0.0;      ///< L2 over faces of n.v - d
  double inflow_residual = 0.0;      ///< L2 over the inflow face of rho - rho_in
};

inline PhysicalSolution reconstruct_physical(const VectorField& u, const ScalarField& w, const ProblemSetup& setup) {
  const Grid& g = u.grid();
  const FlowParams& P = setup.params;
  PhysicalSolution s;
  s.v = u + setup.data.u0;
  s.v[0] += ScalarField(g, 1.0);
  s.rho = w;
  s.rho += ScalarField(g, 1.0);
  for (std::size_t n = 0; n < s.rho.size(); ++n)
    if (!in_density_band(s.rho[n])) throw DomainError("density outside admissible band (0,2)");

  ScalarField pi(g);
  for (std::size_t n = 0; n < pi.size(); ++n) pi[n] = P.pressure.raw(s.rho[n], 0);
  VectorField mom = s.rho * advect(s.v, s.v);
  mom -= P.mu * laplacian(s.v);
  mom -= (P.mu + P.nu) * grad_div(s.v);
  mom += gradient(pi);
  s.momentum_residual = interior_l2(mom);
  s.continuity_residual = interior_l2(divergence(s.rho * s.v));

  FaceField slip(g), normal(g), inflow(g);
  for (Face f : kAllFaces) {
    const FaceLayout lay(g, f);
    const Vec3 nn = face_normal(f);
    const auto t = face_tangents(f);
    for (int q = 0; q < lay.nodes[1]; ++q)
      for (int p = 0; p < lay.nodes[0]; ++p) {
        const auto c = lay.ijk(g, p, q);
        const Vec3 x = g.point(c[0], c[1], c[2]);
        const Vec3 vx = s.v.at(g.index(c[0], c[1], c[2]));
        double sq = 0.0;
        for (int k = 0; k < 2; ++k) {
          const double b = slip_data(setup.spec, g, f, x, k) + P.f * t[k][0];
          const double r = traction_at(s.v, nn, t[k], P.mu, c[0], c[1], c[2]) + P.f * dot(vx, t[k]) - b;
          sq += r * r;
        }
        slip.face(f)[lay.index(p, q)] = std::sqrt(sq);
        normal.face(f)[lay.index(p, q)] = dot(nn, vx) - (normal_trace_data(setup.spec, g, f, x) + nn[0]);
        if (f == Face::inflow)
          inflow.face(f)[lay.index(p, q)] =
              s.rho.at(c[0], c[1], c[2]) - (1.0 + inflow_density_data(setup.spec, g, x));
      }
  }
  s.slip_residual = norm(slip, NormKind::boundary_lp(BoundarySet::all, 2.0));
  s.normal_residual = norm(normal, NormKind::boundary_lp(BoundarySet::all, 2.0));
  s.inflow_residual = norm(inflow, NormKind::boundary_lp(BoundarySet::inflow, 2.0));
  return s;
}

}  // namespace slipflow
