#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "slipflow/picard.hpp"

namespace slipflow {

// ---------------------------------------------------------------------------
// Energy identity

struct EnergyBalance {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  ///< |lhs - rhs| / max(1, |rhs|)
};

/// Both sides of
///   int 2mu D:D + nu (div u)^2 + int_G (f + n1/2)|u|^2 - gamma int w div u
///     = int F.u + int_G B_k (u.tau_k)
inline EnergyBalance energy_balance(const VectorField& u, const ScalarField& w, const VectorField& F,
                                    const SlipData& B, const FlowParams& params) {
  const Grid& g = u.grid();
  const ScalarField div = divergence(u);
  ScalarField dens(g);
  const auto& n = g.nodes();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        double dd = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            const double s = strain_at(u, a, b, i, j, k);
            dd += s * s;
          }
        const std::size_t idx = g.index(i, j, k);
        dens[idx] = 2.0 * params.mu * dd + params.nu * div[idx] * div[idx] - params.gamma() * w[idx] * div[idx];
      }
  ScalarField fu(g);
  for (std::size_t m = 0; m < fu.size(); ++m) fu[m] = F[0][m] * u[0][m] + F[1][m] * u[1][m] + F[2][m] * u[2][m];

  EnergyBalance e;
  e.lhs = integrate(dens);
  e.rhs = integrate(fu);
  for (Face f : kAllFaces) {
    const FaceLayout lay(g, f);
    const Vec3 nn = face_normal(f);
    const auto t = face_tangents(f);
    for (int q = 1; q < lay.nodes[1] - 1; ++q)
      for (int p = 1; p < lay.nodes[0] - 1; ++p) {
        const auto c = lay.ijk(g, p, q);
        const Vec3 ux = u.at(g.index(c[0], c[1], c[2]));
        const double wgt = lay.weight(p, q);
        e.lhs += wgt * (params.f + 0.5 * nn[0]) * dot(ux, ux);
        for (int kk = 0; kk < 2; ++kk) e.rhs += wgt * B[kk].face(f)[lay.index(p, q)] * dot(ux, t[kk]);
      }
  }
  e.residual = std::abs(e.lhs - e.rhs) / std::max(1.0, std::abs(e.rhs));
  return e;
}

inline double energy_identity_residual(const VectorField& u, const ScalarField& w, const VectorField& F,
                                       const SlipData& B, const FlowParams& params) {
  return energy_balance(u, w, F, B, params).residual;
}

// ---------------------------------------------------------------------------
// Vorticity traces

/// Residuals of the tangential vorticity relations on flat slip walls,
///   alpha.tau2 = -(f/m) u.tau1 + B1/m,   alpha.tau1 = (f/m) u.tau2 - B2/m,
/// with m = mu (`by_mu`) and m = nu (`by_nu`). Face L2 over face-interior nodes.
struct VorticityResidual {
  std::array<std::array<double, 2>, 6> by_mu{};
  std::array<std::array<double, 2>, 6> by_nu{};

  static double combine(const std::array<std::array<double, 2>, 6>& r, BoundarySet set) {
    double acc = 0.0;
    for (Face f : faces_of(set))
      for (double x : r[static_cast<int>(f)]) acc += x * x;
    return std::sqrt(acc);
  }
  double mu_total(BoundarySet set = BoundarySet::all) const { return combine(by_mu, set); }
  double nu_total(BoundarySet set = BoundarySet::all) const { return combine(by_nu, set); }
};

inline VorticityResidual vorticity_boundary_residual(const VectorField& u, const SlipData& B,
                                                     const FlowParams& params) {
  const Grid& g = u.grid();
  const VectorField alpha = curl(u);
  VorticityResidual out;
  for (Face f : kAllFaces) {
    const FaceLayout lay(g, f);
    const auto t = face_tangents(f);
    const int fi = static_cast<int>(f);
    for (int variant = 0; variant < 2; ++variant) {
      const double m = variant == 0 ? params.mu : params.nu;
      if (m == 0.0) continue;
      std::array<double, 2> acc{0.0, 0.0};
      for (int q = 1; q < lay.nodes[1] - 1; ++q)
        for (int p = 1; p < lay.nodes[0] - 1; ++p) {
          const auto c = lay.ijk(g, p, q);
          const std::size_t idx = g.index(c[0], c[1], c[2]);
          const Vec3 a = alpha.at(idx), ux = u.at(idx);
          const double b1 = B.b1.face(f)[lay.index(p, q)], b2 = B.b2.face(f)[lay.index(p, q)];
          const double r1 = dot(a, t[1]) - (-(params.f / m) * dot(ux, t[0]) + b1 / m);
          const double r2 = dot(a, t[0]) - ((params.f / m) * dot(ux, t[1]) - b2 / m);
          const double wgt = lay.weight(p, q);
          acc[0] += wgt * r1 * r1;
          acc[1] += wgt * r2 * r2;
        }
      auto& dst = variant == 0 ? out.by_mu[fi] : out.by_nu[fi];
      dst = {std::sqrt(acc[0]), std::sqrt(acc[1])};
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Helmholtz decomposition

struct HelmholtzReport {
  double div_A = 0.0;        ///< |div A|_{L2}
  double curl_mismatch = 0.0; ///< |curl A - curl u|_{L2} over interior nodes
  double normal_A = 0.0;     ///< |A.n|_{L2(boundary)}
  int iterations = 0;
};

struct HelmholtzResult {
  ScalarField pot;
  VectorField A;
  HelmholtzReport report;
};

/// Neumann Laplacian: three-point stencil with mirrored ghost values at the
/// box faces (zero normal derivative).
inline double neumann_laplacian_at(const ScalarField& s, int i, int j, int k) {
  const Grid& g = s.grid();
  const std::array<int, 3> c{i, j, k};
  double acc = 0.0;
  for (int a = 0; a < 3; ++a) {
    std::array<int, 3> m = c, p = c;
    --m[a];
    ++p[a];
    const double h2 = g.h(a) * g.h(a);
    const double s0 = s.at(i, j, k);
    if (c[a] == 0)
      acc += 2.0 * (s.at(p[0], p[1], p[2]) - s0) / h2;
    else if (c[a] == g.last(a))
      acc += 2.0 * (s.at(m[0], m[1], m[2]) - s0) / h2;
    else
      acc += (s.at(p[0], p[1], p[2]) - 2.0 * s0 + s.at(m[0], m[1], m[2])) / h2;
  }
  return acc;
}

/// u = grad pot + A with lap pot = div u and zero normal derivative of pot.
inline HelmholtzResult helmholtz_decompose(const VectorField& u, double tol = 1e-10) {
  const Grid& g = u.grid();
  ScalarField rhs = divergence(u);
  const double volume = integrate(ScalarField(g, 1.0));
  const double mean = integrate(rhs) / volume;
  for (std::size_t m = 0; m < rhs.size(); ++m) rhs[m] -= mean;

  const std::size_t N = g.size();
  ScalarField work(g);
  auto action = [&](const Vector& x, Vector& y) {
    std::copy(x.begin(), x.end(), work.values().begin());
    for (std::size_t m = 0; m < N; ++m) {
      const auto c = g.ijk(m);
      y[m] = -neumann_laplacian_at(work, c[0], c[1], c[2]);
    }
  };
  Vector diag(N);
  for (std::size_t m = 0; m < N; ++m) {
    double d = 0.0;
    for (int a = 0; a < 3; ++a) d += 2.0 / (g.h(a) * g.h(a));
    diag[m] = d;
  }
  Vector b(N);
  for (std::size_t m = 0; m < N; ++m) b[m] = -rhs[m];
  KrylovConfig kc;
  kc.tolerance = tol;
  kc.max_restarts = 20;
  const auto kr = krylov_solve(action, b, kc, diag);

  HelmholtzResult res;
  res.pot = ScalarField(g);
  std::copy(kr.x.begin(), kr.x.end(), res.pot.values().begin());
  const double pmean = integrate(res.pot) / volume;
  for (std::size_t m = 0; m < N; ++m) res.pot[m] -= pmean;
  res.A = u - gradient(res.pot);
  res.report.iterations = kr.iterations;
  res.report.div_A = norm(divergence(res.A), NormKind::lp(2.0));
  res.report.curl_mismatch = interior_l2(curl(res.A) - curl(u));
  FaceField an(g);
  for (Face f : kAllFaces) {
    const FaceLayout lay(g, f);
    const int a = face_axis(f);
    const double sgn = face_normal(f)[a];
    for (int q = 0; q < lay.nodes[1]; ++q)
      for (int p = 0; p < lay.nodes[0]; ++p) {
        const auto c = lay.ijk(g, p, q);
        an.face(f)[lay.index(p, q)] = sgn * res.A[a].at(c[0], c[1], c[2]);
      }
  }
  res.report.normal_A = norm(an, NormKind::boundary_lp(BoundarySet::all, 2.0));
  return res;
}

// ---------------------------------------------------------------------------
// Gradient structure of the effective transport forcing

/// Normalized interior curl of  F - d1 A + mu lap A + (nu+mu) grad div A - d1 grad pot,
/// which is a gradient field in the continuum.
inline double gradient_structure_residual(const VectorField& F, const ScalarField& pot, const VectorField& A,
                                          const FlowParams& params) {
  VectorField X = F;
  X -= partial(A, 0);
  X += params.mu * laplacian(A);
  X += (params.nu + params.mu) * grad_div(A);
  X -= partial(gradient(pot), 0);
  const double scale = interior_l2(X);
  if (scale == 0.0) return 0.0;
  return interior_l2(curl(X)) / scale;
}

// ---------------------------------------------------------------------------
// A priori ratio

inline double apriori_ratio(const VectorField& u, const ScalarField& w, const VectorField& F, const ScalarField& G,
                            const SlipData& B, const FaceField& w_in, double p = kDefaultP) {
  const double num = strong_measure(u, w, p);
  const double den = norm(F, NormKind::lp(p)) + norm(G, NormKind::w1p(p)) +
                     norm(B, NormKind::trace_gagliardo(BoundarySet::all, p)) +
                     norm(w_in, NormKind::boundary_w1p(BoundarySet::inflow, p));
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

// ---------------------------------------------------------------------------
// Reflection

/// Image of u under reflection in a plane x1 = const, placed on the same grid:
/// node i maps to n1 - i and the axial component changes sign.
inline VectorField reflect_x1(const VectorField& u) {
  const Grid& g = u.grid();
  VectorField r(g);
  const int n1 = g.last(0);
  const auto& n = g.nodes();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        r[0].at(i, j, k) = -u[0].at(n1 - i, j, k);
        r[1].at(i, j, k) = u[1].at(n1 - i, j, k);
        r[2].at(i, j, k) = u[2].at(n1 - i, j, k);
      }
  return r;
}

/// Slip functionals (n.u, n.2mu D(u).e2 + f u2, n.2mu D(u).e3 + f u3) at the
/// nodes of an axial face.
inline std::vector<std::array<double, 3>> slip_functionals(const VectorField& u, Face f, const FlowParams& params) {
  const Grid& g = u.grid();
  const FaceLayout lay(g, f);
  const Vec3 nn = face_normal(f);
  const Vec3 e2{0, 1, 0}, e3{0, 0, 1};
  std::vector<std::array<double, 3>> out;
  for (int q = 1; q < lay.nodes[1] - 1; ++q)
    for (int p = 1; p < lay.nodes[0] - 1; ++p) {
      const auto c = lay.ijk(g, p, q);
      const Vec3 ux = u.at(g.index(c[0], c[1], c[2]));
      out.push_back({dot(nn, ux), traction_at(u, nn, e2, params.mu, c[0], c[1], c[2]) + params.f * ux[1],
                     traction_at(u, nn, e3, params.mu, c[0], c[1], c[2]) + params.f * ux[2]});
    }
  return out;
}

/// Largest discrepancy between the inflow slip functionals of u and those of
/// its mirror image, whose image of the inflow plane is the outflow face.
inline double reflection_residual(const VectorField& u, const FlowParams& params) {
  const auto a = slip_functionals(u, Face::inflow, params);
  const auto b = slip_functionals(reflect_x1(u), Face::outflow, params);
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(a[n][c] - b[n][c]));
  return m;
}

// ---------------------------------------------------------------------------
// Report

struct DiagnosticEntry {
  std::string key;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string norm;   ///< norm or measure used
  std::string basis;  ///< continuum statement the entry checks
};

struct DiagnosticReport {
  GeometryConfig geometry;
  std::vector<DiagnosticEntry> entries;

  void add(std::string key, double value, double tol, std::string norm, std::string basis) {
    entries.push_back({std::move(key), value, tol, std::isfinite(value) && value <= tol, std::move(norm),
                       std::move(basis)});
  }

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }

  const DiagnosticEntry* find(const std::string& key) const {
    for (const auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
};

/// Screening thresholds of the report. Truncation-level entries are sized for
/// desk-scale grids at the default data amplitude; the exact identities
/// (curl mismatch, reflection, normal and inflow traces) sit at rounding level.
struct DiagnosticTolerances {
  double energy = 1e-3;
  double vorticity = 5e-2;
  double helmholtz_div = 5e-2;
  double helmholtz_curl = 1e-11;
  double gradient_structure = 5.0;  // normalized by |X|, so it carries 1/length
  double apriori = 100.0;
  double reflection = 1e-11;
  double momentum = 0.2;
  double continuity = 5e-2;
  double slip = 5e-2;
  double normal = 1e-12;
  double inflow = 1e-12;
};

/// Full diagnostics of a solution (u, w) of the perturbation problem.
inline DiagnosticReport run_diagnostics(const ProblemSetup& setup, const VectorField& u, const ScalarField& w,
                                        const DiagnosticTolerances& tol = {}) {
  const FlowParams& P = setup.params;
  const PerturbationData& D = setup.data;
  const double p = setup.solver.p;
  DiagnosticReport rep;
  rep.geometry = setup.grid.geometry();

  const VectorField F = compute_F(u, w, D, P);
  const ScalarField G = compute_G(u, w, D);

  rep.add("energy_identity", energy_identity_residual(u, w, F, D.B, P), tol.energy, "relative |LHS-RHS|",
          "weak-form energy identity of the momentum equation");
  const auto vort = vorticity_boundary_residual(u, D.B, P);
  rep.add("vorticity_mu", vort.mu_total(), tol.vorticity, "L2(boundary)", "slip-wall vorticity traces, viscosity mu");
  rep.add("vorticity_nu", vort.nu_total(), tol.vorticity, "L2(boundary)", "slip-wall vorticity traces, viscosity nu");
  rep.add("vorticity_mu_lateral", vort.mu_total(BoundarySet::lateral), tol.vorticity, "L2(lateral)",
          "slip-wall vorticity traces on the lateral wall");
  const auto hh = helmholtz_decompose(u);
  rep.add("helmholtz_div_A", hh.report.div_A, tol.helmholtz_div, "L2", "divergence-free part of the decomposition");
  rep.add("helmholtz_curl_mismatch", hh.report.curl_mismatch, tol.helmholtz_curl, "L2(interior)",
          "curl A = curl u");
  rep.add("helmholtz_normal_A", hh.report.normal_A, tol.helmholtz_div, "L2(boundary)", "A.n = 0");
  rep.add("gradient_structure", gradient_structure_residual(F, hh.pot, hh.A, P), tol.gradient_structure,
          "normalized L2(interior) of curl", "effective transport forcing is a gradient");
  rep.add("apriori_ratio", apriori_ratio(u, w, F, G, D.B, D.w_in, p), tol.apriori, "W2p+W1p over data norms",
          "a priori bound of the linear problem");
  rep.add("reflection", reflection_residual(u, P), tol.reflection, "max abs", "mirror invariance of the slip rows");
  const auto phys = reconstruct_physical(u, w, setup);
  rep.add("momentum_residual", phys.momentum_residual, tol.momentum, "L2(interior)", "momentum balance");
  rep.add("continuity_residual", phys.continuity_residual, tol.continuity, "L2(interior)", "mass balance");
  rep.add("slip_residual", phys.slip_residual, tol.slip, "L2(boundary)", "Navier slip condition");
  rep.add("normal_residual", phys.normal_residual, tol.normal, "L2(boundary)", "impermeability n.v = d");
  rep.add("inflow_residual", phys.inflow_residual, tol.inflow, "L2(inflow)", "inflow density");
  return rep;
}

}  // namespace slipflow
