#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "slipflow/norms.hpp"

namespace slipflow {

// ---------------------------------------------------------------------------
// Pressure closure

/// Barotropic closure pi(rho). Evaluation is restricted to the density band (0,2).
struct PressureLaw {
  enum class Kind { power, linear };

  Kind kind = Kind::power;
  double kappa = 2.0;  ///< exponent of the power law
  double K = 1.0;      ///< slope of the linear law

  static PressureLaw power(double kappa) { return {Kind::power, kappa, 1.0}; }
  static PressureLaw linear(double K) { return {Kind::linear, 2.0, K}; }

  void validate() const {
    if (kind == Kind::power && !(kappa >= 1.0 && std::isfinite(kappa)))
      throw ConfigError("physics.pressure.kappa must be >= 1");
    if (kind == Kind::linear && !(K > 0.0 && std::isfinite(K))) throw ConfigError("physics.pressure.K must be > 0");
  }

  /// Derivative of order 0..3 at rho, without the band check.
  double raw(double rho, int order) const {
    if (kind == Kind::linear) return order == 0 ? K * rho : (order == 1 ? K : 0.0);
    double coef = 1.0;
    for (int m = 0; m < order; ++m) coef *= kappa - m;
    if (coef == 0.0) return 0.0;
    return coef * std::pow(rho, kappa - order);
  }

  double gamma() const { return raw(1.0, 1); }

  /// Largest |pi''| on the closed band, used by Lipschitz bounds.
  double max_second_on_band() const {
    if (kind == Kind::linear) return 0.0;
    if (kappa >= 2.0) return std::abs(raw(2.0, 2));
    return std::abs(raw(1e-3, 2));  // kappa < 2: pi'' blows up at 0, report a finite representative
  }
};

inline bool in_density_band(double rho) { return rho > 0.0 && rho < 2.0; }

inline double pressure_eval(const PressureLaw& law, double rho, int order) {
  if (order < 0 || order > 3) throw ConfigError("pressure derivative order must be 0..3");
  if (!in_density_band(rho)) {
    std::ostringstream os;
    os << "density " << rho << " outside admissible band (0,2)";
    throw DomainError(os.str());
  }
  return law.raw(rho, order);
}

/// pi'(w+1) - pi'(1) at every node.
inline ScalarField delta_pi_prime(const PressureLaw& law, const ScalarField& w) {
  const double g = law.gamma();
  ScalarField out(w.grid());
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double rho = 1.0 + w[n];
    if (!in_density_band(rho)) {
      const auto c = w.grid().ijk(n);
      std::ostringstream os;
      os << "density " << rho << " outside admissible band (0,2) at node (" << c[0] << "," << c[1] << "," << c[2]
         << ")";
      throw DomainError(os.str());
    }
    out[n] = law.raw(rho, 1) - g;
  }
  return out;
}

struct FlowParams {
  double mu = 1.0;
  double nu = 1.0;
  double f = 10.0;
  PressureLaw pressure{};

  double gamma() const { return pressure.gamma(); }
  double gamma_bar() const { return gamma() / (nu + 2.0 * mu); }

  void validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("physics.mu must be > 0");
    if (!std::isfinite(nu) || !(mu + 2.0 * nu > 0.0)) throw ConfigError("physics.nu: mu + 2 nu must be > 0");
    if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("physics.f must be > 0");
    pressure.validate();
  }
};

// ---------------------------------------------------------------------------
// Boundary data

enum class Profile { zero, sine, sine_squared };

inline Profile parse_profile(const std::string& s) {
  if (s == "zero") return Profile::zero;
  if (s == "sine") return Profile::sine;
  if (s == "sine_squared") return Profile::sine_squared;
  throw ConfigError("unknown profile '" + s + "' (expected zero, sine or sine_squared)");
}

inline const char* profile_name(Profile p) {
  switch (p) {
    case Profile::zero: return "zero";
    case Profile::sine: return "sine";
    case Profile::sine_squared: return "sine_squared";
  }
  return "zero";
}

/// Closed-form boundary data, all proportional to epsilon. Sine profiles are
/// products sin(pi s/S) sin(pi t/T) over the two in-plane coordinates of a
/// face and vanish on its rim; the squared variant also has zero slope there.
/// Normal traces default to the squared bump: a nonzero tangential slope of
/// d at the rim of the inflow face contradicts the lateral slip condition
/// along the shared edge and makes the solution singular there.
struct BoundaryDataSpec {
  double epsilon = 1e-2;
  Profile normal_inflow = Profile::sine_squared;   ///< d - n1 on the inflow face
  Profile normal_outflow = Profile::sine_squared;  ///< d - n1 on the outflow face
  Profile slip_lateral = Profile::sine;    ///< b_i - f tau_i^(1) on the lateral wall
  Profile slip_inflow = Profile::zero;
  Profile slip_outflow = Profile::zero;
  Profile density_inflow = Profile::sine;  ///< rho_in - 1

  /// Amplitude of the second slip component relative to the first.
  static constexpr double kSecondSlipScale = -0.5;

  void validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("data.epsilon must be >= 0");
  }
};

/// Unit sine bump on face f at point x (rim-vanishing).
inline double face_bump(const Grid& g, Face f, const Vec3& x) {
  const auto ax = face_plane_axes(f);
  const auto& ext = g.extent();
  return std::sin(std::numbers::pi * x[ax[0]] / ext[ax[0]]) * std::sin(std::numbers::pi * x[ax[1]] / ext[ax[1]]);
}

inline double profile_value(Profile p, const Grid& g, Face f, const Vec3& x) {
  switch (p) {
    case Profile::zero: return 0.0;
    case Profile::sine: return face_bump(g, f, x);
    case Profile::sine_squared: {
      const double s = face_bump(g, f, x);
      return s * s;
    }
  }
  return 0.0;
}

/// Prescribed normal trace d - n^(1) on face f.
inline double normal_trace_data(const BoundaryDataSpec& s, const Grid& g, Face f, const Vec3& x) {
  switch (f) {
    case Face::inflow: return s.epsilon * profile_value(s.normal_inflow, g, f, x);
    case Face::outflow: return s.epsilon * profile_value(s.normal_outflow, g, f, x);
    default: return 0.0;
  }
}

/// Slip data b_k - f tau_k^(1), k = 0 or 1.
inline double slip_data(const BoundaryDataSpec& s, const Grid& g, Face f, const Vec3& x, int k) {
  const Profile p = f == Face::inflow ? s.slip_inflow : (f == Face::outflow ? s.slip_outflow : s.slip_lateral);
  const double scale = k == 0 ? 1.0 : BoundaryDataSpec::kSecondSlipScale;
  return s.epsilon * scale * profile_value(p, g, f, x);
}

inline double inflow_density_data(const BoundaryDataSpec& s, const Grid& g, const Vec3& x) {
  return s.epsilon * profile_value(s.density_inflow, g, Face::inflow, x);
}

/// C^2 cutoff: 1 at t = 0, 0 for t >= 1, with vanishing first and second
/// derivatives at both ends.
inline double cutoff_ramp(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double t3 = t * t * t;
  return 1.0 - t3 * (10.0 - 15.0 * t + 6.0 * t * t);
}

inline double ramp_width(const Grid& g) {
  const auto& e = g.extent();
  return std::min({e[0], e[1], e[2]}) / 4.0;
}

/// Lifting u0 of the normal boundary data: each face profile is carried into
/// the domain along the inward normal and cut off after ramp_width(g).
inline VectorField extend_normal_trace(const Grid& g, const BoundaryDataSpec& spec) {
  spec.validate();
  const double delta = ramp_width(g);
  VectorField u0(g);
  const auto& n = g.nodes();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const Vec3 x = g.point(i, j, k);
        const std::size_t idx = g.index(i, j, k);
        for (Face f : kAllFaces) {
          const int a = face_axis(f);
          const double dist = face_is_high(f) ? g.extent()[a] - x[a] : x[a];
          const double r = cutoff_ramp(dist / delta);
          if (r == 0.0) continue;
          Vec3 on_face = x;
          on_face[a] = face_is_high(f) ? g.extent()[a] : 0.0;
          const double d = normal_trace_data(spec, g, f, on_face);
          u0[a][idx] += face_normal(f)[a] * d * r;
        }
      }
  return u0;
}

struct PerturbationData {
  VectorField u0;
  SlipData B;
  FaceField w_in;  ///< only the inflow face is meaningful
  double b_measure = 0.0;
};

/// b = |u0|_{W2p} + |B|_{trace} + |w_in|_{W1p(inflow)}.
inline double b_measure(const VectorField& u0, const SlipData& B, const FaceField& w_in, double p) {
  return norm(u0, NormKind::w2p(p)) + norm(B, NormKind::trace_gagliardo(BoundarySet::all, p)) +
         norm(w_in, NormKind::boundary_w1p(BoundarySet::inflow, p));
}

/// Effective slip data B_k = (b_k - f tau_k^(1)) - n.2mu D(u0).tau_k - f u0.tau_k on
/// every face node, with D(u0) from one-sided boundary differences.
inline SlipData slip_forcing(const Grid& g, const BoundaryDataSpec& spec, const FlowParams& params,
                             const VectorField& u0) {
  SlipData B(g);
  for (Face f : kAllFaces) {
    const FaceLayout lay(g, f);
    const Vec3 n = face_normal(f);
    const auto t = face_tangents(f);
    for (int q = 0; q < lay.nodes[1]; ++q)
      for (int p = 0; p < lay.nodes[0]; ++p) {
        const auto c = lay.ijk(g, p, q);
        const Vec3 x = g.point(c[0], c[1], c[2]);
        const std::size_t idx = g.index(c[0], c[1], c[2]);
        const Vec3 u0x = u0.at(idx);
        for (int kk = 0; kk < 2; ++kk)
          B[kk].face(f)[lay.index(p, q)] = slip_data(spec, g, f, x, kk) -
                                          traction_at(u0, n, t[kk], params.mu, c[0], c[1], c[2]) -
                                          params.f * dot(u0x, t[kk]);
      }
  }
  return B;
}

inline PerturbationData assemble_perturbation_data(const Grid& g, const BoundaryDataSpec& spec,
                                                   const FlowParams& params, double p = kDefaultP) {
  params.validate();
  PerturbationData d;
  d.u0 = extend_normal_trace(g, spec);
  d.B = slip_forcing(g, spec, params, d.u0);
  d.w_in = FaceField(g);
  {
    const FaceLayout lay(g, Face::inflow);
    auto& face = d.w_in.face(Face::inflow);
    for (int q = 0; q < lay.nodes[1]; ++q)
      for (int pp = 0; pp < lay.nodes[0]; ++pp) {
        const auto c = lay.ijk(g, pp, q);
        face[lay.index(pp, q)] = inflow_density_data(spec, g, g.point(c[0], c[1], c[2]));
      }
  }
  d.b_measure = b_measure(d.u0, d.B, d.w_in, p);
  return d;
}

/// Zero data on g (the unperturbed flow).
inline PerturbationData zero_perturbation(const Grid& g) {
  PerturbationData d;
  d.u0 = VectorField(g);
  d.B = SlipData(g);
  d.w_in = FaceField(g);
  return d;
}

// ---------------------------------------------------------------------------
// Nonlinear forcings

/// Momentum forcing of the perturbation system around v = (1,0,0), rho = 1:
///   F = -w (u + e1 + u0).grad(u + u0) - u0.grad u - u.grad u0 - u.grad u
///       - d1 u0 + mu lap u0 + (nu+mu) grad div u0 - u0.grad u0 - dpi'(w) grad w
inline VectorField compute_F(const VectorField& u, const ScalarField& w, const PerturbationData& data,
                             const FlowParams& params) {
  const Grid& g = u.grid();
  const VectorField& u0 = data.u0;
  const ScalarField dpi = delta_pi_prime(params.pressure, w);

  VectorField carrier = u + u0;
  carrier[0] += ScalarField(g, 1.0);
  const VectorField uu0 = u + u0;

  VectorField F = -(w * advect(carrier, uu0));
  F -= advect(u0, u);
  F -= advect(u, u0);
  F -= advect(u, u);
  F -= partial(u0, 0);
  F += params.mu * laplacian(u0);
  F += (params.nu + params.mu) * grad_div(u0);
  F -= advect(u0, u0);
  F -= dpi * gradient(w);
  return F;
}

/// G = -(w + 1) div u0 - w div u
inline ScalarField compute_G(const VectorField& u, const ScalarField& w, const PerturbationData& data) {
  const ScalarField div_u0 = divergence(data.u0);
  const ScalarField div_u = divergence(u);
  ScalarField G(u.grid());
  for (std::size_t n = 0; n < G.size(); ++n) G[n] = -(w[n] + 1.0) * div_u0[n] - w[n] * div_u[n];
  return G;
}

}  // namespace slipflow
