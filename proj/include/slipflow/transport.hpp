#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "slipflow/norms.hpp"

namespace slipflow {

/// Transport velocity u~ = (1 + c1, c2, c3) for a convecting perturbation c.
class TransportField {
 public:
  TransportField() = default;

  /// Wraps a full transport velocity. Throws unless u~1 >= 1/2 everywhere.
  explicit TransportField(VectorField ut) : ut_(std::move(ut)) {
    min_u1_ = 1e300;
    for (std::size_t n = 0; n < ut_.size(); ++n) {
      min_u1_ = std::min(min_u1_, ut_[0][n]);
      sup_dev1_ = std::max(sup_dev1_, std::abs(ut_[0][n] - 1.0));
      sup_u2_ = std::max(sup_u2_, std::abs(ut_[1][n]));
      sup_u3_ = std::max(sup_u3_, std::abs(ut_[2][n]));
    }
    if (!ut_.all_finite()) throw TransportError("transport velocity is not finite");
    if (!(min_u1_ >= 0.5)) {
      std::ostringstream os;
      os << "transport velocity loses forward progress: min u1 = " << min_u1_;
      throw TransportError(os.str());
    }
  }

  /// u~ from the convecting field (u_bar + u0).
  static TransportField from_convect(const VectorField& c) {
    VectorField ut = c;
    ut[0] += ScalarField(c.grid(), 1.0);
    return TransportField(std::move(ut));
  }

  /// Constant transport velocity on g.
  static TransportField constant(const Grid& g, const Vec3& a) {
    return TransportField(VectorField::sample(g, [&](const Vec3&) { return a; }));
  }

  const VectorField& velocity() const { return ut_; }
  const Grid& grid() const { return ut_.grid(); }
  double min_u1() const { return min_u1_; }
  double sup_u2() const { return sup_u2_; }
  double sup_u3() const { return sup_u3_; }
  double sup_dev1() const { return sup_dev1_; }

 private:
  VectorField ut_;
  double min_u1_ = 1.0;
  double sup_u2_ = 0.0;
  double sup_u3_ = 0.0;
  double sup_dev1_ = 0.0;
};

// ---------------------------------------------------------------------------
// Interpolation

inline Vec3 clamp_to_box(const Grid& g, Vec3 x) {
  for (int a = 0; a < 3; ++a) x[a] = std::clamp(x[a], 0.0, g.extent()[a]);
  return x;
}

namespace detail {

struct Cell {
  std::array<int, 3> base;
  std::array<double, 3> frac;
};

inline Cell locate(const Grid& g, const Vec3& x) {
  Cell c{};
  for (int a = 0; a < 3; ++a) {
    const double s = std::clamp(x[a], 0.0, g.extent()[a]) / g.h(a);
    int b = static_cast<int>(std::floor(s));
    b = std::clamp(b, 0, g.last(a) - 1);
    c.base[a] = b;
    c.frac[a] = std::clamp(s - b, 0.0, 1.0);
  }
  return c;
}

}  // namespace detail

/// Trilinear interpolation; points outside the box are clamped onto it.
inline double interpolate(const ScalarField& s, const Vec3& x) {
  const Grid& g = s.grid();
  const auto c = detail::locate(g, x);
  double acc = 0.0;
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        const double w = (di ? c.frac[0] : 1.0 - c.frac[0]) * (dj ? c.frac[1] : 1.0 - c.frac[1]) *
                         (dk ? c.frac[2] : 1.0 - c.frac[2]);
        if (w != 0.0) acc += w * s.at(c.base[0] + di, c.base[1] + dj, c.base[2] + dk);
      }
  return acc;
}

inline Vec3 interpolate(const VectorField& v, const Vec3& x) {
  return {interpolate(v[0], x), interpolate(v[1], x), interpolate(v[2], x)};
}

/// Bilinear interpolation of inflow-face data at (x2, x3).
inline double interpolate_inflow(const FaceField& f, double x2, double x3) {
  const Grid& g = f.grid();
  const FaceLayout lay(g, Face::inflow);
  const auto& d = f.face(Face::inflow);
  const double s2 = std::clamp(x2, 0.0, g.extent()[1]) / g.h(1);
  const double s3 = std::clamp(x3, 0.0, g.extent()[2]) / g.h(2);
  const int j = std::clamp(static_cast<int>(std::floor(s2)), 0, g.last(1) - 1);
  const int k = std::clamp(static_cast<int>(std::floor(s3)), 0, g.last(2) - 1);
  const double a = std::clamp(s2 - j, 0.0, 1.0), b = std::clamp(s3 - k, 0.0, 1.0);
  return (1 - a) * (1 - b) * d[lay.index(j, k)] + a * (1 - b) * d[lay.index(j + 1, k)] +
         (1 - a) * b * d[lay.index(j, k + 1)] + a * b * d[lay.index(j + 1, k + 1)];
}

// ---------------------------------------------------------------------------
// Characteristics

struct CharacteristicTrace {
  Vec3 seed{};
  Vec3 arrival{};
  double travel = 0.0;    ///< parameter length T of the path
  double integral = 0.0;  ///< path integral of the payload
  int steps = 0;
  int clamps = 0;         ///< steps whose endpoint was pulled back onto the box
};

inline double trace_step(const Grid& g) { return 0.5 * std::min({g.h(0), g.h(1), g.h(2)}); }

/// Integrates dX/ds = -u~(X), dI/ds = payload(X) backward from x until X1 = 0
/// with classical RK4. `payload` may be null.
inline CharacteristicTrace trace_characteristic(const TransportField& tf, const Vec3& x,
                                                const ScalarField* payload = nullptr) {
  const Grid& g = tf.grid();
  const VectorField& ut = tf.velocity();
  const double ds_full = trace_step(g);
  const double L = g.extent()[0];
  const int cap = static_cast<int>(std::ceil(8.0 * L / ds_full));
  const double land_tol = 1e-13 * L;

  CharacteristicTrace tr;
  tr.seed = x;
  Vec3 X = clamp_to_box(g, x);

  auto rhs = [&](const Vec3& p, Vec3& dx, double& di) {
    const Vec3 q = clamp_to_box(g, p);
    const Vec3 u = interpolate(ut, q);
    dx = {-u[0], -u[1], -u[2]};
    di = payload ? interpolate(*payload, q) : 0.0;
  };

  while (X[0] > land_tol) {
    if (tr.steps >= cap) {
      std::ostringstream os;
      os << "characteristic stalled from (" << x[0] << "," << x[1] << "," << x[2] << ")";
      throw TransportError(os.str());
    }
    double ds = ds_full;
    const double u1 = interpolate(ut[0], X);
    if (X[0] <= ds * u1) ds = X[0] / u1;

    Vec3 k1, k2, k3, k4, tmp;
    double i1, i2, i3, i4;
    rhs(X, k1, i1);
    for (int a = 0; a < 3; ++a) tmp[a] = X[a] + 0.5 * ds * k1[a];
    rhs(tmp, k2, i2);
    for (int a = 0; a < 3; ++a) tmp[a] = X[a] + 0.5 * ds * k2[a];
    rhs(tmp, k3, i3);
    for (int a = 0; a < 3; ++a) tmp[a] = X[a] + ds * k3[a];
    rhs(tmp, k4, i4);
    Vec3 next;
    for (int a = 0; a < 3; ++a) next[a] = X[a] + ds / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    tr.integral += ds / 6.0 * (i1 + 2.0 * i2 + 2.0 * i3 + i4);
    tr.travel += ds;
    ++tr.steps;

    const Vec3 clamped = clamp_to_box(g, next);
    if (clamped[1] != next[1] || clamped[2] != next[2]) ++tr.clamps;
    X = clamped;
  }
  X[0] = 0.0;
  tr.arrival = X;
  return tr;
}

/// Solution operator of u~.grad w = v with w = w_in on the inflow face, by
/// integrating v along backward characteristics from every node.
inline ScalarField apply_S(const TransportField& tf, const ScalarField& v, const FaceField& w_in) {
  const Grid& g = tf.grid();
  ScalarField out(g);
  const auto& n = g.nodes();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (i == 0) {
          out[idx] = w_in.at(Face::inflow, i, j, k);
          continue;
        }
        const auto tr = trace_characteristic(tf, g.point(i, j, k), &v);
        out[idx] = interpolate_inflow(w_in, tr.arrival[1], tr.arrival[2]) + tr.integral;
      }
  return out;
}

// ---------------------------------------------------------------------------
// Upwind discretization

/// First-order donor-cell difference a * dw/dx_b at position `pos` of a grid
/// line, as a (diagonal, neighbour offset, neighbour coefficient) triple. Where
/// the upwind neighbour is missing the opposite one-sided difference is used.
struct DonorTerm {
  double diag = 0.0;
  int offset = 0;
  double coef = 0.0;
};

inline DonorTerm donor_cell(double a, int pos, int last, double h) {
  const bool backward = (a > 0.0 && pos > 0) || pos == last;
  if (backward) return {a / h, -1, -a / h};
  return {-a / h, +1, a / h};
}

inline double transverse_cfl(const TransportField& tf) {
  const Grid& g = tf.grid();
  return std::max(tf.sup_u2(), tf.sup_u3()) * g.h(0) / (tf.min_u1() * std::min(g.h(1), g.h(2)));
}

/// Explicit x1 march of w_x1 = (v - u~2 w_x2 - u~3 w_x3) / u~1 from w = w_in.
inline ScalarField upwind_march(const TransportField& tf, const ScalarField& v, const FaceField& w_in) {
  const Grid& g = tf.grid();
  const double cfl = transverse_cfl(tf);
  if (cfl > 1.0) {
    std::ostringstream os;
    os << "upwind march violates CFL (" << cfl << " > 1); refine n1";
    throw TransportError(os.str());
  }
  const VectorField& ut = tf.velocity();
  ScalarField w(g);
  for (int k = 0; k <= g.last(2); ++k)
    for (int j = 0; j <= g.last(1); ++j) w.at(0, j, k) = w_in.at(Face::inflow, 0, j, k);

  for (int i = 0; i < g.last(0); ++i)
    for (int k = 0; k <= g.last(2); ++k)
      for (int j = 0; j <= g.last(1); ++j) {
        const std::size_t idx = g.index(i, j, k);
        const auto d2 = donor_cell(ut[1][idx], j, g.last(1), g.h(1));
        const auto d3 = donor_cell(ut[2][idx], k, g.last(2), g.h(2));
        const double flux = d2.diag * w[idx] + d2.coef * w.at(i, j + d2.offset, k) + d3.diag * w[idx] +
                            d3.coef * w.at(i, j, k + d3.offset);
        w.at(i + 1, j, k) = w[idx] + g.h(0) * (v[idx] - flux) / ut[0][idx];
      }
  return w;
}

/// Backward difference along x1 at slice i >= 1: two-point at i = 1, three-point
/// (second order) beyond. Returned as coefficients of w_i, w_{i-1}, w_{i-2}.
inline std::array<double, 3> axial_upwind(int i, double h1) {
  if (i == 1) return {1.0 / h1, -1.0 / h1, 0.0};
  return {1.5 / h1, -2.0 / h1, 0.5 / h1};
}

/// Implicit upwind transport rows
///   u~1 D1^- w + donor(u~2, x2) + donor(u~3, x3) = r,   i >= 1
/// with w = w_in at i = 0, solved slice by slice (Gauss-Seidel within a slice).
inline ScalarField upwind_implicit(const TransportField& tf, const ScalarField& r, const FaceField& w_in,
                                   const ScalarField* guess = nullptr, double tol = 1e-15, int max_sweeps = 500) {
  const Grid& g = tf.grid();
  const VectorField& ut = tf.velocity();
  ScalarField w = guess ? *guess : ScalarField(g);
  for (int k = 0; k <= g.last(2); ++k)
    for (int j = 0; j <= g.last(1); ++j) w.at(0, j, k) = w_in.at(Face::inflow, 0, j, k);

  const double h1 = g.h(0);
  for (int i = 1; i <= g.last(0); ++i) {
    if (!guess)
      for (int k = 0; k <= g.last(2); ++k)
        for (int j = 0; j <= g.last(1); ++j) w.at(i, j, k) = w.at(i - 1, j, k);
    double scale = 0.0;
    for (int k = 0; k <= g.last(2); ++k)
      for (int j = 0; j <= g.last(1); ++j) scale = std::max(scale, std::abs(w.at(i - 1, j, k)));
    const auto ax = axial_upwind(i, h1);
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
      double change = 0.0, mag = scale;
      for (int k = 0; k <= g.last(2); ++k)
        for (int j = 0; j <= g.last(1); ++j) {
          const std::size_t idx = g.index(i, j, k);
          const auto d2 = donor_cell(ut[1][idx], j, g.last(1), g.h(1));
          const auto d3 = donor_cell(ut[2][idx], k, g.last(2), g.h(2));
          const double diag = ut[0][idx] * ax[0] + d2.diag + d3.diag;
          double rhs = r[idx] - ut[0][idx] * ax[1] * w.at(i - 1, j, k) - d2.coef * w.at(i, j + d2.offset, k) -
                       d3.coef * w.at(i, j, k + d3.offset);
          if (i >= 2) rhs -= ut[0][idx] * ax[2] * w.at(i - 2, j, k);
          const double nv = rhs / diag;
          change = std::max(change, std::abs(nv - w[idx]));
          mag = std::max(mag, std::abs(nv));
          w[idx] = nv;
        }
      if (change <= tol * std::max(1.0, mag)) break;
    }
    if (sweep == max_sweeps) throw ConvergenceError("upwind slice solve did not converge", 0.0, sweep);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Jacobian of the straightening map

/// Estimate of sup |J psi - 1|, where psi(z1,z2,z3) follows the forward
/// characteristic of u~ from (0,z2,z3) for parameter time z1. J psi is the
/// determinant of [u~(X), dX/dz2, dX/dz3], the transverse columns obtained by
/// central differences of neighbouring seeds.
inline double jacobian_bound(const TransportField& tf) {
  const Grid& g = tf.grid();
  const VectorField& ut = tf.velocity();
  const double ds = trace_step(g);
  const double L = g.extent()[0];
  const int cap = static_cast<int>(std::ceil(8.0 * L / ds));
  const double d2 = 1e-4 * g.h(1), d3 = 1e-4 * g.h(2);

  auto step = [&](Vec3& X) {
    auto f = [&](const Vec3& p) { return interpolate(ut, clamp_to_box(g, p)); };
    Vec3 k1 = f(X), tmp, k2, k3, k4;
    for (int a = 0; a < 3; ++a) tmp[a] = X[a] + 0.5 * ds * k1[a];
    k2 = f(tmp);
    for (int a = 0; a < 3; ++a) tmp[a] = X[a] + 0.5 * ds * k2[a];
    k3 = f(tmp);
    for (int a = 0; a < 3; ++a) tmp[a] = X[a] + ds * k3[a];
    k4 = f(tmp);
    for (int a = 0; a < 3; ++a) X[a] += ds / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    X[1] = std::clamp(X[1], 0.0, g.extent()[1]);
    X[2] = std::clamp(X[2], 0.0, g.extent()[2]);
  };

  double bound = 0.0;
  for (int k = 1; k < g.last(2); ++k)
    for (int j = 1; j < g.last(1); ++j) {
      const double z2 = g.coord(1, j), z3 = g.coord(2, k);
      std::array<Vec3, 5> X{Vec3{0, z2, z3}, Vec3{0, z2 + d2, z3}, Vec3{0, z2 - d2, z3}, Vec3{0, z2, z3 + d3},
                            Vec3{0, z2, z3 - d3}};
      for (int s = 0; X[0][0] < L; ++s) {
        if (s >= cap) throw TransportError("forward characteristic stalled");
        Vec3 c2, c3;
        for (int a = 0; a < 3; ++a) {
          c2[a] = (X[1][a] - X[2][a]) / (2.0 * d2);
          c3[a] = (X[3][a] - X[4][a]) / (2.0 * d3);
        }
        const Vec3 u = interpolate(ut, clamp_to_box(g, X[0]));
        const double J = dot(u, cross(c2, c3));
        bound = std::max(bound, std::abs(J - 1.0));
        for (auto& x : X) step(x);
      }
    }
  return bound;
}

}  // namespace slipflow
