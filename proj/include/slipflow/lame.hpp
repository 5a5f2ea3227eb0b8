#pragma once

#include <array>
#include <cmath>
#include <string>
#include <type_traits>

#include "slipflow/krylov.hpp"
#include "slipflow/sparse.hpp"
#include "slipflow/material.hpp"
#include "slipflow/transport.hpp"

namespace slipflow {

enum class LinearMode { split, monolithic };

inline const char* mode_name(LinearMode m) { return m == LinearMode::split ? "split" : "monolithic"; }

inline LinearMode parse_mode(const std::string& s) {
  if (s == "split") return LinearMode::split;
  if (s == "monolithic") return LinearMode::monolithic;
  throw ConfigError("unknown linear mode '" + s + "' (expected split or monolithic)");
}

/// How split mode updates the density between velocity solves.
enum class SplitTransport { upwind, characteristics };

/// Position of a node relative to the box faces: side[a] is -1 on the low
/// face of axis a, +1 on the high face, 0 otherwise.
struct NodePlacement {
  std::array<int, 3> side{};
  int faces = 0;

  NodePlacement(const Grid& g, int i, int j, int k) {
    const std::array<int, 3> c{i, j, k};
    for (int a = 0; a < 3; ++a) {
      side[a] = c[a] == 0 ? -1 : (c[a] == g.last(a) ? 1 : 0);
      if (side[a] != 0) ++faces;
    }
  }

  /// Normal axis of a face-interior node.
  int normal_axis() const {
    for (int a = 0; a < 3; ++a)
      if (side[a] != 0) return a;
    return -1;
  }
};

/// Slip datum for velocity component c on face f: sum_k (tau_k)_c B_k.
inline double slip_component(const SlipData& B, Face f, int c, int i, int j, int k) {
  const auto t = face_tangents(f);
  double acc = 0.0;
  for (int kk = 0; kk < 2; ++kk)
    if (t[kk][c] != 0.0) acc += t[kk][c] * B[kk].at(f, i, j, k);
  return acc;
}

/// Discrete operator  L u = d1 u - mu lap u - (nu+mu) grad div u  with the slip
/// rows n.2mu D(u).tau_k + f u.tau_k = B_k and n.u = 0 built into the boundary
/// rows. Unknown layout: component c of node idx at c*N + idx.
class LameOperator {
 public:
  LameOperator(const Grid& g, const FlowParams& params) : grid_(g), params_(params) { params.validate(); }

  const Grid& grid() const { return grid_; }
  const FlowParams& params() const { return params_; }
  std::size_t nodes() const { return grid_.size(); }

  /// Homogeneous momentum row (boundary data excluded) for component c at a
  /// node, reading velocities through u(c, i, j, k).
  template <class U>
  auto momentum_row(U&& u, int c, int i, int j, int k) const -> std::decay_t<decltype(u(0, 0, 0, 0))> {
    const NodePlacement pl(grid_, i, j, k);
    if (pl.faces == 0) return interior_row(u, c, i, j, k);
    if (pl.faces == 1) {
      const int a = pl.normal_axis();
      if (c == a) return u(c, i, j, k);
      return face_row(u, c, a, pl.side[a], i, j, k);
    }
    if (pl.faces == 2 && pl.side[c] == 0) return edge_row(u, c, pl, i, j, k);
    return u(c, i, j, k);
  }

  /// True when the row for (c, node) is a momentum balance (carries F and gamma grad w).
  bool is_balance_row(int c, int i, int j, int k) const {
    const NodePlacement pl(grid_, i, j, k);
    return pl.faces == 0 || (pl.faces == 1 && pl.side[c] == 0);
  }

  /// Boundary-data part of the momentum right-hand side.
  double boundary_rhs(const SlipData& B, int c, int i, int j, int k) const {
    const NodePlacement pl(grid_, i, j, k);
    if (pl.faces == 1) {
      const int a = pl.normal_axis();
      if (c == a) return 0.0;
      const Face f = face_of(a, pl.side[a] > 0);
      const double Bc = slip_component(B, f, c, i, j, k);
      double r = 2.0 * Bc / grid_.h(a);
      if (a == 0) r -= pl.side[a] * Bc / params_.mu;
      return r;
    }
    if (pl.faces == 2 && pl.side[c] == 0) {
      double acc = 0.0;
      for (int a = 0; a < 3; ++a)
        if (pl.side[a] != 0) acc += slip_component(B, face_of(a, pl.side[a] > 0), c, i, j, k);
      return 0.5 * acc;
    }
    return 0.0;
  }

  std::size_t velocity_size() const { return 3 * nodes(); }

  void apply_velocity(const Vector& x, Vector& y) const {
    const std::size_t N = nodes();
    auto u = [&](int c, int i, int j, int k) { return x[c * N + grid_.index(i, j, k)]; };
    for_each_node([&](int i, int j, int k, std::size_t idx) {
      for (int c = 0; c < 3; ++c) y[c * N + idx] = momentum_row(u, c, i, j, k);
    });
  }

  /// Assembled velocity block, rows and columns in the c*N + idx layout.
  CsrMatrix velocity_matrix() const {
    const std::size_t N = nodes();
    auto u = [&](int c, int i, int j, int k) { return LinearForm::unit(c * N + grid_.index(i, j, k)); };
    CsrMatrix A;
    for (int c = 0; c < 3; ++c)
      for_each_node([&](int i, int j, int k, std::size_t) { A.push_row(momentum_row(u, c, i, j, k)); });
    return A;
  }

  Vector velocity_diagonal() const {
    const std::size_t N = nodes();
    Vector d(3 * N);
    for_each_node([&](int i, int j, int k, std::size_t idx) {
      for (int c = 0; c < 3; ++c) {
        auto unit = [&](int cc, int ii, int jj, int kk) {
          return (cc == c && ii == i && jj == j && kk == k) ? 1.0 : 0.0;
        };
        d[c * N + idx] = momentum_row(unit, c, i, j, k);
      }
    });
    return d;
  }

  /// Continuity row div u + u~1 D1^- w + donor transverse terms, i >= 1.
  template <class U, class W>
  auto continuity_row(U&& u, W&& w, const VectorField& ut, int i, int j, int k) const
      -> std::decay_t<decltype(w(0, 0, 0))> {
    const std::size_t idx = grid_.index(i, j, k);
    if (i == 0) return w(i, j, k);
    auto acc = divergence_row(u, i, j, k);
    const auto ax = axial_upwind(i, grid_.h(0));
    acc += ut[0][idx] * (ax[0] * w(i, j, k) + ax[1] * w(i - 1, j, k));
    if (i >= 2) acc += ut[0][idx] * ax[2] * w(i - 2, j, k);
    const auto d2 = donor_cell(ut[1][idx], j, grid_.last(1), grid_.h(1));
    const auto d3 = donor_cell(ut[2][idx], k, grid_.last(2), grid_.h(2));
    acc += d2.diag * w(i, j, k) + d2.coef * w(i, j + d2.offset, k);
    acc += d3.diag * w(i, j, k) + d3.coef * w(i, j, k + d3.offset);
    return acc;
  }

  template <class U>
  auto divergence_row(U&& u, int i, int j, int k) const {
    std::decay_t<decltype(u(0, 0, 0, 0))> acc{};
    for (int a = 0; a < 3; ++a) acc += d1(u, a, a, i, j, k);
    return acc;
  }

  template <class Fn>
  void for_each_node(Fn&& fn) const {
    const auto& n = grid_.nodes();
    for (int k = 0; k < n[2]; ++k)
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i) fn(i, j, k, grid_.index(i, j, k));
  }

 private:
  /// First difference of component c along axis a (central, one-sided at ends).
  template <class U>
  auto d1(U&& u, int c, int a, int i, int j, int k) const {
    std::array<int, 3> p{i, j, k};
    const int pos = p[a];
    auto at = [&](int o) {
      std::array<int, 3> q = p;
      q[a] += o;
      return u(c, q[0], q[1], q[2]);
    };
    return stencil::first(at, pos, grid_.last(a), grid_.h(a));
  }

  /// Three-point second difference of component c along axis a (node interior along a).
  template <class U>
  auto d2c(U&& u, int c, int a, int i, int j, int k) const {
    std::array<int, 3> m{i, j, k}, p{i, j, k};
    --m[a];
    ++p[a];
    const double h = grid_.h(a);
    return (u(c, p[0], p[1], p[2]) - 2.0 * u(c, i, j, k) + u(c, m[0], m[1], m[2])) / (h * h);
  }

  /// d_b (d_a u^c): difference along b of the first difference along a.
  template <class U>
  auto mixed(U&& u, int c, int a, int b, int i, int j, int k) const {
    std::array<int, 3> p{i, j, k};
    auto at = [&](int o) {
      std::array<int, 3> q = p;
      q[b] += o;
      return d1(u, c, a, q[0], q[1], q[2]);
    };
    return stencil::first(at, p[b], grid_.last(b), grid_.h(b));
  }

  template <class U>
  auto interior_row(U&& u, int c, int i, int j, int k) const {
    const double mu = params_.mu, lam = params_.nu + params_.mu;
    auto acc = d1(u, c, 0, i, j, k);
    for (int b = 0; b < 3; ++b) acc -= mu * d2c(u, c, b, i, j, k);
    acc -= lam * d2c(u, c, c, i, j, k);
    for (int b = 0; b < 3; ++b)
      if (b != c) acc -= lam * mixed(u, b, b, c, i, j, k);
    return acc;
  }

  /// Tangential component c on a face with normal axis a: ghost value across
  /// the face eliminated with the Robin condition mu d_n u^c + f u^c = B_c.
  template <class U>
  auto face_row(U&& u, int c, int a, int side, int i, int j, int k) const {
    const double mu = params_.mu, lam = params_.nu + params_.mu, fr = params_.f;
    const double ha = grid_.h(a);
    const auto u0 = u(c, i, j, k);
    std::array<int, 3> in{i, j, k};
    in[a] -= side;
    const auto uin = u(c, in[0], in[1], in[2]);

    auto acc = (a == 0) ? -side * fr * u0 / mu : d1(u, c, 0, i, j, k);
    for (int b = 0; b < 3; ++b) {
      if (b == a)
        acc += -mu * (2.0 * uin - 2.0 * u0) / (ha * ha) + 2.0 * fr * u0 / ha;
      else
        acc -= mu * d2c(u, c, b, i, j, k);
    }
    acc -= lam * d2c(u, c, c, i, j, k);
    for (int b = 0; b < 3; ++b)
      if (b != c) acc -= lam * mixed(u, b, b, c, i, j, k);
    return acc;
  }

  /// Component along an edge: average of the two one-sided Robin rows.
  template <class U>
  auto edge_row(U&& u, int c, const NodePlacement& pl, int i, int j, int k) const {
    const double mu = params_.mu, fr = params_.f;
    std::decay_t<decltype(u(0, 0, 0, 0))> acc{};
    for (int a = 0; a < 3; ++a) {
      if (pl.side[a] == 0) continue;
      acc += mu * pl.side[a] * d1(u, c, a, i, j, k) + fr * u(c, i, j, k);
    }
    return 0.5 * acc;
  }

  Grid grid_;
  FlowParams params_;
};

/// Action of the homogeneous discrete Lame operator on u.
inline VectorField apply_lame(const LameOperator& op, const VectorField& u) {
  const Grid& g = op.grid();
  VectorField out(g);
  auto get = [&](int c, int i, int j, int k) { return u[c].at(i, j, k); };
  op.for_each_node([&](int i, int j, int k, std::size_t idx) {
    for (int c = 0; c < 3; ++c) out[c][idx] = op.momentum_row(get, c, i, j, k);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Linear step

struct LinearSolveConfig {
  KrylovConfig krylov{};
  double inner_tol = 1e-11;  ///< split sweeps stop when the H1 x LinfL2 change drops below this
  int max_sweeps = 200;
  SplitTransport transport = SplitTransport::upwind;
};

struct LinearStepResult {
  VectorField u;
  ScalarField w;
  int krylov_iterations = 0;
  int sweeps = 0;
  double residual = 0.0;  ///< relative residual of the coupled discrete system
  LinearMode mode = LinearMode::split;
};

namespace detail {

inline Vector pack(const VectorField& u) {
  const std::size_t N = u.size();
  Vector x(3 * N);
  for (int c = 0; c < 3; ++c)
    for (std::size_t n = 0; n < N; ++n) x[c * N + n] = u[c][n];
  return x;
}

inline Vector pack(const VectorField& u, const ScalarField& w) {
  Vector x = pack(u);
  x.insert(x.end(), w.values().begin(), w.values().end());
  return x;
}

inline void unpack(const Vector& x, VectorField& u) {
  const std::size_t N = u.size();
  for (int c = 0; c < 3; ++c)
    for (std::size_t n = 0; n < N; ++n) u[c][n] = x[c * N + n];
}

inline void unpack(const Vector& x, VectorField& u, ScalarField& w) {
  unpack(x, u);
  const std::size_t N = u.size();
  for (std::size_t n = 0; n < N; ++n) w[n] = x[3 * N + n];
}

}  // namespace detail

/// Coupled system of one linear step:
///   L u + gamma grad w = F,   continuity rows = G,   w = w_in on the inflow face.
class CoupledSystem {
 public:
  CoupledSystem(const LameOperator& op, const TransportField& tf) : op_(op), tf_(tf) {}

  std::size_t size() const { return 4 * op_.nodes(); }

  void apply(const Vector& x, Vector& y) const {
    const Grid& g = op_.grid();
    const std::size_t N = op_.nodes();
    const double gamma = op_.params().gamma();
    auto u = [&](int c, int i, int j, int k) { return x[c * N + g.index(i, j, k)]; };
    auto w = [&](int i, int j, int k) { return x[3 * N + g.index(i, j, k)]; };
    const VectorField& ut = tf_.velocity();
    op_.for_each_node([&](int i, int j, int k, std::size_t idx) {
      for (int c = 0; c < 3; ++c) {
        double r = op_.momentum_row(u, c, i, j, k);
        if (op_.is_balance_row(c, i, j, k)) r += gamma * w_partial(w, c, i, j, k);
        y[c * N + idx] = r;
      }
      y[3 * N + idx] = op_.continuity_row(u, w, ut, i, j, k);
    });
  }

  /// Assembled coupled matrix; the density block occupies rows 3N..4N-1.
  CsrMatrix matrix() const {
    const Grid& g = op_.grid();
    const std::size_t N = op_.nodes();
    const double gamma = op_.params().gamma();
    auto u = [&](int c, int i, int j, int k) { return LinearForm::unit(c * N + g.index(i, j, k)); };
    auto w = [&](int i, int j, int k) { return LinearForm::unit(3 * N + g.index(i, j, k)); };
    const VectorField& ut = tf_.velocity();
    CsrMatrix A;
    for (int c = 0; c < 3; ++c)
      op_.for_each_node([&](int i, int j, int k, std::size_t) {
        LinearForm r = op_.momentum_row(u, c, i, j, k);
        if (op_.is_balance_row(c, i, j, k)) r += gamma * w_partial(w, c, i, j, k);
        A.push_row(r);
      });
    op_.for_each_node([&](int i, int j, int k, std::size_t) { A.push_row(op_.continuity_row(u, w, ut, i, j, k)); });
    return A;
  }

  Vector diagonal() const {
    const Grid& g = op_.grid();
    const std::size_t N = op_.nodes();
    Vector d = op_.velocity_diagonal();
    d.resize(4 * N);
    const VectorField& ut = tf_.velocity();
    op_.for_each_node([&](int i, int j, int k, std::size_t idx) {
      auto zero_u = [](int, int, int, int) { return 0.0; };
      auto unit_w = [&](int ii, int jj, int kk) { return (ii == i && jj == j && kk == k) ? 1.0 : 0.0; };
      d[3 * N + idx] = op_.continuity_row(zero_u, unit_w, ut, i, j, k);
    });
    (void)g;
    return d;
  }

  Vector rhs(const VectorField& F, const ScalarField& G, const SlipData& B, const FaceField& w_in) const {
    const std::size_t N = op_.nodes();
    Vector b(4 * N);
    op_.for_each_node([&](int i, int j, int k, std::size_t idx) {
      for (int c = 0; c < 3; ++c) {
        double r = op_.boundary_rhs(B, c, i, j, k);
        if (op_.is_balance_row(c, i, j, k)) r += F[c][idx];
        b[c * N + idx] = r;
      }
      b[3 * N + idx] = i == 0 ? w_in.at(Face::inflow, i, j, k) : G[idx];
    });
    return b;
  }

  /// Momentum right-hand side with the pressure coupling moved across.
  Vector velocity_rhs(const VectorField& F, const SlipData& B, const ScalarField& w) const {
    const std::size_t N = op_.nodes();
    const double gamma = op_.params().gamma();
    Vector b(3 * N);
    auto wa = [&](int i, int j, int k) { return w.at(i, j, k); };
    op_.for_each_node([&](int i, int j, int k, std::size_t idx) {
      for (int c = 0; c < 3; ++c) {
        double r = op_.boundary_rhs(B, c, i, j, k);
        if (op_.is_balance_row(c, i, j, k)) r += F[c][idx] - gamma * w_partial(wa, c, i, j, k);
        b[c * N + idx] = r;
      }
    });
    return b;
  }

  /// Relative residual |b - A x| / max(|b|, tiny).
  double relative_residual(const Vector& x, const Vector& b) const {
    Vector y(x.size());
    apply(x, y);
    for (std::size_t n = 0; n < y.size(); ++n) y[n] = b[n] - y[n];
    const double bn = detail::normv(b);
    return detail::normv(y) / (bn > 0.0 ? bn : 1.0);
  }

  const LameOperator& op() const { return op_; }
  const TransportField& transport() const { return tf_; }

 private:
  template <class W>
  auto w_partial(W&& w, int a, int i, int j, int k) const -> std::decay_t<decltype(w(0, 0, 0))> {
    std::array<int, 3> p{i, j, k};
    auto at = [&](int o) {
      std::array<int, 3> q = p;
      q[a] += o;
      return w(q[0], q[1], q[2]);
    };
    return stencil::first(at, p[a], op_.grid().last(a), op_.grid().h(a));
  }

  const LameOperator& op_;
  const TransportField& tf_;
};

/// Solves one linear step. `convect` is the convecting perturbation (u_bar + u0);
/// `guess` (optional) warm-starts the iteration.
inline LinearStepResult solve_linear_step(const LameOperator& op, const VectorField& convect, const VectorField& F,
                                          const ScalarField& G, const SlipData& B, const FaceField& w_in,
                                          LinearMode mode, const LinearSolveConfig& cfg = {},
                                          const LinearStepResult* guess = nullptr) {
  const Grid& g = op.grid();
  const TransportField tf = TransportField::from_convect(convect);
  const CoupledSystem sys(op, tf);
  const Vector b = sys.rhs(F, G, B, w_in);

  LinearStepResult res;
  res.mode = mode;
  res.u = guess ? guess->u : VectorField(g);
  res.w = guess ? guess->w : ScalarField(g);

  if (mode == LinearMode::monolithic) {
    const CsrMatrix A = sys.matrix();
    const auto kr = krylov_solve([&](const Vector& x, Vector& y) { A.multiply(x, y); }, b, cfg.krylov,
                                 A.diagonal(), guess ? detail::pack(res.u, res.w) : Vector{});
    detail::unpack(kr.x, res.u, res.w);
    res.krylov_iterations = kr.iterations;
    res.residual = sys.relative_residual(kr.x, b);
    return res;
  }

  const CsrMatrix Av = op.velocity_matrix();
  const Vector diag = Av.diagonal();
  auto action = [&](const Vector& x, Vector& y) { Av.multiply(x, y); };
  Vector ux = detail::pack(res.u);
  if (!guess) res.w = upwind_implicit(tf, G, w_in);
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const auto kr = krylov_solve(action, sys.velocity_rhs(F, B, res.w), cfg.krylov, diag, ux);
    res.krylov_iterations += kr.iterations;
    VectorField u_new(g);
    detail::unpack(kr.x, u_new);
    const ScalarField r = G - divergence(u_new);
    ScalarField w_new = cfg.transport == SplitTransport::upwind ? upwind_implicit(tf, r, w_in, &res.w)
                                                                : apply_S(tf, r, w_in);
    const double change = norm(u_new - res.u, NormKind::h1()) + norm(w_new - res.w, NormKind::linf_l2());
    res.u = std::move(u_new);
    res.w = std::move(w_new);
    ux = kr.x;
    res.sweeps = sweep;
    if (!res.u.all_finite() || !res.w.all_finite()) throw ConvergenceError("split sweep produced non-finite values", change, sweep);
    if (change < cfg.inner_tol) {
      res.residual = sys.relative_residual(detail::pack(res.u, res.w), b);
      return res;
    }
  }
  throw ConvergenceError("split sweeps did not converge", res.residual, cfg.max_sweeps);
}

}  // namespace slipflow
