#pragma once

#include <array>
#include <cstddef>

#include "slipflow/fields.hpp"

namespace slipflow {

// Second-order finite differences on the node lattice: central at interior
// positions, one-sided (three or four points) at the two ends of each line.

namespace stencil {

/// First derivative along a grid line. `pos` is the node position on the
/// line, `last` the final position, `at(o)` returns the value at offset o.
template <class At>
inline auto first(At&& at, int pos, int last, double h) {
  if (pos == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (pos == last) return (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
  return (at(1) - at(-1)) / (2.0 * h);
}

/// Pure second derivative along a grid line.
template <class At>
inline auto second(At&& at, int pos, int last, double h) {
  const double h2 = h * h;
  if (pos == 0) return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
  if (pos == last) return (2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / h2;
  return (at(1) - 2.0 * at(0) + at(-1)) / h2;
}

}  // namespace stencil

/// Derivative of s along `axis` at node (i,j,k).
inline double partial_at(const ScalarField& s, int axis, int i, int j, int k) {
  const Grid& g = s.grid();
  const std::size_t idx = g.index(i, j, k);
  const std::size_t st = g.stride(axis);
  const std::array<int, 3> c{i, j, k};
  auto at = [&](int o) { return s[idx + static_cast<std::ptrdiff_t>(o) * static_cast<std::ptrdiff_t>(st)]; };
  return stencil::first(at, c[axis], g.last(axis), g.h(axis));
}

inline double second_at(const ScalarField& s, int axis, int i, int j, int k) {
  const Grid& g = s.grid();
  const std::size_t idx = g.index(i, j, k);
  const std::size_t st = g.stride(axis);
  const std::array<int, 3> c{i, j, k};
  auto at = [&](int o) { return s[idx + static_cast<std::ptrdiff_t>(o) * static_cast<std::ptrdiff_t>(st)]; };
  return stencil::second(at, c[axis], g.last(axis), g.h(axis));
}

template <class Fn>
inline ScalarField map_nodes(const Grid& g, Fn&& fn) {
  ScalarField out(g);
  const auto& n = g.nodes();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) out.at(i, j, k) = fn(i, j, k);
  return out;
}

inline ScalarField partial(const ScalarField& s, int axis) {
  return map_nodes(s.grid(), [&](int i, int j, int k) { return partial_at(s, axis, i, j, k); });
}

/// Second difference d^2 s / dx_a dx_b. Mixed derivatives compose first
/// differences; pure ones use the three-point (four-point one-sided) stencil.
inline ScalarField second(const ScalarField& s, int a, int b) {
  if (a == b) return map_nodes(s.grid(), [&](int i, int j, int k) { return second_at(s, a, i, j, k); });
  return partial(partial(s, b), a);
}

inline VectorField gradient(const ScalarField& s) { return VectorField(partial(s, 0), partial(s, 1), partial(s, 2)); }

inline ScalarField divergence(const VectorField& v) {
  return map_nodes(v.grid(), [&](int i, int j, int k) {
    return partial_at(v[0], 0, i, j, k) + partial_at(v[1], 1, i, j, k) + partial_at(v[2], 2, i, j, k);
  });
}

inline VectorField curl(const VectorField& v) {
  const Grid& g = v.grid();
  VectorField out(g);
  const auto& n = g.nodes();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        out[0][idx] = partial_at(v[2], 1, i, j, k) - partial_at(v[1], 2, i, j, k);
        out[1][idx] = partial_at(v[0], 2, i, j, k) - partial_at(v[2], 0, i, j, k);
        out[2][idx] = partial_at(v[1], 0, i, j, k) - partial_at(v[0], 1, i, j, k);
      }
  return out;
}

inline ScalarField laplacian(const ScalarField& s) {
  return map_nodes(s.grid(), [&](int i, int j, int k) {
    return second_at(s, 0, i, j, k) + second_at(s, 1, i, j, k) + second_at(s, 2, i, j, k);
  });
}

inline VectorField laplacian(const VectorField& v) { return VectorField(laplacian(v[0]), laplacian(v[1]), laplacian(v[2])); }

inline VectorField grad_div(const VectorField& v) { return gradient(divergence(v)); }

inline VectorField partial(const VectorField& v, int axis) {
  return VectorField(partial(v[0], axis), partial(v[1], axis), partial(v[2], axis));
}

/// Convective derivative (a . grad) u.
inline VectorField advect(const VectorField& a, const VectorField& u) {
  const Grid& g = u.grid();
  VectorField out(g);
  const auto& n = g.nodes();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        for (int c = 0; c < 3; ++c) {
          double acc = 0.0;
          for (int d = 0; d < 3; ++d) acc += a[d][idx] * partial_at(u[c], d, i, j, k);
          out[c][idx] = acc;
        }
      }
  return out;
}

/// a . grad s
inline ScalarField advect(const VectorField& a, const ScalarField& s) {
  return map_nodes(s.grid(), [&](int i, int j, int k) {
    const std::size_t idx = s.grid().index(i, j, k);
    return a[0][idx] * partial_at(s, 0, i, j, k) + a[1][idx] * partial_at(s, 1, i, j, k) +
           a[2][idx] * partial_at(s, 2, i, j, k);
  });
}

/// Symmetric gradient component D_ab = (d_a u^b + d_b u^a) / 2 at a node.
inline double strain_at(const VectorField& u, int a, int b, int i, int j, int k) {
  return 0.5 * (partial_at(u[b], a, i, j, k) + partial_at(u[a], b, i, j, k));
}

/// n . 2mu D(u) . t at a node, for constant vectors n and t.
inline double traction_at(const VectorField& u, const Vec3& n, const Vec3& t, double mu, int i, int j, int k) {
  double acc = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (n[a] != 0.0 && t[b] != 0.0) acc += n[a] * t[b] * strain_at(u, a, b, i, j, k);
  return 2.0 * mu * acc;
}

}  // namespace slipflow
