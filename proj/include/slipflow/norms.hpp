#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slipflow/calculus.hpp"

namespace slipflow {

/// Which faces a boundary norm runs over. Faces are never mixed: pair sums of
/// the trace seminorm stay within one face.
enum class BoundarySet { inflow, outflow, lateral, all };

inline std::vector<Face> faces_of(BoundarySet set) {
  switch (set) {
    case BoundarySet::inflow: return {Face::inflow};
    case BoundarySet::outflow: return {Face::outflow};
    case BoundarySet::lateral: return {Face::x2_low, Face::x2_high, Face::x3_low, Face::x3_high};
    case BoundarySet::all: break;
  }
  return {kAllFaces.begin(), kAllFaces.end()};
}

inline constexpr double kDefaultP = 4.0;

struct NormKind {
  enum class Kind { Lp, W1p, W2p, H1, LinfL2, BoundaryLp, BoundaryW1p, TraceGagliardo };

  Kind kind = Kind::Lp;
  double p = kDefaultP;
  BoundarySet region = BoundarySet::all;

  static NormKind lp(double p = kDefaultP) { return {Kind::Lp, p}; }
  static NormKind w1p(double p = kDefaultP) { return {Kind::W1p, p}; }
  static NormKind w2p(double p = kDefaultP) { return {Kind::W2p, p}; }
  static NormKind h1() { return {Kind::H1, 2.0}; }
  static NormKind linf_l2() { return {Kind::LinfL2, 2.0}; }
  static NormKind boundary_lp(BoundarySet r, double p = kDefaultP) { return {Kind::BoundaryLp, p, r}; }
  static NormKind boundary_w1p(BoundarySet r, double p = kDefaultP) { return {Kind::BoundaryW1p, p, r}; }
  static NormKind trace_gagliardo(BoundarySet r, double p = kDefaultP) { return {Kind::TraceGagliardo, p, r}; }

  bool is_boundary() const {
    return kind == Kind::BoundaryLp || kind == Kind::BoundaryW1p || kind == Kind::TraceGagliardo;
  }
};

namespace detail {

inline void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("norm exponent p must be finite and >= 1");
}

inline double trapezoid_1d(int pos, int last, double h) { return (pos == 0 || pos == last) ? 0.5 * h : h; }

inline double volume_weight(const Grid& g, int i, int j, int k) {
  return trapezoid_1d(i, g.last(0), g.h(0)) * trapezoid_1d(j, g.last(1), g.h(1)) *
         trapezoid_1d(k, g.last(2), g.h(2));
}

inline double ipow(double x, double p) {
  x = std::abs(x);
  if (p == 2.0) return x * x;
  if (p == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  return std::pow(x, p);
}

/// Integral of |s|^p with trapezoidal weights.
inline double power_sum(const ScalarField& s, double p) {
  const Grid& g = s.grid();
  const auto& n = g.nodes();
  double acc = 0.0;
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) acc += volume_weight(g, i, j, k) * ipow(s.at(i, j, k), p);
  return acc;
}

inline double w1_power_sum(const ScalarField& s, double p) {
  double acc = power_sum(s, p);
  for (int a = 0; a < 3; ++a) acc += power_sum(partial(s, a), p);
  return acc;
}

inline double w2_power_sum(const ScalarField& s, double p) {
  const Grid& g = s.grid();
  for (int a = 0; a < 3; ++a)
    if (g.nodes()[a] < 5) throw ConfigError("W2p norm needs at least 5 nodes per axis");
  double acc = w1_power_sum(s, p);
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) acc += power_sum(second(s, a, b), p);
  return acc;
}

inline double slice_sq(const ScalarField& s, int i1) {
  const Grid& g = s.grid();
  double acc = 0.0;
  for (int k = 0; k <= g.last(2); ++k)
    for (int j = 0; j <= g.last(1); ++j) {
      const double w = trapezoid_1d(j, g.last(1), g.h(1)) * trapezoid_1d(k, g.last(2), g.h(2));
      const double v = s.at(i1, j, k);
      acc += w * v * v;
    }
  return acc;
}

/// Face-wise sum of weight * |f|^p over interior face nodes.
inline double face_power_sum(const FaceField& f, Face face, double p) {
  const FaceLayout lay(f.grid(), face);
  const auto& d = f.face(face);
  double acc = 0.0;
  for (int q = 1; q < lay.nodes[1] - 1; ++q)
    for (int pp = 1; pp < lay.nodes[0] - 1; ++pp) acc += lay.weight(pp, q) * ipow(d[lay.index(pp, q)], p);
  return acc;
}

/// Power sums of the in-plane first differences of face data.
inline double face_gradient_power_sum(const FaceField& f, Face face, double p) {
  const FaceLayout lay(f.grid(), face);
  const auto& d = f.face(face);
  double acc = 0.0;
  for (int q = 1; q < lay.nodes[1] - 1; ++q)
    for (int pp = 1; pp < lay.nodes[0] - 1; ++pp) {
      const std::size_t idx = lay.index(pp, q);
      auto along0 = [&](int o) { return d[idx + o]; };
      auto along1 = [&](int o) { return d[idx + static_cast<std::ptrdiff_t>(o) * lay.nodes[0]]; };
      const double g0 = stencil::first(along0, pp, lay.nodes[0] - 1, lay.h[0]);
      const double g1 = stencil::first(along1, q, lay.nodes[1] - 1, lay.h[1]);
      acc += lay.weight(pp, q) * (ipow(g0, p) + ipow(g1, p));
    }
  return acc;
}

/// Double-sum Gagliardo seminorm of order 1 - 1/p over pairs of interior nodes
/// of one face: sum w_x w_y |f(x)-f(y)|^p / |x-y|^(2 + (p-1)).
inline double face_gagliardo_power_sum(const FaceField& f, Face face, double p) {
  const FaceLayout lay(f.grid(), face);
  const auto& d = f.face(face);
  struct Pt {
    double x, y, w, v;
  };
  std::vector<Pt> pts;
  for (int q = 1; q < lay.nodes[1] - 1; ++q)
    for (int pp = 1; pp < lay.nodes[0] - 1; ++pp)
      pts.push_back({pp * lay.h[0], q * lay.h[1], lay.weight(pp, q), d[lay.index(pp, q)]});
  const double expo = 0.5 * (p + 1.0);  // |x-y|^(p+1) computed from the squared distance
  double acc = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const double dx = pts[a].x - pts[b].x;
      const double dy = pts[a].y - pts[b].y;
      const double r2 = dx * dx + dy * dy;
      acc += 2.0 * pts[a].w * pts[b].w * ipow(pts[a].v - pts[b].v, p) / std::pow(r2, expo);
    }
  return acc;
}

inline double boundary_power_sum(const FaceField& f, const NormKind& kind) {
  double acc = 0.0;
  for (Face face : faces_of(kind.region)) {
    switch (kind.kind) {
      case NormKind::Kind::BoundaryLp: acc += face_power_sum(f, face, kind.p); break;
      case NormKind::Kind::BoundaryW1p:
        acc += face_power_sum(f, face, kind.p) + face_gradient_power_sum(f, face, kind.p);
        break;
      case NormKind::Kind::TraceGagliardo:
        acc += face_power_sum(f, face, kind.p) + face_gagliardo_power_sum(f, face, kind.p);
        break;
      default: throw ConfigError("not a boundary norm");
    }
  }
  return acc;
}

inline double volume_power_sum(const ScalarField& s, const NormKind& kind) {
  switch (kind.kind) {
    case NormKind::Kind::Lp: return power_sum(s, kind.p);
    case NormKind::Kind::W1p: return w1_power_sum(s, kind.p);
    case NormKind::Kind::W2p: return w2_power_sum(s, kind.p);
    case NormKind::Kind::H1: return w1_power_sum(s, 2.0);
    default: return boundary_power_sum(trace(s), kind);
  }
}

inline double effective_p(const NormKind& kind) { return kind.kind == NormKind::Kind::H1 ? 2.0 : kind.p; }

}  // namespace detail

/// Cross-sectional L2 norm of the x1-cut at node plane i1.
inline double slice_l2(const ScalarField& s, int i1) {
  if (i1 < 0 || i1 > s.grid().last(0)) throw ConfigError("slice index out of range");
  return std::sqrt(detail::slice_sq(s, i1));
}

inline double slice_l2(const VectorField& v, int i1) {
  if (i1 < 0 || i1 > v.grid().last(0)) throw ConfigError("slice index out of range");
  return std::sqrt(detail::slice_sq(v[0], i1) + detail::slice_sq(v[1], i1) + detail::slice_sq(v[2], i1));
}

inline double norm(const ScalarField& s, const NormKind& kind) {
  if (kind.kind == NormKind::Kind::LinfL2) {
    double m = 0.0;
    for (int i = 0; i <= s.grid().last(0); ++i) m = std::max(m, slice_l2(s, i));
    return m;
  }
  const double p = detail::effective_p(kind);
  detail::check_p(p);
  return std::pow(detail::volume_power_sum(s, kind), 1.0 / p);
}

/// Vector norms add the p-th powers of the three components.
inline double norm(const VectorField& v, const NormKind& kind) {
  if (kind.kind == NormKind::Kind::LinfL2) {
    double m = 0.0;
    for (int i = 0; i <= v.grid().last(0); ++i) m = std::max(m, slice_l2(v, i));
    return m;
  }
  const double p = detail::effective_p(kind);
  detail::check_p(p);
  double acc = 0.0;
  for (int a = 0; a < 3; ++a) acc += detail::volume_power_sum(v[a], kind);
  return std::pow(acc, 1.0 / p);
}

inline double norm(const FaceField& f, const NormKind& kind) {
  detail::check_p(kind.p);
  return std::pow(detail::boundary_power_sum(f, kind), 1.0 / kind.p);
}

inline double norm(const SlipData& b, const NormKind& kind) {
  detail::check_p(kind.p);
  return std::pow(detail::boundary_power_sum(b.b1, kind) + detail::boundary_power_sum(b.b2, kind), 1.0 / kind.p);
}

/// Trapezoidal integral of s over the box.
inline double integrate(const ScalarField& s) {
  const Grid& g = s.grid();
  const auto& n = g.nodes();
  double acc = 0.0;
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) acc += detail::volume_weight(g, i, j, k) * s.at(i, j, k);
  return acc;
}

/// L2 norm restricted to nodes strictly inside the box (trapezoid weights).
inline double interior_l2(const ScalarField& s) {
  const Grid& g = s.grid();
  double acc = 0.0;
  for (int k = 1; k < g.last(2); ++k)
    for (int j = 1; j < g.last(1); ++j)
      for (int i = 1; i < g.last(0); ++i) {
        const double v = s.at(i, j, k);
        acc += g.h(0) * g.h(1) * g.h(2) * v * v;
      }
  return std::sqrt(acc);
}

inline double interior_l2(const VectorField& v) {
  const double a = interior_l2(v[0]), b = interior_l2(v[1]), c = interior_l2(v[2]);
  return std::sqrt(a * a + b * b + c * c);
}

}  // namespace slipflow
