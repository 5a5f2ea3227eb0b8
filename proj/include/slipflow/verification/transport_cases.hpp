#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "slipflow/material.hpp"
#include "slipflow/transport.hpp"
#include "slipflow/verification/manufactured.hpp"

namespace slipflow::verification {

/// Smooth transport data: u~ = e1 + convect (tangential on the lateral wall),
/// a smooth source v and inflow trace w_in.
struct TransportCase {
  ManufacturedCase flow{};

  TransportField transport(const Grid& g) const {
    const Vec3 e = g.extent();
    return TransportField::from_convect(VectorField::sample(g, [&](const Vec3& x) { return flow.convect<double>(x, e); }));
  }

  ScalarField source(const Grid& g) const {
    const Vec3 e = g.extent();
    const double pi = std::numbers::pi;
    return ScalarField::sample(g, [&](const Vec3& x) {
      return std::cos(pi * x[0] / e[0]) * std::cos(pi * x[1] / e[1]) + 0.5 * std::sin(pi * x[2] / e[2]);
    });
  }

  FaceField inflow(const Grid& g) const {
    const Vec3 e = g.extent();
    const double pi = std::numbers::pi;
    return trace(ScalarField::sample(g, [&](const Vec3& x) {
      return std::cos(pi * x[1] / e[1]) * std::cos(pi * x[2] / e[2]) + 0.25 * x[1];
    }));
  }
};

struct TransportLevel {
  int n1 = 0;
  double difference = 0.0;  ///< L2 distance between apply_S and upwind_march
};

struct TransportStudy {
  std::vector<TransportLevel> levels;
  std::vector<double> rates;

  double min_rate() const { return rates.empty() ? 0.0 : *std::min_element(rates.begin(), rates.end()); }
};

/// apply_S against upwind_march on grids refined together in all directions.
inline TransportStudy transport_study(const GeometryConfig& base, const std::vector<int>& n1_levels,
                                      const TransportCase& tc = {}) {
  TransportStudy st;
  for (int n1 : n1_levels) {
    GeometryConfig geo = base;
    geo.n2 = std::max(kMinCells, base.n2 * n1 / base.n1);
    geo.n3 = std::max(kMinCells, base.n3 * n1 / base.n1);
    geo.n1 = n1;
    const Grid g(geo);
    const TransportField tf = tc.transport(g);
    const ScalarField v = tc.source(g);
    const FaceField w_in = tc.inflow(g);
    const ScalarField a = apply_S(tf, v, w_in);
    const ScalarField b = upwind_march(tf, v, w_in);
    st.levels.push_back({n1, norm(a - b, NormKind::lp(2.0))});
  }
  for (std::size_t l = 1; l < st.levels.size(); ++l)
    st.rates.push_back(observed_order(st.levels[l - 1].difference, st.levels[l].difference));
  return st;
}

/// Largest deviation from the closed forms for u~ = e1:
/// v = 0 gives w_in on every slice, v = 1 gives w_in + x1. Both solvers.
inline double constant_field_error(const Grid& g) {
  const TransportField tf = TransportField::constant(g, {1.0, 0.0, 0.0});
  const FaceField w_in = TransportCase{}.inflow(g);
  double err = 0.0;
  for (double c : {0.0, 1.0}) {
    const ScalarField v(g, c);
    const ScalarField s = apply_S(tf, v, w_in);
    const ScalarField m = upwind_march(tf, v, w_in);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const auto ijk = g.ijk(n);
      const double exact = w_in.at(Face::inflow, 0, ijk[1], ijk[2]) + c * g.point(ijk[0], ijk[1], ijk[2])[0];
      err = std::max({err, std::abs(s[n] - exact), std::abs(m[n] - exact)});
    }
  }
  return err;
}

/// Largest arrival error for u~ = (1, tilt, 0): the characteristic through
/// (x1, a, b) leaves the inflow plane at (0, a - tilt x1, b). Seeds are the
/// nodes whose exact arrival stays inside the face.
inline double tilted_arrival_error(const Grid& g, double tilt) {
  const TransportField tf = TransportField::constant(g, {1.0, tilt, 0.0});
  const double W2 = g.extent()[1];
  double err = 0.0;
  const auto& n = g.nodes();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const Vec3 x = g.point(i, j, k);
        const double a = x[1] - tilt * x[0];
        if (a < 0.0 || a > W2) continue;
        const auto tr = trace_characteristic(tf, x);
        err = std::max({err, std::abs(tr.arrival[0]), std::abs(tr.arrival[1] - a), std::abs(tr.arrival[2] - x[2])});
      }
  return err;
}

/// Bound check of |S(v)|_{LinfL2} <= (1 + J)(|w_in|_{L2(inflow)} + sqrt(4L)|v|_{L2}).
struct SEstimateCheck {
  int trials = 0;
  int violations = 0;
  double jacobian = 0.0;
  double worst_ratio = 0.0;  ///< max over trials of lhs / rhs
};

/// Seeded random nodal (v, w_in) pairs against the transport field tf.
inline SEstimateCheck s_estimate_check(const TransportField& tf, int trials, std::uint64_t seed) {
  const Grid& g = tf.grid();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  SEstimateCheck out;
  out.trials = trials;
  out.jacobian = jacobian_bound(tf);
  const double L = g.extent()[0];
  for (int t = 0; t < trials; ++t) {
    ScalarField v(g), w(g);
    for (std::size_t n = 0; n < g.size(); ++n) v[n] = uni(rng);
    for (std::size_t n = 0; n < g.size(); ++n) w[n] = uni(rng);
    const FaceField w_in = trace(w);
    const double lhs = norm(apply_S(tf, v, w_in), NormKind::linf_l2());
    const double rhs = (1.0 + out.jacobian) * (norm(w_in, NormKind::boundary_lp(BoundarySet::inflow, 2.0)) +
                                               std::sqrt(4.0 * L) * norm(v, NormKind::lp(2.0)));
    out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
    if (!(lhs <= rhs)) ++out.violations;
  }
  return out;
}

}  // namespace slipflow::verification
