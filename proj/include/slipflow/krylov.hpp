#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "slipflow/error.hpp"

namespace slipflow {

using Vector = std::vector<double>;
using LinearAction = std::function<void(const Vector& x, Vector& y)>;
/// z = M^{-1} r for a preconditioner M.
using Preconditioner = std::function<void(const Vector& r, Vector& z)>;

struct KrylovConfig {
  double tolerance = 1e-10;  ///< relative residual |b - Ax| / |b|
  int max_iterations = 0;    ///< 0 selects 10 x unknown count
  int max_restarts = 5;      ///< fresh shadow residual after a breakdown

  void validate() const {
    if (!(tolerance > 0.0 && tolerance < 1.0)) throw ConfigError("Krylov tolerance must lie in (0,1)");
    if (max_iterations < 0) throw ConfigError("Krylov iteration cap must be positive");
  }
};

struct KrylovResult {
  Vector x;
  int iterations = 0;
  double residual = 0.0;  ///< final relative residual
};

namespace detail {

inline double dotv(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double normv(const Vector& a) { return std::sqrt(dotv(a, a)); }

}  // namespace detail

/// Right-preconditioned BiCGStab. `precond` may be empty (no preconditioning);
/// `guess` is an optional initial iterate.
inline KrylovResult krylov_solve(const LinearAction& A, const Vector& b, const KrylovConfig& cfg,
                                 const Preconditioner& M, const Vector& guess = {}) {
  cfg.validate();
  using detail::dotv;
  using detail::normv;
  const std::size_t n = b.size();
  const int cap = cfg.max_iterations > 0 ? cfg.max_iterations : static_cast<int>(10 * n);

  KrylovResult res;
  res.x = guess.empty() ? Vector(n, 0.0) : guess;
  const double bnorm = normv(b);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    return res;
  }

  auto precond = [&](const Vector& in, Vector& out) {
    if (M)
      M(in, out);
    else
      out = in;
  };

  Vector r(n), rhat(n), p(n), v(n), s(n), t(n), phat(n), shat(n), Ax(n);
  auto residual = [&] {
    A(res.x, Ax);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ax[i];
    return normv(r) / bnorm;
  };

  double rel = residual();
  Vector best = res.x;
  double best_rel = rel;
  int it = 0;
  int restarts = 0;

  while (rel > cfg.tolerance && it < cap) {
    rhat = r;
    double rho_old = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    bool breakdown = false;

    while (it < cap) {
      const double rho = dotv(rhat, r);
      if (rho == 0.0 || !std::isfinite(rho)) {
        breakdown = true;
        break;
      }
      const double beta = (rho / rho_old) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      precond(p, phat);
      A(phat, v);
      const double rv = dotv(rhat, v);
      if (rv == 0.0 || !std::isfinite(rv)) {
        breakdown = true;
        break;
      }
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      ++it;
      if (normv(s) / bnorm <= cfg.tolerance) {
        for (std::size_t i = 0; i < n; ++i) res.x[i] += alpha * phat[i];
        rel = residual();
        break;
      }
      precond(s, shat);
      A(shat, t);
      const double tt = dotv(t, t);
      if (tt == 0.0) {
        breakdown = true;
        break;
      }
      omega = dotv(t, s) / tt;
      for (std::size_t i = 0; i < n; ++i) {
        res.x[i] += alpha * phat[i] + omega * shat[i];
        r[i] = s[i] - omega * t[i];
      }
      rel = normv(r) / bnorm;
      if (rel < best_rel) {
        best_rel = rel;
        best = res.x;
      }
      if (rel <= cfg.tolerance) {
        rel = residual();  // guard against drift of the recursive residual
        break;
      }
      if (omega == 0.0) {
        breakdown = true;
        break;
      }
      rho_old = rho;
    }
    if (rel < best_rel) {
      best_rel = rel;
      best = res.x;
    }
    if (rel <= cfg.tolerance) break;
    if (breakdown || it < cap) {
      if (++restarts > cfg.max_restarts) break;
      res.x = best;
      rel = residual();
    }
  }

  res.iterations = it;
  res.residual = rel;
  if (!(rel <= cfg.tolerance)) throw ConvergenceError("Krylov solve did not converge", best_rel, it);
  return res;
}

/// Jacobi-preconditioned variant; `diag` may be empty.
inline KrylovResult krylov_solve(const LinearAction& A, const Vector& b, const KrylovConfig& cfg,
                                 const Vector& diag = {}, const Vector& guess = {}) {
  if (diag.empty()) return krylov_solve(A, b, cfg, Preconditioner{}, guess);
  Vector inv(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) inv[i] = diag[i] != 0.0 ? 1.0 / diag[i] : 1.0;
  return krylov_solve(
      A, b, cfg,
      [&](const Vector& r, Vector& z) {
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv[i] * r[i];
      },
      guess);
}

}  // namespace slipflow
