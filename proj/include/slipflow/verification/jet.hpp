#pragma once

#include <array>
#include <cmath>

namespace slipflow::verification {

/// Second-order forward-mode jet in three variables: value, gradient, Hessian.
struct Jet {
  double v = 0.0;
  std::array<double, 3> d{};
  std::array<std::array<double, 3>, 3> h{};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Jet variable(double value, int axis) {
    Jet j(value);
    j.d[axis] = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int a = 0; a < 3; ++a) {
      d[a] += o.d[a];
      for (int b = 0; b < 3; ++b) h[a][b] += o.h[a][b];
    }
    return *this;
  }
  Jet& operator-=(const Jet& o) { return *this += -o; }

  friend Jet operator-(Jet a) {
    a.v = -a.v;
    for (int x = 0; x < 3; ++x) {
      a.d[x] = -a.d[x];
      for (int y = 0; y < 3; ++y) a.h[x][y] = -a.h[x][y];
    }
    return a;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.v * b.v);
    for (int x = 0; x < 3; ++x) {
      r.d[x] = a.d[x] * b.v + a.v * b.d[x];
      for (int y = 0; y < 3; ++y)
        r.h[x][y] = a.h[x][y] * b.v + a.d[x] * b.d[y] + a.d[y] * b.d[x] + a.v * b.h[x][y];
    }
    return r;
  }
};

/// g(a) for a scalar function with derivatives g0, g1, g2 at a.v.
inline Jet chain(const Jet& a, double g0, double g1, double g2) {
  Jet r(g0);
  for (int x = 0; x < 3; ++x) {
    r.d[x] = g1 * a.d[x];
    for (int y = 0; y < 3; ++y) r.h[x][y] = g2 * a.d[x] * a.d[y] + g1 * a.h[x][y];
  }
  return r;
}

inline Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

using std::cos;
using std::exp;
using std::sin;

}  // namespace slipflow::verification
