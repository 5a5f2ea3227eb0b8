#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "slipflow/grid.hpp"

namespace slipflow {

/// One real value per grid node.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g, double value = 0.0) : grid_(g), v_(g.size(), value) {}

  /// Samples f(x) at every node.
  template <class Fn>
  static ScalarField sample(const Grid& g, Fn&& f) {
    ScalarField s(g);
    const auto& n = g.nodes();
    for (int k = 0; k < n[2]; ++k)
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i) s.v_[g.index(i, j, k)] = f(g.point(i, j, k));
    return s;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& at(int i, int j, int k) { return v_[grid_.index(i, j, k)]; }
  double at(int i, int j, int k) const { return v_[grid_.index(i, j, k)]; }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  bool all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  ScalarField& operator+=(const ScalarField& o) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  ScalarField& operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
  }

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double c, ScalarField a) { return a *= c; }
  friend ScalarField operator-(ScalarField a) { return a *= -1.0; }

  /// Pointwise product.
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    ScalarField r(a.grid_);
    for (std::size_t i = 0; i < r.v_.size(); ++i) r.v_[i] = a.v_[i] * b.v_[i];
    return r;
  }

  bool operator==(const ScalarField& o) const { return grid_ == o.grid_ && v_ == o.v_; }

 private:
  Grid grid_{};
  std::vector<double> v_;
};

/// Three real values per grid node.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& g) : c_{ScalarField(g), ScalarField(g), ScalarField(g)} {}
  VectorField(ScalarField a, ScalarField b, ScalarField c) : c_{std::move(a), std::move(b), std::move(c)} {}

  template <class Fn>
  static VectorField sample(const Grid& g, Fn&& f) {
    VectorField v(g);
    const auto& n = g.nodes();
    for (int k = 0; k < n[2]; ++k)
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i) {
          const Vec3 val = f(g.point(i, j, k));
          const std::size_t idx = g.index(i, j, k);
          for (int a = 0; a < 3; ++a) v.c_[a][idx] = val[a];
        }
    return v;
  }

  const Grid& grid() const { return c_[0].grid(); }
  std::size_t size() const { return c_[0].size(); }

  ScalarField& operator[](int a) { return c_[a]; }
  const ScalarField& operator[](int a) const { return c_[a]; }

  Vec3 at(std::size_t idx) const { return {c_[0][idx], c_[1][idx], c_[2][idx]}; }

  bool all_finite() const { return c_[0].all_finite() && c_[1].all_finite() && c_[2].all_finite(); }
  double max_abs() const { return std::max({c_[0].max_abs(), c_[1].max_abs(), c_[2].max_abs()}); }

  VectorField& operator+=(const VectorField& o) {
    for (int a = 0; a < 3; ++a) c_[a] += o.c_[a];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    for (int a = 0; a < 3; ++a) c_[a] -= o.c_[a];
    return *this;
  }
  VectorField& operator*=(double s) {
    for (auto& c : c_) c *= s;
    return *this;
  }

  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }
  friend VectorField operator-(VectorField a) { return a *= -1.0; }

  /// Pointwise scaling by a scalar field.
  friend VectorField operator*(const ScalarField& s, const VectorField& v) {
    return VectorField(s * v[0], s * v[1], s * v[2]);
  }

  bool operator==(const VectorField& o) const { return c_ == o.c_; }

 private:
  std::array<ScalarField, 3> c_;
};

/// Scalar data on the six faces of the box, one lattice per face
/// (see FaceLayout). Rim nodes are stored but carry zero quadrature weight.
class FaceField {
 public:
  FaceField() = default;
  explicit FaceField(const Grid& g) : grid_(g) {
    for (Face f : kAllFaces) data_[static_cast<int>(f)].assign(FaceLayout(g, f).size(), 0.0);
  }

  /// Samples f(face, x) on every face node.
  template <class Fn>
  static FaceField sample(const Grid& g, Fn&& fn) {
    FaceField out(g);
    for (Face f : kAllFaces) {
      const FaceLayout lay(g, f);
      auto& d = out.data_[static_cast<int>(f)];
      for (int q = 0; q < lay.nodes[1]; ++q)
        for (int p = 0; p < lay.nodes[0]; ++p) {
          const auto c = lay.ijk(g, p, q);
          d[lay.index(p, q)] = fn(f, g.point(c[0], c[1], c[2]));
        }
    }
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::vector<double>& face(Face f) { return data_[static_cast<int>(f)]; }
  const std::vector<double>& face(Face f) const { return data_[static_cast<int>(f)]; }

  /// Value at the face node coinciding with volume node (i,j,k).
  double at(Face f, int i, int j, int k) const {
    const FaceLayout lay(grid_, f);
    const std::array<int, 3> c{i, j, k};
    return data_[static_cast<int>(f)][lay.index(c[lay.axes[0]], c[lay.axes[1]])];
  }

  FaceField& operator*=(double s) {
    for (auto& d : data_)
      for (double& x : d) x *= s;
    return *this;
  }
  FaceField& operator+=(const FaceField& o) {
    for (int f = 0; f < 6; ++f)
      for (std::size_t i = 0; i < data_[f].size(); ++i) data_[f][i] += o.data_[f][i];
    return *this;
  }
  friend FaceField operator*(double s, FaceField a) { return a *= s; }

  bool operator==(const FaceField& o) const { return grid_ == o.grid_ && data_ == o.data_; }

 private:
  Grid grid_{};
  std::array<std::vector<double>, 6> data_;
};

/// Trace of a volume field on every face.
inline FaceField trace(const ScalarField& s) {
  const Grid& g = s.grid();
  FaceField out(g);
  for (Face f : kAllFaces) {
    const FaceLayout lay(g, f);
    auto& d = out.face(f);
    for (int q = 0; q < lay.nodes[1]; ++q)
      for (int p = 0; p < lay.nodes[0]; ++p) {
        const auto c = lay.ijk(g, p, q);
        d[lay.index(p, q)] = s.at(c[0], c[1], c[2]);
      }
  }
  return out;
}

/// Tangential slip data (B1, B2) on every face, relative to face_tangents().
struct SlipData {
  FaceField b1;
  FaceField b2;

  SlipData() = default;
  explicit SlipData(const Grid& g) : b1(g), b2(g) {}

  const FaceField& operator[](int k) const { return k == 0 ? b1 : b2; }
  FaceField& operator[](int k) { return k == 0 ? b1 : b2; }
};

}  // namespace slipflow
