#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "slipflow/error.hpp"

namespace slipflow {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Extents and resolution of the box cylinder (0,L) x (0,W2) x (0,W3).
/// Axis 0 is the flow direction x1.
struct GeometryConfig {
  double length = 2.0;
  double width2 = 1.0;
  double width3 = 1.0;
  int n1 = 16;
  int n2 = 8;
  int n3 = 8;

  bool operator==(const GeometryConfig&) const = default;
};

inline constexpr int kMinCells = 4;

/// Uniform vertex-centered tensor grid. Node (i,j,k) sits at (i*h1, j*h2, k*h3).
/// Index ordering is i fastest, then j, then k.
class Grid {
 public:
  Grid() = default;

  explicit Grid(const GeometryConfig& cfg) : cfg_(cfg) {
    const std::array<double, 3> ext{cfg.length, cfg.width2, cfg.width3};
    const std::array<int, 3> n{cfg.n1, cfg.n2, cfg.n3};
    static constexpr const char* names[3] = {"length", "width2", "width3"};
    for (int a = 0; a < 3; ++a) {
      if (!(ext[a] > 0.0) || !std::isfinite(ext[a]))
        throw ConfigError(std::string("non-positive extent: ") + names[a]);
      if (n[a] < kMinCells) throw ConfigError("cell count below minimum");
      extent_[a] = ext[a];
      cells_[a] = n[a];
      nodes_[a] = n[a] + 1;
      h_[a] = ext[a] / n[a];
    }
    stride_ = {1, static_cast<std::size_t>(nodes_[0]),
               static_cast<std::size_t>(nodes_[0]) * static_cast<std::size_t>(nodes_[1])};
  }

  const GeometryConfig& geometry() const { return cfg_; }
  const std::array<int, 3>& cells() const { return cells_; }
  const std::array<int, 3>& nodes() const { return nodes_; }
  const std::array<double, 3>& spacing() const { return h_; }
  const std::array<double, 3>& extent() const { return extent_; }
  double h(int axis) const { return h_[axis]; }
  int last(int axis) const { return cells_[axis]; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  std::size_t size() const { return stride_[2] * static_cast<std::size_t>(nodes_[2]); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + stride_[1] * static_cast<std::size_t>(j) +
           stride_[2] * static_cast<std::size_t>(k);
  }

  std::array<int, 3> ijk(std::size_t idx) const {
    const int i = static_cast<int>(idx % stride_[1]);
    const int j = static_cast<int>((idx / stride_[1]) % static_cast<std::size_t>(nodes_[1]));
    const int k = static_cast<int>(idx / stride_[2]);
    return {i, j, k};
  }

  double coord(int axis, int i) const { return i * h_[axis]; }

  Vec3 point(int i, int j, int k) const { return {i * h_[0], j * h_[1], k * h_[2]}; }

  bool on_boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == cells_[0] || j == cells_[1] || k == cells_[2];
  }

  /// Number of faces of the box the node lies on (0 for interior nodes).
  int face_count(int i, int j, int k) const {
    const std::array<int, 3> c{i, j, k};
    int count = 0;
    for (int a = 0; a < 3; ++a)
      if (c[a] == 0 || c[a] == cells_[a]) ++count;
    return count;
  }

  bool operator==(const Grid& o) const { return cfg_ == o.cfg_; }

 private:
  GeometryConfig cfg_{};
  std::array<double, 3> extent_{};
  std::array<int, 3> cells_{};
  std::array<int, 3> nodes_{};
  std::array<double, 3> h_{};
  std::array<std::size_t, 3> stride_{};
};

inline Grid build_grid(const GeometryConfig& cfg) { return Grid(cfg); }

// ---------------------------------------------------------------------------
// Faces and boundary frames

/// The six faces of the box. Face 0 is the inflow plane x1 = 0, face 1 the
/// outflow plane x1 = L, faces 2..5 the lateral wall.
enum class Face : int { inflow = 0, outflow = 1, x2_low = 2, x2_high = 3, x3_low = 4, x3_high = 5 };

inline constexpr std::array<Face, 6> kAllFaces{Face::inflow, Face::outflow, Face::x2_low,
                                               Face::x2_high, Face::x3_low, Face::x3_high};

inline int face_axis(Face f) { return static_cast<int>(f) / 2; }
inline bool face_is_high(Face f) { return static_cast<int>(f) % 2 == 1; }
inline Face face_of(int axis, bool high) { return static_cast<Face>(2 * axis + (high ? 1 : 0)); }

enum class Region { inflow, outflow, lateral, edge };

inline Region face_region(Face f) {
  switch (f) {
    case Face::inflow: return Region::inflow;
    case Face::outflow: return Region::outflow;
    default: return Region::lateral;
  }
}

inline const char* face_name(Face f) {
  static constexpr const char* names[6] = {"inflow", "outflow", "x2_low", "x2_high", "x3_low", "x3_high"};
  return names[static_cast<int>(f)];
}

/// Outward unit normal of a face.
inline Vec3 face_normal(Face f) {
  Vec3 n{0.0, 0.0, 0.0};
  n[face_axis(f)] = face_is_high(f) ? 1.0 : -1.0;
  return n;
}

/// Right-handed tangent pair (tau1 x tau2 = n). On the lateral wall tau1 is the
/// axial direction; on inflow/outflow tau1 = e2.
inline std::array<Vec3, 2> face_tangents(Face f) {
  const Vec3 n = face_normal(f);
  const Vec3 t1 = face_axis(f) == 0 ? Vec3{0.0, 1.0, 0.0} : Vec3{1.0, 0.0, 0.0};
  return {t1, cross(n, t1)};
}

/// In-plane axes of a face in increasing order.
inline std::array<int, 2> face_plane_axes(Face f) {
  switch (face_axis(f)) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

/// Node layout of one face: a (m0+1) x (m1+1) lattice over its two in-plane axes.
struct FaceLayout {
  Face face;
  std::array<int, 2> axes;
  std::array<int, 2> nodes;
  std::array<double, 2> h;

  FaceLayout(const Grid& g, Face f) : face(f), axes(face_plane_axes(f)) {
    for (int d = 0; d < 2; ++d) {
      nodes[d] = g.nodes()[axes[d]];
      h[d] = g.h(axes[d]);
    }
  }

  std::size_t size() const { return static_cast<std::size_t>(nodes[0]) * nodes[1]; }
  std::size_t index(int p, int q) const { return static_cast<std::size_t>(p) + static_cast<std::size_t>(nodes[0]) * q; }
  bool interior(int p, int q) const { return p > 0 && q > 0 && p < nodes[0] - 1 && q < nodes[1] - 1; }

  /// Volume-grid (i,j,k) of face node (p,q).
  std::array<int, 3> ijk(const Grid& g, int p, int q) const {
    std::array<int, 3> c{};
    const int a = face_axis(face);
    c[a] = face_is_high(face) ? g.last(a) : 0;
    c[axes[0]] = p;
    c[axes[1]] = q;
    return c;
  }

  /// Quadrature weight of face node (p,q). Nodes on the rim of the face carry
  /// zero weight; the first interior row absorbs the rim's share so that
  /// weights still sum exactly to the face area.
  double weight(int p, int q) const { return weight_1d(p, 0) * weight_1d(q, 1); }

  double weight_1d(int p, int d) const {
    const int m = nodes[d] - 1;
    if (p <= 0 || p >= m) return 0.0;
    if (p == 1 || p == m - 1) return 1.5 * h[d];
    return h[d];
  }
};

struct BoundaryFrame {
  std::size_t node = 0;
  Region region = Region::edge;
  int face = -1;  ///< owning face for face-interior nodes, -1 on edges
  Vec3 n{};
  Vec3 tau1{};
  Vec3 tau2{};
  double chi1 = 0.0;
  double chi2 = 0.0;
  double weight = 0.0;
};

/// Boundary frames of every boundary node, in node order.
class BoundaryFrames {
 public:
  BoundaryFrames() = default;

  explicit BoundaryFrames(const Grid& g) : grid_(g), lookup_(g.size(), -1) {
    const auto& nn = g.nodes();
    for (int k = 0; k < nn[2]; ++k)
      for (int j = 0; j < nn[1]; ++j)
        for (int i = 0; i < nn[0]; ++i) {
          if (!g.on_boundary(i, j, k)) continue;
          BoundaryFrame fr;
          fr.node = g.index(i, j, k);
          if (g.face_count(i, j, k) >= 2) {
            fr.region = Region::edge;
          } else {
            const std::array<int, 3> c{i, j, k};
            Face f = Face::inflow;
            for (int a = 0; a < 3; ++a) {
              if (c[a] == 0) f = face_of(a, false);
              if (c[a] == g.last(a)) f = face_of(a, true);
            }
            fr.face = static_cast<int>(f);
            fr.region = face_region(f);
            fr.n = face_normal(f);
            const auto t = face_tangents(f);
            fr.tau1 = t[0];
            fr.tau2 = t[1];
            const FaceLayout lay(g, f);
            fr.weight = lay.weight(c[lay.axes[0]], c[lay.axes[1]]);
          }
          lookup_[fr.node] = static_cast<long>(frames_.size());
          frames_.push_back(fr);
        }
  }

  const Grid& grid() const { return grid_; }
  const std::vector<BoundaryFrame>& all() const { return frames_; }
  std::size_t size() const { return frames_.size(); }

  /// Frame of a boundary node, nullptr for interior nodes.
  const BoundaryFrame* find(std::size_t node) const {
    const long at = lookup_[node];
    return at < 0 ? nullptr : &frames_[static_cast<std::size_t>(at)];
  }

 private:
  Grid grid_{};
  std::vector<long> lookup_;
  std::vector<BoundaryFrame> frames_;
};

inline BoundaryFrames boundary_frames(const Grid& g) { return BoundaryFrames(g); }

}  // namespace slipflow
