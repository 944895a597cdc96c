#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "flatlab/origami.hpp"
#include "flatlab/stratum.hpp"
#include "flatlab/vector.hpp"

namespace flatlab {

/// Input record for building a surface. Half-edge `i` runs from its origin to
/// the origin of `next`; its triangle lies on its left.
struct HalfEdgeRecord {
  PlanarVector vector;
  int twin = -1;
  int next = -1;
};

struct HalfEdge {
  int id = -1;
  PlanarVector vector;
  int twin = -1;
  int next = -1;
};

/// A vertex orbit. Order m means cone angle 2*pi*(m+1). Order-0 vertices are
/// regular; they stay in the mesh as removable points and only act as
/// saddle-connection endpoints when `marked`.
struct ConePoint {
  int id = -1;
  int order = 0;
  bool marked = false;
  /// Outgoing half-edges in counter-clockwise order.
  std::vector<int> incident_half_edges;

  bool is_singular() const { return order > 0 || marked; }
};

/// Triangulated translation surface. Immutable once built; every operation
/// that changes geometry produces a new surface.
class TranslationSurface {
 public:
  TranslationSurface() = default;

  /// Validates the records and computes the vertex structure. `tol` is the
  /// absolute tolerance for closure and pairing checks in floating mode
  /// (exact mode compares exactly).
  static TranslationSurface build(std::vector<HalfEdgeRecord> records, bool exact,
                                  std::vector<int> marked_half_edges = {}, double area_scale = 1.0,
                                  double tol = 1e-9) {
    TranslationSurface s;
    s.exact_ = exact;
    s.area_scale_ = area_scale;
    s.tol_ = exact ? 0.0 : tol;
    s.half_edges_.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
      s.half_edges_.push_back({static_cast<int>(i), records[i].vector, records[i].twin, records[i].next});
    s.validate_and_index(marked_half_edges);
    return s;
  }

  // accessors

  std::span<const HalfEdge> half_edges() const { return half_edges_; }
  int size() const { return static_cast<int>(half_edges_.size()); }
  const PlanarVector& vec(int h) const { return half_edges_[h].vector; }
  int twin(int h) const { return half_edges_[h].twin; }
  int next(int h) const { return half_edges_[h].next; }
  int prev(int h) const { return next(next(h)); }
  int origin(int h) const { return origin_[h]; }
  int target(int h) const { return origin_[next(h)]; }
  /// Next outgoing half-edge counter-clockwise around origin(h).
  int ccw(int h) const { return twin(prev(h)); }
  /// Next outgoing half-edge clockwise around origin(h).
  int cw(int h) const { return next(twin(h)); }

  bool exact() const { return exact_; }
  double area_scale() const { return area_scale_; }
  double tolerance() const { return tol_; }

  std::span<const ConePoint> cone_points() const { return vertices_; }
  const ConePoint& vertex(int v) const { return vertices_[v]; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int face_count() const { return size() / 3; }
  int edge_count() const { return size() / 2; }

  /// Genus from the Euler characteristic V - E + F = 2 - 2g.
  int genus() const { return (2 - (vertex_count() - edge_count() + face_count())) / 2; }

  /// Orders of all vertices with order >= 1, in vertex-id order.
  StratumSignature stratum_signature() const {
    StratumSignature s;
    for (const auto& c : vertices_)
      if (c.order > 0) s.orders.push_back(c.order);
    return s;
  }

  double area() const {
    double a = 0.0;
    for (int h = 0; h < size(); ++h)
      if (h == min_in_face(h)) a += cross(vec(h), vec(next(h)));
    return 0.5 * a;
  }

  /// Twice the area as an exact integer (exact mode only).
  long long twice_area_exact() const {
    long long a = 0;
    for (int h = 0; h < size(); ++h)
      if (h == min_in_face(h))
        a += static_cast<long long>(cross(vec(h), vec(next(h))));
    return a;
  }

  std::vector<HalfEdgeRecord> records() const {
    std::vector<HalfEdgeRecord> r;
    r.reserve(half_edges_.size());
    for (const auto& e : half_edges_) r.push_back({e.vector, e.twin, e.next});
    return r;
  }

  std::vector<int> marked_half_edges() const {
    std::vector<int> m;
    for (const auto& c : vertices_)
      if (c.marked) m.push_back(c.incident_half_edges.front());
    return m;
  }

  /// Same combinatorics with every vector multiplied by `factor`.
  TranslationSurface scaled(double factor) const {
    auto r = records();
    for (auto& e : r) e.vector = e.vector * factor;
    const bool stays_exact = exact_ && factor == std::floor(factor);
    return build(std::move(r), stays_exact, marked_half_edges(), area_scale_ * factor, tol_ == 0 ? 1e-9 : tol_ * std::abs(factor));
  }

  /// Rescales to unit area; the result is always in floating mode.
  TranslationSurface normalize_area() const {
    const double f = 1.0 / std::sqrt(area());
    auto r = records();
    for (auto& e : r) e.vector = e.vector * f;
    return build(std::move(r), false, marked_half_edges(), area_scale_ * f, 1e-9);
  }

  /// Returns a copy where the vertex at the origin of each listed half-edge
  /// is marked.
  TranslationSurface with_marked(std::vector<int> half_edges) const {
    auto m = marked_half_edges();
    m.insert(m.end(), half_edges.begin(), half_edges.end());
    return build(records(), exact_, m, area_scale_, tol_ == 0 ? 1e-9 : tol_);
  }

  /// Vertex winding number: the cone angle divided by 2*pi, computed by
  /// counting how often the positive x-direction is swept. Exact.
  static bool sweeps_positive_x(PlanarVector u, PlanarVector w) {
    return (u.y < 0 || (u.y == 0 && u.x > 0)) && w.y > 0;
  }

 private:
  int min_in_face(int h) const { return std::min({h, next(h), next(next(h))}); }

  void validate_and_index(std::span<const int> marked_half_edges) {
    const int n = size();
    if (n == 0 || n % 6 != 0)
      throw Error(ErrorKind::BadPairing, "half-edge count must be a positive multiple of 6");
    for (const auto& e : half_edges_) {
      if (!std::isfinite(e.vector.x) || !std::isfinite(e.vector.y))
        throw Error(ErrorKind::ValidationError, "non-finite vector on half-edge " + std::to_string(e.id));
      if (exact_ && !is_integral(e.vector))
        throw Error(ErrorKind::ValidationError, "exact mode requires integer vectors");
      if (e.twin < 0 || e.twin >= n || e.twin == e.id || half_edges_[e.twin].twin != e.id)
        throw Error(ErrorKind::BadPairing, "twin pointers are not an involution at " + std::to_string(e.id));
      if (e.next < 0 || e.next >= n || e.next == e.id)
        throw Error(ErrorKind::BadPairing, "bad next pointer at " + std::to_string(e.id));
      if (!nearly_equal(half_edges_[e.twin].vector, -e.vector, tol_))
        throw Error(ErrorKind::BadPairing, "twin vectors do not cancel at " + std::to_string(e.id));
    }
    std::vector<int> next_seen(n, 0);
    for (const auto& e : half_edges_) ++next_seen[e.next];
    for (int c : next_seen)
      if (c != 1) throw Error(ErrorKind::BadPairing, "next is not a permutation");
    for (int h = 0; h < n; ++h) {
      if (next(next(next(h))) != h) throw Error(ErrorKind::BadPairing, "faces must be triangles");
      const PlanarVector sum = vec(h) + vec(next(h)) + vec(prev(h));
      if (!nearly_equal(sum, {0, 0}, tol_ * 3))
        throw Error(ErrorKind::NonClosedTriangle, "triangle at half-edge " + std::to_string(h) + " does not close");
      if (!(cross(vec(h), vec(next(h))) > tol_))
        throw Error(ErrorKind::DegenerateTriangle, "triangle at half-edge " + std::to_string(h) + " has non-positive area");
    }
    // connectivity through the dual graph
    {
      std::vector<char> seen(n, 0);
      std::vector<int> stack{0};
      int count = 0;
      while (!stack.empty()) {
        const int h = stack.back();
        stack.pop_back();
        if (seen[h]) continue;
        for (int k = h, i = 0; i < 3; ++i, k = next(k)) {
          if (!seen[k]) {
            seen[k] = 1;
            ++count;
            if (!seen[twin(k)]) stack.push_back(twin(k));
          }
        }
      }
      if (count != n) throw Error(ErrorKind::Disconnected, "gluing graph is not connected");
    }
    // vertex orbits
    origin_.assign(n, -1);
    vertices_.clear();
    for (int h = 0; h < n; ++h) {
      if (origin_[h] >= 0) continue;
      ConePoint c;
      c.id = static_cast<int>(vertices_.size());
      int winding = 0;
      double angle = 0.0;
      int k = h;
      do {
        origin_[k] = c.id;
        c.incident_half_edges.push_back(k);
        const PlanarVector u = vec(k), w = -vec(prev(k));
        winding += sweeps_positive_x(u, w) ? 1 : 0;
        angle += std::atan2(cross(u, w), dot(u, w));
        k = ccw(k);
        if (static_cast<int>(c.incident_half_edges.size()) > n)
          throw Error(ErrorKind::BadPairing, "vertex orbit does not close");
      } while (k != h);
      if (winding < 1 || std::abs(angle / (2 * std::numbers::pi) - winding) > 1e-6)
        throw Error(ErrorKind::ValidationError, "cone angle is not a positive multiple of 2*pi");
      c.order = winding - 1;
      vertices_.push_back(std::move(c));
    }
    for (int h : marked_half_edges) {
      if (h < 0 || h >= n) throw Error(ErrorKind::ValidationError, "marked half-edge out of range");
      vertices_[origin_[h]].marked = true;
    }
    int total = 0;
    for (const auto& c : vertices_) total += c.order;
    if (total != 2 * genus() - 2)
      throw Error(ErrorKind::ValidationError, "Gauss-Bonnet check failed: sum of orders " + std::to_string(total) +
                                                  " vs genus " + std::to_string(genus()));
  }

  std::vector<HalfEdge> half_edges_;
  std::vector<int> origin_;
  std::vector<ConePoint> vertices_;
  bool exact_ = false;
  double area_scale_ = 1.0;
  double tol_ = 0.0;
};

inline TranslationSurface build_from_triangulation(std::vector<HalfEdgeRecord> records, bool exact,
                                                   std::vector<int> marked_half_edges = {}) {
  return TranslationSurface::build(std::move(records), exact, std::move(marked_half_edges));
}

/// Splits each unit square into a lower-right and an upper-left triangle.
/// Square i owns half-edges 6i..6i+5: bottom, right, diagonal (down), diagonal
/// (up), top, left.
inline TranslationSurface build_from_origami(const Origami& o) {
  if (!o.is_connected()) throw Error(ErrorKind::Disconnected, "origami permutations are not transitive");
  const int n = o.n_squares;
  std::vector<HalfEdgeRecord> r(6 * n);
  for (int i = 0; i < n; ++i) {
    const int b = 6 * i;
    r[b + 0] = {{1, 0}, -1, b + 1};
    r[b + 1] = {{0, 1}, 6 * o.h[i] + 5, b + 2};
    r[b + 2] = {{-1, -1}, b + 3, b + 0};
    r[b + 3] = {{1, 1}, b + 2, b + 4};
    r[b + 4] = {{-1, 0}, 6 * o.v[i] + 0, b + 5};
    r[b + 5] = {{0, -1}, -1, b + 3};
  }
  // bottom of v(i) and left of h(i) point back at square i
  for (int i = 0; i < n; ++i) {
    r[6 * o.v[i] + 0].twin = 6 * i + 4;
    r[6 * o.h[i] + 5].twin = 6 * i + 1;
  }
  return TranslationSurface::build(std::move(r), true);
}

}  // namespace flatlab
