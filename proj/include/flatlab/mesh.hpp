#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "flatlab/surface.hpp"
#include "flatlab/vector.hpp"

namespace flatlab {

/// Editable half-edge mesh used by surgery and canonicalization. Half-edge
/// ids survive flips; splits append new ids. Vertex ids (`origin`) are kept
/// current through flips and splits and recomputed by `reindex` after twin
/// rewiring.
class Mesh {
 public:
  Mesh() = default;

  explicit Mesh(const TranslationSurface& s)
      : exact_(s.exact()), tol_(s.exact() ? 0.0 : s.tolerance()), area_scale_(s.area_scale()) {
    const int n = s.size();
    vec_.resize(n);
    twin_.resize(n);
    next_.resize(n);
    marked_.assign(n, 0);
    for (int h = 0; h < n; ++h) {
      vec_[h] = s.vec(h);
      twin_[h] = s.twin(h);
      next_[h] = s.next(h);
      marked_[h] = s.vertex(s.origin(h)).marked;
    }
    reindex();
  }

  int size() const { return static_cast<int>(vec_.size()); }
  const PlanarVector& vec(int h) const { return vec_[h]; }
  int twin(int h) const { return twin_[h]; }
  int next(int h) const { return next_[h]; }
  int prev(int h) const { return next_[next_[h]]; }
  int ccw(int h) const { return twin(prev(h)); }
  int cw(int h) const { return next(twin(h)); }
  int origin(int h) const { return origin_[h]; }
  int target(int h) const { return origin_[next_[h]]; }
  bool exact() const { return exact_; }
  double tolerance() const { return tol_; }

  int vertex_count() const { return static_cast<int>(order_.size()); }
  int order(int v) const { return order_[v]; }
  bool marked(int v) const { return vmarked_[v]; }
  bool singular(int v) const { return order_[v] > 0 || vmarked_[v]; }
  /// Any outgoing half-edge of vertex v.
  int some_half_edge(int v) const { return first_[v]; }

  /// Outgoing half-edges at origin(h), counter-clockwise starting at h.
  std::vector<int> star(int h) const {
    std::vector<int> out;
    int k = h;
    do {
      out.push_back(k);
      k = ccw(k);
    } while (k != h && static_cast<int>(out.size()) <= size());
    return out;
  }

  void set_twin(int a, int b) {
    twin_[a] = b;
    twin_[b] = a;
  }

  /// Recomputes vertex orbits, orders and marks. A vertex is marked when any
  /// of its outgoing half-edges carries the mark.
  void reindex() {
    const int n = size();
    origin_.assign(n, -1);
    order_.clear();
    vmarked_.clear();
    first_.clear();
    for (int h = 0; h < n; ++h) {
      if (origin_[h] >= 0) continue;
      const int id = static_cast<int>(order_.size());
      int winding = 0;
      bool mk = false;
      int k = h, guard = 0;
      do {
        origin_[k] = id;
        mk = mk || marked_[k];
        winding += TranslationSurface::sweeps_positive_x(vec(k), -vec(prev(k))) ? 1 : 0;
        k = ccw(k);
        if (++guard > n) throw Error(ErrorKind::BadPairing, "vertex orbit does not close");
      } while (k != h);
      order_.push_back(winding - 1);
      vmarked_.push_back(mk);
      first_.push_back(h);
    }
    for (int h = 0; h < n; ++h) marked_[h] = vmarked_[origin_[h]];
  }

  double triangle_cross(int h) const { return cross(vec(h), vec(next(h))); }

  /// Is the quadrilateral around the edge of h strictly convex, so that the
  /// edge can be flipped?
  bool flippable(int h) const {
    const int t = twin(h);
    if (h == next(t) || h == prev(t)) return false;
    const PlanarVector B = vec(h), C = B + vec(next(h)), D = vec(next(t));
    const double eps = tol_ * (C.norm2() + D.norm2());
    return cross(C - D, -C) > eps && cross(D - C, B - D) > eps;
  }

  /// Replaces the diagonal of the quadrilateral around h by the other one.
  /// Triangle (A,B,C) on h and (B,A,D) on twin(h) become (D,C,A) and (C,D,B).
  void flip(int h) {
    const int t = twin(h);
    const int h1 = next(h), h2 = next(h1), t1 = next(t), t2 = next(t1);
    const PlanarVector dc = -(vec(t1) + vec(h2));
    vec_[h] = dc;
    vec_[t] = -dc;
    next_[h] = h2;
    next_[h2] = t1;
    next_[t1] = h;
    next_[t] = t2;
    next_[t2] = h1;
    next_[h1] = t;
    origin_[h] = origin_[t2];
    origin_[t] = origin_[h2];
    marked_[h] = marked_[t2];
    marked_[t] = marked_[h2];
    first_[origin_[t1]] = t1;
    first_[origin_[h1]] = h1;
    first_[origin_[h]] = h;
    first_[origin_[t]] = t;
  }

  /// Adds a regular vertex at offset p from origin(h) strictly inside the
  /// triangle of h. Returns an outgoing half-edge of the new vertex.
  int split_face(int h, PlanarVector p) {
    const int h1 = next(h), h2 = next(h1);
    const PlanarVector B = vec(h), C = B + vec(h1);
    const int A = origin(h), vB = origin(h1), vC = origin(h2);
    const int P = add_vertex();
    const int n0 = grow(6);
    const int n1 = n0 + 1, n2 = n0 + 2, n3 = n0 + 3, n4 = n0 + 4, n5 = n0 + 5;
    put(n0, p - B, vB);
    put(n1, -p, P);
    put(n2, p - C, vC);
    put(n3, B - p, P);
    put(n4, p, A);
    put(n5, C - p, P);
    set_twin(n0, n3);
    set_twin(n2, n5);
    set_twin(n4, n1);
    link(h, n0, n1);
    link(h1, n2, n3);
    link(h2, n4, n5);
    first_[P] = n1;
    refresh_exact();
    return n1;
  }

  /// Adds a regular vertex at parameter s in (0,1) along the edge of h.
  /// Afterwards h runs from its old origin to the new vertex.
  int split_edge(int h, double s) {
    const int t = twin(h);
    const int h1 = next(h), h2 = next(h1), t1 = next(t), t2 = next(t1);
    const PlanarVector vh = vec(h), C = vh + vec(h1), D = vec(t1), P = vh * s;
    const int A = origin(h), vB = origin(h1), vC = origin(h2), vD = origin(t2);
    const int Pv = add_vertex();
    const int n0 = grow(6);
    const int n1 = n0 + 1, n2 = n0 + 2, n3 = n0 + 3, n4 = n0 + 4, n5 = n0 + 5;
    vec_[h] = P;
    vec_[t] = -(vh - P);
    origin_[t] = vB;
    put(n0, C - P, Pv);
    put(n1, vh - P, Pv);
    put(n2, P - C, vC);
    put(n3, D - P, Pv);
    put(n4, -P, Pv);
    put(n5, P - D, vD);
    set_twin(h, n4);
    set_twin(n1, t);
    set_twin(n0, n2);
    set_twin(n3, n5);
    link(h, n0, h2);
    link(n1, h1, n2);
    link(t, n3, t2);
    link(n4, t1, n5);
    first_[Pv] = n0;
    first_[A] = h;
    first_[vB] = h1;
    refresh_exact();
    return n0;
  }

  /// Removes a regular unmarked vertex: loop edges at the vertex are flipped
  /// away, then its star (a simple planar polygon, since the cone angle is
  /// 2*pi) is re-triangulated by ear clipping. Returns false when a loop edge
  /// cannot be flipped. Half-edge ids are compacted afterwards; `remap`
  /// receives old -> new ids (-1 for removed ones).
  bool remove_vertex(int v, std::vector<int>* remap = nullptr) {
    if (singular(v)) return false;
    for (int guard = 0; guard < 4 * size(); ++guard) {
      const std::vector<int> st = star(first_[v]);
      std::vector<int> loops;
      for (int e : st)
        if (target(e) == v) loops.push_back(e);
      if (loops.empty()) {
        fill_star(st, remap);
        return true;
      }
      const auto it = std::find_if(loops.begin(), loops.end(), [&](int e) { return flippable(e); });
      if (it == loops.end()) return false;
      flip(*it);
    }
    return false;
  }

  /// Mark the vertex at the origin of h.
  void mark(int h) {
    const int v = origin(h);
    vmarked_[v] = 1;
    for (int k : star(h)) marked_[k] = 1;
  }

  std::vector<int> marked_half_edges() const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count(); ++v)
      if (vmarked_[v]) out.push_back(first_[v]);
    return out;
  }

  TranslationSurface to_surface() const {
    std::vector<HalfEdgeRecord> r(size());
    for (int h = 0; h < size(); ++h) r[h] = {vec(h), twin(h), next(h)};
    return TranslationSurface::build(std::move(r), exact_, marked_half_edges(), area_scale_,
                                     exact_ ? 1e-9 : std::max(tol_, 1e-9));
  }

 private:
  int add_vertex() {
    order_.push_back(0);
    vmarked_.push_back(0);
    first_.push_back(-1);
    return static_cast<int>(order_.size()) - 1;
  }

  int grow(int k) {
    const int n = size();
    vec_.resize(n + k);
    twin_.resize(n + k, -1);
    next_.resize(n + k, -1);
    origin_.resize(n + k, -1);
    marked_.resize(n + k, 0);
    return n;
  }

  void put(int h, PlanarVector v, int org) {
    vec_[h] = v;
    origin_[h] = org;
    marked_[h] = vmarked_[org];
  }

  void link(int a, int b, int c) {
    next_[a] = b;
    next_[b] = c;
    next_[c] = a;
  }

  void refresh_exact() {
    if (!exact_) return;
    for (const auto& v : vec_)
      if (!is_integral(v)) {
        exact_ = false;
        tol_ = 1e-9;
        return;
      }
  }

  void fill_star(const std::vector<int>& st, std::vector<int>* remap) {
    const int d = static_cast<int>(st.size());
    std::vector<int> pool;
    for (int e : st) {
      pool.push_back(e);
      pool.push_back(twin(e));
    }
    // polygon sides (left side inside) and the developed position where each starts
    std::vector<int> side(d);
    std::vector<PlanarVector> at(d);
    for (int i = 0; i < d; ++i) {
      side[i] = next(st[i]);
      at[i] = vec(st[i]);
    }
    std::size_t used = 0;
    while (side.size() > 3) {
      const int k = static_cast<int>(side.size());
      int ear = -1;
      for (int i = 0; i < k && ear < 0; ++i) {
        const PlanarVector a = at[(i + k - 1) % k], b = at[i], c = at[(i + 1) % k];
        if (cross(b - a, c - b) <= 0) continue;
        bool empty = true;
        for (int j = 0; j < k && empty; ++j) {
          if (j == i || j == (i + 1) % k || j == (i + k - 1) % k) continue;
          const PlanarVector p = at[j];
          empty = !(cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0);
        }
        if (empty) ear = i;
      }
      if (ear < 0) throw Error(ErrorKind::InsertionFailed, "no ear while re-triangulating a vertex star");
      const int i = ear, ip = (i + k - 1) % k, in = (i + 1) % k;
      const int dg = pool[used++], dt = pool[used++];
      vec_[dg] = at[ip] - at[in];
      vec_[dt] = -vec_[dg];
      marked_[dg] = marked_[side[in]];
      marked_[dt] = marked_[side[ip]];
      set_twin(dg, dt);
      link(side[ip], side[i], dg);
      side[ip] = dt;
      side.erase(side.begin() + i);
      at.erase(at.begin() + i);
    }
    link(side[0], side[1], side[2]);
    std::vector<char> dead(size(), 0);
    for (std::size_t k = used; k < pool.size(); ++k) dead[pool[k]] = 1;
    compact(dead, remap);
  }

  void compact(const std::vector<char>& dead, std::vector<int>* remap) {
    std::vector<int> map(size(), -1);
    int k = 0;
    for (int h = 0; h < size(); ++h)
      if (!dead[h]) map[h] = k++;
    auto keep = [&](auto& arr) {
      std::remove_reference_t<decltype(arr)> out(k);
      for (int h = 0; h < size(); ++h)
        if (!dead[h]) out[map[h]] = arr[h];
      return out;
    };
    auto nv = keep(vec_);
    auto nt = keep(twin_);
    auto nn = keep(next_);
    auto nm = keep(marked_);
    for (auto& x : nt) x = map[x];
    for (auto& x : nn) x = map[x];
    vec_ = std::move(nv);
    twin_ = std::move(nt);
    next_ = std::move(nn);
    marked_ = std::move(nm);
    if (remap) *remap = std::move(map);
    reindex();
  }

  std::vector<PlanarVector> vec_;
  std::vector<int> twin_, next_, origin_;
  std::vector<char> marked_;
  std::vector<int> order_;
  std::vector<char> vmarked_;
  std::vector<int> first_;
  bool exact_ = true;
  double tol_ = 0.0;
  double area_scale_ = 1.0;
};

}  // namespace flatlab
