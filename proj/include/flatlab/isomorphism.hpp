#pragma once

#include <cmath>
#include <vector>

#include "flatlab/mesh.hpp"
#include "flatlab/surface.hpp"

namespace flatlab {

namespace detail {

// > 0 when the far vertex across the edge of h lies strictly inside the
// circumcircle of h's triangle; 0 when cocircular. With the origin of h at
// the origin, the 3x3 lifted determinant is negative for an inside point.
inline int incircle_sign(const Mesh& m, int h, double tol) {
  const PlanarVector B = m.vec(h), C = B + m.vec(m.next(h)), D = m.vec(m.next(m.twin(h)));
  const double lim = 1073741824.0;  // 2^30 keeps the exact determinant inside 128 bits
  const bool small = std::abs(B.x) < lim && std::abs(B.y) < lim && std::abs(C.x) < lim && std::abs(C.y) < lim &&
                     std::abs(D.x) < lim && std::abs(D.y) < lim;
  if (m.exact() && small) {
    using I = __int128;
    auto i = [](double x) { return static_cast<I>(static_cast<long long>(x)); };
    const I bx = i(B.x), by = i(B.y), cx = i(C.x), cy = i(C.y), dx = i(D.x), dy = i(D.y);
    const I b2 = bx * bx + by * by, c2 = cx * cx + cy * cy, d2 = dx * dx + dy * dy;
    const I det = bx * (cy * d2 - c2 * dy) - by * (cx * d2 - c2 * dx) + b2 * (cx * dy - cy * dx);
    return det < 0 ? 1 : (det > 0 ? -1 : 0);
  }
  using L = long double;
  const L bx = B.x, by = B.y, cx = C.x, cy = C.y, dx = D.x, dy = D.y;
  const L b2 = bx * bx + by * by, c2 = cx * cx + cy * cy, d2 = dx * dx + dy * dy;
  const L det = bx * (cy * d2 - c2 * dy) - by * (cx * d2 - c2 * dx) + b2 * (cx * dy - cy * dx);
  const L scale = std::max({b2, c2, d2});
  const L eps = static_cast<L>(std::max(tol, 1e-12)) * scale * scale;
  return det < -eps ? 1 : (det > eps ? -1 : 0);
}

}  // namespace detail

/// Delaunay cell decomposition of a surface with its unmarked regular
/// vertices removed. `kept[h]` is false for diagonals inside cocircular cells;
/// `cell_next` walks the boundary of the cell on the left of a kept half-edge.
struct CanonicalCells {
  Mesh mesh;
  std::vector<char> kept;
  std::vector<int> cell_next;
  int kept_count = 0;
};

inline CanonicalCells canonical_cells(const TranslationSurface& s, double tol = 1e-9, bool drop_regular = true) {
  CanonicalCells c;
  Mesh& m = c.mesh;
  m = Mesh(s);
  for (bool progress = drop_regular; progress && m.vertex_count() > 1;) {
    progress = false;
    for (int v = 0; v < m.vertex_count() && m.vertex_count() > 1; ++v)
      if (!m.singular(v) && m.remove_vertex(v)) {
        progress = true;
        break;
      }
  }
  const double t = m.exact() ? 0.0 : tol;
  std::vector<int> stack(m.size());
  for (int h = 0; h < m.size(); ++h) stack[h] = h;
  long long budget = 1000LL * m.size() + 100000;
  while (!stack.empty()) {
    const int h = stack.back();
    stack.pop_back();
    if (detail::incircle_sign(m, h, t) <= 0 || !m.flippable(h)) continue;
    if (--budget < 0) break;
    const int a = m.next(h), b = m.prev(h), tw = m.twin(h), d = m.next(tw), e = m.prev(tw);
    m.flip(h);
    for (int k : {a, b, d, e}) {
      stack.push_back(k);
      stack.push_back(m.twin(k));
    }
  }
  const int n = m.size();
  c.kept.assign(n, 1);
  for (int h = 0; h < n; ++h)
    if (detail::incircle_sign(m, h, t) == 0) c.kept[h] = 0;
  c.cell_next.assign(n, -1);
  for (int h = 0; h < n; ++h) {
    if (!c.kept[h]) continue;
    ++c.kept_count;
    int k = m.next(h);
    for (int guard = 0; !c.kept[k] && guard <= n; ++guard) k = m.next(m.twin(k));
    c.cell_next[h] = k;
  }
  return c;
}

namespace detail {

inline bool cells_match(const CanonicalCells& c1, const CanonicalCells& c2, bool exact, double tol) {
  if (c1.kept_count != c2.kept_count || c1.mesh.vertex_count() != c2.mesh.vertex_count()) return false;
  const Mesh &m1 = c1.mesh, &m2 = c2.mesh;
  auto same_vec = [&](PlanarVector a, PlanarVector b) {
    if (exact && m1.exact() && m2.exact()) return a == b;
    return (a - b).norm() <= tol * std::max(1.0, a.norm());
  };
  auto same_he = [&](int x, int y) {
    return same_vec(m1.vec(x), m2.vec(y)) && m1.marked(m1.origin(x)) == m2.marked(m2.origin(y)) &&
           m1.order(m1.origin(x)) == m2.order(m2.origin(y));
  };
  int b0 = -1;
  for (int h = 0; h < m2.size() && b0 < 0; ++h)
    if (c2.kept[h]) b0 = h;
  if (b0 < 0) return false;

  std::vector<int> fwd(m1.size()), bwd(m2.size());
  std::vector<std::pair<int, int>> queue;
  for (int a = 0; a < m1.size(); ++a) {
    if (!c1.kept[a] || !same_he(a, b0)) continue;
    std::fill(fwd.begin(), fwd.end(), -1);
    std::fill(bwd.begin(), bwd.end(), -1);
    queue.clear();
    queue.emplace_back(a, b0);
    fwd[a] = b0;
    bwd[b0] = a;
    bool ok = true;
    for (std::size_t qi = 0; ok && qi < queue.size(); ++qi) {
      const auto [x, y] = queue[qi];
      if (!same_he(x, y)) {
        ok = false;
        break;
      }
      const std::pair<int, int> nb[2] = {{m1.twin(x), m2.twin(y)}, {c1.cell_next[x], c2.cell_next[y]}};
      for (auto [x2, y2] : nb) {
        if (!c1.kept[x2] || !c2.kept[y2]) {
          ok = false;
          break;
        }
        if (fwd[x2] < 0 && bwd[y2] < 0) {
          fwd[x2] = y2;
          bwd[y2] = x2;
          queue.emplace_back(x2, y2);
        } else if (fwd[x2] != y2 || bwd[y2] != x2) {
          ok = false;
          break;
        }
      }
    }
    if (ok && static_cast<int>(queue.size()) == c1.kept_count) return true;
  }
  return false;
}

}  // namespace detail

/// True when some relabeling of half-edges maps one canonical cell structure
/// onto the other with matching vectors (exactly in exact mode, within `tol`
/// otherwise) and matching marked points. Unmarked regular vertices are
/// ignored: the comparison is first made with every vertex kept, then with
/// regular vertices removed.
inline bool is_isomorphic(const TranslationSurface& s1, const TranslationSurface& s2, double tol = 1e-9) {
  if (s1.genus() != s2.genus()) return false;
  if (!s1.stratum_signature().same_stratum(s2.stratum_signature())) return false;
  const bool exact = s1.exact() && s2.exact();
  const double a1 = s1.area(), a2 = s2.area();
  if (exact ? a1 != a2 : std::abs(a1 - a2) > tol * std::max(1.0, a1)) return false;
  if (s1.vertex_count() == s2.vertex_count() &&
      detail::cells_match(canonical_cells(s1, tol, false), canonical_cells(s2, tol, false), exact, tol))
    return true;
  return detail::cells_match(canonical_cells(s1, tol), canonical_cells(s2, tol), exact, tol);
}

}  // namespace flatlab
