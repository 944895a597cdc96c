#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "flatlab/surface.hpp"
#include "flatlab/trace.hpp"

namespace flatlab {

struct SaddleConnection {
  int start_cone = -1;
  int end_cone = -1;
  PlanarVector holonomy;
  /// Empty unless the scan was asked for anchors.
  DevelopmentPath anchor;
  bool is_loop = false;

  double length() const { return holonomy.norm(); }
  double length2() const { return holonomy.norm2(); }
};

struct ScanResult {
  std::vector<SaddleConnection> connections;
  double length_bound = 0.0;
  std::string surface_ref;
  long long developed_triangles = 0;
};

struct ScanOptions {
  bool with_anchors = true;
  long long max_triangles = 100000000;
  /// Relative tolerance for vertex hits in floating mode; ignored in exact mode.
  double rel_tol = 1e-9;
};

/// Deterministic order: length, then holonomy (x, y), then endpoints.
inline bool connection_less(const SaddleConnection& a, const SaddleConnection& b) {
  return std::make_tuple(a.holonomy.norm2(), a.holonomy.x, a.holonomy.y, a.start_cone, a.end_cone) <
         std::make_tuple(b.holonomy.norm2(), b.holonomy.x, b.holonomy.y, b.start_cone, b.end_cone);
}

namespace detail {

struct Wedge {
  double dist2;
  int g;
  PlanarVector L, R, u, w;
  int node;  // anchor arena index, -1 when anchors are off
  bool operator<(const Wedge& o) const { return dist2 > o.dist2; }  // min-heap
};

struct AnchorNode {
  int parent;
  int g;
};

// Smallest squared distance from the origin to the part of segment R-L that
// lies inside the open wedge (u, w). Returns +inf when that part is empty.
inline double wedge_segment_dist2(PlanarVector R, PlanarVector L, PlanarVector u, PlanarVector w) {
  const PlanarVector d = L - R;
  double lo = 0.0, hi = 1.0;
  const double cuR = cross(u, R), cud = cross(u, d);
  if (cuR < 0) {
    if (cud <= 0) return INFINITY;
    lo = std::max(lo, -cuR / cud);
  }
  const double cwR = cross(R, w), cwd = cross(d, w);
  if (cwR < 0) return INFINITY;
  if (cwR + cwd < 0) hi = std::min(hi, cwR / -cwd);
  if (lo > hi) return INFINITY;
  double t = d.norm2() > 0 ? -dot(R, d) / d.norm2() : 0.0;
  t = std::clamp(t, lo, hi);
  return (R + d * t).norm2();
}

}  // namespace detail

/// Every unoriented saddle connection of length <= L, once each, in canonical
/// orientation. Best-first wedge search from every corner of every singular
/// vertex, plus one straight trace along every outgoing edge direction.
inline ScanResult enumerate_saddle_connections(const TranslationSurface& s, double L, const ScanOptions& opt = {}) {
  if (!(L > 0)) throw Error(ErrorKind::InvalidArgument, "length bound must be positive");
  ScanResult res;
  res.length_bound = L;
  const double tol = s.exact() ? 0.0 : opt.rel_tol;
  const double L2 = L * L;
  const double prune2 = L2 * (1 + 1e-9) + 1e-300;
  auto singular = [&](int v) { return s.vertex(v).is_singular(); };
  long long budget = 0;
  auto charge = [&](long long n) {
    budget += n;
    if (budget > opt.max_triangles)
      throw Error(ErrorKind::BoundTooLarge, "developed more than " + std::to_string(opt.max_triangles) + " triangles");
  };
  std::vector<detail::AnchorNode> arena;

  auto anchor_from = [&](int start, int node) {
    DevelopmentPath p;
    p.start_half_edge = start;
    for (int k = node; k >= 0; k = arena[k].parent) p.steps.push_back({PathStep::Enter, arena[k].g});
    std::reverse(p.steps.begin(), p.steps.end());
    return p;
  };

  auto record = [&](int v, int end, PlanarVector hol, auto&& make_anchor) {
    if (!is_canonical(hol)) return;
    if (hol.norm2() > L2 * (1 + tol)) return;
    SaddleConnection c;
    c.start_cone = v;
    c.end_cone = end;
    c.holonomy = hol;
    c.is_loop = v == end;
    if (opt.with_anchors) c.anchor = make_anchor();
    res.connections.push_back(std::move(c));
  };

  // straight trace from `corner` (at a vertex developed at `base`) in direction `dir`
  auto ray = [&](int v, int corner, PlanarVector base, PlanarVector dir, auto&& prefix) {
    const double remaining = L - base.norm();
    if (remaining < -L * tol) return;
    const double k = std::max(1.0, std::ceil(std::max(remaining, 0.0) / dir.norm()));
    const TraceResult tr = trace_segment(s, corner, dir * k, singular, tol, opt.max_triangles);
    charge(static_cast<long long>(tr.path.steps.size()) + 1);
    const bool hit = tr.end == TraceResult::End::Blocked ||
                     (tr.end == TraceResult::End::Vertex && singular(tr.vertex));
    if (!hit) return;
    record(v, tr.vertex, base + tr.position, [&] {
      DevelopmentPath p = prefix();
      for (const auto& st : tr.path.steps) p.steps.push_back(st);
      return p;
    });
  };

  for (const ConePoint& cp : s.cone_points()) {
    if (!cp.is_singular()) continue;
    const int v = cp.id;
    for (int h : cp.incident_half_edges) {
      ray(v, h, {0, 0}, s.vec(h), [&] {
        DevelopmentPath p;
        p.start_half_edge = h;
        return p;
      });

      std::priority_queue<detail::Wedge> pq;
      arena.clear();
      const PlanarVector u = s.vec(h), w = -s.vec(s.prev(h));
      auto push = [&](int g, PlanarVector Lp, PlanarVector Rp, PlanarVector wu, PlanarVector ww, int parent) {
        const double d2 = detail::wedge_segment_dist2(Rp, Lp, wu, ww);
        if (!(d2 <= prune2)) return;
        int node = -1;
        if (opt.with_anchors) {
          node = static_cast<int>(arena.size());
          arena.push_back({parent, g});
        }
        pq.push({d2, g, Lp, Rp, wu, ww, node});
      };
      push(s.twin(s.next(h)), w, u, u, w, -1);
      while (!pq.empty()) {
        const detail::Wedge wd = pq.top();
        pq.pop();
        charge(1);
        const int g = wd.g;
        const PlanarVector Q = wd.R + s.vec(s.next(g));
        const double eu = tol * wd.u.norm() * Q.norm(), ew = tol * wd.w.norm() * Q.norm();
        const double cu = cross(wd.u, Q), cw = cross(Q, wd.w);
        if (cu > eu && cw > ew) {
          if (Q.norm2() <= L2 * (1 + tol)) {
            const int qv = s.origin(s.prev(g));
            if (singular(qv)) {
              record(v, qv, Q, [&] {
                DevelopmentPath p = anchor_from(h, wd.node);
                p.steps.push_back({PathStep::At, s.prev(g)});
                return p;
              });
            } else {
              const int corner = continuation_corner(s, s.prev(g), Q, tol);
              ray(v, corner, Q, Q, [&] {
                DevelopmentPath p = anchor_from(h, wd.node);
                p.steps.push_back({PathStep::Pass, corner});
                return p;
              });
            }
          }
          push(s.twin(s.next(g)), Q, wd.R, wd.u, Q, wd.node);
          push(s.twin(s.prev(g)), wd.L, Q, Q, wd.w, wd.node);
        } else if (cu <= eu) {
          push(s.twin(s.prev(g)), wd.L, Q, wd.u, wd.w, wd.node);
        } else {
          push(s.twin(s.next(g)), Q, wd.R, wd.u, wd.w, wd.node);
        }
      }
    }
  }
  res.developed_triangles = budget;
  std::sort(res.connections.begin(), res.connections.end(), connection_less);
  return res;
}

/// Squared normalized-length window [a/g, b/g] expressed in the surface's own
/// units (so exact surfaces are compared without rescaling them).
struct LengthWindow {
  double lo2, hi2;
  bool contains(double len2) const { return len2 >= lo2 && len2 <= hi2; }
};

inline LengthWindow interval_window(const TranslationSurface& s, double a, double b) {
  const int g = s.genus();
  if (g < 1) throw Error(ErrorKind::InvalidArgument, "genus must be positive");
  const double area = s.area();
  return {a * a * area / (g * g), b * b * area / (g * g)};
}

/// N_{g,[a,b]}: connections with normalized length in [a/g, b/g].
inline long long count_in_interval(const TranslationSurface& s, double a, double b, const ScanOptions& opt = {}) {
  if (!(a >= 0 && b > a)) throw Error(ErrorKind::InvalidArgument, "interval needs 0 <= a < b");
  if (s.genus() < 2) throw Error(ErrorKind::InvalidArgument, "count_in_interval needs genus >= 2");
  const LengthWindow win = interval_window(s, a, b);
  ScanOptions o = opt;
  o.with_anchors = false;
  const auto r = enumerate_saddle_connections(s, std::sqrt(win.hi2), o);
  long long n = 0;
  for (const auto& c : r.connections) n += win.contains(c.length2()) ? 1 : 0;
  return n;
}

inline SaddleConnection shortest_saddle_connection(const TranslationSurface& s, const ScanOptions& opt = {}) {
  bool any = false;
  double L = INFINITY;
  for (const auto& cp : s.cone_points()) any = any || cp.is_singular();
  if (!any) throw Error(ErrorKind::NoConePoints, "surface has no singular or marked points");
  for (const auto& e : s.half_edges()) L = std::min(L, e.vector.norm());
  for (;;) {
    auto r = enumerate_saddle_connections(s, L, opt);
    if (!r.connections.empty()) return r.connections.front();
    L *= 2;
  }
}

// ---------------------------------------------------------------------------
// Homology of development paths

/// Cellular 1-chain keyed by half-edge id; an entry on h means +coef along h.
using EdgeChain = std::map<int, long long>;

/// Pushes a development path onto the left boundary of the triangle strip it
/// crosses; the result is an edge path with the same endpoints and homotopy
/// class.
template <class Mesh>
EdgeChain edge_chain(const Mesh& m, const DevelopmentPath& path) {
  EdgeChain z;
  auto add = [&](int h, long long c) {
    const int t = m.twin(h);
    if (h < t) z[h] += c;
    else z[t] -= c;
  };
  int corner = path.start_half_edge;
  bool at_vertex = true;
  int g = -1;
  for (const PathStep& s : path.steps) {
    switch (s.kind) {
      case PathStep::Along:
        add(s.half_edge, 1);
        at_vertex = true;
        break;
      case PathStep::Pass:
        if (!at_vertex) add(m.twin(m.prev(g)), 1);  // left vertex -> opposite vertex
        corner = s.half_edge;
        at_vertex = true;
        break;
      case PathStep::Enter:
        if (at_vertex) {
          add(m.ccw(corner), 1);  // start vertex -> left end of the crossed edge
          at_vertex = false;
        } else if (s.half_edge == m.twin(m.next(g))) {
          add(m.twin(m.prev(g)), 1);
        }
        g = s.half_edge;
        break;
      case PathStep::At:
        if (!at_vertex) {
          if (s.half_edge == m.next(g)) add(g, 1);
          else if (s.half_edge == m.prev(g)) add(m.twin(m.prev(g)), 1);
        }
        break;
    }
  }
  for (auto it = z.begin(); it != z.end();) it = it->second == 0 ? z.erase(it) : std::next(it);
  return z;
}

/// True when the closed 1-chain z bounds a 2-chain, i.e. slitting the surface
/// along z separates it into pieces whose potential jumps by z's coefficients.
template <class Mesh>
bool is_boundary(const Mesh& m, const EdgeChain& z) {
  const int n = m.size();
  auto coef = [&](int h) -> long long {
    const int t = m.twin(h);
    if (h < t) {
      auto it = z.find(h);
      return it == z.end() ? 0 : it->second;
    }
    auto it = z.find(t);
    return it == z.end() ? 0 : -it->second;
  };
  auto face = [&](int h) { return std::min({h, m.next(h), m.prev(h)}); };
  std::vector<long long> f(n, 0);
  std::vector<char> seen(n, 0);
  std::vector<int> stack{face(0)};
  seen[face(0)] = 1;
  while (!stack.empty()) {
    const int F = stack.back();
    stack.pop_back();
    for (int h = F, k = 0; k < 3; ++k, h = m.next(h)) {
      // boundary of face(h) contains +h; f(face(h)) - f(face(twin h)) = z(h)
      const int G = face(m.twin(h));
      const long long want = f[F] - coef(h);
      if (!seen[G]) {
        seen[G] = 1;
        f[G] = want;
        stack.push_back(G);
      } else if (f[G] != want) {
        return false;
      }
    }
  }
  return true;
}

/// Pairs (i, j), i < j, of distinct connections of length <= L with equal
/// holonomy and endpoints whose union separates the surface.
inline std::vector<std::pair<int, int>> detect_homologous_pairs(const ScanResult& scan, const TranslationSurface& s) {
  std::map<std::tuple<int, int, double, double>, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(scan.connections.size()); ++i) {
    const auto& c = scan.connections[i];
    groups[{c.start_cone, c.end_cone, c.holonomy.x, c.holonomy.y}].push_back(i);
  }
  std::vector<std::pair<int, int>> out;
  for (const auto& [key, ids] : groups) {
    if (ids.size() < 2) continue;
    std::vector<EdgeChain> chains;
    for (int i : ids) {
      if (scan.connections[i].anchor.start_half_edge < 0)
        throw Error(ErrorKind::InvalidArgument, "homologous detection needs anchors");
      chains.push_back(edge_chain(s, scan.connections[i].anchor));
    }
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        EdgeChain z = chains[a];
        for (const auto& [h, c] : chains[b]) z[h] -= c;
        if (is_boundary(s, z)) out.emplace_back(ids[a], ids[b]);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::pair<int, int>> detect_homologous_pairs(const TranslationSurface& s, double L) {
  return detect_homologous_pairs(enumerate_saddle_connections(s, L), s);
}

enum class GenericClass { Generic, NG_Loop, NG_Cherry };

inline const char* to_string(GenericClass c) {
  switch (c) {
    case GenericClass::Generic: return "Generic";
    case GenericClass::NG_Loop: return "NG_Loop";
    case GenericClass::NG_Cherry: return "NG_Cherry";
  }
  return "?";
}

/// Loop of normalized length <= 6B/g wins over a cherry (a connection of
/// length <= B/g sharing a zero with another one of length <= 2B/g).
inline GenericClass classify_generic(const ScanResult& scan, const TranslationSurface& s, double B) {
  const int g = s.genus();
  const double area = s.area();
  auto bound2 = [&](double k) { return k * k * B * B * area / (double(g) * g); };
  for (const auto& c : scan.connections)
    if (c.is_loop && c.length2() <= bound2(6)) return GenericClass::NG_Loop;
  const auto& cs = scan.connections;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs[i].length2() > bound2(1)) continue;
    for (std::size_t j = 0; j < cs.size(); ++j) {
      if (i == j || cs[j].length2() > bound2(2)) continue;
      const bool share = cs[i].start_cone == cs[j].start_cone || cs[i].start_cone == cs[j].end_cone ||
                         cs[i].end_cone == cs[j].start_cone || cs[i].end_cone == cs[j].end_cone;
      if (share) return GenericClass::NG_Cherry;
    }
  }
  return GenericClass::Generic;
}

inline GenericClass classify_generic(const TranslationSurface& s, double B) {
  const double L = 6 * B * std::sqrt(s.area()) / s.genus();
  ScanOptions o;
  o.with_anchors = false;
  return classify_generic(enumerate_saddle_connections(s, L * (1 + 1e-12), o), s, B);
}

/// CSV with columns start,end,x,y,length in the scan's deterministic order.
inline void write_csv(std::ostream& os, const ScanResult& r) {
  os << "start,end,x,y,length\n";
  os.precision(17);
  for (const auto& c : r.connections)
    os << c.start_cone << ',' << c.end_cone << ',' << c.holonomy.x << ',' << c.holonomy.y << ',' << c.length()
       << '\n';
}

}  // namespace flatlab
