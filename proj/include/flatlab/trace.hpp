#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "flatlab/surface.hpp"
#include "flatlab/vector.hpp"

namespace flatlab {

/// One step of a development path.
///  Enter: the path crosses into the triangle of `half_edge` through that edge.
///  Along: the path runs along `half_edge` from its origin to its target.
///  Pass:  the path goes straight through a regular vertex and leaves in the
///         corner whose first outgoing half-edge is `half_edge`.
///  At:    the path ends at the origin of `half_edge` (a vertex of the current
///         triangle).
struct PathStep {
  enum Kind : std::uint8_t { Enter, Along, Pass, At };
  Kind kind;
  int half_edge;
  bool operator==(const PathStep&) const = default;
};

/// Starting corner (outgoing half-edge at the start vertex whose corner holds
/// the initial direction, first edge inclusive) plus the steps.
struct DevelopmentPath {
  int start_half_edge = -1;
  std::vector<PathStep> steps;
  bool operator==(const DevelopmentPath&) const = default;
};

/// Corner test: is `d` inside [vec(h), vec(ccw(h))) going counter-clockwise?
template <class Mesh>
bool corner_contains(const Mesh& m, int h, PlanarVector d, double tol = 0.0) {
  const PlanarVector u = m.vec(h), w = -m.vec(m.prev(h));
  const double cu = cross(u, d), cw = cross(d, w);
  const double eu = tol * u.norm() * d.norm(), ew = tol * w.norm() * d.norm();
  if (std::abs(cu) <= eu) return dot(u, d) > 0;  // along the first edge
  return cu > eu && cw > ew;
}

/// Outgoing corner at the origin of `from` holding direction `d`, found by
/// walking counter-clockwise starting at `from` (inclusive).
template <class Mesh>
int find_corner_ccw(const Mesh& m, int from, PlanarVector d, double tol = 0.0) {
  int c = from;
  for (int guard = 0; guard <= m.size(); ++guard, c = m.ccw(c))
    if (corner_contains(m, c, d, tol)) return c;
  throw Error(ErrorKind::ValidationError, "no corner contains the requested direction");
}

/// Corner at a regular vertex where a straight path continues after arriving
/// with direction `d`; `arrival` is an outgoing half-edge at the vertex whose
/// corner contains -d (first edge inclusive).
template <class Mesh>
int continuation_corner(const Mesh& m, int arrival, PlanarVector d, double tol = 0.0) {
  // the arrival corner cannot hold d as well (corner angles are below pi);
  // the first occurrence of d counter-clockwise from -d sits at angle pi
  return find_corner_ccw(m, m.ccw(arrival), d, tol);
}

struct TraceResult {
  enum class End {
    Vertex,   // the segment ends exactly at a vertex
    Face,     // ends in the interior of a triangle
    Edge,     // ends in the interior of an edge
    Blocked,  // a singular vertex lies strictly before the end
  };
  End end = End::Vertex;
  int vertex = -1;          // end or blocking vertex
  PlanarVector position;    // developed position of `vertex` (Vertex/Blocked) or of the end point
  int half_edge = -1;       // Face: a half-edge of the final triangle; Edge: the edge containing the end
  double edge_t = 0.0;      // Edge: parameter along `half_edge`
  PlanarVector base;        // Face/Edge: developed position of origin(half_edge)
  DevelopmentPath path;
  /// Regular vertices passed strictly inside the segment, with their developed positions.
  std::vector<std::pair<int, PlanarVector>> passed;
};

/// Develops the straight segment with holonomy `seg` that leaves the origin of
/// `start` inside the corner of `start`. Stops at the first singular vertex
/// (as reported by `singular(vertex_id)`) or at the end of the segment.
template <class Mesh, class Singular>
TraceResult trace_segment(const Mesh& m, int start, PlanarVector seg, Singular&& singular, double rel_tol = 0.0,
                          long long max_steps = 100000000) {
  TraceResult r;
  r.path.start_half_edge = start;
  const double seg_n = seg.norm();
  auto eps = [&](PlanarVector q) { return rel_tol * seg_n * q.norm(); };
  auto same_point = [&](PlanarVector a, PlanarVector b) {
    return rel_tol == 0.0 ? a == b : (a - b).norm() <= rel_tol * seg_n;
  };
  // is E inside the closed triangle (a, b, c), counter-clockwise?
  auto inside = [&](PlanarVector a, PlanarVector b, PlanarVector c) {
    const double t = rel_tol * seg_n * seg_n;
    return cross(b - a, seg - a) >= -t && cross(c - b, seg - b) >= -t && cross(a - c, seg - c) >= -t;
  };
  auto finish_in_triangle = [&](int g, PlanarVector a, PlanarVector b, PlanarVector c) {
    // triangle of g with origin(g) at a, target at b, opposite vertex c
    const int hs[3] = {g, m.next(g), m.prev(g)};
    const PlanarVector ps[3] = {a, b, c};
    for (int k = 0; k < 3; ++k) {
      if (same_point(seg, ps[k])) {
        r.end = TraceResult::End::Vertex;
        r.vertex = m.origin(hs[k]);
        r.position = ps[k];
        r.path.steps.push_back({PathStep::At, hs[k]});
        return;
      }
    }
    const double t = rel_tol * seg_n * seg_n;
    for (int k = 0; k < 3; ++k) {
      const PlanarVector p = ps[k], q = ps[(k + 1) % 3];
      if (std::abs(cross(q - p, seg - p)) <= t) {
        r.end = TraceResult::End::Edge;
        r.half_edge = hs[k];
        r.edge_t = dot(seg - p, q - p) / (q - p).norm2();
        r.position = seg;
        r.base = p;
        return;
      }
    }
    r.end = TraceResult::End::Face;
    r.half_edge = g;
    r.position = seg;
    r.base = a;
  };

  int corner = start;
  PlanarVector P{0, 0};
  long long steps = 0;
  // state A: standing at a vertex in `corner`
  for (;;) {
    if (++steps > max_steps) throw Error(ErrorKind::BoundTooLarge, "trace exceeded step budget");
    const PlanarVector u = m.vec(corner);
    if (std::abs(cross(u, seg)) <= eps(u) && dot(u, seg) > 0) {
      const PlanarVector B = P + u;
      const double along_end = dot(seg - P, u), along_b = u.norm2();
      if (same_point(seg, B)) {
        r.path.steps.push_back({PathStep::Along, corner});
        r.end = TraceResult::End::Vertex;
        r.vertex = m.origin(m.next(corner));
        r.position = B;
        r.path.steps.push_back({PathStep::At, m.next(corner)});
        return r;
      }
      if (along_end < along_b) {
        r.end = TraceResult::End::Edge;
        r.half_edge = corner;
        r.edge_t = along_end / along_b;
        r.position = seg;
        r.base = P;
        return r;
      }
      r.path.steps.push_back({PathStep::Along, corner});
      const int q = m.origin(m.next(corner));
      if (singular(q)) {
        r.end = TraceResult::End::Blocked;
        r.vertex = q;
        r.position = B;
        r.path.steps.push_back({PathStep::At, m.next(corner)});
        return r;
      }
      r.passed.emplace_back(q, B);
      corner = continuation_corner(m, m.twin(corner), seg, rel_tol);
      r.path.steps.push_back({PathStep::Pass, corner});
      P = B;
      continue;
    }
    // interior of the corner
    const PlanarVector B = P + u, C = P - m.vec(m.prev(corner));
    if (inside(P, B, C)) {
      finish_in_triangle(corner, P, B, C);
      return r;
    }
    int g = m.twin(m.next(corner));
    PlanarVector L = C, R = B;
    r.path.steps.push_back({PathStep::Enter, g});
    // state B: inside the triangle of g, entered through g (L -> R)
    for (;;) {
      if (++steps > max_steps) throw Error(ErrorKind::BoundTooLarge, "trace exceeded step budget");
      const PlanarVector Q = R + m.vec(m.next(g));
      if (inside(L, R, Q)) {
        finish_in_triangle(g, L, R, Q);
        return r;
      }
      const double side = cross(seg, Q);
      if (std::abs(side) <= eps(Q)) {
        const int qv = m.origin(m.prev(g));
        if (singular(qv)) {
          r.end = TraceResult::End::Blocked;
          r.vertex = qv;
          r.position = Q;
          r.path.steps.push_back({PathStep::At, m.prev(g)});
          return r;
        }
        r.passed.emplace_back(qv, Q);
        corner = continuation_corner(m, m.prev(g), seg, rel_tol);
        r.path.steps.push_back({PathStep::Pass, corner});
        P = Q;
        break;
      }
      if (side > 0) {
        g = m.twin(m.next(g));
        L = Q;
      } else {
        g = m.twin(m.prev(g));
        R = Q;
      }
      r.path.steps.push_back({PathStep::Enter, g});
    }
  }
}

/// Replays a development path and returns the developed end position.
template <class Mesh>
PlanarVector develop(const Mesh& m, const DevelopmentPath& path) {
  int corner = path.start_half_edge;
  PlanarVector P{0, 0};
  bool at_vertex = true;
  int g = -1;
  PlanarVector L, R;
  for (const PathStep& s : path.steps) {
    switch (s.kind) {
      case PathStep::Along:
        P = P + m.vec(s.half_edge);
        at_vertex = true;
        break;
      case PathStep::Pass:
        if (!at_vertex) P = R + m.vec(m.next(g));
        corner = s.half_edge;
        at_vertex = true;
        break;
      case PathStep::Enter:
        if (at_vertex) {
          L = P - m.vec(m.prev(corner));
          R = P + m.vec(corner);
          at_vertex = false;
        } else {
          const PlanarVector Q = R + m.vec(m.next(g));
          if (s.half_edge == m.twin(m.next(g))) L = Q;
          else R = Q;
        }
        g = s.half_edge;
        break;
      case PathStep::At:
        if (!at_vertex) {
          const PlanarVector Q = R + m.vec(m.next(g));
          if (s.half_edge == g) P = L;
          else if (s.half_edge == m.next(g)) P = R;
          else P = Q;
        }
        return P;
    }
  }
  return P;
}

}  // namespace flatlab
