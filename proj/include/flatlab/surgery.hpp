#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "flatlab/io.hpp"
#include "flatlab/mesh.hpp"
#include "flatlab/saddle_scan.hpp"
#include "flatlab/surface.hpp"
#include "flatlab/trace.hpp"

namespace flatlab {

/// Which endpoint of the connection survives the collapse. The default
/// collapses the end zero into the start zero.
enum class CollapseSide { IntoStart, IntoEnd };

/// The segment of the same length as a connection leaving the collapsed zero
/// one full turn (2*pi) away from the connection.
struct GhostDouble {
  int start_vertex = -1;
  int start_corner = -1;
  /// Oriented from the far end towards the collapsed zero, so it equals the
  /// connection's holonomy when the end zero is collapsed.
  PlanarVector holonomy;
  DevelopmentPath path;
  /// Vertex at the far end, or -1 when it ends inside a face or an edge.
  int end_vertex = -1;
};

/// Enough to undo one collapse with `open_up`.
struct CollapseRecord {
  int survivor = -1;      // id in the input surface
  int collapsed = -1;     // id in the input surface
  int merged_vertex = -1; // id of the new zero in the output surface
  /// From the survivor to the collapsed zero.
  PlanarVector holonomy;
  /// The open-up choice that inverts this collapse.
  int choice = -1;
  int zero_order = 1;
};

struct MultiCollapseRecord {
  std::vector<std::vector<CollapseRecord>> groups;
};

struct CollapseResult {
  TranslationSurface surface;
  CollapseRecord record;
};

struct MultiCollapseResult {
  TranslationSurface surface;
  MultiCollapseRecord record;
};

struct OpenUpResult {
  TranslationSurface surface;
  /// The new connection between the two zeros created by the opening.
  SaddleConnection connection;
};

inline json to_json(const CollapseRecord& r) {
  return {{"survivor", r.survivor},     {"collapsed", r.collapsed}, {"merged_vertex", r.merged_vertex},
          {"holonomy", {r.holonomy.x, r.holonomy.y}}, {"choice", r.choice}, {"zero_order", r.zero_order}};
}

inline CollapseRecord collapse_record_from_json(const json& doc) {
  CollapseRecord r;
  r.survivor = detail::get_field<int>(doc, "survivor");
  r.collapsed = detail::get_field<int>(doc, "collapsed");
  r.merged_vertex = detail::get_field<int>(doc, "merged_vertex");
  const auto h = detail::get_field<std::vector<double>>(doc, "holonomy");
  if (h.size() != 2) throw Error(ErrorKind::ParseError, "holonomy must have two components");
  r.holonomy = {h[0], h[1]};
  r.choice = detail::get_field<int>(doc, "choice");
  r.zero_order = doc.contains("zero_order") ? detail::get_field<int>(doc, "zero_order") : 1;
  return r;
}

inline json to_json(const MultiCollapseRecord& r) {
  json groups = json::array();
  for (const auto& g : r.groups) {
    json arr = json::array();
    for (const auto& c : g) arr.push_back(to_json(c));
    groups.push_back(std::move(arr));
  }
  return {{"groups", std::move(groups)}};
}

inline MultiCollapseRecord multi_collapse_record_from_json(const json& doc) {
  MultiCollapseRecord r;
  for (const auto& g : detail::get_field<json>(doc, "groups")) {
    r.groups.emplace_back();
    for (const auto& c : g) r.groups.back().push_back(collapse_record_from_json(c));
  }
  return r;
}

namespace detail {

struct Crossing {
  int g;
  PlanarVector L, R;
};

// Replays a path and lists every edge crossed through its interior with the
// developed endpoints of the crossed edge (L on the left of the path).
template <class M>
std::vector<Crossing> crossings(const M& m, const DevelopmentPath& path) {
  std::vector<Crossing> out;
  int corner = path.start_half_edge;
  PlanarVector P{0, 0}, L, R;
  bool at_vertex = true;
  int g = -1;
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
        out.push_back({g, L, R});
        break;
      case PathStep::At:
        return out;
    }
  }
  return out;
}

class SurgeryMesh {
 public:
  explicit SurgeryMesh(const TranslationSurface& s) : m(s), locked(m.size(), 0) {}

  Mesh m;
  std::vector<char> locked;
  /// Outgoing half-edges that stand for pending corners; kept valid through flips.
  std::vector<int> refs;

  /// Promotes the segment with holonomy v leaving the corner of `corner` to a
  /// chain of mesh edges and locks it. `end_regular` requires the far end to
  /// be a regular point (a vertex is inserted there if needed); otherwise the
  /// far end must be a singular vertex.
  std::vector<int> insert(int corner, PlanarVector v, bool end_regular, ErrorKind hit) {
    const double tol = m.exact() ? 0.0 : 1e-9;
    auto singular = [&](int x) { return m.singular(x); };
    const long long cap = 20LL * m.size() + 2000;
    int last_flip = -1;
    for (long long iter = 0; iter < cap; ++iter) {
      corner = find_corner_ccw(m, corner, v, tol);
      const TraceResult tr = trace_segment(m, corner, v, singular, tol);
      if (tr.end == TraceResult::End::Blocked) throw Error(hit, "segment meets a cone point before its end");
      if (tr.end == TraceResult::End::Face) {
        if (!end_regular) throw Error(hit, "segment does not end at a vertex");
        m.split_face(tr.half_edge, tr.position - tr.base);
        locked.resize(m.size(), 0);
        continue;
      }
      if (tr.end == TraceResult::End::Edge) {
        if (!end_regular) throw Error(hit, "segment does not end at a vertex");
        if (locked[tr.half_edge]) throw Error(ErrorKind::Intersecting, "segment ends on another cut");
        m.split_edge(tr.half_edge, tr.edge_t);
        locked.resize(m.size(), 0);
        continue;
      }
      if (end_regular == m.singular(tr.vertex)) throw Error(hit, "segment ends at the wrong kind of point");
      const auto cr = crossings(m, tr.path);
      if (cr.empty()) {
        std::vector<int> chain;
        for (const PathStep& s : tr.path.steps)
          if (s.kind == PathStep::Along) chain.push_back(s.half_edge);
        for (int h : chain) {
          if (locked[h]) throw Error(ErrorKind::Intersecting, "segments overlap");
          locked[h] = locked[m.twin(h)] = 1;
        }
        return chain;
      }
      int pick = -1;
      bool pick_clears = false;
      for (const auto& c : cr) {
        if (locked[c.g]) throw Error(ErrorKind::Intersecting, "segment crosses another cut");
        if (!m.flippable(c.g) || c.g == last_flip || m.twin(c.g) == last_flip) continue;
        const PlanarVector a = c.R + m.vec(m.next(c.g));
        const PlanarVector b = c.L + m.vec(m.next(m.twin(c.g)));
        const bool clears = cross(v, a) * cross(v, b) >= 0;
        if (pick < 0 || (clears && !pick_clears)) {
          pick = c.g;
          pick_clears = clears;
          if (clears) break;
        }
      }
      if (pick < 0) throw Error(ErrorKind::InsertionFailed, "no crossed edge can be flipped");
      flip(pick, corner);
      last_flip = pick;
    }
    throw Error(ErrorKind::InsertionFailed, "segment insertion did not converge");
  }

  void flip(int e, int& corner) {
    const int t = m.twin(e);
    auto fix = [&](int& r) {
      if (r == e) r = m.next(t);
      else if (r == t) r = m.next(e);
    };
    fix(corner);
    for (int& r : refs) fix(r);
    m.flip(e);
  }

  /// Splits edges so that all chains have the same sequence of piece vectors.
  void align(std::vector<std::vector<int>>& chains, PlanarVector dir) {
    const double d2 = dir.norm2();
    const double eps = m.exact() ? 0.0 : 1e-12;
    auto cuts = [&](const std::vector<int>& c) {
      std::vector<double> t;
      PlanarVector p{0, 0};
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        p = p + m.vec(c[i]);
        t.push_back(dot(p, dir) / d2);
      }
      return t;
    };
    std::vector<double> all;
    for (const auto& c : chains)
      for (double t : cuts(c)) all.push_back(t);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end(), [&](double a, double b) { return std::abs(a - b) <= eps; }),
              all.end());
    for (auto& c : chains) {
      std::vector<int> out;
      double start = 0.0;
      for (int h : c) {
        const double len = dot(m.vec(h), dir) / d2;
        int piece = h;
        double from = start;
        for (double t : all) {
          if (t <= from + eps || t >= start + len - eps) continue;
          const int tw = m.twin(piece);
          m.split_edge(piece, (t - from) / (start + len - from));
          locked.resize(m.size(), 0);
          const int rest = m.twin(tw);
          locked[piece] = locked[m.twin(piece)] = locked[rest] = locked[tw] = 1;
          out.push_back(piece);
          piece = rest;
          from = t;
        }
        out.push_back(piece);
        start += len;
      }
      c = std::move(out);
    }
  }

  /// twin(X_i) := old twin(X_{i+1}) piece by piece.
  void rotate(const std::vector<std::vector<int>>& chains) {
    const std::size_t k = chains.size();
    for (std::size_t j = 0; j < chains[0].size(); ++j) {
      std::vector<int> old(k);
      for (std::size_t i = 0; i < k; ++i) old[i] = m.twin(chains[i][j]);
      for (std::size_t i = 0; i < k; ++i) m.set_twin(chains[i][j], old[(i + 1) % k]);
    }
  }

  /// The n-th outgoing corner holding direction d, counting counter-clockwise
  /// after the corner of h (n = 1 is the next one).
  int nth_corner(int h, PlanarVector d, int n) const {
    const double tol = m.exact() ? 0.0 : 1e-9;
    int c = h;
    for (int k = 0; k < n; ++k) c = find_corner_ccw(m, m.ccw(c), d, tol);
    return c;
  }
};

inline std::vector<int> reversed_chain(const Mesh& m, const std::vector<int>& c) {
  std::vector<int> r;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r.push_back(m.twin(*it));
  return r;
}

inline PlanarVector chain_vector(const Mesh& m, const std::vector<int>& c) {
  PlanarVector p{0, 0};
  for (int h : c) p = p + m.vec(h);
  return p;
}

// All 2m+1 corners at z (order 2m) holding direction d, counter-clockwise from
// the vertex's first incident half-edge.
inline std::vector<int> direction_corners(const TranslationSurface& s, int z, PlanarVector d) {
  const double tol = s.exact() ? 0.0 : 1e-9;
  std::vector<int> out;
  for (int h : s.vertex(z).incident_half_edges)
    if (corner_contains(s, h, d, tol)) out.push_back(h);
  return out;
}

struct CollapseJob {
  SaddleConnection alpha;
  CollapseSide side;
};

struct CollapseGroupOut {
  std::vector<std::vector<int>> chains;  // chains from the collapsed zero, connection first
  PlanarVector toward_collapsed;         // holonomy from survivor to collapsed
  int survivor, collapsed, order;
};

// Cuts every connection together with its ghost doubles, then reglues. All
// segments are inserted before any twin is rewired.
inline std::pair<TranslationSurface, std::vector<CollapseGroupOut>> collapse_jobs(const TranslationSurface& s,
                                                                                  const std::vector<CollapseJob>& jobs) {
  SurgeryMesh sm(s);
  const int nj = static_cast<int>(jobs.size());
  std::vector<CollapseGroupOut> out(nj);
  sm.refs.resize(nj);
  for (int i = 0; i < nj; ++i) {
    const auto& a = jobs[i].alpha;
    if (a.anchor.start_half_edge < 0) throw Error(ErrorKind::InvalidArgument, "collapse needs a connection with an anchor");
    sm.refs[i] = a.anchor.start_half_edge;
  }
  std::vector<std::vector<int>> alpha_chain(nj);
  for (int i = 0; i < nj; ++i) {
    const auto& a = jobs[i].alpha;
    alpha_chain[i] = sm.insert(sm.refs[i], a.holonomy, false, ErrorKind::InvalidArgument);
    if (sm.m.target(alpha_chain[i].back()) != a.end_cone)
      throw Error(ErrorKind::InvalidArgument, "connection does not end where its record says");
  }
  for (int i = 0; i < nj; ++i) {
    const auto& job = jobs[i];
    auto& o = out[i];
    const bool into_start = job.side == CollapseSide::IntoStart;
    o.survivor = into_start ? job.alpha.start_cone : job.alpha.end_cone;
    o.collapsed = into_start ? job.alpha.end_cone : job.alpha.start_cone;
    o.order = s.vertex(o.collapsed).order;
    o.toward_collapsed = into_start ? job.alpha.holonomy : -job.alpha.holonomy;
    std::vector<int> d0 = into_start ? reversed_chain(sm.m, alpha_chain[i]) : alpha_chain[i];
    const PlanarVector dir = -o.toward_collapsed;
    o.chains.push_back(d0);
    for (int k = 1; k <= o.order; ++k) {
      const int c = sm.nth_corner(o.chains[0][0], dir, k);
      o.chains.push_back(sm.insert(c, dir, true, ErrorKind::GhostHitsSingularity));
    }
  }
  // cut ends away from the collapsed zeros must be distinct points that no
  // other cut passes through
  {
    std::set<int> seen;
    auto claim = [&](int v) {
      if (!seen.insert(v).second) throw Error(ErrorKind::Intersecting, "cuts meet away from their start");
    };
    for (const auto& o : out)
      for (std::size_t k = 0; k < o.chains.size(); ++k) {
        const auto& c = o.chains[k];
        for (std::size_t j = 0; j + 1 < c.size(); ++j) claim(sm.m.target(c[j]));
        if (k > 0) claim(sm.m.target(c.back()));
      }
  }
  for (auto& o : out) sm.align(o.chains, -o.toward_collapsed);
  for (const auto& o : out) sm.rotate(o.chains);
  sm.m.reindex();
  return {sm.m.to_surface(), out};
}

inline CollapseRecord make_record(const TranslationSurface& result, const CollapseGroupOut& o) {
  CollapseRecord r;
  r.survivor = o.survivor;
  r.collapsed = o.collapsed;
  r.holonomy = o.toward_collapsed;
  r.zero_order = o.order;
  // after the rotation the chain ends are outgoing from the merged zero
  std::set<int> ends;
  for (const auto& c : o.chains) ends.insert(result.twin(c.back()));
  const int z = result.origin(*ends.begin());
  r.merged_vertex = z;
  const auto corners = direction_corners(result, z, o.toward_collapsed);
  const int n = static_cast<int>(corners.size());
  const int k = o.order + 1;
  for (int start = 0; start < n; ++start) {
    bool all = true;
    for (int i = 0; i < k && all; ++i) all = ends.count(corners[(start + i) % n]) > 0;
    if (all) {
      r.choice = (start - 1 + n) % n;
      return r;
    }
  }
  throw Error(ErrorKind::InsertionFailed, "cut ends are not consecutive at the merged zero");
}

inline void check_simple_distinct(const TranslationSurface& s, const SaddleConnection& a, int order) {
  if (a.start_cone == a.end_cone) throw Error(ErrorKind::NotSimpleZeros, "connection is a loop");
  if (s.vertex(a.start_cone).order != order || s.vertex(a.end_cone).order != order)
    throw Error(ErrorKind::NotSimpleZeros, "both endpoints must be zeros of order " + std::to_string(order));
}

struct OpenJob {
  int z;
  PlanarVector v;
  int choice;
};

inline std::pair<TranslationSurface, std::vector<std::vector<int>>> open_jobs(const TranslationSurface& s,
                                                                              const std::vector<OpenJob>& jobs) {
  SurgeryMesh sm(s);
  const int nj = static_cast<int>(jobs.size());
  std::vector<int> first(nj);
  std::vector<int> order(nj);
  for (int i = 0; i < nj; ++i) {
    const auto& j = jobs[i];
    if (j.z < 0 || j.z >= s.vertex_count()) throw Error(ErrorKind::InvalidArgument, "no such cone point");
    order[i] = s.vertex(j.z).order;
    const auto corners = direction_corners(s, j.z, j.v);
    const int n = static_cast<int>(corners.size());
    if (n != order[i] + 1) throw Error(ErrorKind::InvalidArgument, "direction count does not match the cone angle");
    if (j.choice < 0 || j.choice >= n) throw Error(ErrorKind::InvalidArgument, "choice out of range");
    first[i] = corners[(j.choice + 1) % n];
  }
  sm.refs = first;
  std::vector<std::vector<std::vector<int>>> chains(nj);
  for (int i = 0; i < nj; ++i) {
    const int m = order[i] / 2;
    chains[i].push_back(sm.insert(sm.refs[i], jobs[i].v, true, ErrorKind::SegmentHitsSingularity));
    for (int k = 1; k <= m; ++k) {
      const int c = sm.nth_corner(chains[i][0][0], jobs[i].v, k);
      chains[i].push_back(sm.insert(c, jobs[i].v, true, ErrorKind::SegmentHitsSingularity));
    }
  }
  for (int i = 0; i < nj; ++i) {
    sm.align(chains[i], jobs[i].v);
    // the cut ends arrive at the merged zero in the same cyclic order, so the
    // same rotation undoes the collapse
    sm.rotate(chains[i]);
  }
  sm.m.reindex();
  // keep the pieces so the caller can describe the new connection
  std::vector<std::vector<int>> pieces;
  for (const auto& cs : chains)
    for (const auto& c : cs) pieces.push_back(c);
  return {sm.m.to_surface(), pieces};
}

}  // namespace detail

/// The ghost double of `alpha` at the zero that `side` collapses.
inline GhostDouble ghost_double(const TranslationSurface& s, const SaddleConnection& alpha,
                                CollapseSide side = CollapseSide::IntoStart) {
  if (alpha.anchor.start_half_edge < 0) throw Error(ErrorKind::InvalidArgument, "ghost double needs an anchor");
  const double tol = s.exact() ? 0.0 : 1e-9;
  const PlanarVector w = alpha.holonomy;
  GhostDouble gd;
  PlanarVector dir;
  int from;
  if (side == CollapseSide::IntoStart) {
    gd.start_vertex = alpha.end_cone;
    dir = -w;
    const PathStep last = alpha.anchor.steps.back();
    from = find_corner_ccw(s, last.half_edge, dir, tol);
  } else {
    gd.start_vertex = alpha.start_cone;
    dir = w;
    from = alpha.anchor.start_half_edge;
  }
  gd.start_corner = find_corner_ccw(s, s.ccw(from), dir, tol);
  auto singular = [&](int v) { return s.vertex(v).is_singular(); };
  const TraceResult tr = trace_segment(s, gd.start_corner, dir, singular, tol);
  if (tr.end == TraceResult::End::Blocked || (tr.end == TraceResult::End::Vertex && singular(tr.vertex)))
    throw Error(ErrorKind::GhostHitsSingularity, "ghost double meets a cone point");
  gd.holonomy = -dir;
  gd.path = tr.path;
  gd.end_vertex = tr.end == TraceResult::End::Vertex ? tr.vertex : -1;
  return gd;
}

/// Collapses the end zero of `alpha` into its start zero (or the other way
/// round with IntoEnd). The survivor becomes a zero of order 2; the collapsed
/// zero becomes two regular points that stay in the mesh.
inline CollapseResult collapse_pair(const TranslationSurface& s, const SaddleConnection& alpha,
                                    CollapseSide side = CollapseSide::IntoStart) {
  detail::check_simple_distinct(s, alpha, 1);
  auto [out, groups] = detail::collapse_jobs(s, {{alpha, side}});
  CollapseRecord rec = detail::make_record(out, groups[0]);
  return {std::move(out), rec};
}

/// Opens the order-2 zero z into two simple zeros joined by a connection with
/// holonomy v. The three segments of holonomy v from z are indexed
/// counter-clockwise from z's first incident half-edge; `choice` names the
/// segment left uncut.
inline OpenUpResult open_up_with_connection(const TranslationSurface& s, int z, PlanarVector v, int choice) {
  if (z < 0 || z >= s.vertex_count()) throw Error(ErrorKind::InvalidArgument, "no such cone point");
  if (s.vertex(z).order != 2) throw Error(ErrorKind::NotOrderTwo, "open_up needs a zero of order 2");
  auto [out, pieces] = detail::open_jobs(s, {{z, v, choice}});
  OpenUpResult r{std::move(out), {}};
  for (const auto& c : pieces) {
    const int a = r.surface.origin(c[0]);
    if (r.surface.vertex(a).order != 1) continue;
    SaddleConnection sc;
    sc.start_cone = a;
    sc.end_cone = r.surface.target(c.back());
    sc.holonomy = v;
    sc.anchor.start_half_edge = c[0];
    for (int h : c) sc.anchor.steps.push_back({PathStep::Along, h});
    sc.anchor.steps.push_back({PathStep::At, r.surface.next(c.back())});
    r.connection = sc;
    return r;
  }
  throw Error(ErrorKind::InsertionFailed, "opened surface has no new connection");
}

inline TranslationSurface open_up(const TranslationSurface& s, int z, PlanarVector v, int choice) {
  return open_up_with_connection(s, z, v, choice).surface;
}

inline TranslationSurface open_up(const TranslationSurface& s, const CollapseRecord& r) {
  return open_up(s, r.merged_vertex, r.holonomy, r.choice);
}

/// Collapses the two outer zeros of a cherry alpha: v1-v2, beta: v2-v3 into
/// the shared zero v2, which becomes a zero of order 3.
inline TranslationSurface collapse_cherry(const TranslationSurface& s, const SaddleConnection& alpha,
                                          const SaddleConnection& beta) {
  detail::check_simple_distinct(s, alpha, 1);
  detail::check_simple_distinct(s, beta, 1);
  auto shared = [](const SaddleConnection& a, const SaddleConnection& b) {
    std::vector<int> out;
    for (int x : {a.start_cone, a.end_cone})
      if (x == b.start_cone || x == b.end_cone) out.push_back(x);
    return out;
  };
  const auto sh = shared(alpha, beta);
  if (sh.size() != 1) throw Error(ErrorKind::SharedZeroMismatch, "connections must share exactly one zero");
  const int v2 = sh[0];
  auto side = [&](const SaddleConnection& a) { return a.start_cone == v2 ? CollapseSide::IntoStart : CollapseSide::IntoEnd; };
  return detail::collapse_jobs(s, {{alpha, side(alpha)}, {beta, side(beta)}}).first;
}

/// Simultaneous collapse of pairwise zero-disjoint connections, grouped as
/// the caller likes (one group per length interval, say). When `generic_bound`
/// is positive the surface must classify as Generic for that bound.
inline MultiCollapseResult collapse_many(const TranslationSurface& s,
                                         const std::vector<std::vector<SaddleConnection>>& gamma,
                                         double generic_bound = 0.0) {
  if (generic_bound > 0 && classify_generic(s, generic_bound) != GenericClass::Generic)
    throw Error(ErrorKind::NotGeneric, "surface is not generic for the given bound");
  std::set<int> zeros;
  std::vector<detail::CollapseJob> jobs;
  for (const auto& g : gamma)
    for (const auto& a : g) {
      detail::check_simple_distinct(s, a, 1);
      for (int z : {a.start_cone, a.end_cone})
        if (!zeros.insert(z).second) throw Error(ErrorKind::SharedZero, "connections share a zero");
      jobs.push_back({a, CollapseSide::IntoStart});
    }
  auto [out, groups] = detail::collapse_jobs(s, jobs);
  MultiCollapseResult r{std::move(out), {}};
  std::size_t k = 0;
  for (const auto& g : gamma) {
    r.record.groups.emplace_back();
    for (std::size_t i = 0; i < g.size(); ++i) r.record.groups.back().push_back(detail::make_record(r.surface, groups[k++]));
  }
  return r;
}

inline TranslationSurface open_up_many(const TranslationSurface& s, const MultiCollapseRecord& rec) {
  std::vector<detail::OpenJob> jobs;
  for (const auto& g : rec.groups)
    for (const auto& r : g) {
      if (r.merged_vertex < 0 || r.merged_vertex >= s.vertex_count() || s.vertex(r.merged_vertex).order != 2 * r.zero_order)
        throw Error(ErrorKind::NotOrderTwo, "record does not point at a merged zero");
      jobs.push_back({r.merged_vertex, r.holonomy, r.choice});
    }
  return detail::open_jobs(s, jobs).first;
}

/// Experimental: collapses two zeros of equal order m along alpha using all m
/// ghost doubles at once, producing a zero of order 2m.
inline CollapseResult collapse_pair_m(const TranslationSurface& s, const SaddleConnection& alpha) {
  const int m = s.vertex(alpha.start_cone).order;
  if (m < 1) throw Error(ErrorKind::NotSimpleZeros, "endpoints must be zeros");
  detail::check_simple_distinct(s, alpha, m);
  auto [out, groups] = detail::collapse_jobs(s, {{alpha, CollapseSide::IntoStart}});
  CollapseRecord rec = detail::make_record(out, groups[0]);
  return {std::move(out), rec};
}

/// Experimental inverse of collapse_pair_m; `choice` ranges over 2m+1 values.
inline TranslationSurface open_up_m(const TranslationSurface& s, int z, PlanarVector v, int choice) {
  if (z < 0 || z >= s.vertex_count()) throw Error(ErrorKind::InvalidArgument, "no such cone point");
  const int order = s.vertex(z).order;
  if (order < 2 || order % 2) throw Error(ErrorKind::NotOrderTwo, "open_up_m needs a zero of even order");
  return detail::open_jobs(s, {{z, v, choice}}).first;
}

}  // namespace flatlab
