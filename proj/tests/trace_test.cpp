#include <gtest/gtest.h>

#include "flatlab/surface.hpp"
#include "flatlab/trace.hpp"
#include "test_surfaces.hpp"

using namespace flatlab;
using flatlab::test::l_origami;
using flatlab::test::unit_torus;

namespace {

auto singular_of(const TranslationSurface& s) {
  return [&s](int v) { return s.vertex(v).is_singular(); };
}

}  // namespace

TEST(Trace, MarkedTorusAlongEdge) {
  const auto s = unit_torus(true);
  const auto r = trace_segment(s, 0, {3, 0}, singular_of(s));
  EXPECT_EQ(r.end, TraceResult::End::Blocked);
  EXPECT_EQ(r.position, (PlanarVector{1, 0}));
  EXPECT_EQ(develop(s, r.path), r.position);
}

TEST(Trace, MarkedTorusPrimitiveDirection) {
  const auto s = unit_torus(true);
  const int corner = find_corner_ccw(s, 0, {1, 2});
  const auto r = trace_segment(s, corner, {2, 4}, singular_of(s));
  EXPECT_EQ(r.end, TraceResult::End::Blocked);
  EXPECT_EQ(r.position, (PlanarVector{1, 2}));
  EXPECT_EQ(develop(s, r.path), r.position);
}

TEST(Trace, UnmarkedTorusPassesThrough) {
  const auto s = unit_torus(false);
  const int corner = find_corner_ccw(s, 0, {2, 1});
  const auto r = trace_segment(s, corner, {6, 3}, singular_of(s));
  EXPECT_EQ(r.end, TraceResult::End::Vertex);
  EXPECT_EQ(r.passed.size(), 2u);
  EXPECT_EQ(develop(s, r.path), (PlanarVector{6, 3}));
}

TEST(Trace, EndsInsideFaceAndOnEdge) {
  const auto s = unit_torus(true);
  const int corner = find_corner_ccw(s, 0, {1, 3});  // (1/4, 3/4) lies inside the upper-left triangle
  const auto face = trace_segment(s, corner, {0.25, 0.75}, singular_of(s));
  EXPECT_EQ(face.end, TraceResult::End::Face);
  const auto edge = trace_segment(s, 0, {0.25, 0}, singular_of(s));
  EXPECT_EQ(edge.end, TraceResult::End::Edge);
  EXPECT_DOUBLE_EQ(edge.edge_t, 0.25);
}

TEST(Trace, RegularOrigamiVertexIsPassed) {
  // two squares side by side, one corner marked; the other lattice point is regular
  const auto s = build_from_origami(Origami({1, 0}, {0, 1})).with_marked({0});
  const int marked = s.origin(0);
  ASSERT_EQ(s.vertex_count(), 2);
  const auto r = trace_segment(s, 0, {4, 0}, singular_of(s));
  EXPECT_EQ(r.end, TraceResult::End::Blocked);
  EXPECT_EQ(r.vertex, marked);
  EXPECT_EQ(r.position, (PlanarVector{2, 0}));
  EXPECT_EQ(r.passed.size(), 1u);
  EXPECT_EQ(develop(s, r.path), r.position);

  const int diag = find_corner_ccw(s, 0, {1, 1});
  const auto d = trace_segment(s, diag, {5, 5}, singular_of(s));
  EXPECT_EQ(d.position, (PlanarVector{2, 2}));
  EXPECT_EQ(develop(s, d.path), d.position);
}

TEST(Trace, LOrigamiHasSingleZero) {
  const auto s = build_from_origami(l_origami());
  ASSERT_EQ(s.vertex_count(), 1);
  const auto r = trace_segment(s, 0, {4, 0}, singular_of(s));
  EXPECT_EQ(r.end, TraceResult::End::Blocked);
  EXPECT_EQ(r.position, (PlanarVector{1, 0}));
}
