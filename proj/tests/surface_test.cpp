#include <gtest/gtest.h>

#include <random>

#include "flatlab/io.hpp"
#include "flatlab/surface.hpp"
#include "test_surfaces.hpp"

using namespace flatlab;
using flatlab::test::l_origami;
using flatlab::test::torus_records;
using flatlab::test::unit_torus;

namespace {

ErrorKind build_error(std::vector<HalfEdgeRecord> r) {
  try {
    TranslationSurface::build(std::move(r), true);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::InvalidArgument;
}

// Hand-composed commutator h v h^-1 v^-1 of a permutation pair, used as an
// oracle independent of Origami::commutator.
std::vector<int> hand_commutator(const std::vector<int>& h, const std::vector<int>& v) {
  const int n = static_cast<int>(h.size());
  std::vector<int> out(n);
  for (int x = 0; x < n; ++x) {
    int y = x;
    for (int k = 0; k < n; ++k)
      if (v[k] == y) { y = k; break; }
    for (int k = 0; k < n; ++k)
      if (h[k] == y) { y = k; break; }
    out[x] = h[v[y]];
  }
  return out;
}

}  // namespace

TEST(SurfaceCore, UnitTorusFromTwoTriangles) {
  const auto s = unit_torus();
  EXPECT_EQ(s.genus(), 1);
  EXPECT_TRUE(s.stratum_signature().orders.empty());
  EXPECT_EQ(s.area(), 1.0);
  EXPECT_EQ(s.vertex_count(), 1);
  EXPECT_EQ(s.vertex(0).order, 0);
}

TEST(SurfaceCore, ReversedTriangleIsDegenerate) {
  auto r = torus_records();
  // reverse the lower-right triangle: (1,0),(0,1),(-1,-1) traversed backwards
  r[0].next = 2;
  r[2].next = 1;
  r[1].next = 0;
  EXPECT_EQ(build_error(r), ErrorKind::DegenerateTriangle);
}

TEST(SurfaceCore, ValidationErrors) {
  auto open = torus_records();
  open[2].vector = {-1, -2};
  open[3].vector = {1, 2};
  EXPECT_EQ(build_error(open), ErrorKind::NonClosedTriangle);

  auto pairing = torus_records();
  pairing[0].twin = 1;
  EXPECT_EQ(build_error(pairing), ErrorKind::BadPairing);

  // two disjoint tori
  auto two = torus_records();
  for (auto e : torus_records()) two.push_back({e.vector, e.twin + 6, e.next + 6});
  EXPECT_EQ(build_error(two), ErrorKind::Disconnected);
}

TEST(SurfaceCore, LShapedOrigamiMesh) {
  const Origami o = l_origami();
  // commutator by hand: 0 -> 1 -> 2 -> 0, a single 3-cycle
  EXPECT_EQ(hand_commutator(o.h, o.v), (std::vector<int>{1, 2, 0}));
  const auto via_origami = build_from_origami(o);
  const auto s = build_from_triangulation(via_origami.records(), true);
  EXPECT_EQ(s.face_count(), 6);
  EXPECT_EQ(s.genus(), 2);
  EXPECT_EQ(s.stratum_signature().orders, std::vector<int>{2});
  EXPECT_EQ(s.area(), 3.0);
  EXPECT_NEAR(s.normalize_area().area(), 1.0, 1e-12);
}

TEST(SurfaceCore, OrigamiExamples) {
  const auto torus = build_from_origami(Origami({0}, {0}));
  EXPECT_EQ(torus.genus(), 1);
  EXPECT_TRUE(torus.stratum_signature().orders.empty());

  const Origami two({1, 0}, {1, 0});
  EXPECT_EQ(two.commutator(), (std::vector<int>{0, 1}));
  const auto t2 = build_from_origami(two);
  EXPECT_EQ(t2.genus(), 1);
  EXPECT_EQ(t2.twice_area_exact(), 4);

  EXPECT_EQ(origami_stratum(l_origami()).orders, std::vector<int>{2});
  EXPECT_THROW(build_from_origami(Origami({0, 1}, {0, 1})), Error);
}

TEST(SurfaceCore, ScalingQuadruplesArea) {
  const auto s = build_from_origami(l_origami());
  const auto s2 = s.scaled(2.0);
  EXPECT_EQ(s2.area(), 4 * s.area());
  EXPECT_TRUE(s2.exact());
}

TEST(SurfaceCore, GaussBonnetOnRandomOrigamis) {
  std::mt19937_64 rng(11);
  int built = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 30);
    Permutation h = identity_permutation(n), v = identity_permutation(n);
    std::shuffle(h.begin(), h.end(), rng);
    std::shuffle(v.begin(), v.end(), rng);
    const Origami o(h, v);
    if (!o.is_connected()) continue;
    const auto s = build_from_origami(o);
    const auto sig = s.stratum_signature();
    EXPECT_EQ(sig.total_order(), 2 * s.genus() - 2);
    EXPECT_EQ(sig.genus(), s.genus());
    EXPECT_EQ(s.twice_area_exact(), 2 * n);
    EXPECT_TRUE(sig.same_stratum(origami_stratum(o)));
    for (const auto& e : s.half_edges()) {
      EXPECT_EQ(s.twin(s.twin(e.id)), e.id);
      EXPECT_EQ(s.vec(s.twin(e.id)), -e.vector);
      EXPECT_EQ(s.next(s.next(s.next(e.id))), e.id);
    }
    ++built;
  }
  EXPECT_GT(built, 50);
}

TEST(SurfaceIo, TorusRoundTrip) {
  const auto s = unit_torus(true);
  const auto back = deserialize(serialize(s));
  ASSERT_EQ(back.size(), s.size());
  for (int h = 0; h < s.size(); ++h) {
    EXPECT_EQ(back.vec(h), s.vec(h));
    EXPECT_EQ(back.twin(h), s.twin(h));
    EXPECT_EQ(back.next(h), s.next(h));
  }
  EXPECT_TRUE(back.exact());
  EXPECT_TRUE(back.vertex(0).marked);
}

TEST(SurfaceIo, FloatingRoundTripIsLossless) {
  const auto s = build_from_origami(l_origami()).normalize_area();
  const auto back = deserialize(serialize(s));
  for (int h = 0; h < s.size(); ++h) EXPECT_EQ(back.vec(h), s.vec(h));
  EXPECT_EQ(back.area_scale(), s.area_scale());
}

TEST(SurfaceIo, Errors) {
  const std::string text = serialize(unit_torus());
  try {
    deserialize(text.substr(0, text.size() / 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  }
  auto doc = to_json(unit_torus());
  doc["half_edges"][0]["twin"] = 1;
  try {
    surface_from_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
  }
  EXPECT_EQ(origami_from_json(to_json(l_origami())), l_origami());
}
