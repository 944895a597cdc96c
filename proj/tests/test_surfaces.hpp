#pragma once

#include <vector>

#include "flatlab/surface.hpp"

namespace flatlab::test {

/// Unit square torus from two triangles: lower-right (0,1,2), upper-left (3,4,5).
inline std::vector<HalfEdgeRecord> torus_records() {
  return {
      {{1, 0}, 4, 1},   {{0, 1}, 5, 2},  {{-1, -1}, 3, 0},
      {{1, 1}, 2, 4},   {{-1, 0}, 0, 5}, {{0, -1}, 1, 3},
  };
}

inline TranslationSurface unit_torus(bool marked = false) {
  return TranslationSurface::build(torus_records(), true, marked ? std::vector<int>{0} : std::vector<int>{});
}

/// Three squares in an L: square 1 right of 0, square 2 on top of 0.
inline Origami l_origami() { return Origami({1, 0, 2}, {2, 1, 0}); }

}  // namespace flatlab::test
