#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "flatlab/stratum.hpp"
#include "flatlab/vector.hpp"

namespace flatlab {

using Permutation = std::vector<int>;

inline bool is_permutation(std::span<const int> p) {
  std::vector<char> seen(p.size(), 0);
  for (int x : p) {
    if (x < 0 || static_cast<std::size_t>(x) >= p.size() || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

inline Permutation identity_permutation(int n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline Permutation inverse(std::span<const int> p) {
  Permutation q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
  return q;
}

/// Cycle lengths, fixed points included, in order of smallest element.
inline std::vector<int> cycle_lengths(std::span<const int> p) {
  std::vector<char> seen(p.size(), 0);
  std::vector<int> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j])) {
      seen[j] = 1;
      ++len;
    }
    out.push_back(len);
  }
  return out;
}

/// Square-tiled surface: square i has square h[i] on its right and v[i] on top.
struct Origami {
  int n_squares = 1;
  Permutation h{0};
  Permutation v{0};

  Origami() = default;
  Origami(Permutation h_, Permutation v_)
      : n_squares(static_cast<int>(h_.size())), h(std::move(h_)), v(std::move(v_)) {
    if (h.size() != v.size() || h.empty() || !is_permutation(h) || !is_permutation(v))
      throw Error(ErrorKind::ValidationError, "origami needs two permutations of equal size N >= 1");
  }

  bool operator==(const Origami&) const = default;

  /// x -> h(v(h^-1(v^-1(x)))); its cycles are the corners around each vertex.
  Permutation commutator() const {
    const Permutation hi = inverse(h), vi = inverse(v);
    Permutation c(n_squares);
    for (int x = 0; x < n_squares; ++x) c[x] = h[v[hi[vi[x]]]];
    return c;
  }

  bool is_connected() const {
    std::vector<char> seen(n_squares, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int y : {h[x], v[x]}) {
        if (!seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
      }
    }
    return count == n_squares;
  }
};

/// Zero orders = commutator cycle lengths minus one, dropping fixed points.
inline StratumSignature origami_stratum(const Origami& o) {
  if (!o.is_connected()) throw Error(ErrorKind::Disconnected, "origami permutations are not transitive");
  StratumSignature s;
  for (int len : cycle_lengths(o.commutator()))
    if (len >= 2) s.orders.push_back(len - 1);
  return s;
}

inline int origami_genus(const Origami& o) { return origami_stratum(o).genus(); }

}  // namespace flatlab
