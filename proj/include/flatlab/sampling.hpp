#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <atomic>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "flatlab/io.hpp"
#include "flatlab/origami.hpp"
#include "flatlab/stratum.hpp"
#include "flatlab/surface.hpp"

namespace flatlab {

// Random numbers. std::mt19937_64 output is fixed by the standard, the
// standard distributions are not, so integers and reals are drawn by hand.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream keyed by (seed, a, b).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on {0, ..., n-1}, n >= 1.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % n;
  }
  int below(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(static_cast<std::uint64_t>(i))]);
  }

 private:
  std::mt19937_64 engine_;
};

/// Uniform pair of permutations conditioned on transitivity.
inline Origami random_origami(int n, Rng& rng) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "origami needs at least one square");
  for (;;) {
    Permutation h = identity_permutation(n), v = identity_permutation(n);
    rng.shuffle(h);
    rng.shuffle(v);
    Origami o(std::move(h), std::move(v));
    if (o.is_connected()) return o;
  }
}

/// Smallest square count that can carry the stratum: every zero of order m
/// needs m+1 squares around it.
inline int min_squares(const StratumSignature& s) {
  int n = 0;
  for (int m : s.orders) n += m + 1;
  return std::max(n, 1);
}

namespace detail {

// Canonical orders of the commutator's nontrivial cycles, sorted descending.
inline std::vector<int> commutator_orders(const Permutation& h, const Permutation& v, std::vector<int>& hi,
                                          std::vector<int>& vi, std::vector<char>& seen) {
  const int n = static_cast<int>(h.size());
  for (int i = 0; i < n; ++i) {
    hi[h[i]] = i;
    vi[v[i]] = i;
  }
  std::fill(seen.begin(), seen.end(), 0);
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = h[v[hi[vi[j]]]]) {
      seen[j] = 1;
      ++len;
    }
    if (len > 1) out.push_back(len - 1);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline bool transitive(const Permutation& h, const Permutation& v, std::vector<char>& seen, std::vector<int>& stack) {
  const int n = static_cast<int>(h.size());
  std::fill(seen.begin(), seen.end(), 0);
  stack.assign(1, 0);
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (int y : {h[x], v[x]})
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
  }
  return count == n;
}

// Thickens the horizontal cylinder through square x by one row (or the
// vertical one by one column). Cylinder moduli change, the stratum does not.
inline void thicken_cylinder(Origami& o, int x, bool horizontal) {
  Permutation& along = horizontal ? o.h : o.v;
  Permutation& across = horizontal ? o.v : o.h;
  std::vector<int> core{x};
  for (int y = along[x]; y != x; y = along[y]) core.push_back(y);
  const int base = o.n_squares;
  const int k = static_cast<int>(core.size());
  along.resize(base + k);
  across.resize(base + k);
  for (int j = 0; j < k; ++j) {
    const int fresh = base + j;
    along[fresh] = base + (j + 1) % k;
    across[fresh] = across[core[j]];
    across[core[j]] = fresh;
  }
  o.n_squares = base + k;
}

}  // namespace detail

/// Seeded search for an origami with exactly n squares in the stratum: small
/// random origamis are drawn until one lands in the stratum, then cylinders
/// are thickened until the square count reaches n.
inline Origami find_seed_origami(const StratumSignature& stratum, int n, std::uint64_t seed,
                                 long long budget = 20'000'000) {
  const auto want = stratum.canonical().orders;
  const int lo = min_squares(stratum);
  if (n < lo) throw Error(ErrorKind::SeedNotFound, "too few squares for " + stratum.to_string());
  Rng rng(derive_seed(seed, 0x5eed));
  long long spent = 0;
  while (spent < budget) {
    // small base, at most a few squares above the minimum
    const int n0 = std::min(n, lo + rng.below(4));
    std::vector<int> hi(n0), vi(n0), stack;
    std::vector<char> seen(n0);
    Origami o;
    bool found = false;
    for (int t = 0; t < 200'000 && spent < budget; ++t, spent += n0) {
      Permutation h = identity_permutation(n0), v = identity_permutation(n0);
      rng.shuffle(h);
      rng.shuffle(v);
      if (detail::commutator_orders(h, v, hi, vi, seen) != want) continue;
      if (!detail::transitive(h, v, seen, stack)) continue;
      o = Origami(std::move(h), std::move(v));
      found = true;
      break;
    }
    if (!found) continue;
    // grow with cylinders that still fit
    for (int guard = 0; o.n_squares < n && guard < 100 * n; ++guard) {
      const int x = rng.below(o.n_squares);
      const bool horizontal = rng.below(2) == 0;
      const auto& along = horizontal ? o.h : o.v;
      int k = 1;
      for (int y = along[x]; y != x; y = along[y]) ++k;
      if (o.n_squares + k <= n) detail::thicken_cylinder(o, x, horizontal);
    }
    if (o.n_squares == n) return o;
  }
  throw Error(ErrorKind::SeedNotFound, "no seed origami in " + stratum.to_string() + " with " + std::to_string(n) +
                                           " squares within the search budget");
}

/// Indicator-Metropolis walk on square-tiled surfaces of one stratum. A move
/// composes h or v with a uniformly random transposition and is kept iff the
/// result is transitive and stays in the stratum. One proposal in 64 instead
/// applies a shear or quarter turn (or its inverse); these permute the
/// stratum's origamis, so they are always kept. Transpositions alone mix
/// badly and can leave the walk stuck on a set that is not even symmetric
/// under the quarter turn. Every proposal is symmetric, so the uniform measure
/// on the reachable set is stationary.
class StratumChain {
 public:
  StratumChain(Origami start, const StratumSignature& stratum)
      : o_(std::move(start)), want_(stratum.canonical().orders) {
    const int n = o_.n_squares;
    hi_ = inverse(o_.h);
    vi_ = inverse(o_.v);
    seen_.resize(n);
    scratch_hi_.resize(n);
    scratch_vi_.resize(n);
    if (!o_.is_connected() || origami_stratum(o_).canonical().orders != want_)
      throw Error(ErrorKind::InvalidArgument, "chain start is not in " + stratum.to_string());
  }

  const Origami& state() const { return o_; }
  /// Transposition proposals and how many were kept.
  long long proposals() const { return proposals_; }
  long long accepted() const { return accepted_; }
  long long lattice_moves() const { return lattice_moves_; }
  double acceptance_rate() const { return proposals_ ? static_cast<double>(accepted_) / proposals_ : 0.0; }

  /// One proposal; returns whether it was accepted.
  bool step(Rng& rng) {
    const int n = o_.n_squares;
    if (n < 2) return false;
    if (rng.below(64) == 0) {
      lattice_move(rng.below(4));
      ++lattice_moves_;
      return true;
    }
    ++proposals_;
    const bool on_h = rng.below(2) == 0;
    const int i = rng.below(n);
    int j = rng.below(n - 1);
    if (j >= i) ++j;
    // only the commutator at these squares can change
    int cand[6];
    if (on_h) {
      const int a = o_.h[i], b = o_.h[j];
      cand[0] = o_.v[a];
      cand[1] = o_.v[b];
      auto swapped = [&](int q) { return q == i ? b : (q == j ? a : o_.h[q]); };
      cand[2] = o_.v[o_.h[vi_[i]]];
      cand[3] = o_.v[o_.h[vi_[j]]];
      cand[4] = o_.v[swapped(vi_[i])];
      cand[5] = o_.v[swapped(vi_[j])];
    } else {
      const int a = o_.v[i], b = o_.v[j];
      cand[0] = a;
      cand[1] = b;
      cand[2] = o_.v[o_.h[i]];
      cand[3] = o_.v[o_.h[j]];
      auto swapped = [&](int q) { return q == i ? b : (q == j ? a : o_.v[q]); };
      cand[4] = swapped(o_.h[i]);
      cand[5] = swapped(o_.h[j]);
    }
    std::sort(cand, cand + 6);
    const int k = static_cast<int>(std::unique(cand, cand + 6) - cand);
    int fixed_before = 0, fixed_after = 0;
    for (int t = 0; t < k; ++t) fixed_before += commutator_at(cand[t]) == cand[t];
    apply(on_h, i, j);
    for (int t = 0; t < k; ++t) fixed_after += commutator_at(cand[t]) == cand[t];
    if (fixed_after == fixed_before &&
        detail::commutator_orders(o_.h, o_.v, scratch_hi_, scratch_vi_, seen_) == want_ &&
        detail::transitive(o_.h, o_.v, seen_, stack_)) {
      ++accepted_;
      return true;
    }
    apply(on_h, i, j);
    return false;
  }

 private:
  int commutator_at(int x) const { return o_.h[o_.v[hi_[vi_[x]]]]; }

  // 0, 1: v -> v h^-1, v h (shears); 2, 3: (h, v) -> (v^-1, h), (v, h^-1)
  void lattice_move(int kind) {
    const int n = o_.n_squares;
    Permutation w(n);
    switch (kind) {
      case 0:
        for (int x = 0; x < n; ++x) w[x] = o_.v[hi_[x]];
        o_.v = std::move(w);
        break;
      case 1:
        for (int x = 0; x < n; ++x) w[x] = o_.v[o_.h[x]];
        o_.v = std::move(w);
        break;
      case 2:
        o_.v = std::exchange(o_.h, vi_);
        break;
      default:
        o_.h = std::exchange(o_.v, hi_);
        break;
    }
    hi_ = inverse(o_.h);
    vi_ = inverse(o_.v);
  }

  void apply(bool on_h, int i, int j) {
    Permutation& p = on_h ? o_.h : o_.v;
    std::vector<int>& pi = on_h ? hi_ : vi_;
    std::swap(p[i], p[j]);
    pi[p[i]] = i;
    pi[p[j]] = j;
  }

  Origami o_;
  std::vector<int> want_;
  std::vector<int> hi_, vi_, scratch_hi_, scratch_vi_, stack_;
  std::vector<char> seen_;
  long long proposals_ = 0, accepted_ = 0, lattice_moves_ = 0;
};

/// Perturbs a surface in period coordinates: the vectors of 2g+l-1 independent
/// edges get i.i.d. offsets uniform in a disk of the given radius, every other
/// edge follows from the triangle relations, and the result is rescaled to
/// unit area. Uniform in a local chart only, not globally Masur-Veech.
inline TranslationSurface chart_perturbation_sampler(const TranslationSurface& base, double radius, Rng& rng) {
  const int ne = base.edge_count();
  std::vector<int> rep;  // edge -> representative half-edge
  std::vector<int> edge_of(base.size(), -1);
  std::vector<int> sign(base.size(), 1);
  for (int h = 0; h < base.size(); ++h)
    if (edge_of[h] < 0) {
      edge_of[h] = edge_of[base.twin(h)] = static_cast<int>(rep.size());
      sign[base.twin(h)] = -1;
      rep.push_back(h);
    }
  // face relations, row reduced
  std::vector<std::vector<double>> rows;
  for (int h = 0; h < base.size(); ++h) {
    if (h != std::min({h, base.next(h), base.prev(h)})) continue;
    std::vector<double> r(ne, 0.0);
    for (int e : {h, base.next(h), base.prev(h)}) r[edge_of[e]] += sign[e];
    rows.push_back(std::move(r));
  }
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (int c = 0; c < ne && rank < rows.size(); ++c) {
    std::size_t best = rank;
    for (std::size_t r = rank; r < rows.size(); ++r)
      if (std::abs(rows[r][c]) > std::abs(rows[best][c])) best = r;
    if (std::abs(rows[best][c]) < 1e-9) continue;
    std::swap(rows[best], rows[rank]);
    const double f = rows[rank][c];
    for (double& x : rows[rank]) x /= f;
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && rows[r][c] != 0.0) {
        const double g = rows[r][c];
        for (int k = 0; k < ne; ++k) rows[r][k] -= g * rows[rank][k];
      }
    pivot_col.push_back(c);
    ++rank;
  }
  std::vector<char> is_pivot(ne, 0);
  for (int c : pivot_col) is_pivot[c] = 1;
  std::vector<PlanarVector> ev(ne);
  for (int e = 0; e < ne; ++e) ev[e] = base.vec(rep[e]);
  for (int e = 0; e < ne; ++e) {
    if (is_pivot[e]) continue;
    const double r = radius * std::sqrt(rng.uniform());
    const double t = 2.0 * std::numbers::pi * rng.uniform();
    ev[e] = ev[e] + PlanarVector{r * std::cos(t), r * std::sin(t)};
  }
  for (std::size_t k = 0; k < pivot_col.size(); ++k) {
    PlanarVector acc{0, 0};
    for (int e = 0; e < ne; ++e)
      if (!is_pivot[e] && rows[k][e] != 0.0) acc = acc + ev[e] * rows[k][e];
    ev[pivot_col[k]] = -acc;
  }
  auto recs = base.records();
  for (int h = 0; h < base.size(); ++h) recs[h].vector = ev[edge_of[h]] * static_cast<double>(sign[h]);
  for (int h = 0; h < base.size(); ++h)
    if (cross(recs[h].vector, recs[recs[h].next].vector) <= 0.0)
      throw Error(ErrorKind::DegenerationDuringPerturbation, "a triangle lost its orientation");
  return TranslationSurface::build(std::move(recs), false, base.marked_half_edges(), base.area_scale(), 1e-9)
      .normalize_area();
}

enum class SamplerMethod { RejectionSmallN, MCMC, ChartPerturbation };

inline std::string to_string(SamplerMethod m) {
  switch (m) {
    case SamplerMethod::RejectionSmallN: return "rejection";
    case SamplerMethod::MCMC: return "mcmc";
    case SamplerMethod::ChartPerturbation: return "chart";
  }
  return "?";
}

inline SamplerMethod parse_sampler_method(const std::string& s) {
  if (s == "rejection") return SamplerMethod::RejectionSmallN;
  if (s == "mcmc") return SamplerMethod::MCMC;
  if (s == "chart") return SamplerMethod::ChartPerturbation;
  throw Error(ErrorKind::InvalidArgument, "unknown sampler method '" + s + "'");
}

struct SamplerConfig {
  StratumSignature stratum;
  int n_squares = 0;
  /// Proposals between two emitted states of one chain.
  long long mcmc_steps = 500'000;
  /// Proposals discarded at the start of every chain.
  long long burn_in = 10'000'000;
  /// Samples drawn from each independent chain.
  int samples_per_chain = 100;
  std::uint64_t seed = 0;
  SamplerMethod method = SamplerMethod::MCMC;
  /// Disk radius for the chart perturbation method.
  double radius = 0.05;
  /// Draw budget per sample for the rejection method.
  long long rejection_budget = 10'000'000;
};

/// N >= 25 g^2 keeps many integer holonomies in the scaled windows.
inline int default_square_count(const StratumSignature& s) {
  const int g = s.genus();
  return std::max(min_squares(s), 25 * g * g);
}

inline void validate(const SamplerConfig& c) {
  if (c.stratum.orders.empty() || c.stratum.total_order() % 2)
    throw Error(ErrorKind::InvalidArgument, "sampler needs a stratum with orders summing to an even number");
  if (c.n_squares < min_squares(c.stratum))
    throw Error(ErrorKind::InvalidArgument, "n_squares is below the smallest realizable count for " +
                                                c.stratum.to_string());
  if (c.mcmc_steps < 1 || c.burn_in < 0 || c.samples_per_chain < 1)
    throw Error(ErrorKind::InvalidArgument, "chain lengths must be positive");
  if (!(c.radius >= 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be nonnegative");
}

struct ChainDiagnostics {
  int chain = 0;
  int samples = 0;
  long long proposals = 0;
  long long accepted = 0;
  long long lattice_moves = 0;
};

struct SamplerManifest {
  SamplerConfig config;
  int samples = 0;
  int seed_squares = 0;
  std::vector<ChainDiagnostics> chains;

  double acceptance_rate() const {
    long long p = 0, a = 0;
    for (const auto& c : chains) {
      p += c.proposals;
      a += c.accepted;
    }
    return p ? static_cast<double>(a) / p : 0.0;
  }
};

inline json to_json(const SamplerConfig& c) {
  return json{{"stratum", c.stratum.orders},     {"n_squares", c.n_squares},
              {"mcmc_steps", c.mcmc_steps},      {"burn_in", c.burn_in},
              {"samples_per_chain", c.samples_per_chain},
              {"seed", c.seed},                  {"method", to_string(c.method)},
              {"radius", c.radius},              {"rejection_budget", c.rejection_budget}};
}

inline json to_json(const SamplerManifest& m) {
  json chains = json::array();
  for (const auto& c : m.chains)
    chains.push_back({{"chain", c.chain},
                      {"samples", c.samples},
                      {"proposals", c.proposals},
                      {"accepted", c.accepted},
                      {"lattice_moves", c.lattice_moves}});
  return json{{"config", to_json(m.config)},
              {"samples", m.samples},
              {"acceptance_rate", m.acceptance_rate()},
              {"chains", chains}};
}

namespace detail {

// Runs job(k) for k in [0, count) on up to `workers` threads. Results must be
// written by index so the outcome does not depend on scheduling.
template <class Job>
void parallel_for(int count, int workers, Job job) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int k; (k = next.fetch_add(1)) < count;) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline Origami rejection_sample(const StratumSignature& stratum, int n, Rng& rng, long long budget) {
  const auto want = stratum.canonical().orders;
  std::vector<int> hi(n), vi(n), stack;
  std::vector<char> seen(n);
  for (long long t = 0; t < budget; ++t) {
    Permutation h = identity_permutation(n), v = identity_permutation(n);
    rng.shuffle(h);
    rng.shuffle(v);
    if (commutator_orders(h, v, hi, vi, seen) == want && transitive(h, v, seen, stack))
      return Origami(std::move(h), std::move(v));
  }
  throw Error(ErrorKind::SeedNotFound, "rejection sampling found nothing in " + stratum.to_string());
}

}  // namespace detail

struct OrigamiSample {
  std::vector<Origami> origamis;
  SamplerManifest manifest;
};

/// Draws `count` square-tiled surfaces. Sample k belongs to chain
/// k / samples_per_chain and every chain has its own stream derived from the
/// seed, so the output does not depend on `workers`.
inline OrigamiSample sample_origamis(const SamplerConfig& cfg, int count, int workers = 1) {
  validate(cfg);
  if (cfg.method == SamplerMethod::ChartPerturbation)
    throw Error(ErrorKind::InvalidArgument, "chart perturbation produces surfaces, not origamis");
  OrigamiSample out;
  out.origamis.resize(count);
  out.manifest.config = cfg;
  out.manifest.samples = count;
  if (cfg.method == SamplerMethod::RejectionSmallN) {
    detail::parallel_for(count, workers, [&](int k) {
      Rng rng(derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(k)));
      out.origamis[k] = detail::rejection_sample(cfg.stratum, cfg.n_squares, rng, cfg.rejection_budget);
    });
    return out;
  }
  const Origami start = find_seed_origami(cfg.stratum, cfg.n_squares, cfg.seed);
  out.manifest.seed_squares = start.n_squares;
  const int chains = (count + cfg.samples_per_chain - 1) / cfg.samples_per_chain;
  out.manifest.chains.resize(chains);
  detail::parallel_for(chains, workers, [&](int c) {
    Rng rng(derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(c)));
    StratumChain chain(start, cfg.stratum);
    for (long long t = 0; t < cfg.burn_in; ++t) chain.step(rng);
    const int first = c * cfg.samples_per_chain;
    const int last = std::min(count, first + cfg.samples_per_chain);
    for (int k = first; k < last; ++k) {
      for (long long t = 0; t < cfg.mcmc_steps; ++t) chain.step(rng);
      out.origamis[k] = chain.state();
    }
    out.manifest.chains[c] = {c, last - first, chain.proposals(), chain.accepted(), chain.lattice_moves()};
  });
  return out;
}

struct SurfaceSample {
  std::vector<TranslationSurface> surfaces;
  SamplerManifest manifest;
};

/// Unit-area surfaces from any method. Origami methods are rescaled from N
/// unit squares; the chart method perturbs the seed origami.
inline SurfaceSample sample_surfaces(const SamplerConfig& cfg, int count, int workers = 1) {
  SurfaceSample out;
  if (cfg.method == SamplerMethod::ChartPerturbation) {
    validate(cfg);
    const auto base = build_from_origami(find_seed_origami(cfg.stratum, cfg.n_squares, cfg.seed)).normalize_area();
    out.surfaces.resize(count);
    out.manifest.config = cfg;
    out.manifest.samples = count;
    detail::parallel_for(count, workers, [&](int k) {
      Rng rng(derive_seed(cfg.seed, 3, static_cast<std::uint64_t>(k)));
      out.surfaces[k] = chart_perturbation_sampler(base, cfg.radius, rng);
    });
    return out;
  }
  auto o = sample_origamis(cfg, count, workers);
  out.manifest = std::move(o.manifest);
  out.surfaces.reserve(count);
  for (const auto& x : o.origamis) out.surfaces.push_back(build_from_origami(x).normalize_area());
  return out;
}

}  // namespace flatlab
