#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "flatlab/io.hpp"
#include "flatlab/saddle_scan.hpp"
#include "flatlab/sampling.hpp"
#include "flatlab/stats.hpp"

namespace flatlab {

struct SvConfiguration {
  enum Kind { FixedZeroPair, LoopAtZero, HomologousPair } kind = FixedZeroPair;
  /// Zero indices among the surface's zeros in vertex order; -1 averages over
  /// every admissible choice.
  int i = -1;
  int j = -1;
};

inline std::string to_string(SvConfiguration::Kind k) {
  switch (k) {
    case SvConfiguration::FixedZeroPair: return "fixed_zero_pair";
    case SvConfiguration::LoopAtZero: return "loop_at_zero";
    case SvConfiguration::HomologousPair: return "homologous_pair";
  }
  return "?";
}

/// What one surface contributes to the experiments. Counts are for the
/// window [a/g, b/g] after scaling the surface to unit area.
struct SurfaceCounts {
  std::vector<long long> interval_counts;
  long long pair_count = 0;        // first window, distinct zeros
  long long loop_count = 0;        // first window, a zero to itself
  long long homologous_count = 0;  // first window, distinct zeros, part of a homologous pair
  int zeros = 0;
  double lmin_scaled = 0.0;  // g * shortest length / sqrt(area)
};

namespace detail {

inline std::vector<int> zero_rank(const TranslationSurface& s) {
  std::vector<int> rank(s.vertex_count(), -1);
  int k = 0;
  for (const auto& c : s.cone_points())
    if (c.order > 0) rank[c.id] = k++;
  return rank;
}

inline double scaled_length(const TranslationSurface& s, double len) {
  return len * s.genus() / std::sqrt(s.area());
}

}  // namespace detail

inline SurfaceCounts measure_surface(const TranslationSurface& s, const std::vector<IntervalSpec>& intervals,
                                     bool with_lmin = true) {
  if (s.genus() < 2) throw Error(ErrorKind::InvalidArgument, "experiments need genus >= 2");
  SurfaceCounts out;
  double bmax = 0.0;
  for (const auto& iv : intervals) bmax = std::max(bmax, iv.b);
  const double unit = std::sqrt(s.area()) / s.genus();
  ScanOptions opt;
  const auto scan = enumerate_saddle_connections(s, bmax * unit, opt);
  const auto rank = detail::zero_rank(s);
  out.zeros = *std::max_element(rank.begin(), rank.end()) + 1;
  for (const auto& iv : intervals) {
    const LengthWindow w = interval_window(s, iv.a, iv.b);
    long long n = 0;
    for (const auto& c : scan.connections) n += w.contains(c.length2());
    out.interval_counts.push_back(n);
  }
  if (!intervals.empty()) {
    const LengthWindow w = interval_window(s, intervals[0].a, intervals[0].b);
    std::vector<char> homologous(scan.connections.size(), 0);
    for (auto [x, y] : detect_homologous_pairs(scan, s)) homologous[x] = homologous[y] = 1;
    for (std::size_t k = 0; k < scan.connections.size(); ++k) {
      const auto& c = scan.connections[k];
      if (!w.contains(c.length2())) continue;
      if (rank[c.start_cone] < 0 || rank[c.end_cone] < 0) continue;
      if (c.start_cone == c.end_cone) {
        ++out.loop_count;
      } else {
        ++out.pair_count;
        out.homologous_count += homologous[k];
      }
    }
  }
  if (with_lmin) out.lmin_scaled = detail::scaled_length(s, shortest_saddle_connection(s).length());
  return out;
}

/// Mean configuration count in the annulus divided by its Lebesgue area
/// pi (b^2 - a^2) / g^2 on unit-area surfaces.
inline double sv_constant_estimate(const std::vector<TranslationSurface>& surfaces, const SvConfiguration& conf,
                                   const IntervalSpec& annulus) {
  if (surfaces.empty()) throw Error(ErrorKind::EmptySamples, "no surfaces");
  check_interval(annulus);
  const auto stratum = surfaces[0].stratum_signature().canonical();
  double total = 0.0;
  for (const auto& s : surfaces) {
    if (s.stratum_signature().canonical() != stratum) throw Error(ErrorKind::MixedStrata, "surfaces from different strata");
    const double unit = std::sqrt(s.area()) / s.genus();
    const auto scan = enumerate_saddle_connections(s, annulus.b * unit);
    const LengthWindow w = interval_window(s, annulus.a, annulus.b);
    const auto rank = detail::zero_rank(s);
    const int zeros = *std::max_element(rank.begin(), rank.end()) + 1;
    std::vector<char> homologous(scan.connections.size(), 0);
    if (conf.kind == SvConfiguration::HomologousPair)
      for (auto [x, y] : detect_homologous_pairs(scan, s)) homologous[x] = homologous[y] = 1;
    auto matches = [&](int a, int b) {
      if (conf.kind == SvConfiguration::LoopAtZero) return a == b && (conf.i < 0 || a == conf.i);
      if (a == b) return false;
      if (conf.i < 0) return true;
      return (a == conf.i && b == conf.j) || (a == conf.j && b == conf.i);
    };
    if (conf.i >= zeros || conf.j >= zeros || (conf.kind != SvConfiguration::LoopAtZero && conf.i >= 0 && conf.i == conf.j))
      throw Error(ErrorKind::InvalidArgument, "zero index out of range");
    long long n = 0;
    for (std::size_t k = 0; k < scan.connections.size(); ++k) {
      const auto& c = scan.connections[k];
      const int a = rank[c.start_cone], b = rank[c.end_cone];
      if (a < 0 || b < 0 || !w.contains(c.length2()) || !matches(a, b)) continue;
      if (conf.kind == SvConfiguration::HomologousPair && !homologous[k]) continue;
      ++n;
    }
    double choices = 1.0;
    if (conf.i < 0) choices = conf.kind == SvConfiguration::LoopAtZero ? zeros : zeros * (zeros - 1) / 2.0;
    total += n / choices;
  }
  const int g = surfaces[0].genus();
  return total / surfaces.size() / (annulus.annulus_area() / (g * g));
}

/// |V cap B(0,T)| / (pi T^2), with each unoriented connection counted once.
inline double per_surface_sv_estimate(const TranslationSurface& s, double T) {
  ScanOptions opt;
  opt.with_anchors = false;
  const auto scan = enumerate_saddle_connections(s, T, opt);
  return static_cast<double>(scan.connections.size()) / (std::numbers::pi * T * T);
}

struct PoissonExperimentConfig {
  SamplerConfig sampler;
  int samples = 2000;
  std::vector<IntervalSpec> intervals{{0.0, 0.5}};
  int r_max = 4;
  LambdaMode mode;
  std::vector<double> lmin_eps{0.05, 0.1, 0.2, 0.5};
  int workers = 1;
};

struct IntervalReport {
  IntervalSpec interval;
  double lambda = 0.0;
  std::vector<double> factorial_moments;  // r = 1..r_max
  std::vector<double> factorial_moment_stderr;
  PoissonFit fit;
};

struct SvReport {
  double fixed_zero_pair = 0.0;
  double loop_at_zero = 0.0;
  double homologous_pair = 0.0;
  double pair_theory = 0.0;  // (m_1+1)(m_2+1) for the first two zeros
  double aggregate_observed = 0.0;
  double aggregate_predicted = 0.0;
};

struct LminReport {
  double eps = 0.0;
  double fraction = 0.0;
  double theory = 0.0;
  double stderr_theory = 0.0;
};

struct ExperimentReport {
  PoissonExperimentConfig config;
  SamplerManifest manifest;
  std::vector<SurfaceCounts> raw;
  std::vector<IntervalReport> intervals;
  std::vector<std::pair<std::vector<int>, double>> joint_moments;
  std::vector<double> correlations;  // consecutive interval pairs
  SvReport sv;
  std::vector<LminReport> lmin;
};

inline std::vector<long long> interval_column(const std::vector<SurfaceCounts>& raw, std::size_t k) {
  std::vector<long long> v;
  v.reserve(raw.size());
  for (const auto& r : raw) v.push_back(r.interval_counts[k]);
  return v;
}

inline double lmin_fraction(const std::vector<SurfaceCounts>& raw, double eps) {
  if (raw.empty()) throw Error(ErrorKind::EmptySamples, "no samples");
  long long hit = 0;
  for (const auto& r : raw) hit += r.lmin_scaled < eps;
  return static_cast<double>(hit) / raw.size();
}

inline LminReport lmin_report(const std::vector<SurfaceCounts>& raw, double eps) {
  LminReport r;
  r.eps = eps;
  r.fraction = lmin_fraction(raw, eps);
  r.theory = 1.0 - std::exp(-8.0 * std::numbers::pi * eps * eps);
  r.stderr_theory = std::sqrt(r.theory * (1.0 - r.theory) / raw.size());
  return r;
}

/// Recomputes every statistic from raw per-surface counts.
inline ExperimentReport summarize(const PoissonExperimentConfig& cfg, const SamplerManifest& manifest,
                                  std::vector<SurfaceCounts> raw) {
  if (raw.empty()) throw Error(ErrorKind::EmptySamples, "no samples");
  ExperimentReport rep;
  rep.config = cfg;
  rep.manifest = manifest;
  rep.raw = std::move(raw);
  const std::size_t k = cfg.intervals.size();
  std::vector<std::vector<long long>> columns;
  for (std::size_t i = 0; i < k; ++i) {
    columns.push_back(interval_column(rep.raw, i));
    IntervalReport ir;
    ir.interval = cfg.intervals[i];
    ir.lambda = lambda_theory(ir.interval, cfg.mode);
    for (int r = 1; r <= cfg.r_max; ++r) {
      ir.factorial_moments.push_back(factorial_moment(columns.back(), r));
      ir.factorial_moment_stderr.push_back(factorial_moment_stderr(columns.back(), r));
    }
    ir.fit = poisson_fit(columns.back(), ir.lambda);
    rep.intervals.push_back(std::move(ir));
  }
  if (k >= 2) {
    std::vector<std::vector<long long>> rows(rep.raw.size());
    for (std::size_t s = 0; s < rep.raw.size(); ++s) rows[s] = rep.raw[s].interval_counts;
    std::vector<int> ones(k, 1);
    rep.joint_moments.push_back({ones, joint_factorial_moment(rows, ones)});
    for (std::size_t i = 0; i + 1 < k; ++i) rep.correlations.push_back(correlation(columns[i], columns[i + 1]));
  }
  // Siegel-Veech constants on the first window
  const auto& stratum = cfg.sampler.stratum;
  const int g = stratum.genus();
  const double area = cfg.intervals[0].annulus_area() / (g * g);
  double pair = 0, loop = 0, hom = 0;
  for (const auto& r : rep.raw) {
    const double pairs = r.zeros * (r.zeros - 1) / 2.0;
    if (pairs > 0) {
      pair += r.pair_count / pairs;
      hom += r.homologous_count / pairs;
    }
    loop += static_cast<double>(r.loop_count) / r.zeros;
  }
  const double m = static_cast<double>(rep.raw.size());
  rep.sv.fixed_zero_pair = pair / m / area;
  rep.sv.homologous_pair = hom / m / area;
  rep.sv.loop_at_zero = loop / m / area;
  if (stratum.orders.size() >= 2) rep.sv.pair_theory = (stratum.orders[0] + 1.0) * (stratum.orders[1] + 1.0);
  const double nz = static_cast<double>(stratum.orders.size());
  rep.sv.aggregate_observed = rep.intervals[0].factorial_moments[0];
  rep.sv.aggregate_predicted = (nz * (nz - 1) / 2 * rep.sv.fixed_zero_pair + nz * rep.sv.loop_at_zero) * area;
  for (double eps : cfg.lmin_eps) rep.lmin.push_back(lmin_report(rep.raw, eps));
  return rep;
}

/// Samples, measures and summarizes. Sampling and measuring are split across
/// `workers` threads; results are indexed by sample, so they do not depend on
/// the worker count.
inline ExperimentReport run_poisson_experiment(const PoissonExperimentConfig& cfg) {
  if (cfg.intervals.empty()) throw Error(ErrorKind::InvalidArgument, "no intervals");
  check_disjoint(cfg.intervals);
  if (cfg.samples < 1) throw Error(ErrorKind::EmptySamples, "no samples requested");
  if (cfg.r_max < 1) throw Error(ErrorKind::InvalidArgument, "r_max must be >= 1");
  if (cfg.sampler.stratum.genus() < 2) throw Error(ErrorKind::InvalidArgument, "experiments need genus >= 2");
  if (cfg.sampler.method == SamplerMethod::ChartPerturbation)
    throw Error(ErrorKind::InvalidArgument, "experiments run on square-tiled samples");
  auto sample = sample_origamis(cfg.sampler, cfg.samples, cfg.workers);
  std::vector<SurfaceCounts> raw(cfg.samples);
  detail::parallel_for(cfg.samples, cfg.workers, [&](int k) {
    raw[k] = measure_surface(build_from_origami(sample.origamis[k]), cfg.intervals);
  });
  return summarize(cfg, sample.manifest, std::move(raw));
}

/// Fraction of samples with l_min < eps / g next to 1 - exp(-8 pi eps^2).
inline LminReport lmin_experiment(const PoissonExperimentConfig& cfg, double eps) {
  return lmin_report(run_poisson_experiment(cfg).raw, eps);
}

// reports

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline json to_json(const PoissonFit& f) {
  return json{{"chi_square", f.chi_square}, {"dof", f.dof}, {"p_value_bucketed", f.p_value_bucketed},
              {"tv_distance", f.tv_distance}};
}

inline json to_json(const PoissonExperimentConfig& c) {
  json iv = json::array();
  for (const auto& i : c.intervals) iv.push_back({i.a, i.b});
  return json{{"sampler", to_json(c.sampler)},
              {"samples", c.samples},
              {"intervals", iv},
              {"r_max", c.r_max},
              {"lambda_mode", c.mode.kind == LambdaMode::Principal ? json("principal") : json{{"uniform_order", c.mode.m}}},
              {"lmin_eps", c.lmin_eps}};
}

/// Worker count is left out so the document is identical across runs that
/// differ only in parallelism.
inline json to_json(const ExperimentReport& r) {
  json intervals = json::array();
  for (const auto& i : r.intervals)
    intervals.push_back({{"a", i.interval.a},
                         {"b", i.interval.b},
                         {"lambda_theory", i.lambda},
                         {"factorial_moments", i.factorial_moments},
                         {"factorial_moment_stderr", i.factorial_moment_stderr},
                         {"poisson_fit", to_json(i.fit)}});
  json joint = json::array();
  for (const auto& [rv, v] : r.joint_moments) joint.push_back({{"r", rv}, {"value", v}});
  json lmin = json::array();
  for (const auto& l : r.lmin)
    lmin.push_back({{"eps", l.eps}, {"fraction", l.fraction}, {"theory", l.theory}, {"stderr_theory", l.stderr_theory}});
  json raw = json::array();
  for (const auto& x : r.raw)
    raw.push_back({{"counts", x.interval_counts},
                   {"pairs", x.pair_count},
                   {"loops", x.loop_count},
                   {"homologous", x.homologous_count},
                   {"zeros", x.zeros},
                   {"lmin_scaled", x.lmin_scaled}});
  return json{{"config", to_json(r.config)},
              {"seed", r.config.sampler.seed},
              {"raw", raw},
              {"manifest", to_json(r.manifest)},
              {"intervals", intervals},
              {"joint_factorial_moments", joint},
              {"interval_correlations", r.correlations},
              {"siegel_veech",
               {{"fixed_zero_pair", r.sv.fixed_zero_pair},
                {"loop_at_zero", r.sv.loop_at_zero},
                {"homologous_pair", r.sv.homologous_pair},
                {"fixed_zero_pair_theory", r.sv.pair_theory},
                {"aggregate_observed", r.sv.aggregate_observed},
                {"aggregate_predicted", r.sv.aggregate_predicted}}},
              {"lmin", lmin}};
}

/// One row per sample; every statistic in the report is recomputable from it.
inline std::string raw_counts_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "# seed=" << r.config.sampler.seed << " config=" << to_json(r.config).dump() << "\n";
  os << "sample";
  for (std::size_t i = 0; i < r.config.intervals.size(); ++i) os << ",n" << i;
  os << ",pairs,loops,homologous,zeros,lmin_scaled\n";
  for (std::size_t s = 0; s < r.raw.size(); ++s) {
    const auto& x = r.raw[s];
    os << s;
    for (long long n : x.interval_counts) os << "," << n;
    os << "," << x.pair_count << "," << x.loop_count << "," << x.homologous_count << "," << x.zeros << ","
       << detail::fmt(x.lmin_scaled) << "\n";
  }
  return os.str();
}

/// Columns k, empirical frequency and Poisson pmf, one block per window.
inline std::string plot_data(const ExperimentReport& r) {
  std::ostringstream os;
  os << "# seed=" << r.config.sampler.seed << " config=" << to_json(r.config).dump() << "\n";
  for (std::size_t i = 0; i < r.intervals.size(); ++i) {
    const auto col = interval_column(r.raw, i);
    const long long top = std::max<long long>(*std::max_element(col.begin(), col.end()),
                                              static_cast<long long>(r.intervals[i].lambda * 2 + 5));
    os << "# window " << i << " [" << r.intervals[i].interval.a << "," << r.intervals[i].interval.b
       << "] lambda=" << detail::fmt(r.intervals[i].lambda) << "\n# k empirical poisson\n";
    for (long long k = 0; k <= top; ++k) {
      const double emp = static_cast<double>(std::count(col.begin(), col.end(), k)) / col.size();
      os << k << " " << detail::fmt(emp) << " " << detail::fmt(poisson_pmf(static_cast<int>(k), r.intervals[i].lambda))
         << "\n";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace flatlab
