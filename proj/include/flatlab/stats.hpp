#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "flatlab/stratum.hpp"
#include "flatlab/vector.hpp"

namespace flatlab {

/// Length window [a/g, b/g] on a unit-area surface, given by (a, b).
struct IntervalSpec {
  double a = 0.0;
  double b = 1.0;

  double annulus_area() const { return std::numbers::pi * (b * b - a * a); }
};

inline void check_interval(const IntervalSpec& i) {
  if (!(i.a >= 0.0 && i.b > i.a)) throw Error(ErrorKind::InvalidArgument, "interval needs 0 <= a < b");
}

inline void check_disjoint(std::vector<IntervalSpec> v) {
  for (const auto& i : v) check_interval(i);
  std::sort(v.begin(), v.end(), [](const IntervalSpec& x, const IntervalSpec& y) { return x.a < y.a; });
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k].a < v[k - 1].b) throw Error(ErrorKind::InvalidArgument, "intervals overlap");
}

/// Parses "a:b[,a:b...]".
inline std::vector<IntervalSpec> parse_intervals(const std::string& text) {
  std::vector<IntervalSpec> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "interval '" + item + "' is not a:b");
    IntervalSpec iv;
    try {
      std::size_t ua = 0, ub = 0;
      const std::string sa = item.substr(0, colon), sb = item.substr(colon + 1);
      iv.a = std::stod(sa, &ua);
      iv.b = std::stod(sb, &ub);
      if (ua != sa.size() || ub != sb.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "interval '" + item + "' is not a:b");
    }
    out.push_back(iv);
    pos = comma + 1;
  }
  check_disjoint(out);
  return out;
}

/// (n)_r = n (n-1) ... (n-r+1).
inline double falling_factorial(long long n, int r) {
  double p = 1.0;
  for (int k = 0; k < r; ++k) p *= static_cast<double>(n - k);
  return p;
}

inline double factorial_moment(std::span<const long long> samples, int r) {
  if (samples.empty()) throw Error(ErrorKind::EmptySamples, "no samples");
  if (r < 1) throw Error(ErrorKind::InvalidArgument, "factorial moment order must be >= 1");
  double sum = 0.0;
  for (long long n : samples) sum += falling_factorial(n, r);
  return sum / static_cast<double>(samples.size());
}

/// Standard error of factorial_moment, from the sample variance of (n)_r.
inline double factorial_moment_stderr(std::span<const long long> samples, int r) {
  const double m = factorial_moment(samples, r);
  if (samples.size() < 2) return 0.0;
  double ss = 0.0;
  for (long long n : samples) ss += std::pow(falling_factorial(n, r) - m, 2);
  return std::sqrt(ss / static_cast<double>(samples.size() - 1) / static_cast<double>(samples.size()));
}

inline double joint_factorial_moment(const std::vector<std::vector<long long>>& samples, const std::vector<int>& r) {
  if (samples.empty()) throw Error(ErrorKind::EmptySamples, "no samples");
  double sum = 0.0;
  for (const auto& s : samples) {
    if (s.size() != r.size()) throw Error(ErrorKind::DimensionMismatch, "sample and order vectors differ in length");
    double p = 1.0;
    for (std::size_t i = 0; i < r.size(); ++i) p *= falling_factorial(s[i], r[i]);
    sum += p;
  }
  return sum / static_cast<double>(samples.size());
}

struct LambdaMode {
  enum Kind { Principal, UniformOrder } kind = Principal;
  int m = 1;

  static LambdaMode principal() { return {}; }
  static LambdaMode uniform_order(int m) { return {UniformOrder, m}; }
};

/// Limiting Poisson mean of the count in the window.
inline double lambda_theory(const IntervalSpec& i, LambdaMode mode = {}) {
  const double d = i.b * i.b - i.a * i.a;
  if (mode.kind == LambdaMode::Principal) return 8.0 * std::numbers::pi * d;
  if (mode.m < 1) throw Error(ErrorKind::InvalidArgument, "zero order must be >= 1");
  const double q = (mode.m + 1.0) / mode.m;
  return q * q * 2.0 * std::numbers::pi * d;
}

inline double poisson_pmf(int k, double lambda) {
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

struct PoissonFit {
  double chi_square = 0.0;
  int dof = 0;
  double p_value_bucketed = 1.0;
  double tv_distance = 0.0;
};

/// Chi-square against Poisson(lambda) with adjacent buckets merged until each
/// expects at least five samples; the last bucket is the upper tail.
inline PoissonFit poisson_fit(std::span<const long long> samples, double lambda) {
  if (samples.empty()) throw Error(ErrorKind::EmptySamples, "no samples");
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be positive");
  const double n = static_cast<double>(samples.size());
  long long kmax = *std::max_element(samples.begin(), samples.end());
  kmax = std::max<long long>(kmax, static_cast<long long>(std::ceil(lambda + 10.0 * std::sqrt(lambda) + 10.0)));
  std::vector<double> observed(kmax + 1, 0.0), pmf(kmax + 1, 0.0);
  for (long long x : samples) observed[x] += 1.0;
  double below = 0.0;
  for (long long k = 0; k < kmax; ++k) below += pmf[k] = poisson_pmf(static_cast<int>(k), lambda);
  pmf[kmax] = std::max(0.0, 1.0 - below);  // tail k >= kmax

  PoissonFit fit;
  double tv = 0.0;
  for (long long k = 0; k <= kmax; ++k) tv += std::abs(observed[k] / n - pmf[k]);
  fit.tv_distance = std::min(1.0, 0.5 * tv);

  std::vector<double> obs_b, exp_b;
  double o = 0.0, e = 0.0;
  for (long long k = 0; k <= kmax; ++k) {
    o += observed[k];
    e += n * pmf[k];
    if (e >= 5.0) {
      obs_b.push_back(o);
      exp_b.push_back(e);
      o = e = 0.0;
    }
  }
  if (!obs_b.empty()) {
    obs_b.back() += o;
    exp_b.back() += e;
  }
  if (obs_b.size() < 2) return fit;
  for (std::size_t b = 0; b < obs_b.size(); ++b) fit.chi_square += std::pow(obs_b[b] - exp_b[b], 2) / exp_b[b];
  fit.dof = static_cast<int>(obs_b.size()) - 1;
  fit.p_value_bucketed = boost::math::gamma_q(fit.dof / 2.0, fit.chi_square / 2.0);
  return fit;
}

/// Leading term of the Masur-Veech volume of the stratum, 4 / prod(m_i + 1).
inline double vol_asymptotic(const StratumSignature& s) {
  double p = 1.0;
  for (int m : s.orders) p *= m + 1.0;
  return 4.0 / p;
}

/// Pearson correlation; 0 when either side is constant.
inline double correlation(std::span<const long long> x, std::span<const long long> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "samples differ in length");
  if (x.empty()) throw Error(ErrorKind::EmptySamples, "no samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

}  // namespace flatlab
