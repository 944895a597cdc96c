#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "flatlab/experiment.hpp"
#include "flatlab/stats.hpp"
#include "test_surfaces.hpp"

using namespace flatlab;
using namespace flatlab::test;

namespace {

std::vector<long long> poisson_draws(double lambda, int n, std::uint64_t seed) {
  std::mt19937_64 e(seed);
  std::poisson_distribution<long long> d(lambda);
  std::vector<long long> v(n);
  for (auto& x : v) x = d(e);
  return v;
}

}  // namespace

TEST(FactorialMoment, SmallCases) {
  EXPECT_EQ(factorial_moment(std::vector<long long>{3}, 2), 6.0);
  EXPECT_EQ(factorial_moment(std::vector<long long>{0, 1}, 2), 0.0);
  const std::vector<long long> s{4, 0, 7, 2, 2};
  EXPECT_DOUBLE_EQ(factorial_moment(s, 1), 3.0);
  try {
    factorial_moment(std::vector<long long>{}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySamples);
  }
}

TEST(FactorialMoment, PoissonThirdMoment) {
  const auto s = poisson_draws(2.0, 1000000, 1);
  EXPECT_NEAR(factorial_moment(s, 3), 8.0, 3 * factorial_moment_stderr(s, 3));
}

TEST(JointMoment, Basics) {
  const std::vector<std::vector<long long>> one{{3}, {5}, {1}};
  EXPECT_DOUBLE_EQ(joint_factorial_moment(one, {2}), factorial_moment(std::vector<long long>{3, 5, 1}, 2));
  EXPECT_EQ(joint_factorial_moment({{0, 4}, {3, 0}}, {1, 1}), 0.0);
  try {
    joint_factorial_moment({{1, 2}}, {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(JointMoment, IndependentPoissonPair) {
  const int n = 400000;
  const auto a = poisson_draws(1.0, n, 2), b = poisson_draws(2.0, n, 3);
  std::vector<std::vector<long long>> rows(n);
  std::vector<long long> prod(n);
  for (int i = 0; i < n; ++i) {
    rows[i] = {a[i], b[i]};
    prod[i] = a[i] * b[i];
  }
  EXPECT_NEAR(joint_factorial_moment(rows, {1, 1}), 2.0, 3 * factorial_moment_stderr(prod, 1));
}

TEST(Lambda, ClosedForms) {
  EXPECT_NEAR(lambda_theory({0, 1}), 25.1327, 1e-4);
  EXPECT_DOUBLE_EQ(lambda_theory({0, 1}, LambdaMode::uniform_order(1)), lambda_theory({0, 1}));
  EXPECT_EQ(lambda_theory({1, 1}), 0.0);
  EXPECT_NEAR(lambda_theory({0, 0.5}), 2 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(lambda_theory({0, 1}, LambdaMode::uniform_order(2)), 2.25 * 2 * std::numbers::pi, 1e-12);
}

TEST(PoissonFit, PointMassAtZero) {
  const std::vector<long long> zeros(100, 0);
  const double lambda = 8 * std::numbers::pi;
  const auto f = poisson_fit(zeros, lambda);
  EXPECT_NEAR(f.tv_distance, 1 - std::exp(-lambda), 1e-9);
  EXPECT_LT(f.p_value_bucketed, 1e-6);
}

TEST(PoissonFit, PermutationInvariantAndBounded) {
  auto s = poisson_draws(3.0, 2000, 4);
  const auto f = poisson_fit(s, 3.5);
  std::reverse(s.begin(), s.end());
  const auto g = poisson_fit(s, 3.5);
  EXPECT_EQ(f.chi_square, g.chi_square);
  EXPECT_EQ(f.tv_distance, g.tv_distance);
  EXPECT_GE(f.tv_distance, 0.0);
  EXPECT_LE(f.tv_distance, 1.0);
}

TEST(PoissonFit, PValuesOfTrueModelAreNotSmall) {
  int low = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto f = poisson_fit(poisson_draws(4.0, 500, 100 + t), 4.0);
    EXPECT_GE(f.dof, 3);
    low += f.p_value_bucketed < 0.05;
  }
  EXPECT_GT(low, 0);
  EXPECT_LT(low, 25);
}

TEST(PoissonFit, ChiSquareTail) {
  // lambda = ln 2, 100 samples: expected 50, 50 ln 2 and the rest, so the
  // buckets are {0}, {1}, {>=2}; two degrees of freedom give p = exp(-x/2)
  const double lambda = std::log(2.0);
  const double e0 = 50, e1 = 50 * lambda, e2 = 100 - e0 - e1;
  for (int zeros : {50, 60}) {
    std::vector<long long> s(100, 1);
    std::fill(s.begin(), s.begin() + zeros, 0);
    const double x = std::pow(zeros - e0, 2) / e0 + std::pow(100 - zeros - e1, 2) / e1 + e2;
    const auto f = poisson_fit(s, lambda);
    EXPECT_EQ(f.dof, 2);
    EXPECT_NEAR(f.chi_square, x, 1e-9);
    EXPECT_NEAR(f.p_value_bucketed, std::exp(-x / 2), 1e-12);
  }
}

TEST(Volume, Asymptotic) {
  EXPECT_DOUBLE_EQ(vol_asymptotic(parse_stratum("2")), 4.0 / 3.0);
  for (int g = 2; g <= 8; ++g) {
    StratumSignature s{std::vector<int>(2 * g - 2, 1)};
    EXPECT_DOUBLE_EQ(vol_asymptotic(s) * std::pow(2.0, 2 * g - 2), 4.0);
  }
  EXPECT_DOUBLE_EQ(vol_asymptotic(parse_stratum("3,1,2")), vol_asymptotic(parse_stratum("2,3,1")));
}

TEST(Intervals, Parsing) {
  const auto v = parse_intervals("0:0.5,0.5:0.7");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1].b, 0.7);
  EXPECT_THROW(parse_intervals("0.5:0.2"), Error);
  EXPECT_THROW(parse_intervals("0:1,0.5:2"), Error);
  EXPECT_THROW(parse_intervals("x:1"), Error);
  EXPECT_THROW(parse_intervals("1"), Error);
}

TEST(SiegelVeech, LatticeDensityOnTorus) {
  // primitive integer vectors up to sign, counted directly
  const auto t = unit_torus(true);
  const int T = 100;
  long long n = 0;
  for (int x = -T; x <= T; ++x)
    for (int y = -T; y <= T; ++y)
      if (x * x + y * y <= T * T && std::gcd(x, y) == 1 && (y > 0 || (y == 0 && x > 0))) ++n;
  EXPECT_NEAR(per_surface_sv_estimate(t, T), n / (std::numbers::pi * T * T), 1e-12);
  EXPECT_NEAR(per_surface_sv_estimate(t, T), 3 / (std::numbers::pi * std::numbers::pi), 0.01);
  EXPECT_EQ(per_surface_sv_estimate(t, 0.5), 0.0);
}

TEST(SiegelVeech, LOrigamiStabilizes) {
  const auto s = build_from_origami(l_origami());
  const double a = per_surface_sv_estimate(s, 100), b = per_surface_sv_estimate(s, 200);
  EXPECT_NEAR(a / b, 1.0, 0.05);
}

TEST(SiegelVeech, MixedStrataRejected) {
  std::vector<TranslationSurface> v{build_from_origami(find_seed_origami(parse_stratum("1,1"), 20, 1)),
                                    build_from_origami(find_seed_origami(parse_stratum("2"), 20, 1))};
  try {
    sv_constant_estimate(v, {}, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MixedStrata);
  }
}

TEST(Experiment, PairsAndLoopsAddUp) {
  SamplerConfig cfg;
  cfg.stratum = parse_stratum("1,1,1,1");
  cfg.n_squares = 100;
  cfg.mcmc_steps = 20000;
  cfg.burn_in = 100000;
  cfg.seed = 11;
  const auto sample = sample_origamis(cfg, 20);
  std::vector<TranslationSurface> surfaces;
  for (const auto& o : sample.origamis) {
    surfaces.push_back(build_from_origami(o));
    const auto c = measure_surface(surfaces.back(), {{0, 1.0}, {1.0, 1.5}});
    EXPECT_EQ(c.pair_count + c.loop_count, c.interval_counts[0]);
    EXPECT_EQ(c.zeros, 4);
    EXPECT_LE(c.homologous_count, c.pair_count);
  }
  // the per-pair estimate over all six pairs is the mean of the fixed pairs
  double sum = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      sum += sv_constant_estimate(surfaces, {SvConfiguration::FixedZeroPair, i, j}, {0, 1.0});
  EXPECT_NEAR(sv_constant_estimate(surfaces, {SvConfiguration::FixedZeroPair, -1, -1}, {0, 1.0}), sum / 6, 1e-9);
}

TEST(Experiment, ReportIsRecomputableAndMonotone) {
  PoissonExperimentConfig cfg;
  cfg.sampler.stratum = parse_stratum("1,1,1,1");
  cfg.sampler.n_squares = 100;
  cfg.sampler.mcmc_steps = 20000;
  cfg.sampler.burn_in = 100000;
  cfg.sampler.samples_per_chain = 10;
  cfg.sampler.seed = 5;
  cfg.samples = 40;
  cfg.intervals = {{0, 0.5}, {0.5, 1.0}};
  cfg.lmin_eps = {0.1, 0.3, 0.5, 1.0, 3.0};
  const auto r = run_poisson_experiment(cfg);
  const auto again = summarize(cfg, r.manifest, r.raw);
  EXPECT_EQ(to_json(r).dump(), to_json(again).dump());
  EXPECT_DOUBLE_EQ(r.intervals[0].factorial_moments[0],
                   factorial_moment(interval_column(r.raw, 0), 1));
  for (std::size_t k = 1; k < r.lmin.size(); ++k) EXPECT_GE(r.lmin[k].fraction, r.lmin[k - 1].fraction);
  EXPECT_EQ(r.lmin.back().fraction, 1.0);
  EXPECT_NEAR(r.sv.aggregate_observed, r.sv.aggregate_predicted, 1e-9);
  cfg.workers = 3;
  EXPECT_EQ(raw_counts_csv(run_poisson_experiment(cfg)), raw_counts_csv(r));
}
