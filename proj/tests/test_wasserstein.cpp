#include <gtest/gtest.h>

#include <random>

#include "harmbench/wasserstein.hpp"
#include "oracles.hpp"

using namespace harmbench;

namespace {

EmpiricalDistribution dist(std::vector<double> v) { return EmpiricalDistribution::uniform(std::move(v)); }

std::vector<double> random_ints(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> u(0, 9);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<double> mixture(std::mt19937_64& rng, std::size_t n, double m1, double s1, double m2, double s2,
                            double w) {
  std::normal_distribution<double> a(m1, s1), b(m2, s2);
  std::bernoulli_distribution pick(w);
  std::vector<double> v(n);
  for (auto& x : v) x = pick(rng) ? a(rng) : b(rng);
  return v;
}

}  // namespace

TEST(Wasserstein, IdenticalIsZero) { EXPECT_EQ(wasserstein_1d(dist({1, 2, 3}), dist({1, 2, 3})), 0.0); }

TEST(Wasserstein, PointMasses) { EXPECT_EQ(wasserstein_1d(dist({0}), dist({5})), 5.0); }

TEST(Wasserstein, MatchesBruteForceMatchingOnSmallExample) {
  const double oracle_value = oracle::matching_w1({0, 0, 4}, {1, 3, 5});
  EXPECT_NEAR(oracle_value, 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(wasserstein_1d(dist({0, 0, 4}), dist({1, 3, 5})), 5.0 / 3.0, 1e-12);
}

TEST(Wasserstein, EqualSizesMatchPermutationOracle) {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const auto a = random_ints(rng, n), b = random_ints(rng, n);
    EXPECT_NEAR(wasserstein_1d(dist(a), dist(b)), oracle::matching_w1(a, b), 1e-9);
  }
}

TEST(Wasserstein, UnequalSizesMatchCdfIntegral) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_ints(rng, 1 + rng() % 8), b = random_ints(rng, 1 + rng() % 8);
    EXPECT_NEAR(wasserstein_1d(dist(a), dist(b)), oracle::cdf_integral_w1(a, b), 1e-9);
  }
}

TEST(Wasserstein, WeightedPathAgreesWithCdfIntegral) {
  // Weights 1/4 and 3/4 on a; compare with a replicated-sample uniform version.
  const auto weighted = EmpiricalDistribution::weighted({1.0, 4.0}, {1.0, 3.0});
  const auto replicated = dist({1, 4, 4, 4});
  const auto other = dist({0, 2, 7});
  EXPECT_NEAR(wasserstein_1d(weighted, other), oracle::cdf_integral_w1({1, 4, 4, 4}, {0, 2, 7}), 1e-12);
  EXPECT_NEAR(wasserstein_1d(weighted, other), wasserstein_1d(replicated, other), 1e-12);
}

TEST(Wasserstein, SymmetricExactly) {
  std::mt19937_64 rng(102);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(1 + rng() % 50), b(1 + rng() % 50), wa(a.size());
    for (auto& x : a) x = n(rng);
    for (auto& x : b) x = n(rng);
    for (auto& x : wa) x = 0.1 + std::abs(n(rng));
    EXPECT_EQ(wasserstein_1d(dist(a), dist(b)), wasserstein_1d(dist(b), dist(a)));
    const auto w = EmpiricalDistribution::weighted(a, wa);
    EXPECT_EQ(wasserstein_1d(w, dist(b)), wasserstein_1d(dist(b), w));
  }
}

TEST(Wasserstein, TriangleInequality) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    auto make = [&] {
      std::vector<double> v(1 + rng() % 20);
      for (auto& x : v) x = u(rng);
      return dist(v);
    };
    const auto a = make(), b = make(), c = make();
    EXPECT_LE(wasserstein_1d(a, c), wasserstein_1d(a, b) + wasserstein_1d(b, c) + 1e-9);
  }
}

TEST(Wasserstein, TranslationInvariance) {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(1 + rng() % 30), b(1 + rng() % 30);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    const double c = u(rng) - 5;
    const auto shift = [c](double v) { return v + c; };
    EXPECT_NEAR(wasserstein_1d(dist(a).transformed(shift), dist(b).transformed(shift)),
                wasserstein_1d(dist(a), dist(b)), 1e-9);
  }
  EXPECT_EQ(wasserstein_1d(dist({2.0}), dist({2.0}).transformed([](double v) { return v + 3.5; })), 3.5);
}

TEST(Wasserstein, BinnedCloseToExactOnMixtures) {
  std::mt19937_64 rng(105);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = dist(mixture(rng, 20000, 0.3, 0.05, 0.7, 0.05, 0.4));
    const auto b = dist(mixture(rng, 20000, 0.4, 0.06, 0.9, 0.04, 0.5));
    const double lo = std::min(a.min(), b.min()), hi = std::max(a.max(), b.max());
    const double exact = wasserstein_1d(a, b);
    const double binned = wasserstein_binned(to_histogram(a, 4096, lo, hi), to_histogram(b, 4096, lo, hi));
    EXPECT_LT(std::abs(binned - exact) / exact, 0.01);
  }
}

TEST(Nwd, PredictionEqualsInput) {
  const auto i = dist({1, 2, 3}), t = dist({5, 6, 9});
  const auto r = nwd(i, t, i);
  EXPECT_EQ(r.nwd_ip, 0.0);
  EXPECT_EQ(r.nwd_tp, 1.0);
}

TEST(Nwd, PredictionEqualsTarget) {
  const auto i = dist({1, 2, 3}), t = dist({5, 6, 9});
  const auto r = nwd(i, t, t);
  EXPECT_EQ(r.nwd_ip, 1.0);
  EXPECT_EQ(r.nwd_tp, 0.0);
}

TEST(Nwd, PointMassOvershoot) {
  const auto r = nwd(dist({0}), dist({10}), dist({12}));
  EXPECT_EQ(r.wd_ip, 12.0);
  EXPECT_EQ(r.wd_tp, 2.0);
  EXPECT_EQ(r.wd_it, 10.0);
  EXPECT_NEAR(r.nwd_ip, 1.2, 1e-15);
  EXPECT_NEAR(r.nwd_tp, 0.2, 1e-15);
  EXPECT_EQ(classify(r).kind, Verdict::OverCorrected);
}

TEST(Nwd, FieldsAreConsistentRatios) {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> a(40), b(50), c(30);
  for (auto& x : a) x = u(rng);
  for (auto& x : b) x = 2 + u(rng);
  for (auto& x : c) x = 1 + u(rng);
  const auto r = nwd(dist(a), dist(b), dist(c));
  EXPECT_NEAR(r.nwd_ip, r.wd_ip / r.wd_it, 1e-12);
  EXPECT_NEAR(r.nwd_tp, r.wd_tp / r.wd_it, 1e-12);
}

TEST(Nwd, ScaleInvariant) {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(0, 1), scale(0.01, 100);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(30), b(25), c(20);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = 1 + u(rng);
    for (auto& x : c) x = 0.5 + u(rng);
    const double k = scale(rng);
    auto times = [k](double v) { return v * k; };
    const auto r0 = nwd(dist(a), dist(b), dist(c));
    const auto r1 = nwd(dist(a).transformed(times), dist(b).transformed(times), dist(c).transformed(times));
    EXPECT_NEAR(r0.nwd_ip, r1.nwd_ip, 1e-9);
    EXPECT_NEAR(r0.nwd_tp, r1.nwd_tp, 1e-9);
  }
}

TEST(Nwd, DegenerateNormalizer) {
  try {
    (void)nwd(dist({1, 2}), dist({2, 1}), dist({3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateNormalizer);
  }
}

TEST(Nwd, AutoModeBinsAboveCap) {
  const auto i = dist({0, 1, 2, 3}), t = dist({4, 5, 6, 7}), p = dist({4, 5, 6, 7});
  const auto r = nwd(i, t, p, {.mode = WdMode::Auto, .bins = 4096, .exact_cap = 3});
  EXPECT_TRUE(r.binned);
  EXPECT_NEAR(r.nwd_ip, 1.0, 1e-3);
  EXPECT_FALSE(nwd(i, t, p).binned);
}

TEST(Verdict, InterpretationBands) {
  EXPECT_EQ(classify({.nwd_ip = 0.0, .nwd_tp = 1.0}, 0.05).kind, Verdict::NoHarmonization);
  EXPECT_EQ(classify({.nwd_ip = 1.0, .nwd_tp = 0.0}, 0.05).kind, Verdict::Perfect);
  EXPECT_EQ(classify({.nwd_ip = 1.2, .nwd_tp = 0.2}, 0.05).kind, Verdict::OverCorrected);
  EXPECT_EQ(classify({.nwd_ip = 0.906, .nwd_tp = 0.087}, 0.05).kind, Verdict::Partial);
  EXPECT_EQ(classify({.nwd_ip = 0.5, .nwd_tp = 0.5}, 0.05).kind, Verdict::Partial);
  EXPECT_THROW((void)classify({}, 0.5), Error);
  EXPECT_THROW((void)classify({}, 0.0), Error);
}
