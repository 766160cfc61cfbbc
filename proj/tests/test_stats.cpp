#include <gtest/gtest.h>

#include <random>

#include "harmbench/stats.hpp"
#include "oracles.hpp"

using namespace harmbench;

TEST(MeanStd, Basics) {
  auto r = mean_std(std::vector<double>{1, 1, 1});
  EXPECT_EQ(r.mean, 1.0);
  EXPECT_EQ(r.std, 0.0);
  r = mean_std(std::vector<double>{0, 2});
  EXPECT_EQ(r.mean, 1.0);
  EXPECT_NEAR(r.std, std::sqrt(2.0), 1e-15);
}

TEST(MeanStd, SeededNormalSample) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(5.0, 2.0);
  std::vector<double> v(1000);
  for (auto& x : v) x = n(rng);
  const auto r = mean_std(v);
  EXPECT_NEAR(r.mean, 5.0, 0.2);
  EXPECT_NEAR(r.std, 2.0, 0.2);
}

TEST(MeanStd, SentinelsExcluded) {
  const double inf = std::numeric_limits<double>::infinity();
  const auto r = mean_std(MetricSeries{"psnr", {10, inf, 20}});
  EXPECT_EQ(r.mean, 15.0);
  EXPECT_EQ(r.n, 2u);
  EXPECT_EQ(r.sentinels, 1u);
  try {
    (void)mean_std(std::vector<double>{inf, inf});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AllSentinels);
  }
}

TEST(Spearman, HandCases) {
  EXPECT_EQ(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}), 1.0);
  EXPECT_EQ(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0);
  // 1 - 6 * 2 / (4 * 15)
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8, 1e-15);
}

TEST(Spearman, MonotoneInvariance) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(3 + rng() % 20), y(x.size());
    for (auto& v : x) v = n(rng);
    for (auto& v : y) v = n(rng);
    auto fx = x, gy = y;
    for (auto& v : fx) v = std::exp(v);
    for (auto& v : gy) v = 3 * v * v * v + 1;
    EXPECT_EQ(spearman(fx, gy), spearman(x, y));
    EXPECT_EQ(spearman(x, y), spearman(y, x));
    auto neg = y;
    for (auto& v : neg) v = -v;
    EXPECT_EQ(spearman(x, neg), -spearman(x, y));
  }
}

TEST(Spearman, TiesMatchBruteForceOnAllSmallSeries) {
  // Every pair of length-n series over {0,1,2} for n = 3..5, skipping constant ones.
  for (std::size_t n = 3; n <= 5; ++n) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= 3;
    auto series = [&](std::size_t code) {
      std::vector<double> v(n);
      for (std::size_t k = 0; k < n; ++k, code /= 3) v[k] = double(code % 3);
      return v;
    };
    for (std::size_t cx = 0; cx < total; ++cx) {
      const auto x = series(cx);
      EXPECT_EQ(average_ranks(x), oracle::average_ranks(x));
      for (std::size_t cy = 0; cy < total; ++cy) {
        const auto y = series(cy);
        const auto rx = oracle::average_ranks(x), ry = oracle::average_ranks(y);
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
            std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
          EXPECT_THROW((void)spearman(x, y), Error);
          continue;
        }
        EXPECT_NEAR(spearman(x, y), oracle::pearson_two_pass(rx, ry), 1e-12);
      }
    }
  }
}

TEST(Spearman, DropsSentinelPairs) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, inf, 2, 3}), 1.0);
}

TEST(Spearman, Errors) {
  auto code = [](auto x, auto y) {
    try {
      (void)spearman(x, y);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), Errc::LengthMismatch);
  EXPECT_EQ(code(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Errc::LengthMismatch);
  EXPECT_EQ(code(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Errc::ZeroRankVariance);
}

TEST(CorrelationMatrix, RowsAreProposedColsAreReference) {
  const std::vector<MetricSeries> rows{{"nwd_ip", {0.1, 0.5, 0.9, 0.7}}, {"ap", {1, 1, 1, 1}}};
  const std::vector<MetricSeries> cols{{"ssim", {0.2, 0.4, 0.8, 0.6}}, {"mae", {0.9, 0.5, 0.1, 0.3}}};
  const auto m = correlation_matrix(rows, cols);
  EXPECT_EQ(m.row_names, (std::vector<std::string>{"nwd_ip", "ap"}));
  EXPECT_EQ(m.rho[0][0], 1.0);
  EXPECT_EQ(m.rho[0][1], -1.0);
  EXPECT_TRUE(std::isnan(m.rho[1][0]));
}
