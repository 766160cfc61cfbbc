#include <gtest/gtest.h>

#include <random>

#include "harmbench/reference_metrics.hpp"
#include "oracles.hpp"

using namespace harmbench;

namespace {

VoxelGrid add_noise(const VoxelGrid& g, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(g.values().begin(), g.values().end());
  for (auto& x : v)
    if (x > 0) x = std::max(1e-3, x + amplitude * u(rng));
  return g.with_values(std::move(v));
}

}  // namespace

TEST(PairedMetrics, IdentityPair) {
  std::mt19937_64 rng(1);
  const auto g = oracle::random_grid(rng, {10, 10, 10});
  const auto r = paired_metrics(g, g);
  EXPECT_EQ(r.mae, 0.0);
  EXPECT_EQ(r.mse, 0.0);
  EXPECT_EQ(r.ssim, 1.0);
  EXPECT_TRUE(std::isinf(r.psnr_db) && r.psnr_db > 0);
}

TEST(PairedMetrics, PsnrFromMse) {
  EXPECT_NEAR(psnr_from_mse(0.01), 20.0, 1e-12);
  EXPECT_TRUE(std::isinf(psnr_from_mse(0.0)));
}

TEST(PairedMetrics, ConstantVolumesAtOppositeEnds) {
  // pred = 1 everywhere, gt = 2 everywhere: normalized to 0 and 1, every window constant.
  const VoxelGrid pred({8, 8, 8}, {}, std::vector<double>(512, 1.0));
  const VoxelGrid gt({8, 8, 8}, {}, std::vector<double>(512, 2.0));
  const auto r = paired_metrics(pred, gt);
  const double c1 = 1e-4;
  EXPECT_NEAR(r.ssim, c1 / (1 + c1), 1e-15);
  EXPECT_NEAR(r.ssim, 9.999e-5, 1e-8);
  const auto o = oracle::paired_metrics(pred, gt, 0.0, {});
  EXPECT_NEAR(r.ssim, o.ssim, 1e-15);
  EXPECT_EQ(r.ssim_windows, 8u);
  EXPECT_EQ(r.mae, 1.0);
}

TEST(PairedMetrics, MatchesDirectPerWindowOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto a = oracle::random_grid(rng, {8, 9, 10});
    const auto b = oracle::random_grid(rng, {8, 9, 10});
    for (SsimParams p : {SsimParams{}, SsimParams{3, 0.02, 0.05, 1.0}}) {
      const auto r = paired_metrics(a, b, {}, p);
      const auto o = oracle::paired_metrics(a, b, 0.0, p);
      EXPECT_NEAR(r.ssim, o.ssim, 1e-9);
      EXPECT_NEAR(r.mae, o.mae, 1e-12);
      EXPECT_NEAR(r.mse, o.mse, 1e-12);
      EXPECT_NEAR(r.psnr_db, o.psnr, 1e-9);
      EXPECT_LE(r.mae * r.mae, r.mse + 1e-15);
    }
  }
}

TEST(PairedMetrics, SsimSymmetric) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto a = oracle::random_grid(rng, {9, 9, 9});
    const auto b = oracle::random_grid(rng, {9, 9, 9});
    EXPECT_NEAR(paired_metrics(a, b).ssim, paired_metrics(b, a).ssim, 1e-12);
  }
}

TEST(PairedMetrics, PsnrDegradesWithNoise) {
  std::mt19937_64 rng(4);
  const auto gt = oracle::random_grid(rng, {12, 12, 12}, 0.3, 0.2, 0.8);
  double prev = kPsnrSentinel;
  for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
    const double psnr = paired_metrics(add_noise(gt, amp, 99), gt).psnr_db;
    EXPECT_LE(psnr, prev) << amp;
    prev = psnr;
  }
}

TEST(PairedMetrics, UnionForegroundCountsHallucinatedTissue) {
  std::vector<double> p(27, 0.0), g(27, 0.0);
  p[13] = 1.0;
  g[0] = 1.0;
  g[13] = 1.0;
  const auto r = paired_metrics(VoxelGrid({3, 3, 3}, {}, p), VoxelGrid({3, 3, 3}, {}, g), {}, {3, 0.01, 0.03, 1.0});
  EXPECT_EQ(r.foreground_voxels, 2u);
  EXPECT_EQ(r.mae, 0.5);
}

TEST(PairedMetrics, Errors) {
  const VoxelGrid a({8, 8, 8}, {}, std::vector<double>(512, 1.0));
  const VoxelGrid b({8, 8, 7}, {}, std::vector<double>(448, 1.0));
  const VoxelGrid zero({8, 8, 8}, {}, std::vector<double>(512, 0.0));
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code([&] { (void)paired_metrics(a, b); }), Errc::DimsMismatch);
  EXPECT_EQ(code([&] { (void)paired_metrics(zero, zero); }), Errc::EmptyForeground);
  EXPECT_EQ(code([&] { (void)paired_metrics(a, a); }), Errc::DegenerateRange);
  EXPECT_THROW((void)paired_metrics(a, a, {}, {4, 0.01, 0.03, 1.0}), Error);
}
