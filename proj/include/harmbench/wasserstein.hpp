#pragma once

// Order-1 Wasserstein distance on the line and the normalized harmonization metrics
// nWD(i,p) = WD(i,p) / WD(i,t) and nWD(t,p) = WD(t,p) / WD(i,t).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "harmbench/distribution.hpp"
#include "harmbench/error.hpp"

namespace harmbench {

namespace detail {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Both distributions equal-weight: quantile breakpoints are k/n and l/m, compared exactly
// as the integers k*m and l*n.
inline double wasserstein_uniform(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<std::uint64_t>(a.size());
  const auto m = static_cast<std::uint64_t>(b.size());
  const double total = static_cast<double>(n) * static_cast<double>(m);
  CompensatedSum acc;
  std::size_t ia = 0, ib = 0;
  std::uint64_t pos = 0;  // current quantile times n*m
  while (ia < a.size() && ib < b.size()) {
    const std::uint64_t end_a = (ia + 1) * m;
    const std::uint64_t end_b = (ib + 1) * n;
    const std::uint64_t next = std::min(end_a, end_b);
    const double gap = std::abs(a[ia] - b[ib]);
    if (gap != 0.0) acc.add(gap * (static_cast<double>(next - pos) / total));
    pos = next;
    if (end_a <= end_b) ++ia;
    if (end_b <= end_a) ++ib;
  }
  return acc.value();
}

inline double wasserstein_weighted(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto av = a.values(), aw = a.weights();
  const auto bv = b.values(), bw = b.weights();
  CompensatedSum acc, ca, cb;
  ca.add(aw[0]);
  cb.add(bw[0]);
  std::size_t ia = 0, ib = 0;
  double pos = 0.0;
  while (true) {
    const double end_a = ia + 1 == av.size() ? 1.0 : ca.value();
    const double end_b = ib + 1 == bv.size() ? 1.0 : cb.value();
    const double next = std::min(end_a, end_b);
    const double gap = std::abs(av[ia] - bv[ib]);
    if (next > pos && gap != 0.0) acc.add(gap * (next - pos));
    pos = std::max(pos, next);
    const bool step_a = end_a <= end_b, step_b = end_b <= end_a;
    if (step_a) {
      if (++ia == av.size()) break;
      ca.add(aw[ia]);
    }
    if (step_b) {
      if (++ib == bv.size()) break;
      cb.add(bw[ib]);
    }
  }
  return acc.value();
}

}  // namespace detail

/// Exact W1 between two empirical distributions by merging their quantile breakpoints.
/// Symmetric in its arguments bit for bit.
inline double wasserstein_1d(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.is_uniform() && b.is_uniform()) return detail::wasserstein_uniform(a.values(), b.values());
  return detail::wasserstein_weighted(a, b);
}

/// W1 between two histograms on identical edges, each bin's mass placed at its centre.
inline double wasserstein_binned(const Histogram& a, const Histogram& b) {
  if (a.edges != b.edges) throw Error(Errc::InvalidRange, "histograms must share bin edges");
  double ta = 0, tb = 0;
  for (std::size_t k = 0; k < a.bins(); ++k) {
    ta += a.counts[k];
    tb += b.counts[k];
  }
  if (!(ta > 0 && tb > 0)) throw Error(Errc::InvalidRange, "histogram has no mass");
  detail::CompensatedSum acc;
  double cdf_a = 0, cdf_b = 0;
  for (std::size_t k = 0; k + 1 < a.bins(); ++k) {
    cdf_a += a.counts[k] / ta;
    cdf_b += b.counts[k] / tb;
    const double c0 = 0.5 * (a.edges[k] + a.edges[k + 1]);
    const double c1 = 0.5 * (a.edges[k + 1] + a.edges[k + 2]);
    acc.add(std::abs(cdf_a - cdf_b) * (c1 - c0));
  }
  return acc.value();
}

enum class WdMode { Auto, Exact, Binned };

struct WdOptions {
  WdMode mode = WdMode::Auto;
  std::size_t bins = 4096;
  /// Auto mode switches to the binned path when any distribution exceeds this many samples.
  std::size_t exact_cap = std::size_t{1} << 24;
  /// Normalizer floor, relative to the joint intensity range of input and target.
  double eps_relative = 1e-9;
};

struct WdPair {
  double nwd_ip = 0;
  double nwd_tp = 0;
  double wd_it = 0;
  double wd_ip = 0;
  double wd_tp = 0;
  bool binned = false;
};

/// Normalized distances of prediction `p` to input `i` and target `t`.
inline WdPair nwd(const EmpiricalDistribution& i, const EmpiricalDistribution& t, const EmpiricalDistribution& p,
                  const WdOptions& opt = {}) {
  const bool binned =
      opt.mode == WdMode::Binned ||
      (opt.mode == WdMode::Auto && std::max({i.size(), t.size(), p.size()}) > opt.exact_cap);
  WdPair r;
  r.binned = binned;
  if (binned) {
    const double lo = std::min({i.min(), t.min(), p.min()});
    double hi = std::max({i.max(), t.max(), p.max()});
    if (!(hi > lo)) hi = lo + 1.0;
    const auto hi_ = to_histogram(i, opt.bins, lo, hi);
    const auto ht = to_histogram(t, opt.bins, lo, hi);
    const auto hp = to_histogram(p, opt.bins, lo, hi);
    r.wd_it = wasserstein_binned(hi_, ht);
    r.wd_ip = wasserstein_binned(hi_, hp);
    r.wd_tp = wasserstein_binned(ht, hp);
  } else {
    r.wd_it = wasserstein_1d(i, t);
    r.wd_ip = wasserstein_1d(i, p);
    r.wd_tp = wasserstein_1d(t, p);
  }
  const double range = std::max(i.max(), t.max()) - std::min(i.min(), t.min());
  const double eps = opt.eps_relative * range;
  if (!(r.wd_it > eps))
    throw Error(Errc::DegenerateNormalizer,
                "WD(i,t)=" + std::to_string(r.wd_it) + ": input and target distributions are indistinguishable");
  r.nwd_ip = r.wd_ip / r.wd_it;
  r.nwd_tp = r.wd_tp / r.wd_it;
  return r;
}

enum class Verdict { NoHarmonization, Perfect, Partial, OverCorrected };

inline std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::NoHarmonization: return "NoHarmonization";
    case Verdict::Perfect: return "Perfect";
    case Verdict::Partial: return "Partial";
    case Verdict::OverCorrected: return "OverCorrected";
  }
  return "Partial";
}

inline Verdict parse_verdict(std::string_view s) {
  for (auto v : {Verdict::NoHarmonization, Verdict::Perfect, Verdict::Partial, Verdict::OverCorrected})
    if (verdict_name(v) == s) return v;
  throw Error(Errc::InvalidArgument, "unknown verdict '" + std::string(s) + "'");
}

struct HarmonizationVerdict {
  Verdict kind = Verdict::Partial;
  double tolerance = 0.05;
};

/// Bands around the reference points (0,1) = untouched and (1,0) = fully harmonized;
/// nWD(i,p) beyond 1 + tol means the prediction overshot the target.
inline HarmonizationVerdict classify(const WdPair& pair, double tol = 0.05) {
  if (!(tol > 0 && tol < 0.5)) throw Error(Errc::InvalidArgument, "verdict tolerance must lie in (0, 0.5)");
  Verdict kind = Verdict::Partial;
  if (pair.nwd_ip <= tol && std::abs(pair.nwd_tp - 1.0) <= tol)
    kind = Verdict::NoHarmonization;
  else if (std::abs(pair.nwd_ip - 1.0) <= tol && pair.nwd_tp <= tol)
    kind = Verdict::Perfect;
  else if (pair.nwd_ip > 1.0 + tol)
    kind = Verdict::OverCorrected;
  return {kind, tol};
}

}  // namespace harmbench
