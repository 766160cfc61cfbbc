#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "harmbench/error.hpp"

namespace harmbench {

/// One metric across triplets. Non-finite entries (e.g. PSNR of a perfect match) are
/// sentinels: counted, never averaged.
struct MetricSeries {
  std::string name;
  std::vector<double> values;

  std::size_t sentinel_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }));
  }
};

struct MeanStd {
  double mean = 0;
  double std = 0;
  std::size_t n = 0;
  std::size_t sentinels = 0;
};

/// Mean and sample standard deviation (n-1) over the finite values. A single value has std 0.
inline MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  double sum = 0;
  for (double v : values) {
    if (!std::isfinite(v)) {
      ++r.sentinels;
      continue;
    }
    sum += v;
    ++r.n;
  }
  if (r.n == 0) throw Error(Errc::AllSentinels, "series has no finite values");
  r.mean = sum / static_cast<double>(r.n);
  if (r.n > 1) {
    double ss = 0;
    for (double v : values)
      if (std::isfinite(v)) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(r.n - 1));
  }
  return r;
}

inline MeanStd mean_std(const MetricSeries& series) { return mean_std(series.values); }

/// 1-based ranks; tied values share the average of the ranks they span.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    // Ranks i+1..j+1; their mean is exact in binary as a half-integer.
    const double r = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw Error(Errc::ZeroRankVariance, "one series is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Spearman's rho with average ranks for ties. Pairs where either value is non-finite
/// are dropped before ranking.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(Errc::LengthMismatch, "series differ in length");
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    fx.push_back(x[i]);
    fy.push_back(y[i]);
  }
  if (fx.size() < 3) throw Error(Errc::LengthMismatch, "need at least 3 finite pairs");
  return pearson(average_ranks(fx), average_ranks(fy));
}

inline double spearman(const MetricSeries& x, const MetricSeries& y) { return spearman(x.values, y.values); }

/// Rows are the proposed metrics, columns the reference metrics.
struct CorrelationMatrix {
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;
  std::vector<std::vector<double>> rho;  // NaN where undefined (constant series)
};

inline CorrelationMatrix correlation_matrix(const std::vector<MetricSeries>& rows,
                                            const std::vector<MetricSeries>& cols) {
  CorrelationMatrix m;
  for (const auto& r : rows) m.row_names.push_back(r.name);
  for (const auto& c : cols) m.col_names.push_back(c.name);
  for (const auto& r : rows) {
    std::vector<double> line;
    for (const auto& c : cols) {
      try {
        line.push_back(spearman(r, c));
      } catch (const Error& e) {
        if (e.code() != Errc::ZeroRankVariance) throw;
        line.push_back(std::nan(""));
      }
    }
    m.rho.push_back(std::move(line));
  }
  return m;
}

}  // namespace harmbench
